#ifndef HSBM_PARALLEL_HPP
#define HSBM_PARALLEL_HPP

#include <cstddef>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace hsbm {

// Worker count from HSBM_WORKERS, defaulting to 1.
inline unsigned worker_count() {
    if (const char* env = std::getenv("HSBM_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

// Runs body(worker, index) for index in [0, count). Indices are split into
// contiguous blocks, one per worker, so results written by index are
// identical for any worker count.
template <class Body>
void parallel_for(std::size_t count, Body&& body, unsigned workers = worker_count()) {
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(0u, i);
        return;
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t block = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::size_t begin = w * block;
                const std::size_t end = std::min(count, begin + block);
                for (std::size_t i = begin; i < end; ++i) body(w, i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace hsbm

#endif  // HSBM_PARALLEL_HPP
