#include "hsbm/hypergraph.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "hsbm/rng.hpp"

namespace hsbm {

SpinAssignment::SpinAssignment(std::vector<std::int8_t> spins) : spins_(std::move(spins)) {
    for (auto s : spins_) {
        if (s != 1 && s != -1) throw std::invalid_argument("spins must be +1 or -1");
    }
}

std::size_t SpinAssignment::count_plus() const {
    return static_cast<std::size_t>(std::count(spins_.begin(), spins_.end(), std::int8_t{1}));
}

SpinAssignment SpinAssignment::negated() const {
    std::vector<std::int8_t> out(spins_.size());
    std::transform(spins_.begin(), spins_.end(), out.begin(), [](std::int8_t s) {
        return static_cast<std::int8_t>(-s);
    });
    return SpinAssignment(std::move(out));
}

Hypergraph::Hypergraph(std::uint32_t n, std::uint32_t d, const std::vector<std::vector<Vertex>>& edges)
    : n_(n), d_(d) {
    if (d < 2) throw std::invalid_argument("uniformity d must be at least 2");
    std::vector<std::vector<Vertex>> sorted;
    sorted.reserve(edges.size());
    for (const auto& e : edges) {
        if (e.size() != d) {
            throw std::invalid_argument("edge of size " + std::to_string(e.size()) + " in a " +
                                        std::to_string(d) + "-uniform hypergraph");
        }
        auto c = e;
        std::sort(c.begin(), c.end());
        if (std::adjacent_find(c.begin(), c.end()) != c.end()) {
            throw std::invalid_argument("edge with a repeated vertex");
        }
        if (c.back() >= n) throw std::invalid_argument("edge vertex out of range");
        sorted.push_back(std::move(c));
    }
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("duplicate hyperedge");
    }
    flat_.reserve(sorted.size() * d);
    for (const auto& e : sorted) flat_.insert(flat_.end(), e.begin(), e.end());

    inc_ptr_.assign(std::size_t{n} + 1, 0);
    for (auto v : flat_) ++inc_ptr_[v + 1];
    for (std::size_t v = 0; v < n; ++v) inc_ptr_[v + 1] += inc_ptr_[v];
    incident_.resize(flat_.size());
    std::vector<std::size_t> cursor(inc_ptr_.begin(), inc_ptr_.end() - 1);
    for (std::size_t e = 0; e < sorted.size(); ++e) {
        for (auto v : sorted[e]) incident_[cursor[v]++] = static_cast<EdgeId>(e);
    }
}

std::vector<std::vector<Vertex>> Hypergraph::edge_list() const {
    std::vector<std::vector<Vertex>> out;
    out.reserve(num_edges());
    for (EdgeId e = 0; e < num_edges(); ++e) {
        auto span = edge(e);
        out.emplace_back(span.begin(), span.end());
    }
    return out;
}

std::int64_t Hypergraph::find(std::span<const Vertex> sorted_subset) const {
    std::size_t lo = 0;
    std::size_t hi = num_edges();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        auto e = edge(static_cast<EdgeId>(mid));
        if (std::lexicographical_compare(e.begin(), e.end(), sorted_subset.begin(), sorted_subset.end())) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if (lo < num_edges()) {
        auto e = edge(static_cast<EdgeId>(lo));
        if (std::equal(e.begin(), e.end(), sorted_subset.begin(), sorted_subset.end())) {
            return static_cast<std::int64_t>(lo);
        }
    }
    return -1;
}

bool Hypergraph::contains(std::span<const Vertex> subset) const {
    if (subset.size() != d_) throw std::invalid_argument("membership query must have d vertices");
    std::vector<Vertex> c(subset.begin(), subset.end());
    std::sort(c.begin(), c.end());
    if (std::adjacent_find(c.begin(), c.end()) != c.end()) {
        throw std::invalid_argument("membership query with a repeated vertex");
    }
    if (c.back() >= n_) throw std::invalid_argument("membership query vertex out of range");
    return find(c) >= 0;
}

namespace {

struct SubsetHash {
    std::size_t operator()(const std::vector<Vertex>& s) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (auto v : s) h = splitmix64(h ^ v);
        return static_cast<std::size_t>(h);
    }
};

using SubsetSet = std::unordered_set<std::vector<Vertex>, SubsetHash>;

// Classes with at most this many subsets are enumerated outright.
constexpr std::int64_t kEnumerateLimit = 200000;

// Uniform d-subset of `pool` via Floyd's algorithm, returned sorted.
std::vector<Vertex> draw_subset(const std::vector<Vertex>& pool, std::uint32_t d, Rng& rng) {
    const std::size_t m = pool.size();
    std::vector<std::size_t> picked;
    picked.reserve(d);
    for (std::size_t j = m - d; j < m; ++j) {
        std::uniform_int_distribution<std::size_t> pick(0, j);
        const std::size_t t = pick(rng);
        if (std::find(picked.begin(), picked.end(), t) == picked.end()) {
            picked.push_back(t);
        } else {
            picked.push_back(j);
        }
    }
    std::vector<Vertex> out(d);
    for (std::uint32_t k = 0; k < d; ++k) out[k] = pool[picked[k]];
    std::sort(out.begin(), out.end());
    return out;
}

template <class F>
void for_each_combination(const std::vector<Vertex>& pool, std::uint32_t d, F&& visit) {
    if (pool.size() < d) return;
    std::vector<std::size_t> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<Vertex> subset(d);
    while (true) {
        for (std::uint32_t k = 0; k < d; ++k) subset[k] = pool[idx[k]];
        visit(subset);
        int k = static_cast<int>(d) - 1;
        while (k >= 0 && idx[k] == pool.size() - d + k) --k;
        if (k < 0) return;
        ++idx[k];
        for (std::uint32_t j = k + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
    }
}

bool monochromatic(const std::vector<Vertex>& subset, const SpinAssignment& spins) {
    for (auto v : subset) {
        if (spins[v] != spins[subset.front()]) return false;
    }
    return true;
}

// Picks `count` members of an explicitly enumerated class.
void take_from_enumeration(std::vector<std::vector<Vertex>> members, std::int64_t count, Rng& rng,
                           std::vector<std::vector<Vertex>>& out) {
    const std::size_t m = members.size();
    for (std::size_t k = 0; k < static_cast<std::size_t>(count); ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, m - 1);
        std::swap(members[k], members[pick(rng)]);
        out.push_back(std::move(members[k]));
    }
}

}  // namespace

LabeledHypergraph sample_hsbm(const ModelParams& params) {
    const DerivedRates rates = derive_rates(params);
    Rng rng(params.seed);
    const std::uint32_t n = params.n;
    const std::uint32_t d = params.d;

    std::vector<std::int8_t> raw(n);
    std::bernoulli_distribution coin(0.5);
    for (auto& s : raw) s = coin(rng) ? 1 : -1;
    SpinAssignment spins(std::move(raw));

    std::vector<Vertex> plus, minus, all(n);
    std::iota(all.begin(), all.end(), 0);
    for (Vertex v = 0; v < n; ++v) (spins[v] > 0 ? plus : minus).push_back(v);

    const std::int64_t same_plus = binomial_exact(plus.size(), d);
    const std::int64_t same_minus = binomial_exact(minus.size(), d);
    const std::int64_t same_total = same_plus + same_minus;
    const std::int64_t mixed_total = binomial_exact(n, d) - same_total;

    std::binomial_distribution<std::int64_t> same_law(same_total, rates.p_n);
    std::binomial_distribution<std::int64_t> mixed_law(mixed_total, rates.q_n);
    const std::int64_t k_same = same_total > 0 ? same_law(rng) : 0;
    const std::int64_t k_mixed = mixed_total > 0 ? mixed_law(rng) : 0;

    std::vector<std::vector<Vertex>> edges;
    edges.reserve(static_cast<std::size_t>(k_same + k_mixed));

    if (same_total <= kEnumerateLimit) {
        std::vector<std::vector<Vertex>> members;
        for_each_combination(plus, d, [&](const auto& s) { members.push_back(s); });
        for_each_combination(minus, d, [&](const auto& s) { members.push_back(s); });
        take_from_enumeration(std::move(members), k_same, rng, edges);
    } else {
        SubsetSet seen;
        std::bernoulli_distribution pick_plus(static_cast<double>(same_plus) / static_cast<double>(same_total));
        while (static_cast<std::int64_t>(seen.size()) < k_same) {
            const bool use_plus = plus.size() >= d && (minus.size() < d || pick_plus(rng));
            auto subset = draw_subset(use_plus ? plus : minus, d, rng);
            if (seen.insert(subset).second) edges.push_back(std::move(subset));
        }
    }

    if (mixed_total <= kEnumerateLimit) {
        std::vector<std::vector<Vertex>> members;
        for_each_combination(all, d, [&](const auto& s) {
            if (!monochromatic(s, spins)) members.push_back(s);
        });
        take_from_enumeration(std::move(members), k_mixed, rng, edges);
    } else {
        SubsetSet seen;
        while (static_cast<std::int64_t>(seen.size()) < k_mixed) {
            auto subset = draw_subset(all, d, rng);
            if (monochromatic(subset, spins)) continue;
            if (seen.insert(subset).second) edges.push_back(std::move(subset));
        }
    }

    return {Hypergraph(n, d, edges), std::move(spins)};
}

CountMatrix adjacency_matrix(const Hypergraph& h) {
    std::vector<Triplet<std::int64_t>> upper;
    upper.reserve(h.num_edges() * h.d() * (h.d() - 1) / 2);
    for (EdgeId e = 0; e < h.num_edges(); ++e) {
        auto vs = h.edge(e);
        for (std::size_t x = 0; x < vs.size(); ++x) {
            for (std::size_t y = x + 1; y < vs.size(); ++y) upper.push_back({vs[x], vs[y], 1});
        }
    }
    return CountMatrix::from_upper(h.n(), std::move(upper));
}

std::int64_t circuit_count(const Hypergraph& h, unsigned k) {
    if (k == 0) throw std::invalid_argument("circuit length must be at least 1");
    const std::uint32_t n = h.n();
    std::int64_t total = 0;
    std::vector<std::int64_t> cur(n), next(n);
    for (Vertex start = 0; start < n; ++start) {
        std::fill(cur.begin(), cur.end(), 0);
        cur[start] = 1;
        for (unsigned step = 0; step < k; ++step) {
            std::fill(next.begin(), next.end(), 0);
            for (Vertex u = 0; u < n; ++u) {
                if (cur[u] == 0) continue;
                for (EdgeId e : h.incidence(u)) {
                    for (Vertex v : h.edge(e)) {
                        if (v != u) next[v] += cur[u];
                    }
                }
            }
            std::swap(cur, next);
        }
        total += cur[start];
    }
    return total;
}

double expected_incident_edges(const ModelParams& params, std::uint32_t n_same) {
    const DerivedRates rates = derive_rates(params);
    const double same = binomial(static_cast<std::int64_t>(n_same) - 1, params.d - 1);
    const double all = binomial(static_cast<std::int64_t>(params.n) - 1, params.d - 1);
    return rates.p_n * same + rates.q_n * (all - same);
}

double expected_edge_count(const ModelParams& params, std::uint32_t n_plus) {
    const DerivedRates rates = derive_rates(params);
    const double same = binomial(n_plus, params.d) + binomial(params.n - n_plus, params.d);
    return rates.p_n * same + rates.q_n * (binomial(params.n, params.d) - same);
}

}  // namespace hsbm
