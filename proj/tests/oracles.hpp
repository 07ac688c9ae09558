// Independent reference computations used only by the test suites. None of
// these call into the library's algorithms.
#ifndef HSBM_TESTS_ORACLES_HPP
#define HSBM_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using Edges = std::vector<std::vector<std::uint32_t>>;
using IntMatrix = std::vector<std::vector<std::int64_t>>;
using RealMatrix = std::vector<std::vector<double>>;

inline IntMatrix zeros(std::size_t n) { return IntMatrix(n, std::vector<std::int64_t>(n, 0)); }

inline bool has(const std::vector<std::uint32_t>& e, std::uint32_t v) {
    return std::find(e.begin(), e.end(), v) != e.end();
}

inline std::set<std::uint32_t> meet(const std::vector<std::uint32_t>& x, const std::vector<std::uint32_t>& y) {
    std::set<std::uint32_t> out;
    for (auto v : x) {
        if (has(y, v)) out.insert(v);
    }
    return out;
}

// Counts self-avoiding walks by recursing over vertex sequences first and
// then over every compatible choice of hyperedges, checking each condition
// literally on the completed sequence.
inline IntMatrix saw_counts(std::uint32_t n, const Edges& edges, unsigned l) {
    IntMatrix out = zeros(n);
    if (l == 0) {
        for (std::uint32_t i = 0; i < n; ++i) out[i][i] = 1;
        return out;
    }
    std::vector<std::uint32_t> verts;
    std::vector<std::size_t> chosen;
    std::function<void()> pick_edges = [&]() {
        const std::size_t j = chosen.size();
        if (j == l) {
            for (std::size_t p = 0; p < l; ++p) {
                for (std::size_t q = p + 1; q < l; ++q) {
                    const auto common = meet(edges[chosen[p]], edges[chosen[q]]);
                    if (q == p + 1) {
                        if (common != std::set<std::uint32_t>{verts[p + 1]}) return;
                    } else if (!common.empty()) {
                        return;
                    }
                }
            }
            ++out[verts.front()][verts.back()];
            return;
        }
        for (std::size_t e = 0; e < edges.size(); ++e) {
            if (has(edges[e], verts[j]) && has(edges[e], verts[j + 1])) {
                chosen.push_back(e);
                pick_edges();
                chosen.pop_back();
            }
        }
    };
    std::function<void()> pick_vertices = [&]() {
        if (verts.size() == l + 1) {
            pick_edges();
            return;
        }
        for (std::uint32_t v = 0; v < n; ++v) {
            if (std::find(verts.begin(), verts.end(), v) != verts.end()) continue;
            verts.push_back(v);
            pick_vertices();
            verts.pop_back();
        }
    };
    for (std::uint32_t i = 0; i < n; ++i) {
        verts = {i};
        pick_vertices();
    }
    return out;
}

// Simple paths of length l in a graph, counted by the classic DFS.
inline IntMatrix simple_path_counts(std::uint32_t n, const Edges& edges, unsigned l) {
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (const auto& e : edges) {
        adj[e[0]].push_back(e[1]);
        adj[e[1]].push_back(e[0]);
    }
    IntMatrix out = zeros(n);
    std::vector<bool> on(n, false);
    std::function<void(std::uint32_t, std::uint32_t, unsigned)> dfs = [&](std::uint32_t s, std::uint32_t v,
                                                                          unsigned depth) {
        if (depth == l) {
            ++out[s][v];
            return;
        }
        on[v] = true;
        for (auto w : adj[v]) {
            if (!on[w]) dfs(s, w, depth + 1);
        }
        on[v] = false;
    };
    for (std::uint32_t s = 0; s < n; ++s) dfs(s, s, 0);
    return out;
}

inline IntMatrix adjacency(std::uint32_t n, const Edges& edges) {
    IntMatrix a = zeros(n);
    for (const auto& e : edges) {
        for (auto i : e) {
            for (auto j : e) {
                if (i != j) ++a[i][j];
            }
        }
    }
    return a;
}

inline IntMatrix multiply(const IntMatrix& x, const IntMatrix& y) {
    const std::size_t n = x.size();
    IntMatrix z = zeros(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) z[i][j] += x[i][k] * y[k][j];
        }
    }
    return z;
}

inline std::int64_t trace_power(const IntMatrix& a, unsigned k) {
    IntMatrix p = a;
    for (unsigned s = 1; s < k; ++s) p = multiply(p, a);
    std::int64_t t = 0;
    for (std::size_t i = 0; i < a.size(); ++i) t += p[i][i];
    return t;
}

// Hypergraph walk distances by plain BFS over vertex adjacency; -1 when
// unreachable.
inline std::vector<int> distances(std::uint32_t n, const Edges& edges, std::uint32_t source) {
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (const auto& e : edges) {
        for (auto i : e) {
            for (auto j : e) {
                if (i != j) adj[i].push_back(j);
            }
        }
    }
    std::vector<int> dist(n, -1);
    std::deque<std::uint32_t> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
        const auto v = queue.front();
        queue.pop_front();
        for (auto w : adj[v]) {
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

// Cyclic Jacobi eigenvalue algorithm for dense symmetric matrices. Returns
// eigenvalues with eigenvectors as columns of `vectors`.
inline void jacobi_eigen(RealMatrix a, std::vector<double>& values, RealMatrix& vectors) {
    const std::size_t n = a.size();
    vectors.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) vectors[i][i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        }
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = vectors[k][p], vkq = vectors[k][q];
                    vectors[k][p] = c * vkp - s * vkq;
                    vectors[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    values.resize(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a[i][i];
}

// Total variation between Bin(m, c/n) and Pois(c) by direct pmf recursion in
// long double.
inline long double binom_pois_tv(std::int64_t m, std::int64_t n, long double c) {
    const long double p = c / static_cast<long double>(n);
    long double bin = std::pow(1.0L - p, static_cast<long double>(m));
    long double pois = std::exp(-c);
    long double sum = 0.0L;
    long double mass_bin = 0.0L, mass_pois = 0.0L;
    const std::int64_t top = std::max<std::int64_t>(m, static_cast<std::int64_t>(c * 10 + 200));
    for (std::int64_t k = 0; k <= top; ++k) {
        const long double b = k <= m ? bin : 0.0L;
        sum += std::abs(b - pois);
        mass_bin += b;
        mass_pois += pois;
        if (k < m) bin *= static_cast<long double>(m - k) / static_cast<long double>(k + 1) * p / (1.0L - p);
        pois *= c / static_cast<long double>(k + 1);
    }
    return 0.5L * (sum + (1.0L - mass_bin) + (1.0L - mass_pois));
}

}  // namespace oracle

#endif  // HSBM_TESTS_ORACLES_HPP
