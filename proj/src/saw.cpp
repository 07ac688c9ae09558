#include "hsbm/saw.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "hsbm/parallel.hpp"
#include "hsbm/rng.hpp"

namespace hsbm {

namespace {

bool in_set(std::span<const Vertex> set, Vertex v) {
    return std::find(set.begin(), set.end(), v) != set.end();
}

std::size_t intersection_size(std::span<const Vertex> x, std::span<const Vertex> y) {
    std::size_t count = 0;
    for (auto v : x) count += in_set(y, v) ? 1 : 0;
    return count;
}

// Depth-first SAW search. covered_[v] counts the hyperedges on the current
// walk containing v; a new hyperedge from pivot p is admissible exactly when
// none of its other vertices is covered.
class SawSearch {
public:
    SawSearch(const Hypergraph& h, unsigned l) : h_(h), l_(l), covered_(h.n(), 0) {}

    template <class Leaf>
    void run(Vertex source, Leaf& leaf) {
        walk_.vertices.assign(1, source);
        walk_.edges.clear();
        descend(source, 0, leaf);
    }

private:
    template <class Leaf>
    void descend(Vertex pivot, unsigned depth, Leaf& leaf) {
        if (depth == l_) {
            leaf(walk_);
            return;
        }
        for (EdgeId e : h_.incidence(pivot)) {
            auto vs = h_.edge(e);
            bool admissible = true;
            for (auto v : vs) {
                if (v != pivot && covered_[v] != 0) {
                    admissible = false;
                    break;
                }
            }
            if (!admissible) continue;
            for (auto v : vs) ++covered_[v];
            walk_.edges.push_back(e);
            for (auto v : vs) {
                if (v == pivot) continue;
                walk_.vertices.push_back(v);
                descend(v, depth + 1, leaf);
                walk_.vertices.pop_back();
            }
            walk_.edges.pop_back();
            for (auto v : vs) --covered_[v];
        }
    }

    const Hypergraph& h_;
    unsigned l_;
    std::vector<int> covered_;
    SawWalk walk_;
};

Hypergraph complete_hypergraph(std::uint32_t n, std::uint32_t d) {
    std::vector<std::vector<Vertex>> edges;
    std::vector<Vertex> idx(d);
    for (std::uint32_t k = 0; k < d; ++k) idx[k] = k;
    while (true) {
        edges.push_back(idx);
        int k = static_cast<int>(d) - 1;
        while (k >= 0 && idx[k] == n - d + k) --k;
        if (k < 0) break;
        ++idx[k];
        for (std::uint32_t j = k + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
    }
    return Hypergraph(n, d, edges);
}

void check_complete_guard(const Hypergraph& h, unsigned l) {
    if (h.n() > CompleteGuard::max_n || l > CompleteGuard::max_l || h.d() > CompleteGuard::max_d) {
        throw std::invalid_argument("complete-hypergraph computation limited to n <= 10, l <= 3, d <= 3");
    }
}

// Per-hyperedge weights of the complete hypergraph K: presence in h and
// conditional inclusion probability.
struct CompleteWeights {
    Hypergraph complete;
    std::vector<double> present;
    std::vector<double> expected;
};

CompleteWeights complete_weights(const Hypergraph& h, const ModelParams& params, const SpinAssignment& spins) {
    if (spins.size() != h.n()) throw std::invalid_argument("spin vector length differs from n");
    if (params.n != h.n() || params.d != h.d()) throw std::invalid_argument("params do not match hypergraph");
    CompleteWeights w{complete_hypergraph(h.n(), h.d()), {}, {}};
    const ExpectedAdjacency abar(params, spins);
    const std::size_t m = w.complete.num_edges();
    w.present.resize(m);
    w.expected.resize(m);
    for (EdgeId e = 0; e < m; ++e) {
        auto vs = w.complete.edge(e);
        w.present[e] = h.find(vs) >= 0 ? 1.0 : 0.0;
        w.expected[e] = abar.edge_probability(vs);
    }
    return w;
}

Eigen::MatrixXd centered_from_weights(const CompleteWeights& w, unsigned l) {
    const std::uint32_t n = w.complete.n();
    if (l == 0) return Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(n, n);
    SawSearch search(w.complete, l);
    for (Vertex i = 0; i < n; ++i) {
        auto leaf = [&](const SawWalk& walk) {
            double weight = 1.0;
            for (EdgeId e : walk.edges) weight *= w.present[e] - w.expected[e];
            delta(i, walk.vertices.back()) += weight;
        };
        search.run(i, leaf);
    }
    return delta;
}

}  // namespace

bool is_walk(std::span<const Vertex> vertices, std::span<const std::span<const Vertex>> edge_sets) {
    if (vertices.size() != edge_sets.size() + 1) return false;
    for (std::size_t j = 0; j < edge_sets.size(); ++j) {
        if (vertices[j] == vertices[j + 1]) return false;
        if (!in_set(edge_sets[j], vertices[j]) || !in_set(edge_sets[j], vertices[j + 1])) return false;
    }
    return true;
}

bool is_self_avoiding(std::span<const Vertex> vertices, std::span<const std::span<const Vertex>> edge_sets) {
    if (!is_walk(vertices, edge_sets)) return false;
    for (std::size_t x = 0; x < vertices.size(); ++x) {
        for (std::size_t y = x + 1; y < vertices.size(); ++y) {
            if (vertices[x] == vertices[y]) return false;
        }
    }
    for (std::size_t j = 1; j < edge_sets.size(); ++j) {
        // e_j and e_{j+1} (0-based j-1, j) meet exactly in the pivot.
        if (intersection_size(edge_sets[j - 1], edge_sets[j]) != 1) return false;
        if (!in_set(edge_sets[j - 1], vertices[j]) || !in_set(edge_sets[j], vertices[j])) return false;
    }
    for (std::size_t j = 0; j < edge_sets.size(); ++j) {
        for (std::size_t k = j + 2; k < edge_sets.size(); ++k) {
            if (intersection_size(edge_sets[j], edge_sets[k]) != 0) return false;
        }
    }
    return true;
}

void for_each_saw(const Hypergraph& h, Vertex source, unsigned l,
                  const std::function<void(const SawWalk&)>& visit) {
    if (source >= h.n()) throw std::out_of_range("source vertex out of range");
    SawSearch search(h, l);
    auto leaf = [&](const SawWalk& walk) { visit(walk); };
    search.run(source, leaf);
}

std::vector<SawWalk> enumerate_saws(const Hypergraph& h, Vertex source, unsigned l) {
    std::vector<SawWalk> out;
    for_each_saw(h, source, l, [&](const SawWalk& w) { out.push_back(w); });
    return out;
}

CountMatrix saw_matrix(const Hypergraph& h, unsigned l) {
    const std::uint32_t n = h.n();
    if (l == 0) return CountMatrix::identity(n);
    std::vector<std::vector<std::pair<std::uint32_t, std::int64_t>>> rows(n);
    const unsigned workers = worker_count();
    std::vector<SawSearch> searches;
    std::vector<std::vector<std::int64_t>> counts(workers, std::vector<std::int64_t>(n, 0));
    std::vector<std::vector<Vertex>> touched(workers);
    for (unsigned w = 0; w < workers; ++w) searches.emplace_back(h, l);
    parallel_for(
        n,
        [&](unsigned w, std::size_t i) {
            auto& count = counts[w];
            auto& hit = touched[w];
            hit.clear();
            auto leaf = [&](const SawWalk& walk) {
                const Vertex end = walk.vertices.back();
                if (count[end]++ == 0) hit.push_back(end);
            };
            searches[w].run(static_cast<Vertex>(i), leaf);
            std::sort(hit.begin(), hit.end());
            rows[i].reserve(hit.size());
            for (Vertex j : hit) {
                rows[i].emplace_back(j, count[j]);
                count[j] = 0;
            }
        },
        workers);
    return CountMatrix::from_rows(std::move(rows));
}

CountMatrix saw_matrix_oracle(const Hypergraph& h, unsigned l) {
    if (h.n() > 14 || l > 4 || h.num_edges() > 12) {
        throw std::invalid_argument("saw_matrix_oracle limited to n <= 14, l <= 4, at most 12 edges");
    }
    const std::uint32_t n = h.n();
    if (l == 0) return CountMatrix::identity(n);
    const std::size_t m = h.num_edges();
    const std::uint32_t d = h.d();
    std::vector<std::vector<std::int64_t>> dense(n, std::vector<std::int64_t>(n, 0));
    if (m == 0) return CountMatrix(n);

    std::vector<std::size_t> edge_seq(l, 0);
    std::vector<std::span<const Vertex>> sets(l);
    std::vector<std::size_t> pick(l + 1, 0);
    std::vector<Vertex> vertices(l + 1);
    while (true) {
        for (unsigned j = 0; j < l; ++j) sets[j] = h.edge(static_cast<EdgeId>(edge_seq[j]));
        // i_0 ranges over e_1, i_j over e_j.
        std::fill(pick.begin(), pick.end(), 0);
        while (true) {
            vertices[0] = sets[0][pick[0]];
            for (unsigned j = 1; j <= l; ++j) vertices[j] = sets[j - 1][pick[j]];
            if (is_self_avoiding(vertices, sets)) ++dense[vertices[0]][vertices[l]];
            unsigned k = 0;
            while (k <= l && ++pick[k] == d) pick[k++] = 0;
            if (k > l) break;
        }
        unsigned k = 0;
        while (k < l && ++edge_seq[k] == m) edge_seq[k++] = 0;
        if (k == l) break;
    }
    std::vector<Triplet<std::int64_t>> full;
    for (Vertex i = 0; i < n; ++i) {
        for (Vertex j = 0; j < n; ++j) {
            if (dense[i][j] != 0) full.push_back({i, j, dense[i][j]});
        }
    }
    return CountMatrix::from_full(n, std::move(full));
}

ExpectedAdjacency::ExpectedAdjacency(const ModelParams& params, const SpinAssignment& spins) : spins_(spins) {
    if (params.n < 2) throw std::invalid_argument("expected adjacency needs n >= 2");
    if (spins.size() != params.n) throw std::invalid_argument("spin vector length differs from n");
    const DerivedRates rates = derive_rates(params);
    p_n_ = rates.p_n;
    q_n_ = rates.q_n;
    const std::int64_t n = params.n;
    const std::int64_t d = params.d;
    const std::int64_t n_plus = static_cast<std::int64_t>(spins.count_plus());
    const std::int64_t n_minus = n - n_plus;
    const double all_pairs = binomial(n - 2, d - 2);
    const double subsets = binomial(n, d - 1);
    auto same = [&](std::int64_t class_size) {
        const double mono = binomial(class_size - 2, d - 2);
        return (params.a * mono + params.b * (all_pairs - mono)) / subsets;
    };
    a_plus_ = same(n_plus);
    a_minus_ = same(n_minus);
    b_tilde_ = params.b * all_pairs / subsets;
}

double ExpectedAdjacency::operator()(Vertex i, Vertex j) const {
    if (i == j) return 0.0;
    if (spins_[i] != spins_[j]) return b_tilde_;
    return spins_[i] > 0 ? a_plus_ : a_minus_;
}

double ExpectedAdjacency::edge_probability(std::span<const Vertex> subset) const {
    for (auto v : subset) {
        if (spins_[v] != spins_[subset.front()]) return q_n_;
    }
    return p_n_;
}

Eigen::MatrixXd ExpectedAdjacency::dense() const {
    const auto n = static_cast<Eigen::Index>(spins_.size());
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = (*this)(static_cast<Vertex>(i), static_cast<Vertex>(j));
    }
    return out;
}

Eigen::MatrixXd ExpectedAdjacency::dense_from_decomposition() const {
    const auto n = static_cast<Eigen::Index>(spins_.size());
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd sigma(n);
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) sigma(i) = spins_[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && sigma(i) < 0 && sigma(j) < 0) r(i, j) = 1.0;
        }
    }
    return 0.5 * (a_plus_ + b_tilde_) * ones * ones.transpose() +
           0.5 * (a_plus_ - b_tilde_) * sigma * sigma.transpose() + (a_minus_ - a_plus_) * r -
           a_plus_ * Eigen::MatrixXd::Identity(n, n);
}

ExpectedAdjacency expected_adjacency(const ModelParams& params, const SpinAssignment& spins) {
    return ExpectedAdjacency(params, spins);
}

Eigen::MatrixXd centered_saw_matrix(const Hypergraph& h, const ModelParams& params, const SpinAssignment& spins,
                                    unsigned l) {
    check_complete_guard(h, l);
    return centered_from_weights(complete_weights(h, params, spins), l);
}

std::vector<Eigen::MatrixXd> gamma_matrices(const Hypergraph& h, const ModelParams& params,
                                            const SpinAssignment& spins, unsigned l) {
    check_complete_guard(h, l);
    if (l == 0) throw std::invalid_argument("gamma matrices need l >= 1");
    const CompleteWeights w = complete_weights(h, params, spins);
    const Hypergraph& k = w.complete;
    const std::uint32_t n = k.n();
    std::vector<Eigen::MatrixXd> gammas(l, Eigen::MatrixXd::Zero(n, n));

    std::vector<Vertex> vertices;
    std::vector<EdgeId> edges;
    std::vector<std::span<const Vertex>> sets;

    // Plain recursion over all walks of length l; no self-avoidance pruning.
    std::function<void(unsigned)> extend = [&](unsigned depth) {
        if (depth == l) {
            sets.clear();
            for (EdgeId e : edges) sets.push_back(k.edge(e));
            if (is_self_avoiding(vertices, sets)) return;
            std::span<const Vertex> vs(vertices);
            std::span<const std::span<const Vertex>> es(sets);
            for (unsigned m = 1; m <= l; ++m) {
                const unsigned head = l - m;  // steps before the Abar step
                if (!is_self_avoiding(vs.subspan(0, head + 1), es.subspan(0, head))) continue;
                if (!is_self_avoiding(vs.subspan(head + 1), es.subspan(head + 1))) continue;
                double weight = 1.0;
                for (unsigned t = 0; t < head; ++t) weight *= w.present[edges[t]] - w.expected[edges[t]];
                weight *= w.expected[edges[head]];
                for (unsigned t = head + 1; t < l; ++t) weight *= w.present[edges[t]];
                if (weight != 0.0) gammas[m - 1](vertices.front(), vertices.back()) += weight;
            }
            return;
        }
        const Vertex pivot = vertices.back();
        for (EdgeId e : k.incidence(pivot)) {
            edges.push_back(e);
            for (auto v : k.edge(e)) {
                if (v == pivot) continue;
                vertices.push_back(v);
                extend(depth + 1);
                vertices.pop_back();
            }
            edges.pop_back();
        }
    };
    for (Vertex i = 0; i < n; ++i) {
        vertices.assign(1, i);
        edges.clear();
        extend(0);
    }
    return gammas;
}

Eigen::MatrixXd gamma_matrix(const Hypergraph& h, const ModelParams& params, const SpinAssignment& spins, unsigned l,
                             unsigned m) {
    if (m < 1 || m > l) throw std::invalid_argument("gamma index m must satisfy 1 <= m <= l");
    return gamma_matrices(h, params, spins, l)[m - 1];
}

ExpansionCheck check_expansion(const Hypergraph& h, const ModelParams& params, const SpinAssignment& spins,
                               unsigned l) {
    check_complete_guard(h, l);
    if (l == 0) throw std::invalid_argument("expansion check needs l >= 1");
    const CompleteWeights w = complete_weights(h, params, spins);
    std::vector<Eigen::MatrixXd> b, delta;
    for (unsigned m = 0; m <= l; ++m) {
        b.push_back(to_dense(saw_matrix(h, m)));
        delta.push_back(centered_from_weights(w, m));
    }
    const Eigen::MatrixXd abar = ExpectedAdjacency(params, spins).dense();
    const auto gammas = gamma_matrices(h, params, spins, l);

    Eigen::MatrixXd residual = b[l] - delta[l];
    for (unsigned m = 1; m <= l; ++m) {
        residual -= delta[l - m] * abar * b[m - 1];
        residual += gammas[m - 1];
    }
    ExpansionCheck out;
    out.max_residual = residual.cwiseAbs().maxCoeff();
    out.rho_delta = spectral_norm(delta[l]).value;
    for (const auto& g : gammas) out.rho_gamma.push_back(spectral_norm(g).value);
    return out;
}

double verify_expansion(const Hypergraph& h, const ModelParams& params, const SpinAssignment& spins, unsigned l) {
    return check_expansion(h, params, spins, l).max_residual;
}

namespace {

// Power iteration on M^T M; `apply` computes M x, `apply_t` computes M^T y.
template <class Apply, class ApplyT>
NormEstimate power_norm(std::size_t n, Apply apply, ApplyT apply_t, double tol, int max_iter, std::uint64_t seed) {
    NormEstimate est;
    if (n == 0) {
        est.converged = true;
        return est;
    }
    Rng rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = gauss(rng);
    x.normalize();
    double previous = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        const Eigen::VectorXd y = apply(x);
        const double value = y.norm();
        est.value = value;
        est.iterations = it;
        if (value == 0.0) {
            est.converged = true;
            return est;
        }
        if (it > 1 && std::abs(value - previous) <= tol * value) {
            est.converged = true;
            return est;
        }
        previous = value;
        x = apply_t(y);
        const double norm = x.norm();
        if (norm == 0.0) {
            est.converged = true;
            return est;
        }
        x /= norm;
    }
    return est;
}

template <class T>
NormEstimate sparse_norm(const SparseSymMatrix<T>& m, double tol, int max_iter, std::uint64_t seed) {
    auto apply = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd y(x.size());
        m.multiply(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                   std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
        return y;
    };
    return power_norm(m.size(), apply, apply, tol, max_iter, seed);
}

}  // namespace

NormEstimate spectral_norm(const RealMatrix& m, double tol, int max_iter, std::uint64_t seed) {
    return sparse_norm(m, tol, max_iter, seed);
}

NormEstimate spectral_norm(const CountMatrix& m, double tol, int max_iter, std::uint64_t seed) {
    return sparse_norm(m, tol, max_iter, seed);
}

NormEstimate spectral_norm(const Eigen::MatrixXd& m, double tol, int max_iter, std::uint64_t seed) {
    if (m.rows() != m.cols()) throw std::invalid_argument("spectral_norm expects a square matrix");
    return power_norm(
        static_cast<std::size_t>(m.rows()), [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return m * x; },
        [&](const Eigen::VectorXd& y) -> Eigen::VectorXd { return m.transpose() * y; }, tol, max_iter, seed);
}

RealMatrix to_real(const CountMatrix& m) {
    std::vector<Triplet<double>> upper;
    for (const auto& t : m.triplets()) upper.push_back({t.row, t.col, static_cast<double>(t.value)});
    return RealMatrix::from_upper(m.size(), std::move(upper));
}

Eigen::MatrixXd to_dense(const CountMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < m.size(); ++i) {
        auto cols = m.row_cols(i);
        auto vals = m.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            out(static_cast<Eigen::Index>(i), cols[k]) = static_cast<double>(vals[k]);
        }
    }
    return out;
}

}  // namespace hsbm
