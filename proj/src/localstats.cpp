#include "hsbm/localstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace hsbm {

namespace {
constexpr char kIncluded = 1;
constexpr char kRejected = 2;
}  // namespace

BallExplorer::BallExplorer(const Hypergraph& h)
    : h_(h), level_(h.n(), -1), edge_seen_(h.num_edges(), 0) {}

void BallExplorer::reset() {
    for (auto v : labeled_) level_[v] = -1;
    for (auto e : seen_edges_) edge_seen_[e] = 0;
    labeled_.clear();
    seen_edges_.clear();
}

Ball BallExplorer::explore(Vertex root, unsigned l) {
    if (root >= h_.n()) throw std::out_of_range("root vertex out of range");
    reset();
    Ball ball;
    ball.root = root;
    ball.shells.assign(l + 1, {});
    ball.shells[0].push_back(root);
    level_[root] = 0;
    labeled_.push_back(root);

    for (unsigned t = 0; t < l; ++t) {
        // shells[t] is stable while shells[t + 1] grows.
        for (std::size_t idx = 0; idx < ball.shells[t].size(); ++idx) {
            const Vertex v = ball.shells[t][idx];
            for (EdgeId e : h_.incidence(v)) {
                if (edge_seen_[e] != 0) continue;
                edge_seen_[e] = kIncluded;
                seen_edges_.push_back(e);
                ball.edges.push_back(e);
                int already = 0;
                for (Vertex u : h_.edge(e)) {
                    if (level_[u] >= 0) {
                        ++already;
                    } else {
                        level_[u] = static_cast<int>(t) + 1;
                        labeled_.push_back(u);
                        ball.shells[t + 1].push_back(u);
                    }
                }
                ball.cycle_count += already - 1;
            }
        }
    }
    // Hyperedges lying entirely inside the outermost shell.
    for (Vertex v : ball.shells[l]) {
        for (EdgeId e : h_.incidence(v)) {
            if (edge_seen_[e] != 0) continue;
            seen_edges_.push_back(e);
            auto vs = h_.edge(e);
            const bool inside = std::all_of(vs.begin(), vs.end(), [&](Vertex u) { return level_[u] >= 0; });
            edge_seen_[e] = inside ? kIncluded : kRejected;
            if (inside) {
                ball.edges.push_back(e);
                ball.cycle_count += static_cast<int>(h_.d()) - 1;
            }
        }
    }
    return ball;
}

NeighborhoodProfile profile_from_ball(const Ball& ball, const SpinAssignment& spins, unsigned l) {
    NeighborhoodProfile p;
    p.vertex = ball.root;
    p.S.assign(l + 1, 0);
    p.D.assign(l + 1, 0);
    p.U_plus.assign(l + 1, 0);
    p.U_minus.assign(l + 1, 0);
    for (unsigned t = 0; t <= l && t < ball.shells.size(); ++t) {
        for (Vertex v : ball.shells[t]) {
            if (spins[v] > 0) {
                ++p.U_plus[t];
            } else {
                ++p.U_minus[t];
            }
        }
        p.S[t] = p.U_plus[t] + p.U_minus[t];
        p.D[t] = p.U_plus[t] - p.U_minus[t];
    }
    p.cycle_count = ball.cycle_count;
    p.tangled = ball.cycle_count >= 1;
    p.two_cycles = ball.cycle_count >= 2;
    return p;
}

NeighborhoodProfile bfs_profile(const Hypergraph& h, const SpinAssignment& spins, Vertex i, unsigned l) {
    if (spins.size() != h.n()) throw std::invalid_argument("spin vector length differs from n");
    BallExplorer explorer(h);
    return profile_from_ball(explorer.explore(i, l), spins, l);
}

TangleCensus tangle_census(const Hypergraph& h, unsigned l) {
    TangleCensus census;
    BallExplorer explorer(h);
    for (Vertex i = 0; i < h.n(); ++i) {
        const int cycles = explorer.explore(i, l).cycle_count;
        if (cycles >= 1) ++census.tangled_count;
        if (cycles >= 2) census.l_tangle_free = false;
        census.max_cycle_count = std::max(census.max_cycle_count, cycles);
    }
    return census;
}

std::vector<std::int64_t> connected_subsets(const Hypergraph& h, const SpinAssignment& spins, Vertex i, unsigned k,
                                            unsigned s) {
    if (k < 1) throw std::invalid_argument("connected subsets need level k >= 1");
    if (s < 1 || s > h.d() - 1) throw std::invalid_argument("connected subsets need 1 <= s <= d - 1");
    BallExplorer explorer(h);
    const Ball ball = explorer.explore(i, k);
    std::set<std::vector<Vertex>> subsets;
    for (EdgeId e : ball.edges) {
        std::vector<Vertex> outer;
        unsigned inner = 0;
        for (Vertex u : h.edge(e)) {
            const int lvl = explorer.level(u);
            if (lvl == static_cast<int>(k)) {
                outer.push_back(u);
            } else if (lvl == static_cast<int>(k) - 1) {
                ++inner;
            }
        }
        if (outer.size() == s && inner == h.d() - s) subsets.insert(std::move(outer));
    }
    std::vector<std::int64_t> counts(s + 1, 0);
    for (const auto& subset : subsets) {
        unsigned plus = 0;
        for (Vertex u : subset) plus += spins[u] > 0 ? 1 : 0;
        ++counts[plus];
    }
    return counts;
}

Matrix2 growth_matrix(double alpha, double beta) {
    return {{{0.5 * (alpha + beta), 0.5 * (alpha - beta)}, {0.5 * (alpha - beta), 0.5 * (alpha + beta)}}};
}

Matrix2 growth_matrix_power(double alpha, double beta, unsigned k) {
    const double ak = std::pow(alpha, k);
    const double bk = std::pow(beta, k);
    return {{{0.5 * (ak + bk), 0.5 * (ak - bk)}, {0.5 * (ak - bk), 0.5 * (ak + bk)}}};
}

std::array<double, 2> growth_prediction(const DerivedRates& rates, std::array<double, 2> u, unsigned steps) {
    if (steps < 1) throw std::invalid_argument("growth prediction needs steps >= 1");
    const Matrix2 m = growth_matrix_power(rates.alpha, rates.beta, steps);
    return {m[0][0] * u[0] + m[0][1] * u[1], m[1][0] * u[0] + m[1][1] * u[1]};
}

QuasiResiduals quasi_residuals(const NeighborhoodProfile& profile, const DerivedRates& rates, unsigned l) {
    if (profile.S.size() < l + 1) throw std::invalid_argument("profile shallower than l");
    QuasiResiduals out;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (unsigned t = 0; t <= l; ++t) {
        const int shift = static_cast<int>(t) - static_cast<int>(l);
        const double s = static_cast<double>(profile.S[t]) -
                         std::pow(rates.alpha, shift) * static_cast<double>(profile.S[l]);
        double dr = nan;
        if (rates.beta > 0.0) {
            dr = static_cast<double>(profile.D[t]) - std::pow(rates.beta, shift) * static_cast<double>(profile.D[l]);
        }
        const double scale = std::pow(rates.alpha, 0.5 * t);
        out.s_resid.push_back(s);
        out.d_resid.push_back(dr);
        out.s_scaled.push_back(s / scale);
        out.d_scaled.push_back(dr / scale);
    }
    return out;
}

SdVectors sd_vectors(const Hypergraph& h, const SpinAssignment& spins, unsigned l) {
    if (spins.size() != h.n()) throw std::invalid_argument("spin vector length differs from n");
    SdVectors out;
    out.S.resize(h.n());
    out.D.resize(h.n());
    BallExplorer explorer(h);
    for (Vertex i = 0; i < h.n(); ++i) {
        const Ball ball = explorer.explore(i, l);
        std::int64_t d = 0;
        for (Vertex v : ball.shells[l]) d += spins[v];
        out.S[i] = static_cast<double>(ball.shells[l].size());
        out.D[i] = static_cast<double>(d);
    }
    return out;
}

double thresholding_statistic(std::span<const double> d_l, double beta, unsigned l) {
    if (d_l.empty()) throw std::invalid_argument("empty D vector");
    const double scale = std::pow(beta, -2.0 * l);
    double sum = 0.0;
    for (double x : d_l) sum += x * x;
    return scale * sum / static_cast<double>(d_l.size());
}

}  // namespace hsbm
