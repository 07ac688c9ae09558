#include "hsbm/gwtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "hsbm/localstats.hpp"
#include "hsbm/parallel.hpp"
#include "hsbm/rng.hpp"

namespace hsbm {

void GWConfig::validate() const {
    if (d < 2) throw std::invalid_argument("uniformity d must be at least 2");
    if (!(b > 0.0)) throw std::invalid_argument("b must be positive");
    if (!(a >= b)) throw std::invalid_argument("a must be at least b");
    if (root_spin != 1 && root_spin != -1) throw std::invalid_argument("root spin must be +1 or -1");
    const auto probs = type_probabilities(d, a, b);
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) throw std::logic_error("hyperedge type probabilities do not sum to 1");
}

std::vector<double> offspring_rates(std::uint32_t d, double a, double b) {
    const double two_pow = std::ldexp(1.0, static_cast<int>(d) - 1);
    std::vector<double> rates(d);
    for (std::uint32_t r = 0; r + 1 < d; ++r) rates[r] = b * binomial(d - 1, r) / two_pow;
    rates[d - 1] = a / two_pow;
    return rates;
}

namespace {

std::int64_t draw_poisson(double mean, Rng& rng) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<std::int64_t> law(mean);
    return law(rng);
}

void fill_martingales(GenerationCounts& g, double alpha, double beta) {
    const std::size_t gens = g.W_plus.size();
    g.M.resize(gens);
    g.Delta.resize(gens);
    for (std::size_t t = 0; t < gens; ++t) {
        const double plus = static_cast<double>(g.W_plus[t]);
        const double minus = static_cast<double>(g.W_minus[t]);
        g.M[t] = std::pow(alpha, -static_cast<double>(t)) * (plus + minus);
        g.Delta[t] = beta > 0.0 ? std::pow(beta, -static_cast<double>(t)) * (plus - minus)
                                : std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace

GenerationCounts sample_counts(const GWConfig& config, std::uint64_t stream_seed) {
    config.validate();
    const std::uint32_t d = config.d;
    const double two_pow = std::ldexp(1.0, static_cast<int>(d) - 1);
    Rng rng(stream_seed);
    GenerationCounts g;
    g.W_plus.push_back(config.root_spin > 0 ? 1 : 0);
    g.W_minus.push_back(config.root_spin > 0 ? 0 : 1);
    g.W_r.emplace_back(d, 0);
    for (unsigned t = 1; t <= config.depth; ++t) {
        const double plus = static_cast<double>(g.W_plus[t - 1]);
        const double minus = static_cast<double>(g.W_minus[t - 1]);
        std::vector<std::int64_t> w(d, 0);
        w[d - 1] = draw_poisson((config.a * plus + config.b * minus) / two_pow, rng);
        w[0] = draw_poisson((config.a * minus + config.b * plus) / two_pow, rng);
        for (std::uint32_t r = 1; r + 1 < d; ++r) {
            w[r] = draw_poisson(config.b * binomial(d - 1, r) / two_pow * (plus + minus), rng);
        }
        std::int64_t wp = 0;
        std::int64_t wm = 0;
        for (std::uint32_t r = 0; r < d; ++r) {
            wp += static_cast<std::int64_t>(r) * w[r];
            wm += static_cast<std::int64_t>(d - 1 - r) * w[r];
        }
        g.W_plus.push_back(wp);
        g.W_minus.push_back(wm);
        g.W_r.push_back(std::move(w));
    }
    fill_martingales(g, alpha_of(d, config.a, config.b), beta_of(d, config.a, config.b));
    return g;
}

GenerationCounts sample_counts(const GWConfig& config) {
    return sample_counts(config, config.seed);
}

RootedSpinTree sample_tree(const GWConfig& config, std::uint64_t stream_seed) {
    config.validate();
    const std::uint32_t d = config.d;
    const double alpha = alpha_of(d, config.a, config.b);
    if (std::pow(alpha, static_cast<double>(config.depth)) > 1e6) {
        throw std::invalid_argument("tree mode limited to expected size alpha^depth <= 1e6");
    }
    const auto probs = type_probabilities(d, config.a, config.b);
    std::discrete_distribution<std::uint32_t> type_law(probs.begin(), probs.end());
    std::poisson_distribution<int> edge_law(alpha / (d - 1.0));
    Rng rng(stream_seed);

    RootedSpinTree tree;
    tree.nodes.push_back({config.root_spin, {}});
    std::vector<std::uint32_t> frontier{0};
    std::vector<int> child_spins(d - 1);
    for (unsigned gen = 0; gen < config.depth; ++gen) {
        std::vector<std::uint32_t> next;
        for (std::uint32_t v : frontier) {
            const int spin = tree.nodes[v].spin;
            const int count = edge_law(rng);
            for (int k = 0; k < count; ++k) {
                const std::uint32_t type = type_law(rng);
                for (std::uint32_t c = 0; c + 1 < d; ++c) child_spins[c] = c < type ? spin : -spin;
                std::shuffle(child_spins.begin(), child_spins.end(), rng);
                const auto edge_id = static_cast<std::uint32_t>(tree.edges.size());
                RootedSpinTree::HyperEdge edge{v, {}};
                for (int s : child_spins) {
                    const auto child = static_cast<std::uint32_t>(tree.nodes.size());
                    tree.nodes.push_back({s, {}});
                    edge.children.push_back(child);
                    next.push_back(child);
                }
                tree.nodes[v].child_edges.push_back(edge_id);
                tree.edges.push_back(std::move(edge));
            }
        }
        frontier = std::move(next);
    }
    return tree;
}

RootedSpinTree sample_tree(const GWConfig& config) {
    return sample_tree(config, config.seed);
}

GenerationCounts tree_generation_counts(const RootedSpinTree& tree, const GWConfig& config) {
    const std::uint32_t d = config.d;
    GenerationCounts g;
    std::vector<std::uint32_t> frontier{0};
    g.W_plus.push_back(tree.nodes[0].spin > 0 ? 1 : 0);
    g.W_minus.push_back(tree.nodes[0].spin > 0 ? 0 : 1);
    g.W_r.emplace_back(d, 0);
    for (unsigned t = 1; t <= config.depth; ++t) {
        std::vector<std::uint32_t> next;
        std::vector<std::int64_t> w(d, 0);
        std::int64_t wp = 0;
        std::int64_t wm = 0;
        for (std::uint32_t v : frontier) {
            for (std::uint32_t e : tree.nodes[v].child_edges) {
                std::uint32_t plus = 0;
                for (std::uint32_t c : tree.edges[e].children) {
                    next.push_back(c);
                    if (tree.nodes[c].spin > 0) {
                        ++plus;
                        ++wp;
                    } else {
                        ++wm;
                    }
                }
                ++w[plus];
            }
        }
        g.W_plus.push_back(wp);
        g.W_minus.push_back(wm);
        g.W_r.push_back(std::move(w));
        frontier = std::move(next);
    }
    fill_martingales(g, alpha_of(d, config.a, config.b), beta_of(d, config.a, config.b));
    return g;
}

std::string canonical_form(const RootedSpinTree& tree) {
    const std::size_t nodes = tree.nodes.size();
    if (nodes == 0) throw std::invalid_argument("empty tree");
    std::vector<int> parent_edge(nodes, -1);
    for (std::size_t e = 0; e < tree.edges.size(); ++e) {
        const auto& edge = tree.edges[e];
        if (edge.parent >= nodes) throw std::invalid_argument("hyperedge parent out of range");
        for (auto c : edge.children) {
            if (c >= nodes || c == 0) throw std::invalid_argument("invalid hyperedge child");
            if (parent_edge[c] != -1) throw std::invalid_argument("vertex in two hyperedges below its parent: cycle");
            parent_edge[c] = static_cast<int>(e);
        }
    }
    std::vector<int> edge_owner(tree.edges.size(), -1);
    for (std::size_t v = 0; v < nodes; ++v) {
        if (tree.nodes[v].spin != 1 && tree.nodes[v].spin != -1) throw std::invalid_argument("spin must be +-1");
        for (auto e : tree.nodes[v].child_edges) {
            if (e >= tree.edges.size() || tree.edges[e].parent != v || edge_owner[e] != -1) {
                throw std::invalid_argument("inconsistent hyperedge ownership");
            }
            edge_owner[e] = static_cast<int>(v);
        }
    }
    // Breadth-first order from the root; anything unreached sits on a cycle
    // or a detached component.
    std::vector<std::uint32_t> order{0};
    for (std::size_t k = 0; k < order.size(); ++k) {
        for (auto e : tree.nodes[order[k]].child_edges) {
            for (auto c : tree.edges[e].children) order.push_back(c);
        }
        if (order.size() > nodes) throw std::invalid_argument("cyclic structure");
    }
    if (order.size() != nodes) throw std::invalid_argument("cyclic or disconnected structure");

    std::vector<std::string> form(nodes);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto& node = tree.nodes[*it];
        std::vector<std::string> edge_forms;
        for (auto e : node.child_edges) {
            std::vector<std::string> kids;
            for (auto c : tree.edges[e].children) kids.push_back(std::move(form[c]));
            std::sort(kids.begin(), kids.end());
            std::string ef = "[";
            for (std::size_t k = 0; k < kids.size(); ++k) {
                if (k) ef += ',';
                ef += kids[k];
            }
            ef += ']';
            edge_forms.push_back(std::move(ef));
        }
        std::sort(edge_forms.begin(), edge_forms.end());
        std::string vf(node.spin > 0 ? "+" : "-");
        vf += '(';
        for (const auto& ef : edge_forms) vf += ef;
        vf += ')';
        form[*it] = std::move(vf);
    }
    return form[0];
}

std::optional<RootedSpinTree> neighborhood_tree(const Hypergraph& h, const SpinAssignment& spins, Vertex i,
                                                unsigned depth, bool normalize_root) {
    BallExplorer explorer(h);
    const Ball ball = explorer.explore(i, depth);
    if (ball.cycle_count > 0) return std::nullopt;
    const int flip = normalize_root ? spins[i] : 1;
    RootedSpinTree tree;
    std::unordered_map<Vertex, std::uint32_t> node_of;
    tree.nodes.push_back({spins[i] * flip, {}});
    node_of[i] = 0;
    // Acyclic ball: edges come out in discovery order, each with one vertex
    // already placed (its parent) and the rest new.
    for (EdgeId e : ball.edges) {
        Vertex parent = h.n();
        for (Vertex u : h.edge(e)) {
            if (node_of.count(u) != 0) parent = u;
        }
        if (parent == h.n()) throw std::logic_error("ball hyperedge without a placed parent");
        const auto edge_id = static_cast<std::uint32_t>(tree.edges.size());
        RootedSpinTree::HyperEdge edge{node_of[parent], {}};
        for (Vertex u : h.edge(e)) {
            if (u == parent) continue;
            const auto id = static_cast<std::uint32_t>(tree.nodes.size());
            tree.nodes.push_back({spins[u] * flip, {}});
            node_of[u] = id;
            edge.children.push_back(id);
        }
        tree.nodes[edge.parent].child_edges.push_back(edge_id);
        tree.edges.push_back(std::move(edge));
    }
    return tree;
}

double var_M_closed_form(std::uint32_t d, double alpha, unsigned t) {
    return (d - 1.0) * (1.0 - std::pow(alpha, -static_cast<double>(t))) / (alpha - 1.0);
}

double var_delta_closed_form(double kappa, double alpha, double beta, unsigned t) {
    const double ratio = beta * beta / alpha;
    if (ratio == 1.0) return kappa * t;
    return kappa * (1.0 - std::pow(ratio, -static_cast<double>(t))) / (ratio - 1.0);
}

namespace {

// Draws every replicate into memory, then reduces in index order so the
// result is independent of the worker count.
std::vector<GenerationCounts> replicate_counts(const GWConfig& config, std::size_t n_samples) {
    std::vector<GenerationCounts> out(n_samples);
    parallel_for(n_samples,
                 [&](unsigned, std::size_t s) { out[s] = sample_counts(config, derive_seed(config.seed, s)); });
    return out;
}

struct Welford {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    void add(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double se() const { return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

}  // namespace

MartingaleStats martingale_stats(const GWConfig& config, std::size_t n_samples) {
    config.validate();
    if (n_samples < 1000) throw std::invalid_argument("martingale_stats needs at least 1000 samples");
    const double alpha = alpha_of(config.d, config.a, config.b);
    const double beta = beta_of(config.d, config.a, config.b);
    const double kappa = kappa_of(config.d, config.a, config.b);
    const auto reps = replicate_counts(config, n_samples);

    MartingaleStats stats;
    stats.samples = n_samples;
    Welford tail;
    for (unsigned t = 0; t <= config.depth; ++t) {
        Welford m, delta;
        for (const auto& g : reps) {
            m.add(g.M[t]);
            delta.add(g.Delta[t]);
        }
        MomentRow row;
        row.t = t;
        row.mean_M = m.mean;
        row.se_M = m.se();
        row.var_M = m.variance();
        row.mean_Delta = delta.mean;
        row.se_Delta = delta.se();
        row.var_Delta = delta.variance();
        row.var_M_exact = var_M_closed_form(config.d, alpha, t);
        if (beta > 0.0) row.var_Delta_exact = var_delta_closed_form(kappa, alpha, beta, t);
        stats.rows.push_back(row);
    }
    for (const auto& g : reps) tail.add(g.Delta[config.depth] * g.Delta[config.depth]);
    stats.est_E_delta_inf_sq = tail.mean;
    stats.se_E_delta_inf_sq = tail.se();
    return stats;
}

OverlapConstant estimate_r(const GWConfig& config, double tau, std::size_t n_samples, unsigned depth) {
    config.validate();
    const double alpha = alpha_of(config.d, config.a, config.b);
    const double beta = beta_of(config.d, config.a, config.b);
    if (!(beta * beta > alpha)) {
        throw std::invalid_argument("estimate_r requires beta^2 > alpha (Delta_t not uniformly integrable)");
    }
    if (n_samples == 0) throw std::invalid_argument("estimate_r needs samples");
    GWConfig cfg = config;
    cfg.depth = depth;
    const auto reps = replicate_counts(cfg, n_samples);
    auto score = [&](double cut) {
        Welford w;
        for (const auto& g : reps) {
            const double x = g.Delta[depth];
            w.add((x >= cut ? 1.0 : 0.0) - (-x >= cut ? 1.0 : 0.0));
        }
        return w;
    };
    const Welford centre = score(tau);
    OverlapConstant out;
    out.r_hat = centre.mean;
    out.se = centre.se();
    out.r_hat_tau_minus = score(tau - 1e-3).mean;
    out.r_hat_tau_plus = score(tau + 1e-3).mean;
    return out;
}

double binom_pois_tv(std::int64_t m, std::int64_t n, double c) {
    if (m < 0 || n <= 0) throw std::invalid_argument("binom_pois_tv needs m >= 0 and n > 0");
    if (c < 0.0 || c / static_cast<double>(n) > 1.0) throw std::invalid_argument("binom_pois_tv needs 0 <= c/n <= 1");
    if (c == 0.0) return 0.0;
    const double p = c / static_cast<double>(n);
    const double bin_mean = static_cast<double>(m) * p;
    const double spread = std::max(bin_mean, c);
    // Both tails beyond this cutoff are far below 1e-12.
    const auto cutoff = static_cast<std::int64_t>(std::ceil(spread + 40.0 * std::sqrt(spread) + 60.0));
    // Extended precision keeps the lgamma cancellation below 1e-12 for large m.
    using ld = long double;
    const ld lc = static_cast<ld>(c);
    const ld lp = lc / static_cast<ld>(n);
    const ld log_c = std::log(lc);
    const ld log_p = std::log(lp);
    const ld log_q = std::log1p(-lp);
    const ld lg_m = std::lgamma(static_cast<ld>(m) + 1.0L);
    ld sum = 0.0L;
    for (std::int64_t k = 0; k <= cutoff; ++k) {
        const ld kk = static_cast<ld>(k);
        const ld lg_k = std::lgamma(kk + 1.0L);
        const ld pois = std::exp(kk * log_c - lc - lg_k);
        ld bin = 0.0L;
        if (k <= m) {
            if (p == 1.0) {
                bin = k == m ? 1.0L : 0.0L;
            } else {
                bin = std::exp(lg_m - lg_k - std::lgamma(static_cast<ld>(m - k) + 1.0L) + kk * log_p +
                               static_cast<ld>(m - k) * log_q);
            }
        }
        sum += std::abs(bin - pois);
    }
    return static_cast<double>(0.5L * sum);
}

OffspringCounts offspring_counts(const Hypergraph& h, const SpinAssignment& spins, Vertex i, unsigned t) {
    if (spins.size() != h.n()) throw std::invalid_argument("spin vector length differs from n");
    BallExplorer explorer(h);
    const Ball ball = explorer.explore(i, t + 1);
    const std::uint32_t d = h.d();
    OffspringCounts out;
    out.histogram.assign(d, {});
    for (Vertex v : ball.shells[t]) {
        std::vector<std::int64_t> x(d, 0);
        for (EdgeId e : h.incidence(v)) {
            bool all_next = true;
            std::uint32_t same = 0;
            for (Vertex u : h.edge(e)) {
                if (u == v) continue;
                if (explorer.level(u) != static_cast<int>(t) + 1) {
                    all_next = false;
                    break;
                }
                same += spins[u] == spins[v] ? 1 : 0;
            }
            if (all_next) ++x[same];
        }
        for (std::uint32_t r = 0; r < d; ++r) {
            auto& hist = out.histogram[r];
            const auto k = static_cast<std::size_t>(x[r]);
            if (hist.size() <= k) hist.resize(k + 1, 0);
            ++hist[k];
        }
        out.per_vertex.push_back(std::move(x));
    }
    return out;
}

}  // namespace hsbm
