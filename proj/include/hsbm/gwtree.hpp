#ifndef HSBM_GWTREE_HPP
#define HSBM_GWTREE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hsbm/hypergraph.hpp"
#include "hsbm/model.hpp"

namespace hsbm {

// Multi-type Poisson Galton-Watson hypertree. Each vertex of spin s roots
// Pois(alpha / (d - 1)) child hyperedges; a hyperedge is of type r (r of its
// d - 1 children carry spin s) with the probabilities of type_probabilities().
struct GWConfig {
    double a = 0.0;
    double b = 0.0;
    std::uint32_t d = 3;
    int root_spin = 1;
    unsigned depth = 1;
    std::uint64_t seed = 0;

    // Throws std::invalid_argument unless a >= b > 0, d >= 2, root spin +-1
    // and the type probabilities sum to 1.
    void validate() const;
};

// Per-generation counts. W_r[t][r] counts generation-t hyperedges holding
// exactly r children of spin +.
struct GenerationCounts {
    std::vector<std::int64_t> W_plus;
    std::vector<std::int64_t> W_minus;
    std::vector<std::vector<std::int64_t>> W_r;
    std::vector<double> M;      // alpha^{-t} (W+ + W-)
    std::vector<double> Delta;  // beta^{-t} (W+ - W-)
};

// Counts-only sampler: W^(r)_t are independent Poisson given generation t-1.
GenerationCounts sample_counts(const GWConfig& config);
// Same law drawn from an explicit stream (used by replicate loops).
GenerationCounts sample_counts(const GWConfig& config, std::uint64_t stream_seed);

struct RootedSpinTree {
    struct Node {
        int spin = 1;
        std::vector<std::uint32_t> child_edges;
    };
    struct HyperEdge {
        std::uint32_t parent = 0;
        std::vector<std::uint32_t> children;
    };
    std::vector<Node> nodes;  // nodes[0] is the root
    std::vector<HyperEdge> edges;
};

// Explicit tree; guarded to expected size alpha^depth <= 1e6.
RootedSpinTree sample_tree(const GWConfig& config);
RootedSpinTree sample_tree(const GWConfig& config, std::uint64_t stream_seed);

// Per-generation counts read off an explicit tree.
GenerationCounts tree_generation_counts(const RootedSpinTree& tree, const GWConfig& config);

// Canonical string; equal iff the trees are spin-preserving isomorphic as
// rooted hypertrees. Throws std::invalid_argument on a malformed or cyclic
// structure.
std::string canonical_form(const RootedSpinTree& tree);

// Rooted neighborhood of radius `depth` as a tree, or nullopt if the ball
// contains a cycle. With normalize_root, spins are multiplied by sigma_i so
// the root is always +.
std::optional<RootedSpinTree> neighborhood_tree(const Hypergraph& h, const SpinAssignment& spins, Vertex i,
                                                unsigned depth, bool normalize_root = false);

struct MomentRow {
    unsigned t = 0;
    double mean_M = 0.0, se_M = 0.0, var_M = 0.0;
    double mean_Delta = 0.0, se_Delta = 0.0, var_Delta = 0.0;
    double var_M_exact = 0.0;
    std::optional<double> var_Delta_exact;  // needs beta > 0
};

struct MartingaleStats {
    std::vector<MomentRow> rows;     // t = 0..depth
    double est_E_delta_inf_sq = 0.0; // mean of Delta_depth^2
    double se_E_delta_inf_sq = 0.0;
    std::size_t samples = 0;
};

// Monte Carlo moments of M_t and Delta_t over independent replicates; needs
// n_samples >= 1000.
MartingaleStats martingale_stats(const GWConfig& config, std::size_t n_samples);

// Closed forms: Var(M_t) = (d-1)(1 - alpha^{-t})/(alpha - 1) and
// Var(Delta_t) = kappa (1 - (beta^2/alpha)^{-t}) / (beta^2/alpha - 1).
double var_M_closed_form(std::uint32_t d, double alpha, unsigned t);
double var_delta_closed_form(double kappa, double alpha, double beta, unsigned t);

struct OverlapConstant {
    double r_hat = 0.0;
    double se = 0.0;
    double r_hat_tau_minus = 0.0;  // at tau - 1e-3
    double r_hat_tau_plus = 0.0;   // at tau + 1e-3
};

// r = P(Delta >= tau) - P(-Delta >= tau) with Delta_depth standing in for
// Delta_infinity. Rejects configurations with beta^2 <= alpha.
OverlapConstant estimate_r(const GWConfig& config, double tau, std::size_t n_samples, unsigned depth);

// Exact total variation between Bin(m, c/n) and Pois(c), truncated with a
// remainder below 1e-12.
double binom_pois_tv(std::int64_t m, std::int64_t n, double c);

// For each v in V_t(i): number of hyperedges at v whose other d - 1 vertices
// all lie in V_{t+1}(i), by r = number of those sharing sigma(v).
struct OffspringCounts {
    std::vector<std::vector<std::int64_t>> per_vertex;  // [v in V_t][r]
    // histogram[r][k] = number of v with X_v^(r) = k
    std::vector<std::vector<std::int64_t>> histogram;
};

OffspringCounts offspring_counts(const Hypergraph& h, const SpinAssignment& spins, Vertex i, unsigned t);

// Poisson rates of X^(r) for a root of either spin: index r is the rate of
// hyperedges with r children sharing the parent's spin.
std::vector<double> offspring_rates(std::uint32_t d, double a, double b);

}  // namespace hsbm

#endif  // HSBM_GWTREE_HPP
