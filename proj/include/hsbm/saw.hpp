#ifndef HSBM_SAW_HPP
#define HSBM_SAW_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hsbm/hypergraph.hpp"
#include "hsbm/model.hpp"
#include "hsbm/sparse.hpp"

namespace hsbm {

// A walk (i_0, e_1, i_1, ..., e_l, i_l). Hyperedges are indices into the
// hypergraph being walked.
struct SawWalk {
    std::vector<Vertex> vertices;
    std::vector<EdgeId> edges;
};

// Checks the three self-avoiding conditions plus the walk condition on an
// explicit vertex/hyperedge interleaving; `edge_sets[j]` is the vertex set of
// e_{j+1}. Used by the oracle paths, not by the DFS engine.
bool is_self_avoiding(std::span<const Vertex> vertices,
                      std::span<const std::span<const Vertex>> edge_sets);
bool is_walk(std::span<const Vertex> vertices, std::span<const std::span<const Vertex>> edge_sets);

// Visits every self-avoiding walk of length l from `source`, each once, in
// lexicographic (edge index, next vertex) order. The walk passed to the
// visitor is reused between calls.
void for_each_saw(const Hypergraph& h, Vertex source, unsigned l,
                  const std::function<void(const SawWalk&)>& visit);
std::vector<SawWalk> enumerate_saws(const Hypergraph& h, Vertex source, unsigned l);

// B^(l): entry (i, j) counts length-l self-avoiding walks from i to j;
// B^(0) is the identity. Rows are computed independently by DFS.
CountMatrix saw_matrix(const Hypergraph& h, unsigned l);

// Same contract, computed by brute force over every hyperedge sequence and
// every choice of pivot vertices inside it. Guarded to n <= 14, l <= 4,
// at most 12 edges.
CountMatrix saw_matrix_oracle(const Hypergraph& h, unsigned l);

// Conditional expectation of the adjacency matrix given the spins.
class ExpectedAdjacency {
public:
    ExpectedAdjacency(const ModelParams& params, const SpinAssignment& spins);

    double a_plus() const { return a_plus_; }
    double a_minus() const { return a_minus_; }
    double b_tilde() const { return b_tilde_; }

    double operator()(Vertex i, Vertex j) const;
    // Expected presence of a single d-subset, p_n or q_n by its spin pattern.
    double edge_probability(std::span<const Vertex> subset) const;

    Eigen::MatrixXd dense() const;
    // Same matrix assembled from the rank-structured decomposition
    // ((a+ + b)/2) 11^T + ((a+ - b)/2) ss^T + (a- - a+) R - a+ I.
    Eigen::MatrixXd dense_from_decomposition() const;

private:
    SpinAssignment spins_;
    double p_n_ = 0.0;
    double q_n_ = 0.0;
    double a_plus_ = 0.0;
    double a_minus_ = 0.0;
    double b_tilde_ = 0.0;
};

ExpectedAdjacency expected_adjacency(const ModelParams& params, const SpinAssignment& spins);

// Size guard shared by the complete-hypergraph computations below.
struct CompleteGuard {
    static constexpr std::uint32_t max_n = 10;
    static constexpr unsigned max_l = 3;
    static constexpr std::uint32_t max_d = 3;
};

// Delta^(l): sum over self-avoiding walks in the complete d-uniform
// hypergraph of prod_t (A^{e_t} - Abar^{e_t}); Delta^(0) is the identity.
Eigen::MatrixXd centered_saw_matrix(const Hypergraph& h, const ModelParams& params,
                                    const SpinAssignment& spins, unsigned l);

// Gamma^(l,m) for m = 1..l (index m-1 in the result). A walk contributes
// when its first l-m steps and its last m-1 steps are each self-avoiding but
// the whole walk is not; its weight is the centered product on the prefix,
// Abar on step l-m+1 and A on the rest. Not symmetric in general.
std::vector<Eigen::MatrixXd> gamma_matrices(const Hypergraph& h, const ModelParams& params,
                                            const SpinAssignment& spins, unsigned l);
Eigen::MatrixXd gamma_matrix(const Hypergraph& h, const ModelParams& params,
                             const SpinAssignment& spins, unsigned l, unsigned m);

struct ExpansionCheck {
    double max_residual = 0.0;
    double rho_delta = 0.0;            // spectral norm of Delta^(l)
    std::vector<double> rho_gamma;     // spectral norms of Gamma^(l,m), m = 1..l
};

// Max-abs entry of B - Delta - sum_m Delta^(l-m) Abar B^(m-1) + sum_m Gamma^(l,m).
ExpansionCheck check_expansion(const Hypergraph& h, const ModelParams& params,
                               const SpinAssignment& spins, unsigned l);
double verify_expansion(const Hypergraph& h, const ModelParams& params, const SpinAssignment& spins,
                        unsigned l);

struct NormEstimate {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Largest |eigenvalue| of a symmetric matrix by power iteration; stops when
// the relative change of the Rayleigh quotient falls below tol.
NormEstimate spectral_norm(const RealMatrix& m, double tol = 1e-10, int max_iter = 10000,
                           std::uint64_t seed = 1);
NormEstimate spectral_norm(const CountMatrix& m, double tol = 1e-10, int max_iter = 10000,
                           std::uint64_t seed = 1);
// Operator 2-norm of a dense (possibly non-symmetric) matrix, via M^T M.
NormEstimate spectral_norm(const Eigen::MatrixXd& m, double tol = 1e-10, int max_iter = 10000,
                           std::uint64_t seed = 1);

RealMatrix to_real(const CountMatrix& m);
Eigen::MatrixXd to_dense(const CountMatrix& m);

}  // namespace hsbm

#endif  // HSBM_SAW_HPP
