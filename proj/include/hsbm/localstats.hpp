#ifndef HSBM_LOCALSTATS_HPP
#define HSBM_LOCALSTATS_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "hsbm/hypergraph.hpp"
#include "hsbm/model.hpp"

namespace hsbm {

// Breadth-first ball of radius l around a vertex. shells[t] lists V_t(i) in
// discovery order. cycle_count is the number of independent cycles of the
// sub-hypergraph induced on V_{<=l}(i): incidences minus vertices minus
// hyperedges plus one.
struct Ball {
    Vertex root = 0;
    std::vector<std::vector<Vertex>> shells;
    std::vector<EdgeId> edges;  // hyperedges of the induced sub-hypergraph
    int cycle_count = 0;
};

// Reusable BFS workspace; one per thread.
class BallExplorer {
public:
    explicit BallExplorer(const Hypergraph& h);

    Ball explore(Vertex root, unsigned l);
    // Distance of v from the last explored root, or -1 outside the ball.
    int level(Vertex v) const { return level_[v]; }

private:
    void reset();

    const Hypergraph& h_;
    std::vector<int> level_;
    std::vector<char> edge_seen_;
    std::vector<Vertex> labeled_;
    std::vector<EdgeId> seen_edges_;
};

struct NeighborhoodProfile {
    Vertex vertex = 0;
    std::vector<std::int64_t> S;  // |V_t(i)|
    std::vector<std::int64_t> D;  // sum of spins over V_t(i)
    std::vector<std::int64_t> U_plus;
    std::vector<std::int64_t> U_minus;
    int cycle_count = 0;
    bool tangled = false;     // at least one cycle in V_{<=l}(i)
    bool two_cycles = false;  // at least two
};

NeighborhoodProfile bfs_profile(const Hypergraph& h, const SpinAssignment& spins, Vertex i, unsigned l);
NeighborhoodProfile profile_from_ball(const Ball& ball, const SpinAssignment& spins, unsigned l);

struct TangleCensus {
    std::size_t tangled_count = 0;
    bool l_tangle_free = true;  // no vertex sees two cycles
    int max_cycle_count = 0;
};

TangleCensus tangle_census(const Hypergraph& h, unsigned l);

// U_{k,s}^{(r)} for r = 0..s: distinct s-subsets of V_k(i) that, together
// with d - s vertices of V_{k-1}(i), form a hyperedge; bucketed by the number
// r of + spins.
std::vector<std::int64_t> connected_subsets(const Hypergraph& h, const SpinAssignment& spins, Vertex i, unsigned k,
                                            unsigned s);

using Matrix2 = std::array<std::array<double, 2>, 2>;

// M = (1/2) [[alpha + beta, alpha - beta], [alpha - beta, alpha + beta]].
Matrix2 growth_matrix(double alpha, double beta);
// M^k from the closed form.
Matrix2 growth_matrix_power(double alpha, double beta, unsigned k);
// M^steps (U+, U-).
std::array<double, 2> growth_prediction(const DerivedRates& rates, std::array<double, 2> u, unsigned steps);

struct QuasiResiduals {
    std::vector<double> s_resid;  // S_t - alpha^{t-l} S_l
    std::vector<double> d_resid;  // D_t - beta^{t-l} D_l
    std::vector<double> s_scaled; // s_resid / alpha^{t/2}
    std::vector<double> d_scaled;
};

QuasiResiduals quasi_residuals(const NeighborhoodProfile& profile, const DerivedRates& rates, unsigned l);

struct SdVectors {
    std::vector<double> S;
    std::vector<double> D;
};

// Per-vertex S_l(i) and D_l(i).
SdVectors sd_vectors(const Hypergraph& h, const SpinAssignment& spins, unsigned l);

// (1/n) sum_i beta^{-2l} D_l(i)^2.
double thresholding_statistic(std::span<const double> d_l, double beta, unsigned l);

}  // namespace hsbm

#endif  // HSBM_LOCALSTATS_HPP
