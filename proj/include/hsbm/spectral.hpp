#ifndef HSBM_SPECTRAL_HPP
#define HSBM_SPECTRAL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hsbm/hypergraph.hpp"
#include "hsbm/sparse.hpp"

namespace hsbm {

struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;  // unit 2-norm
    int iterations = 0;
    bool converged = false;
};

struct EigenOptions {
    double tol = 1e-8;
    int max_iter = 5000;
    std::uint64_t seed = 1;
};

// k dominant eigenpairs by |value| (k <= 4), descending, by block power
// iteration with Rayleigh-Ritz on a (k + 4)-column orthonormal block. A pair
// is converged once ||M v - lambda v|| <= tol (|lambda| + 1).
std::vector<EigenPair> top_eigenpairs(const CountMatrix& m, int k, const EigenOptions& options = {});
std::vector<EigenPair> top_eigenpairs(const RealMatrix& m, int k, const EigenOptions& options = {});

// +1 where x_i >= t / sqrt(n), -1 otherwise.
SpinAssignment estimate_labels(std::span<const double> x, double t);

// (1/n) sum sigma_i sigma_hat_i; throws on a length mismatch.
double overlap(const SpinAssignment& estimate, const SpinAssignment& truth);

// |<v, w>| / (|v| |w|); throws on a zero vector.
double alignment(std::span<const double> v, std::span<const double> w);

// Max of ||B x|| over `trials` random unit x orthogonal to span{v1, v2}.
double bulk_residual(const CountMatrix& b, std::span<const double> v1, std::span<const double> v2, int trials,
                     std::uint64_t seed = 1);

struct DetectOptions {
    unsigned l = 1;
    double t = 0.0;
    int num_pairs = 3;
    EigenOptions eigen;
};

struct DetectionResult {
    unsigned l = 0;
    SpinAssignment labels;
    double threshold_t = 0.0;
    std::vector<EigenPair> eigenpairs;
    bool zero_spectrum = false;
    bool converged = true;
    std::optional<double> overlap;  // signed; present with ground truth
    double alignment_s = 0.0;       // first eigenvector vs S_l
    std::optional<double> alignment_d;  // second eigenvector vs D_l (needs truth)
    std::size_t nnz = 0;
};

// Builds B^(l), extracts the leading eigenpairs and thresholds the second
// eigenvector at t / sqrt(n).
DetectionResult detect(const Hypergraph& h, const DetectOptions& options,
                       const SpinAssignment* truth = nullptr);
// Same, reusing an already-built B^(l).
DetectionResult detect_from_matrix(const Hypergraph& h, const CountMatrix& b, const DetectOptions& options,
                                   const SpinAssignment* truth = nullptr);

}  // namespace hsbm

#endif  // HSBM_SPECTRAL_HPP
