#ifndef HSBM_MODEL_HPP
#define HSBM_MODEL_HPP

#include <cstdint>
#include <optional>
#include <vector>

namespace hsbm {

// Inputs of the two-community d-uniform hypergraph stochastic block model.
// Every d-subset whose vertices share a spin is present with probability
// a / C(n, d-1), every other d-subset with probability b / C(n, d-1).
struct ModelParams {
    std::uint32_t n = 0;
    std::uint32_t d = 3;
    double a = 0.0;
    double b = 0.0;
    std::uint64_t seed = 0;
};

// Constants derived once from ModelParams and carried everywhere else.
struct DerivedRates {
    std::uint32_t d = 0;
    double alpha = 0.0;  // expected-degree constant
    double beta = 0.0;   // community-signal constant
    double kappa = 0.0;  // variance constant of the signed martingale
    double p_n = 0.0;    // inclusion probability of a monochromatic subset
    double q_n = 0.0;    // inclusion probability of a mixed subset
    // Only defined above the Kesten-Stigum threshold (beta^2 > alpha).
    std::optional<double> var_delta_inf;
    std::optional<double> e_delta_inf_sq;
};

// C(n, k) as a double; zero when k > n or n < 0.
double binomial(std::int64_t n, std::int64_t k);

// C(n, k) as an exact integer; throws std::overflow_error past 2^63.
std::int64_t binomial_exact(std::int64_t n, std::int64_t k);

// Throws std::invalid_argument when the parameters violate the model
// invariants (a >= b > 0, n >= d >= 2, p_n <= 1, q_n <= 1).
void validate(const ModelParams& params);

// alpha and beta only; no validation of n.
double alpha_of(std::uint32_t d, double a, double b);
double beta_of(std::uint32_t d, double a, double b);
double kappa_of(std::uint32_t d, double a, double b);

DerivedRates derive_rates(const ModelParams& params);

bool above_kesten_stigum(const DerivedRates& rates);

inline constexpr double kDefaultDepthFraction = 0.96;

// Walk length l = max(1, floor(c_fraction * ln(n) / (8 ln(alpha)))).
// Throws std::invalid_argument when alpha <= 1.
int recommended_depth(std::uint32_t n, double alpha,
                      double c_fraction = kDefaultDepthFraction);
int recommended_depth(const ModelParams& params,
                      double c_fraction = kDefaultDepthFraction);

// Hyperedge type law of the Galton-Watson hypertree: entry r is the
// probability that a child hyperedge holds r children of the parent's spin.
std::vector<double> type_probabilities(std::uint32_t d, double a, double b);

// (a, b) realizing a given (alpha, beta) at uniformity d.
std::pair<double, double> ab_from_alpha_beta(std::uint32_t d, double alpha, double beta);

}  // namespace hsbm

#endif  // HSBM_MODEL_HPP
