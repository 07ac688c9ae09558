#include "hsbm/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hsbm {

double binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n) return 0.0;
    if (k > n - k) k = n - k;
    long double result = 1.0L;
    for (std::int64_t i = 1; i <= k; ++i) {
        result = result * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    }
    return static_cast<double>(std::round(result));
}

std::int64_t binomial_exact(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    __int128 result = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;  // exact: C(n-k+i, i) is an integer
        if (result > std::numeric_limits<std::int64_t>::max()) {
            throw std::overflow_error("binomial coefficient exceeds 64 bits");
        }
    }
    return static_cast<std::int64_t>(result);
}

double alpha_of(std::uint32_t d, double a, double b) {
    const double two_pow = std::ldexp(1.0, static_cast<int>(d) - 1);
    return (d - 1.0) * (a + (two_pow - 1.0) * b) / two_pow;
}

double beta_of(std::uint32_t d, double a, double b) {
    const double two_pow = std::ldexp(1.0, static_cast<int>(d) - 1);
    return (d - 1.0) * (a - b) / two_pow;
}

double kappa_of(std::uint32_t d, double a, double b) {
    const double two_pow = std::ldexp(1.0, static_cast<int>(d) - 1);
    return ((d - 1.0) * (a - b) + two_pow * b) / (a + (two_pow - 1.0) * b);
}

void validate(const ModelParams& params) {
    if (params.d < 2) throw std::invalid_argument("uniformity d must be at least 2");
    if (params.n < params.d) throw std::invalid_argument("n must be at least d");
    if (!(params.b > 0.0)) throw std::invalid_argument("b must be positive");
    if (!(params.a >= params.b)) throw std::invalid_argument("a must be at least b");
    if (!std::isfinite(params.a)) throw std::invalid_argument("a must be finite");
    const double subsets = binomial(params.n, params.d - 1);
    if (params.a / subsets > 1.0) {
        throw std::invalid_argument("p_n = a / C(n, d-1) exceeds 1; n too small for a (n=" +
                                    std::to_string(params.n) + ")");
    }
}

DerivedRates derive_rates(const ModelParams& params) {
    validate(params);
    DerivedRates rates;
    rates.d = params.d;
    rates.alpha = alpha_of(params.d, params.a, params.b);
    rates.beta = beta_of(params.d, params.a, params.b);
    rates.kappa = kappa_of(params.d, params.a, params.b);
    const double subsets = binomial(params.n, params.d - 1);
    rates.p_n = params.a / subsets;
    rates.q_n = params.b / subsets;
    const double ratio = rates.beta * rates.beta / rates.alpha;
    if (ratio > 1.0) {
        rates.var_delta_inf = rates.kappa / (ratio - 1.0);
        rates.e_delta_inf_sq = 1.0 + *rates.var_delta_inf;
    }
    return rates;
}

bool above_kesten_stigum(const DerivedRates& rates) {
    return rates.beta * rates.beta > rates.alpha;
}

int recommended_depth(std::uint32_t n, double alpha, double c_fraction) {
    if (!(alpha > 1.0)) throw std::invalid_argument("recommended_depth requires alpha > 1");
    if (!(c_fraction > 0.0 && c_fraction < 1.0)) {
        throw std::invalid_argument("c_fraction must lie in (0, 1)");
    }
    const double raw = c_fraction * std::log(static_cast<double>(n)) / (8.0 * std::log(alpha));
    return std::max(1, static_cast<int>(std::floor(raw)));
}

int recommended_depth(const ModelParams& params, double c_fraction) {
    return recommended_depth(params.n, alpha_of(params.d, params.a, params.b), c_fraction);
}

std::vector<double> type_probabilities(std::uint32_t d, double a, double b) {
    const double alpha = alpha_of(d, a, b);
    const double two_pow = std::ldexp(1.0, static_cast<int>(d) - 1);
    std::vector<double> probs(d, 0.0);
    for (std::uint32_t r = 0; r + 1 < d; ++r) {
        probs[r] = (d - 1.0) * b * binomial(d - 1, r) / (alpha * two_pow);
    }
    probs[d - 1] = (d - 1.0) * a / (alpha * two_pow);
    return probs;
}

std::pair<double, double> ab_from_alpha_beta(std::uint32_t d, double alpha, double beta) {
    if (!(alpha > beta && beta >= 0.0)) {
        throw std::invalid_argument("need alpha > beta >= 0");
    }
    const double two_pow = std::ldexp(1.0, static_cast<int>(d) - 1);
    const double b = (alpha - beta) / (d - 1.0);
    const double a = b + beta * two_pow / (d - 1.0);
    return {a, b};
}

}  // namespace hsbm
