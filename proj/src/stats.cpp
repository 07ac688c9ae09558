#include "hsbm/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace hsbm {

double chi_square_sf(double statistic, int dof) {
    if (dof <= 0) return 1.0;
    if (statistic <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

double poisson_pmf(std::int64_t k, double mean) {
    if (k < 0) return 0.0;
    if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
    const double kk = static_cast<double>(k);
    return std::exp(kk * std::log(mean) - mean - std::lgamma(kk + 1.0));
}

ChiSquareResult chi_square_gof(const std::vector<std::int64_t>& observed,
                               const std::function<double(std::int64_t)>& pmf) {
    const std::int64_t total = std::accumulate(observed.begin(), observed.end(), std::int64_t{0});
    if (total <= 0) throw std::invalid_argument("chi-square test needs observations");
    const double n = static_cast<double>(total);

    std::vector<double> exp_bins;
    std::vector<double> obs_bins;
    double cum_p = 0.0;
    double run_e = 0.0;
    double run_o = 0.0;
    const auto last = static_cast<std::int64_t>(observed.size()) - 1;
    for (std::int64_t k = 0; k <= last; ++k) {
        const double p = pmf(k);
        cum_p += p;
        run_e += n * p;
        run_o += static_cast<double>(observed[static_cast<std::size_t>(k)]);
        if (run_e >= 5.0) {
            exp_bins.push_back(run_e);
            obs_bins.push_back(run_o);
            run_e = run_o = 0.0;
        }
    }
    // Upper tail beyond the last observed value.
    run_e += n * std::max(0.0, 1.0 - cum_p);
    if (exp_bins.empty() || run_e >= 5.0) {
        exp_bins.push_back(run_e);
        obs_bins.push_back(run_o);
    } else {
        exp_bins.back() += run_e;
        obs_bins.back() += run_o;
    }
    ChiSquareResult r;
    r.bins = exp_bins.size();
    for (std::size_t i = 0; i < exp_bins.size(); ++i) {
        if (exp_bins[i] > 0.0) {
            const double diff = obs_bins[i] - exp_bins[i];
            r.statistic += diff * diff / exp_bins[i];
        } else if (obs_bins[i] > 0.0) {
            r.statistic = std::numeric_limits<double>::infinity();
        }
    }
    r.dof = static_cast<int>(r.bins) - 1;
    r.p_value = std::isinf(r.statistic) ? 0.0 : chi_square_sf(r.statistic, r.dof);
    return r;
}

ChiSquareResult chi_square_two_sample(const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("two-sample test needs aligned categories");
    std::vector<double> bx, by;
    double rx = 0.0, ry = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        rx += static_cast<double>(x[k]);
        ry += static_cast<double>(y[k]);
        if (rx + ry >= 10.0) {
            bx.push_back(rx);
            by.push_back(ry);
            rx = ry = 0.0;
        }
    }
    if (rx + ry > 0.0) {
        if (bx.empty()) {
            bx.push_back(rx);
            by.push_back(ry);
        } else {
            bx.back() += rx;
            by.back() += ry;
        }
    }
    const double nx = std::accumulate(bx.begin(), bx.end(), 0.0);
    const double ny = std::accumulate(by.begin(), by.end(), 0.0);
    if (nx <= 0.0 || ny <= 0.0) throw std::invalid_argument("two-sample test needs observations on both sides");
    const double n = nx + ny;
    ChiSquareResult r;
    r.bins = bx.size();
    for (std::size_t i = 0; i < bx.size(); ++i) {
        const double col = bx[i] + by[i];
        const double ex = nx * col / n;
        const double ey = ny * col / n;
        r.statistic += (bx[i] - ex) * (bx[i] - ex) / ex + (by[i] - ey) * (by[i] - ey) / ey;
    }
    r.dof = static_cast<int>(r.bins) - 1;
    r.p_value = chi_square_sf(r.statistic, r.dof);
    return r;
}

double empirical_tv(const std::map<std::string, std::int64_t>& x, const std::map<std::string, std::int64_t>& y) {
    double nx = 0.0, ny = 0.0;
    for (const auto& [k, c] : x) nx += static_cast<double>(c);
    for (const auto& [k, c] : y) ny += static_cast<double>(c);
    if (nx <= 0.0 || ny <= 0.0) throw std::invalid_argument("empirical TV needs two non-empty samples");
    std::set<std::string> keys;
    for (const auto& [k, c] : x) keys.insert(k);
    for (const auto& [k, c] : y) keys.insert(k);
    double sum = 0.0;
    for (const auto& k : keys) {
        const auto ix = x.find(k);
        const auto iy = y.find(k);
        const double px = ix == x.end() ? 0.0 : static_cast<double>(ix->second) / nx;
        const double py = iy == y.end() ? 0.0 : static_cast<double>(iy->second) / ny;
        sum += std::abs(px - py);
    }
    return 0.5 * sum;
}

}  // namespace hsbm
