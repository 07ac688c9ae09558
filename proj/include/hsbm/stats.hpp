#ifndef HSBM_STATS_HPP
#define HSBM_STATS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace hsbm {

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    std::size_t bins = 0;
};

// Goodness of fit of integer-valued observations against a pmf.
// observed[k] is the number of draws equal to k. Bins are merged left to
// right until every merged bin expects at least 5 draws; the last bin
// absorbs the upper tail of the pmf.
ChiSquareResult chi_square_gof(const std::vector<std::int64_t>& observed, const std::function<double(std::int64_t)>& pmf);

// Two-sample homogeneity test over aligned categories; adjacent categories
// are merged until each merged bin holds at least 10 draws in total.
ChiSquareResult chi_square_two_sample(const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y);

// Upper tail of the chi-square law.
double chi_square_sf(double statistic, int dof);

// Total variation between the empirical distributions of two labelled
// samples.
double empirical_tv(const std::map<std::string, std::int64_t>& x, const std::map<std::string, std::int64_t>& y);

double poisson_pmf(std::int64_t k, double mean);

}  // namespace hsbm

#endif  // HSBM_STATS_HPP
