#ifndef HSBM_EXPERIMENTS_HPP
#define HSBM_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hsbm/model.hpp"

namespace hsbm {

struct SweepCell {
    double a = 0.0;
    double b = 0.0;
};

struct SweepSpec {
    std::vector<SweepCell> cells;
    std::vector<std::uint32_t> n_list;
    std::uint32_t d = 3;
    unsigned seeds_per_cell = 1;
    std::optional<unsigned> fixed_l;  // otherwise recommended_depth per cell
    double depth_fraction = kDefaultDepthFraction;
    double t = 0.0;
    std::uint64_t master_seed = 0;

    // Throws std::invalid_argument if any (n, cell) violates the model
    // invariants or the lists are empty.
    void validate() const;
};

// Cells with beta^2 / alpha = ratio at fixed alpha.
std::vector<SweepCell> cells_from_ratios(std::uint32_t d, double alpha, const std::vector<double>& ratios);

// Model seed of replicate s; shared by every cell of the sweep.
std::uint64_t replicate_seed(std::uint64_t master_seed, unsigned s);

struct RunRecord {
    std::uint32_t n = 0;
    std::uint32_t d = 0;
    double a = 0.0;
    double b = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double ratio = 0.0;  // beta^2 / alpha
    unsigned l = 0;
    double t = 0.0;
    bool aggregate = false;
    std::uint64_t seed = 0;  // model seed; unused on aggregate rows
    double overlap = 0.0;    // signed; mean over seeds on aggregate rows
    double abs_overlap = 0.0;
    double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
    double gap12 = 0.0;  // |lambda1 / lambda2|
    double gap23 = 0.0;  // |lambda2 / lambda3|
    double alignment_s = 0.0;
    double alignment_d = 0.0;
    double tangle_fraction = 0.0;
    bool converged = true;
    std::string error;  // empty on success
    double wall_time_s = 0.0;
};

// Per-seed rows followed by one aggregate row per (n, cell), in
// (n, cell, seed) order regardless of worker count.
std::vector<RunRecord> run_sweep(const SweepSpec& spec);

// Deterministic unless with_timing adds the wall-time column.
std::string sweep_to_csv(const std::vector<RunRecord>& records, bool with_timing = false);
std::string sweep_to_json(const std::vector<RunRecord>& records, bool with_timing = false);

struct VerifyOptions {
    std::set<std::string> suites{"saw", "expansion", "circuit", "gw"};
    unsigned trials = 20;
    std::uint32_t n = 10;
    std::uint32_t d = 3;
    double a = 10.0;
    double b = 2.0;
    unsigned l = 3;
    std::uint64_t seed = 0;
    std::size_t gw_samples = 100000;
    unsigned gw_depth = 10;
    bool inject_fault = false;  // corrupts one B entry in the saw and circuit suites
};

struct SuiteResult {
    std::string name;
    bool passed = true;
    std::size_t checks = 0;
    std::size_t failures = 0;
    double max_residual = 0.0;
    std::vector<std::string> messages;
};

struct VerifyReport {
    std::vector<SuiteResult> suites;
    bool passed = true;
};

VerifyReport run_verify(const VerifyOptions& options);
std::string verify_to_text(const VerifyReport& report);
std::string verify_to_json(const VerifyReport& report);

inline const std::set<std::string>& known_suites() {
    static const std::set<std::string> names{"saw", "expansion", "circuit", "gw"};
    return names;
}

}  // namespace hsbm

#endif  // HSBM_EXPERIMENTS_HPP
