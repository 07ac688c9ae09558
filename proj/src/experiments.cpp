#include "hsbm/experiments.hpp"

#include <chrono>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hsbm/gwtree.hpp"
#include "hsbm/hypergraph.hpp"
#include "hsbm/io.hpp"
#include "hsbm/localstats.hpp"
#include "hsbm/parallel.hpp"
#include "hsbm/rng.hpp"
#include "hsbm/saw.hpp"
#include "hsbm/spectral.hpp"

namespace hsbm {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}

void SweepSpec::validate() const {
    if (cells.empty()) throw std::invalid_argument("sweep needs at least one (a, b) cell");
    if (n_list.empty()) throw std::invalid_argument("sweep needs at least one n");
    if (seeds_per_cell == 0) throw std::invalid_argument("sweep needs at least one seed per cell");
    if (fixed_l && *fixed_l == 0) throw std::invalid_argument("sweep walk length must be at least 1");
    for (auto n : n_list) {
        for (const auto& c : cells) hsbm::validate(ModelParams{n, d, c.a, c.b, 0});
    }
}

std::vector<SweepCell> cells_from_ratios(std::uint32_t d, double alpha, const std::vector<double>& ratios) {
    std::vector<SweepCell> cells;
    for (double r : ratios) {
        if (!(r >= 0.0)) throw std::invalid_argument("ratio beta^2/alpha must be nonnegative");
        const auto [a, b] = ab_from_alpha_beta(d, alpha, std::sqrt(r * alpha));
        cells.push_back({a, b});
    }
    return cells;
}

std::uint64_t replicate_seed(std::uint64_t master_seed, unsigned s) {
    return derive_seed(master_seed, s);
}

namespace {

RunRecord run_one(const SweepSpec& spec, std::uint32_t n, const SweepCell& cell, unsigned s) {
    RunRecord r;
    r.n = n;
    r.d = spec.d;
    r.a = cell.a;
    r.b = cell.b;
    r.alpha = alpha_of(spec.d, cell.a, cell.b);
    r.beta = beta_of(spec.d, cell.a, cell.b);
    r.ratio = r.beta * r.beta / r.alpha;
    r.t = spec.t;
    r.seed = replicate_seed(spec.master_seed, s);
    const auto start = std::chrono::steady_clock::now();
    try {
        const ModelParams params{n, spec.d, cell.a, cell.b, r.seed};
        r.l = spec.fixed_l ? *spec.fixed_l : static_cast<unsigned>(recommended_depth(params, spec.depth_fraction));
        const LabeledHypergraph lh = sample_hsbm(params);
        DetectOptions opt;
        opt.l = r.l;
        opt.t = spec.t;
        opt.num_pairs = 3;
        const DetectionResult det = detect(lh.graph, opt, &lh.spins);
        r.overlap = det.overlap.value_or(kNan);
        r.abs_overlap = std::abs(r.overlap);
        const auto ev = [&](std::size_t k) { return k < det.eigenpairs.size() ? det.eigenpairs[k].value : kNan; };
        r.lambda1 = ev(0);
        r.lambda2 = ev(1);
        r.lambda3 = ev(2);
        r.gap12 = std::abs(r.lambda1 / r.lambda2);
        r.gap23 = std::abs(r.lambda2 / r.lambda3);
        r.alignment_s = det.alignment_s;
        r.alignment_d = det.alignment_d.value_or(kNan);
        r.converged = det.converged;
        r.tangle_fraction =
            static_cast<double>(tangle_census(lh.graph, r.l).tangled_count) / static_cast<double>(n);
    } catch (const std::exception& e) {
        r.error = e.what();
        r.overlap = r.abs_overlap = kNan;
        r.lambda1 = r.lambda2 = r.lambda3 = r.gap12 = r.gap23 = kNan;
        r.alignment_s = r.alignment_d = r.tangle_fraction = kNan;
        r.converged = false;
    }
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

RunRecord aggregate(const std::vector<RunRecord>& rows) {
    RunRecord agg = rows.front();
    agg.aggregate = true;
    agg.seed = 0;
    agg.error.clear();
    std::size_t ok = 0;
    double* fields[] = {&agg.overlap, &agg.abs_overlap, &agg.lambda1, &agg.lambda2, &agg.lambda3,
                        &agg.gap12, &agg.gap23, &agg.alignment_s, &agg.alignment_d, &agg.tangle_fraction};
    for (double* f : fields) *f = 0.0;
    agg.wall_time_s = 0.0;
    agg.converged = true;
    for (const auto& r : rows) {
        agg.wall_time_s += r.wall_time_s;
        if (!r.error.empty()) continue;
        ++ok;
        const double vals[] = {r.overlap, r.abs_overlap, r.lambda1, r.lambda2, r.lambda3,
                               r.gap12, r.gap23, r.alignment_s, r.alignment_d, r.tangle_fraction};
        for (std::size_t k = 0; k < std::size(fields); ++k) *fields[k] += vals[k];
        agg.converged = agg.converged && r.converged;
    }
    for (double* f : fields) *f = ok > 0 ? *f / static_cast<double>(ok) : kNan;
    if (ok < rows.size()) {
        agg.error = std::to_string(rows.size() - ok) + " of " + std::to_string(rows.size()) + " seeds failed";
        if (ok == 0) agg.converged = false;
    }
    return agg;
}

}  // namespace

std::vector<RunRecord> run_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::size_t per_n = spec.cells.size() * spec.seeds_per_cell;
    const std::size_t jobs = spec.n_list.size() * per_n;
    std::vector<RunRecord> rows(jobs);
    parallel_for(jobs, [&](unsigned, std::size_t j) {
        const std::size_t ni = j / per_n;
        const std::size_t ci = (j % per_n) / spec.seeds_per_cell;
        const auto s = static_cast<unsigned>(j % spec.seeds_per_cell);
        rows[j] = run_one(spec, spec.n_list[ni], spec.cells[ci], s);
    });
    std::vector<RunRecord> out;
    for (std::size_t start = 0; start < jobs; start += spec.seeds_per_cell) {
        std::vector<RunRecord> group(rows.begin() + static_cast<std::ptrdiff_t>(start),
                                     rows.begin() + static_cast<std::ptrdiff_t>(start + spec.seeds_per_cell));
        out.insert(out.end(), group.begin(), group.end());
        out.push_back(aggregate(group));
    }
    return out;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string sweep_to_csv(const std::vector<RunRecord>& records, bool with_timing) {
    std::ostringstream out;
    out << "# schema=" << kSchemaVersion << "\n";
    out << "n,d,a,b,alpha,beta,ratio,l,t,row,seed,overlap,abs_overlap,lambda1,lambda2,lambda3,gap12,gap23,"
           "alignment_s,alignment_d,tangle_fraction,converged,error";
    if (with_timing) out << ",wall_time_s";
    out << "\n";
    for (const auto& r : records) {
        out << r.n << ',' << r.d << ',' << format_double(r.a) << ',' << format_double(r.b) << ','
            << format_double(r.alpha) << ',' << format_double(r.beta) << ',' << format_double(r.ratio) << ','
            << r.l << ',' << format_double(r.t) << ',' << (r.aggregate ? "aggregate" : "seed") << ',';
        if (!r.aggregate) out << r.seed;
        for (double v : {r.overlap, r.abs_overlap, r.lambda1, r.lambda2, r.lambda3, r.gap12, r.gap23, r.alignment_s,
                         r.alignment_d, r.tangle_fraction}) {
            out << ',' << format_double(v);
        }
        out << ',' << (r.converged ? 1 : 0) << ',' << csv_escape(r.error);
        if (with_timing) out << ',' << format_double(r.wall_time_s);
        out << "\n";
    }
    return out.str();
}

std::string sweep_to_json(const std::vector<RunRecord>& records, bool with_timing) {
    using nlohmann::json;
    json rows = json::array();
    for (const auto& r : records) {
        json j{{"n", r.n}, {"d", r.d}, {"a", r.a}, {"b", r.b}, {"alpha", r.alpha}, {"beta", r.beta},
               {"ratio", r.ratio}, {"l", r.l}, {"t", r.t}, {"row", r.aggregate ? "aggregate" : "seed"},
               {"overlap", r.overlap}, {"abs_overlap", r.abs_overlap}, {"lambda1", r.lambda1},
               {"lambda2", r.lambda2}, {"lambda3", r.lambda3}, {"gap12", r.gap12}, {"gap23", r.gap23},
               {"alignment_s", r.alignment_s}, {"alignment_d", r.alignment_d},
               {"tangle_fraction", r.tangle_fraction}, {"converged", r.converged}, {"error", r.error}};
        if (!r.aggregate) j["seed"] = r.seed;
        if (with_timing) j["wall_time_s"] = r.wall_time_s;
        rows.push_back(std::move(j));
    }
    return json{{"schema", kSchemaVersion}, {"records", std::move(rows)}}.dump(2) + "\n";
}

namespace {

void note(SuiteResult& s, bool ok, const std::string& what) {
    ++s.checks;
    if (!ok) {
        ++s.failures;
        s.passed = false;
        if (s.messages.size() < 20) s.messages.push_back(what);
    }
}

// Small instance for the brute-force checks; truncated to `max_edges`
// hyperedges so the oracle stays tractable.
LabeledHypergraph small_instance(const VerifyOptions& o, std::uint32_t n, std::uint32_t d, unsigned trial,
                                 std::size_t max_edges) {
    ModelParams p{n, d, o.a, o.b, derive_seed(o.seed, trial)};
    // Clamp the rates so tiny n still yields valid probabilities.
    const double cap = binomial(n, d - 1);
    p.a = std::min(p.a, cap);
    p.b = std::min(p.b, p.a);
    LabeledHypergraph lh = sample_hsbm(p);
    auto edges = lh.graph.edge_list();
    if (edges.size() > max_edges) {
        edges.resize(max_edges);
        lh.graph = Hypergraph(n, d, edges);
    }
    return lh;
}

void corrupt(CountMatrix& b) {
    const auto trips = b.triplets();
    if (trips.empty()) return;
    b.set_existing(trips.front().row, trips.front().col, trips.front().value + 1);
}

SuiteResult saw_suite(const VerifyOptions& o) {
    SuiteResult s;
    s.name = "saw";
    const std::uint32_t n = std::min<std::uint32_t>(o.n, 12);
    const std::uint32_t d = std::min<std::uint32_t>(o.d, 3);
    const unsigned lmax = std::min(o.l, 4u);
    for (unsigned trial = 0; trial < o.trials; ++trial) {
        const auto lh = small_instance(o, n, d, trial, 12);
        for (unsigned l = 1; l <= lmax; ++l) {
            CountMatrix fast = saw_matrix(lh.graph, l);
            if (o.inject_fault && trial == 0 && l == 1) corrupt(fast);
            note(s, fast == saw_matrix_oracle(lh.graph, l),
                 "trial " + std::to_string(trial) + " l=" + std::to_string(l) + ": DFS and brute force differ");
        }
    }
    return s;
}

SuiteResult expansion_suite(const VerifyOptions& o) {
    SuiteResult s;
    s.name = "expansion";
    const std::uint32_t n = std::min<std::uint32_t>(o.n, 7);
    const std::uint32_t d = std::min<std::uint32_t>(o.d, CompleteGuard::max_d);
    const unsigned lmax = std::min(o.l, CompleteGuard::max_l);
    for (unsigned trial = 0; trial < o.trials; ++trial) {
        ModelParams p{n, d, o.a, o.b, derive_seed(o.seed, trial)};
        const double cap = binomial(n, d - 1);
        p.a = std::min(p.a, cap);
        p.b = std::min(p.b, p.a);
        const auto lh = sample_hsbm(p);
        for (unsigned l = 1; l <= lmax; ++l) {
            const double r = verify_expansion(lh.graph, p, lh.spins, l);
            s.max_residual = std::max(s.max_residual, r);
            note(s, r <= 1e-9,
                 "trial " + std::to_string(trial) + " l=" + std::to_string(l) + ": residual " + format_double(r));
        }
    }
    return s;
}

std::vector<std::vector<std::int64_t>> dense_product(const std::vector<std::vector<std::int64_t>>& x,
                                                     const std::vector<std::vector<std::int64_t>>& y) {
    const std::size_t n = x.size();
    std::vector<std::vector<std::int64_t>> z(n, std::vector<std::int64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            if (x[i][k] == 0) continue;
            for (std::size_t j = 0; j < n; ++j) z[i][j] += x[i][k] * y[k][j];
        }
    }
    return z;
}

SuiteResult circuit_suite(const VerifyOptions& o) {
    SuiteResult s;
    s.name = "circuit";
    const std::uint32_t n = std::min<std::uint32_t>(o.n, 12);
    for (unsigned trial = 0; trial < o.trials; ++trial) {
        const auto lh = small_instance(o, n, o.d, trial, std::numeric_limits<std::size_t>::max());
        const CountMatrix a = adjacency_matrix(lh.graph);
        CountMatrix b1 = saw_matrix(lh.graph, 1);
        if (o.inject_fault && trial == 0) corrupt(b1);
        note(s, b1 == a, "trial " + std::to_string(trial) + ": B^(1) differs from the adjacency matrix");
        std::vector<std::vector<std::int64_t>> dense(n, std::vector<std::int64_t>(n, 0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) dense[i][j] = b1.at(i, j);
        }
        auto power = dense;
        for (unsigned k = 1; k <= 4; ++k) {
            if (k > 1) power = dense_product(power, dense);
            std::int64_t trace = 0;
            for (std::size_t i = 0; i < n; ++i) trace += power[i][i];
            const std::int64_t circuits = circuit_count(lh.graph, k);
            s.max_residual = std::max(s.max_residual, std::abs(static_cast<double>(circuits - trace)));
            note(s, circuits == trace,
                 "trial " + std::to_string(trial) + " k=" + std::to_string(k) + ": circuits " +
                     std::to_string(circuits) + " vs trace " + std::to_string(trace));
        }
    }
    return s;
}

SuiteResult gw_suite(const VerifyOptions& o) {
    SuiteResult s;
    s.name = "gw";
    GWConfig cfg;
    cfg.a = o.a;
    cfg.b = o.b;
    cfg.d = o.d;
    cfg.depth = o.gw_depth;
    cfg.seed = o.seed;
    const auto stats = martingale_stats(cfg, o.gw_samples);
    const bool signal = beta_of(o.d, o.a, o.b) > 0.0;
    for (const auto& row : stats.rows) {
        const double zm = std::abs(row.mean_M - 1.0);
        note(s, zm <= 3.0 * row.se_M,
             "t=" + std::to_string(row.t) + ": mean M " + format_double(row.mean_M) + " (SE " +
                 format_double(row.se_M) + ")");
        if (signal) {
            note(s, std::abs(row.mean_Delta - 1.0) <= 3.0 * row.se_Delta,
                 "t=" + std::to_string(row.t) + ": mean Delta " + format_double(row.mean_Delta) + " (SE " +
                     format_double(row.se_Delta) + ")");
        }
    }
    if (stats.rows.size() > 1) {
        const auto& r1 = stats.rows[1];
        const double rel_m = std::abs(r1.var_M / r1.var_M_exact - 1.0);
        s.max_residual = std::max(s.max_residual, rel_m);
        note(s, rel_m <= 0.05, "Var(M_1) " + format_double(r1.var_M) + " vs " + format_double(r1.var_M_exact));
        if (r1.var_Delta_exact) {
            const double rel_d = std::abs(r1.var_Delta / *r1.var_Delta_exact - 1.0);
            s.max_residual = std::max(s.max_residual, rel_d);
            note(s, rel_d <= 0.05,
                 "Var(Delta_1) " + format_double(r1.var_Delta) + " vs " + format_double(*r1.var_Delta_exact));
        }
    }
    return s;
}

}  // namespace

VerifyReport run_verify(const VerifyOptions& options) {
    for (const auto& name : options.suites) {
        if (known_suites().count(name) == 0) throw std::invalid_argument("unknown suite " + name);
    }
    if (options.l == 0) throw std::invalid_argument("verify needs l >= 1");
    VerifyReport report;
    auto run = [&](const std::string& name, auto fn) {
        if (options.suites.count(name) == 0) return;
        SuiteResult r;
        try {
            r = fn(options);
        } catch (const std::exception& e) {
            r.name = name;
            r.passed = false;
            ++r.failures;
            r.messages.push_back(std::string("error: ") + e.what());
        }
        report.passed = report.passed && r.passed;
        report.suites.push_back(std::move(r));
    };
    run("saw", saw_suite);
    run("expansion", expansion_suite);
    run("circuit", circuit_suite);
    run("gw", gw_suite);
    return report;
}

std::string verify_to_text(const VerifyReport& report) {
    std::ostringstream out;
    for (const auto& s : report.suites) {
        out << "suite " << s.name << ": " << (s.passed ? "PASS" : "FAIL") << " (" << s.checks << " checks, "
            << s.failures << " failures, max residual " << format_double(s.max_residual) << ")\n";
        for (const auto& m : s.messages) out << "  " << m << "\n";
    }
    out << "overall: " << (report.passed ? "PASS" : "FAIL") << "\n";
    return out.str();
}

std::string verify_to_json(const VerifyReport& report) {
    using nlohmann::json;
    json suites = json::array();
    for (const auto& s : report.suites) {
        suites.push_back({{"name", s.name}, {"passed", s.passed}, {"checks", s.checks}, {"failures", s.failures},
                          {"max_residual", s.max_residual}, {"messages", s.messages}});
    }
    return json{{"schema", kSchemaVersion}, {"passed", report.passed}, {"suites", std::move(suites)}}.dump(2) + "\n";
}

}  // namespace hsbm
