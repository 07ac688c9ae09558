// Acceptance report: one PASS/FAIL line per criterion. Criteria listed in
// --expect-red are still evaluated and printed; they only stop counting
// toward the exit status.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hsbm/experiments.hpp"
#include "hsbm/gwtree.hpp"
#include "hsbm/hypergraph.hpp"
#include "hsbm/io.hpp"
#include "hsbm/localstats.hpp"
#include "hsbm/saw.hpp"
#include "hsbm/spectral.hpp"
#include "hsbm/stats.hpp"
#include "oracles.hpp"

using namespace hsbm;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x, int precision = 4) {
    std::ostringstream os;
    os << std::setprecision(precision) << x;
    return os.str();
}

Hypergraph random_hypergraph(std::mt19937_64& rng, std::uint32_t n, std::uint32_t d, std::size_t edges) {
    std::set<std::vector<Vertex>> chosen;
    std::uniform_int_distribution<Vertex> pick(0, n - 1);
    for (int attempt = 0; attempt < 1000 && chosen.size() < edges; ++attempt) {
        std::set<Vertex> e;
        while (e.size() < d) e.insert(pick(rng));
        chosen.insert(std::vector<Vertex>(e.begin(), e.end()));
    }
    return Hypergraph(n, d, std::vector<std::vector<Vertex>>(chosen.begin(), chosen.end()));
}

Outcome saw_oracle_equivalence() {
    const auto start = Clock::now();
    std::mt19937_64 rng(20240101);
    std::size_t mismatches = 0, comparisons = 0;
    for (int instance = 0; instance < 100; ++instance) {
        const std::uint32_t d = 2 + instance % 2;
        const std::uint32_t n = 6 + static_cast<std::uint32_t>(rng() % 7);
        const Hypergraph h = random_hypergraph(rng, n, d, 4 + rng() % 9);
        for (unsigned l = 1; l <= 4; ++l) {
            ++comparisons;
            if (!(saw_matrix(h, l) == saw_matrix_oracle(h, l))) ++mismatches;
        }
    }
    const double secs = seconds_since(start);
    return {mismatches == 0 && secs < 60.0, std::to_string(comparisons) + " comparisons, " +
                                                std::to_string(mismatches) + " mismatches, " + fmt(secs, 3) + " s"};
}

Outcome expansion_identity() {
    const auto start = Clock::now();
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const ModelParams p{7, 3, 10.0, 2.0, 7000 + s};
        const auto lh = sample_hsbm(p);
        for (unsigned l = 1; l <= 3; ++l) worst = std::max(worst, verify_expansion(lh.graph, p, lh.spins, l));
    }
    const double secs = seconds_since(start);
    return {worst <= 1e-9 && secs < 300.0, "max residual " + fmt(worst, 3) + ", " + fmt(secs, 3) + " s"};
}

Outcome length_one_consistency() {
    std::size_t bad_adjacency = 0, bad_trace = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto lh = sample_hsbm({200, 3, 10.0, 2.0, 300 + s});
        if (!(saw_matrix(lh.graph, 1) == adjacency_matrix(lh.graph))) ++bad_adjacency;
    }
    std::mt19937_64 rng(77);
    for (int instance = 0; instance < 50; ++instance) {
        const std::uint32_t d = 2 + instance % 2;
        const Hypergraph h = random_hypergraph(rng, 12, d, 3 + rng() % 10);
        const auto a = oracle::adjacency(12, h.edge_list());
        for (unsigned k = 1; k <= 4; ++k) {
            if (circuit_count(h, k) != oracle::trace_power(a, k)) ++bad_trace;
        }
    }
    return {bad_adjacency == 0 && bad_trace == 0, "B^(1) != A on " + std::to_string(bad_adjacency) +
                                                      "/50, trace mismatches " + std::to_string(bad_trace) + "/200"};
}

Outcome tangle_free_indicator() {
    const unsigned l = 3;
    const std::uint32_t n = 500;
    std::size_t vertices = 0, violations = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto lh = sample_hsbm({n, 3, 10.0, 2.0, 900 + s});
        std::vector<CountMatrix> b;
        for (unsigned m = 1; m <= l; ++m) b.push_back(saw_matrix(lh.graph, m));
        const auto edges = lh.graph.edge_list();
        for (Vertex i = 0; i < n; ++i) {
            if (bfs_profile(lh.graph, lh.spins, i, l).tangled) continue;
            ++vertices;
            const auto dist = oracle::distances(n, edges, i);
            for (unsigned m = 1; m <= l; ++m) {
                for (Vertex k = 0; k < n; ++k) {
                    if (b[m - 1].at(i, k) != (dist[k] == static_cast<int>(m) ? 1 : 0)) ++violations;
                }
            }
        }
    }
    return {violations == 0 && vertices > 0, std::to_string(vertices) + " cycle-free vertices at l=3, " +
                                                 std::to_string(violations) + " violations"};
}

Outcome martingale_moments() {
    const auto start = Clock::now();
    GWConfig c;
    c.a = 10.0;
    c.b = 2.0;
    c.d = 3;
    c.depth = 10;
    c.seed = 515;
    const auto st = martingale_stats(c, 100000);
    const double secs = seconds_since(start);
    std::size_t off = 0;
    for (const auto& row : st.rows) {
        if (row.t == 0) continue;
        if (std::abs(row.mean_M - 1.0) > 3.0 * row.se_M) ++off;
        if (std::abs(row.mean_Delta - 1.0) > 3.0 * row.se_Delta) ++off;
    }
    const double vd = st.rows[1].var_Delta;
    const double vm = st.rows[1].var_M;
    const bool pass = off == 0 && std::abs(vd - 0.75) <= 0.05 * 0.75 && std::abs(vm - 0.25) <= 0.05 * 0.25 &&
                      secs < 120.0;
    return {pass, "means outside 3 SE: " + std::to_string(off) + "/20, Var(Delta_1)=" + fmt(vd) +
                      ", Var(M_1)=" + fmt(vm) + ", " + fmt(secs, 3) + " s"};
}

Outcome thresholding_statistic_check() {
    const ModelParams base{5000, 3, 10.0, 2.0, 0};
    const auto rates = derive_rates(base);
    const int l = recommended_depth(base);
    double sum = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        ModelParams p = base;
        p.seed = 6000 + s;
        const auto lh = sample_hsbm(p);
        const auto sd = sd_vectors(lh.graph, lh.spins, static_cast<unsigned>(l));
        sum += thresholding_statistic(sd.D, rates.beta, static_cast<unsigned>(l));
    }
    const double mean = sum / 10.0;
    const double target = *rates.e_delta_inf_sq;
    const double finite = 1.0 + var_delta_closed_form(rates.kappa, rates.alpha, rates.beta, static_cast<unsigned>(l));
    // Deeper radius on one seed, for comparison only.
    ModelParams deep = base;
    deep.seed = 6000;
    const auto lh = sample_hsbm(deep);
    const double at3 = thresholding_statistic(sd_vectors(lh.graph, lh.spins, 3).D, rates.beta, 3);
    const double finite3 = 1.0 + var_delta_closed_form(rates.kappa, rates.alpha, rates.beta, 3);
    return {std::abs(mean - target) <= 0.15 * target,
            "l=" + std::to_string(l) + ", mean statistic " + fmt(mean) + " vs E[Delta_inf^2]=" + fmt(target) +
                " (tree value at depth l: " + fmt(finite) + "; one seed at l=3: " + fmt(at3) + ", tree value " +
                fmt(finite3) + ")"};
}

struct DetectionRuns {
    std::vector<RunRecord> above;
    std::vector<RunRecord> below;
    double secs = 0.0;
};

const DetectionRuns& detection_runs() {
    static const DetectionRuns runs = [] {
        DetectionRuns r;
        const auto start = Clock::now();
        SweepSpec spec;
        spec.n_list = {2000};
        spec.seeds_per_cell = 20;
        spec.master_seed = 2024;
        spec.cells = {{10.0, 2.0}};
        r.above = run_sweep(spec);
        spec.cells = cells_from_ratios(3, alpha_of(3, 10.0, 2.0), {0.0});
        r.below = run_sweep(spec);
        r.secs = seconds_since(start);
        return r;
    }();
    return runs;
}

Outcome detection_above_threshold() {
    const auto& runs = detection_runs();
    const double above = runs.above.back().abs_overlap;
    const double below = runs.below.back().abs_overlap;
    return {above >= 0.15 && below <= 0.134 && runs.secs < 900.0,
            "mean |overlap| " + fmt(above) + " above (>= 0.15), " + fmt(below) + " at a=b (<= 0.134), " +
                fmt(runs.secs, 3) + " s"};
}

Outcome eigenvector_alignment() {
    const auto& runs = detection_runs();
    int s_ok = 0, d_ok = 0, gap_ok = 0;
    double gap_sum = 0.0, d_sum = 0.0;
    int seeds = 0;
    for (const auto& r : runs.above) {
        if (r.aggregate) continue;
        ++seeds;
        s_ok += r.alignment_s >= 0.9 ? 1 : 0;
        d_ok += r.alignment_d >= 0.8 ? 1 : 0;
        const bool ordered = r.lambda1 > r.lambda2 && r.lambda2 > std::abs(r.lambda3) && r.gap23 > 1.5;
        gap_ok += ordered ? 1 : 0;
        gap_sum += r.gap23;
        d_sum += r.alignment_d;
    }
    return {s_ok >= 16 && d_ok >= 16 && gap_ok >= 16,
            "alignment_S>=0.9 in " + std::to_string(s_ok) + "/" + std::to_string(seeds) + ", alignment_D>=0.8 in " +
                std::to_string(d_ok) + " (mean " + fmt(d_sum / seeds) + "), lambda2/lambda3>1.5 in " +
                std::to_string(gap_ok) + " (mean " + fmt(gap_sum / seeds) + ")"};
}

Outcome offspring_coupling() {
    const std::uint32_t n = 5000;
    const int graphs = 100, roots_per_graph = 100;
    std::map<std::string, std::int64_t> hsbm_forms, gw_forms, gw_null;
    std::vector<std::vector<std::int64_t>> hist(3);
    for (int g = 0; g < graphs; ++g) {
        const auto lh = sample_hsbm({n, 3, 10.0, 2.0, 40000 + static_cast<std::uint64_t>(g)});
        for (int k = 0; k < roots_per_graph; ++k) {
            const Vertex i = static_cast<Vertex>(k * (n / roots_per_graph));
            const auto tree = neighborhood_tree(lh.graph, lh.spins, i, 1, true);
            ++hsbm_forms[tree ? canonical_form(*tree) : std::string("cyclic")];
            const auto oc = offspring_counts(lh.graph, lh.spins, i, 0);
            for (std::size_t r = 0; r < 3; ++r) {
                const auto x = static_cast<std::size_t>(oc.per_vertex[0][r]);
                if (hist[r].size() <= x) hist[r].resize(x + 1, 0);
                ++hist[r][x];
            }
        }
    }
    GWConfig c;
    c.a = 10.0;
    c.b = 2.0;
    c.d = 3;
    c.depth = 1;
    for (std::uint64_t s = 0; s < 10000; ++s) {
        ++gw_forms[canonical_form(sample_tree(c, s))];
        ++gw_null[canonical_form(sample_tree(c, 1000000 + s))];
    }
    const double tv = empirical_tv(hsbm_forms, gw_forms);
    const double null_tv = empirical_tv(gw_null, gw_forms);
    const auto rates = offspring_rates(3, 10.0, 2.0);
    double min_p = 1.0;
    for (std::size_t r = 0; r < 3; ++r) {
        const auto res = chi_square_gof(hist[r], [&](std::int64_t k) { return poisson_pmf(k, rates[r]); });
        min_p = std::min(min_p, res.p_value);
    }
    return {tv <= 0.05 && min_p > 0.001,
            "TV " + fmt(tv) + " over " + std::to_string(hsbm_forms.size()) + "/" + std::to_string(gw_forms.size()) +
                " forms (GW vs GW at the same size: " + fmt(null_tv) + "), min offspring chi-square p " +
                fmt(min_p)};
}

Outcome binomial_poisson_tv() {
    const double tv = binom_pois_tv(1000, 1000, 1.0);
    const double t2 = binom_pois_tv(100, 100, 1.0);
    const double t4 = binom_pois_tv(10000, 10000, 1.0);
    return {tv < 5.0 / 1000 && t2 > tv && tv > t4,
            "TV(1e2, 1e3, 1e4) = " + fmt(t2) + ", " + fmt(tv) + ", " + fmt(t4)};
}

Outcome cli_determinism(const std::string& cli) {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / ("hsbm_accept_" + std::to_string(::getpid()));
    const std::vector<std::string> commands = {
        "generate --n 400 --a 10 --b 2 --seed 3 --out g.json",
        "generate --n 400 --a 10 --b 2 --seed 3 --out g.bin",
        "saw --in g.json --l 2 --out saw.json",
        "detect --in g.json --l 1 --truth --t-sweep -0.5,0.5 --json-out det.json --csv-out det.csv",
        "detect --in g.bin --l 2 --json-out detb.json",
        "stats --in g.json --l 2 --out stats.csv",
        "gw --a 10 --b 2 --depth 6 --samples 2000 --seed 4 --json-out gw.json",
        "sweep --n 300 --ab 10:2,6:6 --seeds 2 --seed 8 --csv-out sweep.csv --json-out sweep.json",
        "sweep --n 300 --alpha 8 --ratios 0.5,2 --seeds 2 --l 1 --seed 8 --csv-out ratios.csv",
        "verify --trials 2 --gw-samples 2000 --gw-depth 4 --json-out verify.json",
    };
    std::vector<std::string> failures;
    for (const char* pass : {"a", "b"}) {
        const fs::path dir = root / pass;
        fs::create_directories(dir);
        for (std::size_t k = 0; k < commands.size(); ++k) {
            const std::string line = "cd \"" + dir.string() + "\" && \"" + cli + "\" " + commands[k] + " > stdout" +
                                     std::to_string(k) + ".txt 2>&1";
            if (std::system(line.c_str()) != 0) failures.push_back(std::string(pass) + ": exit status of `" + commands[k] + "`");
        }
    }
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(root / "a")) {
        ++files;
        const fs::path other = root / "b" / entry.path().filename();
        if (!fs::exists(other) || read_file(entry.path().string()) != read_file(other.string())) {
            failures.push_back("differs: " + entry.path().filename().string());
        }
    }
    fs::remove_all(root);
    std::string detail = std::to_string(commands.size()) + " commands, " + std::to_string(files) + " files compared";
    for (const auto& f : failures) detail += "; " + f;
    return {failures.empty() && files > commands.size(), detail};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria report"};
    std::vector<int> expect_red;
    std::vector<int> only;
    std::string cli = HSBM_CLI_PATH;
    std::string report_path;
    app.add_option("--expect-red", expect_red, "Criteria known to fail; reported but not counted")->delimiter(',');
    app.add_option("--only", only, "Evaluate only these criteria")->delimiter(',');
    app.add_option("--cli", cli, "Path of the hsbm executable")->capture_default_str();
    app.add_option("--report", report_path, "Also write the report lines to this file");
    CLI11_PARSE(app, argc, argv);
    std::ostringstream report;

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"SAW oracle equivalence", saw_oracle_equivalence},
        {"expansion identity", expansion_identity},
        {"l=1 consistency and trace circuits", length_one_consistency},
        {"tangle-free indicator law", tangle_free_indicator},
        {"GW martingale moments", martingale_moments},
        {"thresholding statistic", thresholding_statistic_check},
        {"detection above threshold", detection_above_threshold},
        {"eigenvector alignment", eigenvector_alignment},
        {"offspring-law coupling", offspring_coupling},
        {"Bin/Pois total variation", binomial_poisson_tv},
        {"CLI determinism", [&] { return cli_determinism(cli); }},
    };

    const std::set<int> red(expect_red.begin(), expect_red.end());
    const std::set<int> selected(only.begin(), only.end());
    int unexpected = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!selected.empty() && selected.count(id) == 0) continue;
        const auto start = Clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::ostringstream line;
        line << "criterion " << id << " (" << criteria[k].first << "): " << (o.pass ? "PASS" : "FAIL") << "  "
             << o.detail;
        if (!o.pass && red.count(id) != 0) line << "  [known red]";
        line << "  [" << fmt(seconds_since(start), 3) << " s]";
        std::cout << line.str() << std::endl;
        report << line.str() << "\n";
        if (!o.pass && red.count(id) == 0) ++unexpected;
    }
    std::cout << "unexpected failures: " << unexpected << std::endl;
    report << "unexpected failures: " << unexpected << "\n";
    if (!report_path.empty()) write_file(report_path, report.str());
    return unexpected == 0 ? 0 : 1;
}
