#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "hsbm/experiments.hpp"
#include "hsbm/gwtree.hpp"
#include "hsbm/hypergraph.hpp"
#include "hsbm/io.hpp"
#include "hsbm/localstats.hpp"
#include "hsbm/model.hpp"
#include "hsbm/saw.hpp"
#include "hsbm/spectral.hpp"

namespace {

using nlohmann::json;
using namespace hsbm;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

// Bad invocation or unusable input.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
    } else {
        write_file(path, content);
    }
}

json optional_number(const std::optional<double>& x) {
    return x ? json(*x) : json(nullptr);
}

// ---- generate -------------------------------------------------------------

struct GenerateArgs {
    std::string config;
    std::uint32_t n = 0;
    std::uint32_t d = 3;
    double a = 0.0;
    double b = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string format;
};

int run_generate(const GenerateArgs& g, const CLI::App& cmd) {
    ModelParams p;
    if (!g.config.empty()) p = config_from_json(read_file(g.config)).params;
    if (cmd.count("--n") || g.config.empty()) p.n = g.n;
    if (cmd.count("--d") || g.config.empty()) p.d = g.d;
    if (cmd.count("--a") || g.config.empty()) p.a = g.a;
    if (cmd.count("--b") || g.config.empty()) p.b = g.b;
    if (cmd.count("--seed") || g.config.empty()) p.seed = g.seed;
    validate(p);
    const LabeledHypergraph lh = sample_hsbm(p);
    std::string format = g.format;
    if (format.empty()) format = g.out.size() > 4 && g.out.ends_with(".bin") ? "bin" : "json";
    if (format == "bin") {
        emit(g.out, hypergraph_to_binary(lh.graph, &lh.spins));
    } else {
        emit(g.out, hypergraph_to_json(lh.graph, &lh.spins, &p));
    }
    std::cerr << "generated n=" << p.n << " d=" << p.d << " edges=" << lh.graph.num_edges() << "\n";
    return kOk;
}

// ---- saw ------------------------------------------------------------------

struct SawArgs {
    std::string in;
    unsigned l = 1;
    std::string out;
};

int run_saw(const SawArgs& s) {
    const HypergraphFile f = hypergraph_from_bytes(read_file(s.in));
    emit(s.out, saw_to_json(saw_matrix(f.graph, s.l), s.l));
    return kOk;
}

// ---- detect ---------------------------------------------------------------

struct DetectArgs {
    std::string in;
    std::optional<unsigned> l;
    double t = 0.0;
    bool truth = false;
    std::vector<double> t_sweep;
    std::string json_out;
    std::string csv_out;
    std::uint64_t seed = 1;
    int pairs = 3;
};

unsigned resolve_depth(const std::optional<unsigned>& l, const HypergraphFile& f) {
    if (l) {
        if (*l < 1) throw UsageError("--l must be at least 1");
        return *l;
    }
    if (!f.params) throw UsageError("--l is required when the input carries no model parameters");
    return static_cast<unsigned>(recommended_depth(*f.params));
}

int run_detect(const DetectArgs& a) {
    const HypergraphFile f = hypergraph_from_bytes(read_file(a.in));
    if (a.truth && !f.spins) throw UsageError("--truth needs spins stored in the input file");
    DetectOptions opt;
    opt.l = resolve_depth(a.l, f);
    opt.t = a.t;
    opt.num_pairs = a.pairs;
    opt.eigen.seed = a.seed;
    const SpinAssignment* truth = a.truth ? &*f.spins : nullptr;
    const CountMatrix b = saw_matrix(f.graph, opt.l);
    const DetectionResult r = detect_from_matrix(f.graph, b, opt, truth);

    json j;
    j["schema"] = kSchemaVersion;
    j["n"] = f.graph.n();
    j["d"] = f.graph.d();
    j["edges"] = f.graph.num_edges();
    j["l"] = r.l;
    j["t"] = r.threshold_t;
    j["nnz"] = r.nnz;
    j["zero_spectrum"] = r.zero_spectrum;
    j["converged"] = r.converged;
    json values = json::array(), iterations = json::array();
    for (const auto& p : r.eigenpairs) {
        values.push_back(p.value);
        iterations.push_back(p.iterations);
    }
    j["eigenvalues"] = values;
    j["iterations"] = iterations;
    j["alignment_s"] = r.alignment_s;
    j["alignment_d"] = optional_number(r.alignment_d);
    j["overlap"] = optional_number(r.overlap);
    j["abs_overlap"] = r.overlap ? json(std::abs(*r.overlap)) : json(nullptr);
    std::vector<int> labels(r.labels.values().begin(), r.labels.values().end());
    j["labels"] = labels;
    if (!a.t_sweep.empty()) {
        json sweep = json::array();
        const auto& second = r.eigenpairs.size() > 1 ? r.eigenpairs[1].vector : std::vector<double>(f.graph.n(), 0.0);
        for (double t : a.t_sweep) {
            const SpinAssignment est = estimate_labels(second, t);
            json row{{"t", t}};
            if (truth != nullptr) {
                const double ov = overlap(est, *truth);
                row["overlap"] = ov;
                row["abs_overlap"] = std::abs(ov);
            }
            row["plus_fraction"] = static_cast<double>(est.count_plus()) / static_cast<double>(est.size());
            sweep.push_back(std::move(row));
        }
        j["t_sweep"] = std::move(sweep);
    }
    if (!a.json_out.empty()) emit(a.json_out, j.dump(2) + "\n");
    if (!a.csv_out.empty()) {
        std::ostringstream csv;
        csv << "# schema=" << kSchemaVersion << "\n";
        csv << "i,label";
        for (std::size_t k = 0; k < r.eigenpairs.size(); ++k) csv << ",v" << (k + 1);
        if (truth != nullptr) csv << ",truth";
        csv << "\n";
        for (std::size_t i = 0; i < f.graph.n(); ++i) {
            csv << i << ',' << r.labels[i];
            for (const auto& p : r.eigenpairs) csv << ',' << format_double(p.vector[i]);
            if (truth != nullptr) csv << ',' << (*truth)[i];
            csv << "\n";
        }
        emit(a.csv_out, csv.str());
    }
    if (a.json_out.empty() && a.csv_out.empty()) {
        std::cout << "l=" << r.l << " nnz=" << r.nnz << " eigenvalues:";
        for (const auto& p : r.eigenpairs) std::cout << ' ' << format_double(p.value);
        std::cout << "\nalignment_s=" << format_double(r.alignment_s);
        if (r.alignment_d) std::cout << " alignment_d=" << format_double(*r.alignment_d);
        if (r.overlap) std::cout << " overlap=" << format_double(*r.overlap);
        std::cout << "\n";
    }
    return kOk;
}

// ---- stats ----------------------------------------------------------------

struct StatsArgs {
    std::string in;
    unsigned l = 1;
    std::string out;
};

int run_stats(const StatsArgs& s) {
    const HypergraphFile f = hypergraph_from_bytes(read_file(s.in));
    if (!f.spins) throw UsageError("stats needs spins stored in the input file");
    BallExplorer explorer(f.graph);
    std::vector<NeighborhoodProfile> profiles;
    profiles.reserve(f.graph.n());
    std::size_t tangled = 0;
    bool tangle_free = true;
    for (Vertex i = 0; i < f.graph.n(); ++i) {
        profiles.push_back(profile_from_ball(explorer.explore(i, s.l), *f.spins, s.l));
        tangled += profiles.back().tangled ? 1 : 0;
        tangle_free = tangle_free && !profiles.back().two_cycles;
    }
    emit(s.out, profiles_to_csv(profiles, s.l));
    std::cerr << "vertices=" << f.graph.n() << " tangled=" << tangled
              << " l_tangle_free=" << (tangle_free ? "yes" : "no") << "\n";
    return kOk;
}

// ---- gw -------------------------------------------------------------------

struct GwArgs {
    double a = 0.0;
    double b = 0.0;
    std::uint32_t d = 3;
    unsigned depth = 10;
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
    int root_spin = 1;
    double tau = 0.0;
    std::string json_out;
};

int run_gw(const GwArgs& g) {
    GWConfig cfg;
    cfg.a = g.a;
    cfg.b = g.b;
    cfg.d = g.d;
    cfg.depth = g.depth;
    cfg.seed = g.seed;
    cfg.root_spin = g.root_spin;
    cfg.validate();
    if (g.depth < 1) throw UsageError("--depth must be at least 1");
    const MartingaleStats st = martingale_stats(cfg, g.samples);
    const double alpha = alpha_of(g.d, g.a, g.b);
    const double beta = beta_of(g.d, g.a, g.b);
    const double kappa = kappa_of(g.d, g.a, g.b);

    json rows = json::array();
    std::ostringstream table;
    table << "t mean_M se_M var_M var_M_exact mean_Delta se_Delta var_Delta var_Delta_exact\n";
    for (const auto& r : st.rows) {
        rows.push_back({{"t", r.t}, {"mean_M", r.mean_M}, {"se_M", r.se_M}, {"var_M", r.var_M},
                        {"var_M_exact", r.var_M_exact}, {"mean_Delta", r.mean_Delta}, {"se_Delta", r.se_Delta},
                        {"var_Delta", r.var_Delta}, {"var_Delta_exact", optional_number(r.var_Delta_exact)}});
        table << r.t << ' ' << format_double(r.mean_M) << ' ' << format_double(r.se_M) << ' '
              << format_double(r.var_M) << ' ' << format_double(r.var_M_exact) << ' '
              << format_double(r.mean_Delta) << ' ' << format_double(r.se_Delta) << ' '
              << format_double(r.var_Delta) << ' '
              << (r.var_Delta_exact ? format_double(*r.var_Delta_exact) : std::string("nan")) << "\n";
    }
    json j{{"schema", kSchemaVersion},
           {"config", {{"a", g.a}, {"b", g.b}, {"d", g.d}, {"depth", g.depth}, {"seed", g.seed},
                       {"root_spin", g.root_spin}, {"samples", g.samples}}},
           {"alpha", alpha},
           {"beta", beta},
           {"kappa", kappa},
           {"rows", std::move(rows)},
           {"est_E_delta_inf_sq", st.est_E_delta_inf_sq},
           {"se_E_delta_inf_sq", st.se_E_delta_inf_sq}};
    if (beta * beta > alpha) {
        const double var_inf = kappa / (beta * beta / alpha - 1.0);
        j["var_delta_inf_exact"] = var_inf;
        j["E_delta_inf_sq_exact"] = 1.0 + var_inf;
        const OverlapConstant r = estimate_r(cfg, g.tau, g.samples, g.depth);
        j["overlap_constant"] = {{"tau", g.tau}, {"r_hat", r.r_hat}, {"se", r.se},
                                 {"r_hat_tau_minus", r.r_hat_tau_minus}, {"r_hat_tau_plus", r.r_hat_tau_plus}};
        table << "r_hat(tau=" << format_double(g.tau) << ") " << format_double(r.r_hat) << " se "
              << format_double(r.se) << "\n";
    }
    table << "E[Delta_depth^2] " << format_double(st.est_E_delta_inf_sq) << " se "
          << format_double(st.se_E_delta_inf_sq) << "\n";
    if (!g.json_out.empty()) emit(g.json_out, j.dump(2) + "\n");
    std::cout << table.str();
    return kOk;
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
    std::vector<std::uint32_t> n{2000};
    std::uint32_t d = 3;
    std::vector<std::string> ab;
    double alpha = 0.0;
    std::vector<double> ratios;
    unsigned seeds = 20;
    std::optional<unsigned> l;
    double depth_fraction = kDefaultDepthFraction;
    double t = 0.0;
    std::uint64_t seed = 0;
    std::string csv_out;
    std::string json_out;
    bool timing = false;
};

int run_sweep_cmd(const SweepArgs& s) {
    SweepSpec spec;
    spec.n_list = s.n;
    spec.d = s.d;
    spec.seeds_per_cell = s.seeds;
    spec.fixed_l = s.l;
    spec.depth_fraction = s.depth_fraction;
    spec.t = s.t;
    spec.master_seed = s.seed;
    for (const auto& cell : s.ab) {
        const auto colon = cell.find(':');
        if (colon == std::string::npos) throw UsageError("--ab cells are written a:b, got " + cell);
        try {
            spec.cells.push_back({std::stod(cell.substr(0, colon)), std::stod(cell.substr(colon + 1))});
        } catch (const std::logic_error&) {
            throw UsageError("cannot parse --ab cell " + cell);
        }
    }
    if (!s.ratios.empty()) {
        if (!(s.alpha > 1.0)) throw UsageError("--ratios needs --alpha > 1");
        const auto cells = cells_from_ratios(s.d, s.alpha, s.ratios);
        spec.cells.insert(spec.cells.end(), cells.begin(), cells.end());
    }
    if (spec.cells.empty()) throw UsageError("sweep needs --ab or --alpha with --ratios");
    const auto records = run_sweep(spec);
    const std::string csv = sweep_to_csv(records, s.timing);
    if (!s.csv_out.empty()) emit(s.csv_out, csv);
    if (!s.json_out.empty()) emit(s.json_out, sweep_to_json(records, s.timing));
    if (s.csv_out.empty() && s.json_out.empty()) std::cout << csv;
    return kOk;
}

// ---- verify ---------------------------------------------------------------

struct VerifyArgs {
    VerifyOptions options;
    std::vector<std::string> suites;
    std::string json_out;
};

int run_verify_cmd(VerifyArgs v) {
    if (!v.suites.empty()) {
        v.options.suites.clear();
        for (const auto& s : v.suites) {
            if (known_suites().count(s) == 0) throw UsageError("unknown suite " + s);
            v.options.suites.insert(s);
        }
    }
    const VerifyReport report = run_verify(v.options);
    std::cout << verify_to_text(report);
    if (!v.json_out.empty()) emit(v.json_out, verify_to_json(report));
    return report.passed ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral community detection on sparse hypergraph stochastic block models"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "hsbm 0.1.0");

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Sample a labelled hypergraph");
    generate->add_option("--config", gen.config, "JSON record {n, d, a, b, seed}; flags override it");
    generate->add_option("--n", gen.n, "Number of vertices");
    generate->add_option("--d", gen.d, "Uniformity")->capture_default_str();
    generate->add_option("--a", gen.a, "Within-community rate");
    generate->add_option("--b", gen.b, "Across-community rate");
    generate->add_option("--seed", gen.seed, "RNG seed")->capture_default_str();
    generate->add_option("--out", gen.out, "Output path ('-' for stdout)")->required();
    generate->add_option("--format", gen.format, "json or bin (default: from the extension)")
        ->check(CLI::IsMember({"json", "bin"}));

    SawArgs saw;
    auto* saw_cmd = app.add_subcommand("saw", "Self-avoiding walk matrix as sparse triplets");
    saw_cmd->add_option("--in", saw.in, "Input hypergraph (JSON or binary)")->required()->check(CLI::ExistingFile);
    saw_cmd->add_option("--l", saw.l, "Walk length")->required();
    saw_cmd->add_option("--out", saw.out, "Output path ('-' for stdout)")->required();
    std::uint64_t unused_seed = 0;
    saw_cmd->add_option("--seed", unused_seed, "Accepted for uniformity; the computation is deterministic");

    DetectArgs det;
    auto* detect_cmd = app.add_subcommand("detect", "Spectral community detection");
    detect_cmd->add_option("--in", det.in, "Input hypergraph (JSON or binary)")->required()->check(CLI::ExistingFile);
    detect_cmd->add_option("--l", det.l, "Walk length (default: recommended depth from stored parameters)");
    detect_cmd->add_option("--t", det.t, "Threshold; labels are + where x_i >= t / sqrt(n)")->capture_default_str();
    detect_cmd->add_flag("--truth", det.truth, "Score against the spins stored in the input");
    detect_cmd->add_option("--t-sweep", det.t_sweep, "Extra thresholds to report")->delimiter(',');
    detect_cmd->add_option("--json-out", det.json_out, "JSON result path");
    detect_cmd->add_option("--csv-out", det.csv_out, "Per-vertex CSV path");
    detect_cmd->add_option("--seed", det.seed, "Seed of the eigensolver start block")->capture_default_str();
    detect_cmd->add_option("--pairs", det.pairs, "Eigenpairs to compute (2..4)")
        ->check(CLI::Range(2, 4))
        ->capture_default_str();

    StatsArgs st;
    auto* stats_cmd = app.add_subcommand("stats", "Per-vertex neighborhood profiles");
    stats_cmd->add_option("--in", st.in, "Input hypergraph (JSON or binary)")->required()->check(CLI::ExistingFile);
    stats_cmd->add_option("--l", st.l, "Radius")->required();
    stats_cmd->add_option("--out", st.out, "CSV path ('-' for stdout)")->required();
    stats_cmd->add_option("--seed", unused_seed, "Accepted for uniformity; the computation is deterministic");

    GwArgs gw;
    auto* gw_cmd = app.add_subcommand("gw", "Galton-Watson hypertree martingale moments");
    gw_cmd->add_option("--a", gw.a, "Within-community rate")->required();
    gw_cmd->add_option("--b", gw.b, "Across-community rate")->required();
    gw_cmd->add_option("--d", gw.d, "Uniformity")->capture_default_str();
    gw_cmd->add_option("--depth", gw.depth, "Generations")->capture_default_str();
    gw_cmd->add_option("--samples", gw.samples, "Replicates (>= 1000)")->capture_default_str();
    gw_cmd->add_option("--seed", gw.seed, "RNG seed")->capture_default_str();
    gw_cmd->add_option("--root-spin", gw.root_spin, "Root spin (+1 or -1)")
        ->check(CLI::IsMember({1, -1}))
        ->capture_default_str();
    gw_cmd->add_option("--tau", gw.tau, "Cut point of the overlap-constant estimate")->capture_default_str();
    gw_cmd->add_option("--json-out", gw.json_out, "JSON result path");

    SweepArgs sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "Detection sweep over model parameters");
    sweep_cmd->add_option("--n", sw.n, "Vertex counts")->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--d", sw.d, "Uniformity")->capture_default_str();
    sweep_cmd->add_option("--ab", sw.ab, "Cells a:b")->delimiter(',');
    sweep_cmd->add_option("--alpha", sw.alpha, "Fixed alpha for --ratios");
    sweep_cmd->add_option("--ratios", sw.ratios, "Values of beta^2/alpha")->delimiter(',');
    sweep_cmd->add_option("--seeds", sw.seeds, "Seeds per cell")->capture_default_str();
    sweep_cmd->add_option("--l", sw.l, "Fixed walk length (default: recommended depth per cell)");
    sweep_cmd->add_option("--depth-fraction", sw.depth_fraction, "Constant c of the recommended depth")
        ->capture_default_str();
    sweep_cmd->add_option("--t", sw.t, "Threshold")->capture_default_str();
    sweep_cmd->add_option("--seed", sw.seed, "Master seed")->capture_default_str();
    sweep_cmd->add_option("--csv-out", sw.csv_out, "CSV path");
    sweep_cmd->add_option("--json-out", sw.json_out, "JSON path");
    sweep_cmd->add_flag("--timing", sw.timing, "Add a wall-time column (breaks byte reproducibility)");

    VerifyArgs ver;
    auto* verify_cmd = app.add_subcommand("verify", "Run the self-check suites");
    verify_cmd->add_option("--suite", ver.suites, "saw, expansion, circuit or gw (repeatable; default all)");
    verify_cmd->add_option("--n", ver.options.n, "Vertices (capped per suite)")->capture_default_str();
    verify_cmd->add_option("--d", ver.options.d, "Uniformity")->capture_default_str();
    verify_cmd->add_option("--a", ver.options.a, "Within-community rate")->capture_default_str();
    verify_cmd->add_option("--b", ver.options.b, "Across-community rate")->capture_default_str();
    verify_cmd->add_option("--l", ver.options.l, "Maximum walk length")->capture_default_str();
    verify_cmd->add_option("--trials", ver.options.trials, "Instances per suite")->capture_default_str();
    verify_cmd->add_option("--seed", ver.options.seed, "Seed")->capture_default_str();
    verify_cmd->add_option("--gw-samples", ver.options.gw_samples, "Replicates of the gw suite")
        ->capture_default_str();
    verify_cmd->add_option("--gw-depth", ver.options.gw_depth, "Generations of the gw suite")->capture_default_str();
    verify_cmd->add_flag("--inject-fault", ver.options.inject_fault, "Corrupt one B entry (self-test)");
    verify_cmd->add_option("--json-out", ver.json_out, "JSON report path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*generate) return run_generate(gen, *generate);
        if (*saw_cmd) return run_saw(saw);
        if (*detect_cmd) return run_detect(det);
        if (*stats_cmd) return run_stats(st);
        if (*gw_cmd) return run_gw(gw);
        if (*sweep_cmd) return run_sweep_cmd(sw);
        if (*verify_cmd) return run_verify_cmd(ver);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kUsage;
}
