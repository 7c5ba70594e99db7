// aisim: command-line front end for scenario runs, sweeps, fault campaigns,
// placement comparisons and spectrum checks.

#include "aisim/config.hpp"
#include "aisim/equilibrium.hpp"
#include "aisim/error.hpp"
#include "aisim/format.hpp"
#include "aisim/harness.hpp"
#include "aisim/simd/kernels.hpp"
#include "aisim/stability.hpp"
#include "aisim/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace aisim;
using namespace aisim::harness;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitError = 2;

struct Overrides {
    std::string config;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<std::uint64_t> seed;
    std::optional<double> t_end;
    std::optional<double> sample_dt;
    std::string out = ".";
    std::size_t jobs = 0;
    std::string isa;
    bool trajectory = false;
};

void apply(Scenario& s, const Overrides& o) {
    if (o.alpha) s.alpha = *o.alpha;
    if (o.beta) s.beta = *o.beta;
    if (o.seed) s.seed = *o.seed;
    if (o.t_end) s.integration.t_end = *o.t_end;
    if (o.sample_dt) s.integration.sample_dt = *o.sample_dt;
}

Config load(const Overrides& o) {
    Config cfg = load_config(o.config);
    apply(cfg.scenario, o);
    apply(cfg.campaign.scenario, o);
    apply(cfg.placement.scenario, o);
    return cfg;
}

std::size_t jobs_of(const Overrides& o) {
    if (o.jobs > 0) return o.jobs;
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// JSON number, with non-finite values as null.
ordered_json num(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

ordered_json provenance(const Config& cfg, const Scenario& s) {
    ordered_json p;
    p["config"] = cfg.path;
    p["config_hash"] = hex(cfg.hash);
    p["grid"] = s.grid_source;
    p["grid_hash"] = s.grid ? hex(grid_hash(*s.grid)) : "";
    p["seed"] = s.seed;
    p["isa"] = std::string(simd::to_string(simd::active().isa));
    p["centrality"] = "weighted degree";
    return p;
}

ordered_json metrics_json(const MetricsReport& r) {
    ordered_json j;
    for (Metric m : kAllMetrics) j[to_string(m)] = num(value(r, m));
    j["max_rocof_node"] = r.max_rocof_node;
    j["horizon"] = r.horizon;
    j["synchronized"] = r.synchronized;
    j["converged"] = r.converged;
    ordered_json tails = ordered_json::array();
    for (double t : r.tail_bound) tails.push_back(num(t));
    j["tail_bound"] = tails;
    return j;
}

ordered_json ratios_json(const RatioReport& r) {
    ordered_json j;
    for (Metric m : kAllMetrics) j[to_string(m)] = num(r[m]);
    return j;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

void write_report(const Overrides& o, const ordered_json& report) {
    write_file(fs::path(o.out) / "report.json", report.dump(2) + "\n");
}

// ============================================================================
// Subcommands
// ============================================================================

int cmd_simulate(const Overrides& o) {
    const Config cfg = load(o);
    const Scenario& adaptive = cfg.scenario;
    const Scenario constant = constant_baseline(adaptive);

    std::ofstream traj;
    RunOptions opts;
    if (o.trajectory) {
        traj.open(fs::path(o.out) / ("trajectory_" + adaptive.id + ".csv"), std::ios::binary);
        if (!traj) throw ConfigError("cannot open trajectory file");
        opts.trajectory_csv = &traj;
    }
    const RunResult a = run_scenario(adaptive, opts);
    const RunResult c = run_scenario(constant);
    const RatioReport ratios = ratio_report(a.metrics, c.metrics);

    write_file(fs::path(o.out) / "metrics.csv", metrics_csv_header() + "\n" +
                                                     metrics_csv_row(a.id, a.metrics) + "\n" +
                                                     metrics_csv_row(c.id, c.metrics) + "\n");
    ordered_json report;
    report["command"] = "simulate";
    report["provenance"] = provenance(cfg, adaptive);
    for (const RunResult* r : {&a, &c}) {
        ordered_json run;
        run["id"] = r->id;
        run["omega_sync"] = r->omega_sync;
        run["rearm_time"] = r->rearm_time ? ordered_json(*r->rearm_time) : ordered_json(nullptr);
        run["steps"] = {{"accepted", r->stats.accepted}, {"rejected", r->stats.rejected},
                        {"rhs_calls", r->stats.rhs_calls}};
        run["metrics"] = metrics_json(r->metrics);
        report["runs"].push_back(run);
    }
    report["ratios"] = ratios_json(ratios);
    const bool ok = a.metrics.converged && c.metrics.converged;
    report["converged"] = ok;
    write_report(o, report);
    std::cout << metrics_csv_header() << "\n"
              << metrics_csv_row(a.id, a.metrics) << "\n"
              << metrics_csv_row(c.id, c.metrics) << "\n";
    return ok ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const Overrides& o) {
    const Config cfg = load(o);
    SweepSpec spec{cfg.scenario, cfg.alphas, cfg.betas};
    const SweepResult result = sweep_alpha_beta(spec, jobs_of(o));

    std::ostringstream csv;
    write_sweep_csv(csv, result);
    write_file(fs::path(o.out) / "sweep.csv", csv.str());

    ordered_json report;
    report["command"] = "sweep";
    report["provenance"] = provenance(cfg, cfg.scenario);
    report["alphas"] = result.alphas;
    report["betas"] = result.betas;
    report["baseline"] = metrics_json(result.baseline);
    bool ok = result.baseline.converged;
    std::size_t failed = 0;
    for (const SweepCell& cell : result.cells) {
        const bool good = cell.report && cell.report->converged;
        if (!good) {
            ++failed;
            ordered_json f{{"alpha", cell.alpha}, {"beta", cell.beta}};
            f["error"] = cell.error.empty() ? "not converged" : cell.error;
            report["failures"].push_back(f);
        }
    }
    ok = ok && failed == 0;
    report["cells"] = result.cells.size();
    report["failed_cells"] = failed;
    report["converged"] = ok;
    write_report(o, report);
    std::cout << "sweep: " << result.cells.size() << " cells, " << failed << " failed\n";
    return ok ? kExitOk : kExitNotConverged;
}

int campaign_common(const Overrides& o, const Config& cfg, const CampaignSpec& spec, bool placement) {
    const CampaignResult result =
        placement ? placement_compare(spec, jobs_of(o)) : fault_campaign(spec, jobs_of(o));
    std::ostringstream csv;
    write_campaign_csv(csv, result);
    write_file(fs::path(o.out) / "campaign.csv", csv.str());

    ordered_json report;
    report["command"] = placement ? "placement" : "campaign";
    report["provenance"] = provenance(cfg, spec.scenario);
    report["candidate"] = result.candidate;
    report["reference"] = result.reference;
    report["faults"] = result.rows.size();
    report["failures"] = result.failures;
    ordered_json better;
    for (Metric m : kAllMetrics) {
        better[to_string(m)] = num(result.fraction_better[static_cast<std::size_t>(m)]);
    }
    report["fraction_better"] = better;
    ordered_json gm_central, gm_peripheral;
    for (Metric m : kAllMetrics) {
        gm_central[to_string(m)] =
            num(geometric_mean_ratio(result, m, [](const CampaignRow& r) { return r.central; }));
        gm_peripheral[to_string(m)] =
            num(geometric_mean_ratio(result, m, [](const CampaignRow& r) { return !r.central; }));
    }
    report["geometric_mean_ratio"] = {{"central", gm_central}, {"peripheral", gm_peripheral}};
    bool ok = result.failures == 0;
    for (const CampaignRow& row : result.rows) {
        if (!row.error.empty()) {
            report["errors"].push_back({{"node", row.node}, {"error", row.error}});
        }
        ok = ok && row.candidate && row.candidate->converged && row.reference &&
             row.reference->converged;
    }
    report["converged"] = ok;
    write_report(o, report);
    std::cout << report["command"].get<std::string>() << ": " << result.rows.size() << " faults, "
              << result.failures << " failed\n";
    return ok ? kExitOk : kExitNotConverged;
}

int cmd_campaign(const Overrides& o) {
    const Config cfg = load(o);
    return campaign_common(o, cfg, cfg.campaign, false);
}

int cmd_placement(const Overrides& o) {
    const Config cfg = load(o);
    if (!cfg.has_placement) throw ConfigError("config has no 'placement' section");
    return campaign_common(o, cfg, cfg.placement, true);
}

ordered_json complex_list(const std::vector<std::complex<double>>& v) {
    ordered_json out = ordered_json::array();
    for (const auto& z : v) out.push_back({z.real(), z.imag()});
    return out;
}

int cmd_stability(const Overrides& o, double tolerance) {
    const Config cfg = load(o);
    const ResolvedScenario r = resolve(cfg.scenario);
    const FixedPoint fp = solve_fixed_point(r.grid);

    ordered_json report;
    report["command"] = "stability";
    report["provenance"] = provenance(cfg, cfg.scenario);
    report["tolerance"] = tolerance;
    SpectrumReport spec;
    bool ok = true;
    try {
        spec = spectrum_union_check(r.grid, fp.theta0, tolerance);
    } catch (const SpectrumMismatch& e) {
        ok = false;
        report["error"] = e.what();
        // Recompute without the throwing tolerance so the spectra are still reported.
        spec = spectrum_union_check(r.grid, fp.theta0, std::numeric_limits<double>::infinity());
        spec.union_holds = false;
    }
    report["all_vsg"] = spec.all_vsg;
    report["union_holds"] = spec.union_holds;
    report["max_pairing_distance"] = spec.max_pairing_distance;
    report["max_embedding_residual"] = spec.max_embedding_residual;
    report["spectral_abscissa"] = spec.spectral_abscissa;
    report["zero_mode"] = spec.zero_mode;
    report["full"] = complex_list(spec.full);
    report["conventional"] = complex_list(spec.conventional);
    report["beta_modes"] = spec.beta_modes;
    report["pairing_distances"] = spec.pairing_distances;
    ok = ok && spec.union_holds;
    report["converged"] = ok;
    write_report(o, report);
    std::cout << "union " << (spec.union_holds ? "holds" : "fails")
              << ", max pairing distance " << format_double(spec.max_pairing_distance)
              << ", abscissa " << format_double(spec.spectral_abscissa) << "\n";
    return ok ? kExitOk : kExitNotConverged;
}

// ----------------------------------------------------------------------------
// gen-grid: regenerate the shipped grids and configs
// ----------------------------------------------------------------------------

ordered_json ids(const std::vector<std::size_t>& v) { return ordered_json{{"ids", v}}; }

void write_json(const fs::path& path, const ordered_json& j) { write_file(path, j.dump(2) + "\n"); }

int cmd_gen_grid(const std::string& out_dir, std::uint64_t seed) {
    const fs::path root(out_dir);
    fs::create_directories(root / "grids");
    fs::create_directories(root / "configs");

    const Grid four = synthetic::four_node();
    const Grid rts = synthetic::rts96_like(seed);
    const Grid syn = synthetic::synthetic40(seed);
    const Grid bar = synthetic::barbell(seed);
    save_grid(four, (root / "grids" / "four_node.json").string());
    save_grid(rts, (root / "grids" / "rts96_like.json").string());
    save_grid(syn, (root / "grids" / "synthetic40.json").string());
    save_grid(bar, (root / "grids" / "barbell.json").string());

    const ordered_json integration{{"rtol", 1e-8}, {"atol", 1e-10}, {"t_end", 120.0}, {"sample_dt", 1e-3}};

    ordered_json four_cfg;
    four_cfg["id"] = "four_node";
    four_cfg["grid"] = "../grids/four_node.json";
    four_cfg["seed"] = seed;
    four_cfg["fault"] = {{"node", 1}, {"delta_P", -1.0}, {"time", 0.0}};
    four_cfg["integration"] = integration;
    write_json(root / "configs" / "four_node.json", four_cfg);

    const std::vector<std::size_t> rts_vsgs = synthetic::rts96_vsg_choice(rts, seed);
    ordered_json rts_cfg;
    rts_cfg["id"] = "rts96";
    rts_cfg["grid"] = "../grids/rts96_like.json";
    rts_cfg["seed"] = seed;
    rts_cfg["vsgs"] = ids(rts_vsgs);
    rts_cfg["alpha"] = 5.0;
    rts_cfg["beta"] = 5.0;
    rts_cfg["policy"] = {{"mode", "plain"}};
    rts_cfg["fault"] = {{"node", rts_vsgs.front()}, {"delta_P", -1.0}, {"time", 0.0}};
    rts_cfg["integration"] = integration;
    rts_cfg["sweep"] = {{"alpha", {{"log", {0.1, 50, 10}}, {"anchors", {5, 10}}}},
                        {"beta", {{"log", {0.1, 50, 10}}, {"anchors", {5, 10}}}}};
    rts_cfg["campaign"] = {{"threshold_mw", 100}, {"delta_mw", -100}, {"base_mva", 100}};
    write_json(root / "configs" / "rts96.json", rts_cfg);

    ordered_json rearm_cfg = rts_cfg;
    rearm_cfg["id"] = "rts96_rearm";
    rearm_cfg["policy"] = {{"mode", "rearm"}};
    rearm_cfg.erase("sweep");
    rearm_cfg.erase("campaign");
    write_json(root / "configs" / "rts96_rearm.json", rearm_cfg);

    ordered_json syn_cfg;
    syn_cfg["id"] = "synthetic40";
    syn_cfg["grid"] = "../grids/synthetic40.json";
    syn_cfg["seed"] = seed;
    syn_cfg["vsgs"] = {{"fraction", 0.25}};
    syn_cfg["alpha"] = 10.0;
    syn_cfg["beta"] = 10.0;
    syn_cfg["fault"] = {{"node", 0}, {"delta_P", -1.0}, {"time", 0.0}};
    syn_cfg["integration"] = integration;
    syn_cfg["campaign"] = {{"threshold_mw", 100}, {"delta_mw", -100}, {"base_mva", 100}};
    write_json(root / "configs" / "synthetic40.json", syn_cfg);

    // Barbell: arm generators at even arm positions, core generators at even
    // core ids. Both placements share the VSG next to the core on each arm;
    // the other two sit at the arm tips (peripheral) or in the core
    // (homogeneous). Faults hit the remaining arm generators and core node 0.
    const synthetic::BarbellLayout layout;
    std::vector<std::size_t> arm_gens[2];
    for (std::size_t arm = 0; arm < 2; ++arm) {
        for (std::size_t p = 0; p < layout.arm; p += 2) arm_gens[arm].push_back(layout.core + arm * layout.arm + p);
    }
    const std::vector<std::size_t> peripheral = {arm_gens[0][1], arm_gens[0][3], arm_gens[1][1], arm_gens[1][3]};
    const std::vector<std::size_t> homogeneous = {2, 4, arm_gens[0][1], arm_gens[1][1]};
    ordered_json bar_cfg;
    bar_cfg["id"] = "barbell";
    bar_cfg["grid"] = "../grids/barbell.json";
    bar_cfg["seed"] = seed;
    bar_cfg["vsgs"] = ids(peripheral);
    bar_cfg["alpha"] = 10.0;
    bar_cfg["beta"] = 10.0;
    bar_cfg["fault"] = {{"node", arm_gens[0][0]}, {"delta_P", -1.0}, {"time", 0.0}};
    bar_cfg["integration"] = integration;
    bar_cfg["campaign"] = {{"threshold_mw", 50}, {"delta_mw", -100}, {"base_mva", 100}};
    bar_cfg["placement"] = {{"peripheral", ids(peripheral)}, {"homogeneous", ids(homogeneous)}};
    write_json(root / "configs" / "barbell.json", bar_cfg);

    std::cout << "wrote grids and configs under " << root.string() << "\n";
    return kExitOk;
}

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config, "experiment JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--alpha", o.alpha, "override alpha (pu)");
    sub->add_option("--beta", o.beta, "override beta (pu)");
    sub->add_option("--seed", o.seed, "override seed");
    sub->add_option("--t-end", o.t_end, "override horizon (s)");
    sub->add_option("--sample-dt", o.sample_dt, "override sampling step (s)");
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--jobs", o.jobs, "worker threads (0 = hardware)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aisim: swing-equation grid simulator with adaptive-inertia VSGs"};
    app.require_subcommand(1);
    std::string isa;
    app.add_option("--isa", isa, "force kernel set: scalar | avx2");

    Overrides o;
    double tolerance = 1e-8;
    std::string gen_out = "data";
    std::uint64_t gen_seed = 42;

    auto* simulate = app.add_subcommand("simulate", "run one scenario and its constant-inertia baseline");
    add_common(simulate, o);
    simulate->add_flag("--trajectory", o.trajectory, "write trajectory_<id>.csv");
    auto* sweep = app.add_subcommand("sweep", "alpha-beta ratio sweep");
    add_common(sweep, o);
    auto* campaign = app.add_subcommand("campaign", "fault on every qualifying generator");
    add_common(campaign, o);
    auto* placement = app.add_subcommand("placement", "peripheral vs homogeneous VSG placement");
    add_common(placement, o);
    auto* stability = app.add_subcommand("stability", "Jacobian spectrum and union check");
    add_common(stability, o);
    stability->add_option("--tolerance", tolerance, "pairing tolerance")->capture_default_str();
    auto* gen = app.add_subcommand("gen-grid", "write the shipped grids and configs");
    gen->add_option("--out", gen_out, "data directory")->capture_default_str();
    gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (!isa.empty()) {
            if (isa == "scalar") simd::select(simd::Isa::Scalar);
            else if (isa == "avx2") simd::select(simd::Isa::Avx2);
            else throw ConfigError("unknown --isa '" + isa + "'");
        }
        if (*gen) return cmd_gen_grid(gen_out, gen_seed);
        fs::create_directories(o.out);
        if (*simulate) return cmd_simulate(o);
        if (*sweep) return cmd_sweep(o);
        if (*campaign) return cmd_campaign(o);
        if (*placement) return cmd_placement(o);
        if (*stability) return cmd_stability(o, tolerance);
    } catch (const std::exception& e) {
        std::cerr << "aisim: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
