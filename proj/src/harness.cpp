#include "aisim/harness.hpp"

#include "aisim/equilibrium.hpp"
#include "aisim/error.hpp"
#include "aisim/format.hpp"
#include "aisim/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace aisim::harness {

// ============================================================================
// Scenarios
// ============================================================================

VsgSelection VsgSelection::of(std::vector<std::size_t> ids) {
    VsgSelection s;
    s.mode = Mode::Ids;
    s.ids = std::move(ids);
    return s;
}

VsgSelection VsgSelection::random_fraction(double fraction) {
    VsgSelection s;
    s.mode = Mode::Fraction;
    s.fraction = fraction;
    return s;
}

VsgSelection VsgSelection::in_areas(std::vector<std::string> areas) {
    VsgSelection s;
    s.mode = Mode::Areas;
    s.areas = std::move(areas);
    return s;
}

namespace {

constexpr std::uint64_t kTagFraction = 0x667261632d767367;

std::vector<std::size_t> generators_of(const Grid& grid) {
    std::vector<std::size_t> ids;
    for (const Node& n : grid.nodes()) {
        if (n.kind == NodeKind::Generator) ids.push_back(n.id);
    }
    return ids;
}

}  // namespace

std::vector<std::size_t> resolve_vsgs(const Grid& grid, const VsgSelection& selection,
                                      std::uint64_t seed) {
    std::vector<std::size_t> ids;
    switch (selection.mode) {
        case VsgSelection::Mode::None:
            break;
        case VsgSelection::Mode::Ids:
            ids = selection.ids;
            break;
        case VsgSelection::Mode::Fraction: {
            if (!(selection.fraction >= 0.0 && selection.fraction <= 1.0)) {
                throw ConfigError("VSG fraction must lie in [0, 1]");
            }
            std::vector<std::size_t> gens = generators_of(grid);
            const auto k = static_cast<std::size_t>(
                std::llround(selection.fraction * static_cast<double>(gens.size())));
            SplitMix64 rng = SplitMix64::stream(seed, kTagFraction);
            for (std::size_t i = 0; i < k; ++i) {
                const std::size_t j = i + rng.below(gens.size() - i);
                std::swap(gens[i], gens[j]);
                ids.push_back(gens[i]);
            }
            break;
        }
        case VsgSelection::Mode::Areas:
            for (const Node& n : grid.nodes()) {
                if (n.kind != NodeKind::Generator) continue;
                if (std::find(selection.areas.begin(), selection.areas.end(), n.area) !=
                    selection.areas.end()) {
                    ids.push_back(n.id);
                }
            }
            break;
    }
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
        throw ConfigError("VSG selection lists a node twice");
    }
    return ids;
}

namespace {

Grid base_grid(const Scenario& s) {
    if (!s.grid) throw ConfigError("scenario '" + s.id + "' has no grid");
    Grid g = s.sample_params ? sample_rts_params(*s.grid, s.seed) : *s.grid;
    if (!s.constant_inertia || g.vsg_count() == 0) return g;
    GridSpec spec = g.spec();
    for (Node& n : spec.nodes) {
        if (n.kind != NodeKind::Vsg) continue;
        n.kind = NodeKind::Generator;
        if (!(n.m > 0.0)) n.m = n.m_min;
        n.m_min = n.alpha = n.beta = 0.0;
    }
    return Grid::build(std::move(spec));
}

VsgPolicy make_policy(const PolicySpec& spec, const Grid& grid) {
    switch (spec.mode) {
        case VsgMode::Plain:
            return VsgPolicy::plain();
        case VsgMode::Deadband:
            return VsgPolicy::deadband(spec.epsilon);
        case VsgMode::Rearm: {
            std::vector<double> reset;
            for (std::size_t id : grid.vsg_nodes()) {
                const Node& n = grid.node(id);
                auto it = spec.m_reset.find(id);
                reset.push_back(it != spec.m_reset.end() ? it->second : (n.m > 0.0 ? n.m : n.m_min));
            }
            return VsgPolicy::rearm(std::move(reset), spec.band, spec.hold);
        }
    }
    return VsgPolicy::plain();
}

}  // namespace

ResolvedScenario resolve(const Scenario& s) {
    const Grid base = base_grid(s);
    std::vector<std::size_t> vsgs = resolve_vsgs(base, s.vsgs, s.seed);
    GridSpec spec = promote_to_vsg(base, vsgs, s.alpha, s.beta, s.m_min_rule).spec();
    for (const auto& [id, ab] : s.per_vsg) {
        if (id >= spec.nodes.size() || spec.nodes[id].kind != NodeKind::Vsg) {
            // Per-VSG gains for nodes outside the selection are ignored, so one
            // config can serve several placements.
            continue;
        }
        spec.nodes[id].alpha = ab.first;
        spec.nodes[id].beta = ab.second;
    }
    Grid grid = Grid::build(std::move(spec));
    validate(s.fault, grid);
    VsgPolicy policy = make_policy(s.policy, grid);
    policy.validate(grid);
    return {std::move(grid), s.fault, std::move(policy), std::move(vsgs)};
}

Scenario constant_baseline(const Scenario& s) {
    Scenario b = s;
    b.id = s.id + ":constant";
    b.vsgs = VsgSelection::none();
    b.constant_inertia = true;
    b.per_vsg.clear();
    b.policy = PolicySpec{};
    return b;
}

RunResult run_scenario(const Scenario& s, const RunOptions& options) {
    try {
        const ResolvedScenario r = resolve(s);
        const double omega_sync = post_fault_sync_frequency(r.grid, r.fault);
        MetricsAccumulator acc(r.grid, omega_sync, r.fault.time, s.integration.t_end, s.metrics);

        std::optional<Trajectory> traj;
        if (options.keep_trajectory) traj = Trajectory::empty_for(r.grid);
        std::optional<TrajectoryCsvWriter> csv;
        if (options.trajectory_csv) csv.emplace(*options.trajectory_csv, r.grid);

        const IntegrationSummary summary =
            simulate(r.grid, r.fault, r.policy, s.integration, [&](const SampleView& v) {
                acc.add(v);
                if (traj) traj->append(v.t, v.theta, v.frequency, v.rocof, v.inertia);
                if (csv) (*csv)(v);
            });

        RunResult out;
        out.id = s.id;
        out.metrics = acc.finish(summary.quad);
        out.omega_sync = omega_sync;
        out.rearm_time = summary.rearm_time;
        out.stats = summary.stats;
        if (traj) {
            traj->omega_sync = omega_sync;
            traj->quad = summary.quad;
            traj->rearm_time = summary.rearm_time;
            out.trajectory = std::move(traj);
        }
        return out;
    } catch (const ScenarioFailed&) {
        throw;
    } catch (const std::exception& e) {
        throw ScenarioFailed(s.id, e.what());
    }
}

// ============================================================================
// Parallel execution
// ============================================================================

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ============================================================================
// Sweep
// ============================================================================

std::vector<double> log_axis(double lo, double hi, std::size_t n, const std::vector<double>& anchors) {
    if (!(lo > 0.0 && hi > lo) || n < 2) throw ConfigError("log axis needs 0 < lo < hi and n >= 2");
    std::vector<double> axis;
    const double step = std::log(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) axis.push_back(lo * std::exp(step * static_cast<double>(i)));
    axis.front() = lo;
    axis.back() = hi;
    axis.insert(axis.end(), anchors.begin(), anchors.end());
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end(),
                           [](double a, double b) { return std::abs(a - b) <= 1e-12 * b; }),
               axis.end());
    return axis;
}

std::vector<double> default_axis() { return log_axis(0.1, 50.0, 10, {5.0, 10.0}); }

SweepResult sweep_alpha_beta(const SweepSpec& spec, std::size_t jobs) {
    if (spec.alphas.empty() || spec.betas.empty()) throw ConfigError("sweep axes must be non-empty");
    SweepResult result;
    result.alphas = spec.alphas;
    result.betas = spec.betas;
    result.cells.resize(spec.alphas.size() * spec.betas.size());

    // Task 0 is the baseline; the rest are cells.
    std::optional<MetricsReport> baseline;
    std::string baseline_error;
    parallel_for(result.cells.size() + 1, jobs, [&](std::size_t task) {
        if (task == 0) {
            try {
                baseline = run_scenario(constant_baseline(spec.scenario)).metrics;
            } catch (const Error& e) {
                baseline_error = e.what();
            }
            return;
        }
        const std::size_t k = task - 1;
        SweepCell& cell = result.cells[k];
        cell.alpha = spec.alphas[k / spec.betas.size()];
        cell.beta = spec.betas[k % spec.betas.size()];
        Scenario s = spec.scenario;
        s.alpha = cell.alpha;
        s.beta = cell.beta;
        s.per_vsg.clear();
        s.id = spec.scenario.id + "@alpha=" + format_double(cell.alpha) + ",beta=" + format_double(cell.beta);
        try {
            cell.report = run_scenario(s).metrics;
        } catch (const Error& e) {
            cell.error = e.what();
        }
    });
    if (!baseline) throw Error("sweep baseline failed: " + baseline_error);
    result.baseline = *baseline;
    for (SweepCell& cell : result.cells) {
        if (cell.report) cell.ratios = ratio_report(*cell.report, result.baseline);
    }
    return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << "alpha,beta,metric,ratio\n";
    for (const SweepCell& cell : result.cells) {
        for (Metric m : kAllMetrics) {
            const double r = cell.report ? cell.ratios[m] : std::nan("");
            out << format_double(cell.alpha) << ',' << format_double(cell.beta) << ',' << to_string(m)
                << ',' << format_double(r) << '\n';
        }
    }
}

// ============================================================================
// Campaigns
// ============================================================================

std::vector<CentralityEntry> centrality_order(const Grid& grid) {
    std::vector<CentralityEntry> order(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) order[i] = {i, 0.0};
    for (const Line& l : grid.lines()) {
        order[l.from].score += l.b;
        order[l.to].score += l.b;
    }
    std::stable_sort(order.begin(), order.end(), [](const CentralityEntry& a, const CentralityEntry& b) {
        return a.score > b.score;
    });
    return order;
}

std::vector<std::size_t> qualifying_faults(const CampaignSpec& spec) {
    const Grid base = base_grid(spec.scenario);
    const auto cand = resolve_vsgs(base, spec.candidate.vsgs, spec.scenario.seed);
    const auto ref = resolve_vsgs(base, spec.reference.vsgs, spec.scenario.seed);
    const double threshold = mw_to_pu(spec.threshold_mw, spec.base_mva);
    std::vector<std::size_t> ids;
    for (const Node& n : base.nodes()) {
        if (n.kind != NodeKind::Generator || n.P < threshold) continue;
        if (std::binary_search(cand.begin(), cand.end(), n.id)) continue;
        if (std::binary_search(ref.begin(), ref.end(), n.id)) continue;
        ids.push_back(n.id);
    }
    return ids;
}

CampaignResult fault_campaign(const CampaignSpec& spec, std::size_t jobs) {
    const std::vector<std::size_t> faults = qualifying_faults(spec);
    if (faults.empty()) throw NoQualifyingFaults();

    const Grid base = base_grid(spec.scenario);
    const auto order = centrality_order(base);
    std::vector<std::size_t> rank_of(base.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank_of[order[r].node] = r;
    const auto central_count = static_cast<std::size_t>(
        std::ceil(spec.central_fraction * static_cast<double>(base.size())));

    CampaignResult result;
    result.candidate = spec.candidate.name;
    result.reference = spec.reference.name;
    result.rows.resize(faults.size());
    std::vector<std::string> errors(2 * faults.size());

    parallel_for(2 * faults.size(), jobs, [&](std::size_t task) {
        const std::size_t k = task / 2;
        const bool is_candidate = task % 2 == 0;
        const Variant& v = is_candidate ? spec.candidate : spec.reference;
        Scenario s = spec.scenario;
        s.vsgs = v.vsgs;
        if (v.vsgs.mode == VsgSelection::Mode::None) {
            s.policy = PolicySpec{};
            s.constant_inertia = true;
        }
        s.fault = Fault{faults[k], mw_to_pu(spec.delta_mw, spec.base_mva), spec.scenario.fault.time};
        s.id = spec.scenario.id + ":" + v.name + "@node=" + std::to_string(faults[k]);
        try {
            auto report = run_scenario(s).metrics;
            (is_candidate ? result.rows[k].candidate : result.rows[k].reference) = std::move(report);
        } catch (const Error& e) {
            errors[task] = e.what();
        }
    });

    for (std::size_t k = 0; k < faults.size(); ++k) {
        CampaignRow& row = result.rows[k];
        row.node = faults[k];
        row.rank = rank_of[row.node];
        row.centrality = order[row.rank].score;
        row.central = row.rank < central_count;
        for (std::size_t t : {2 * k, 2 * k + 1}) {
            if (errors[t].empty()) continue;
            if (!row.error.empty()) row.error += "; ";
            row.error += errors[t];
        }
        if (row.candidate && row.reference) row.ratios = ratio_report(*row.candidate, *row.reference);
    }
    std::sort(result.rows.begin(), result.rows.end(),
              [](const CampaignRow& a, const CampaignRow& b) { return a.rank < b.rank; });

    std::size_t ok = 0;
    for (const CampaignRow& row : result.rows) {
        if (!row.error.empty()) {
            ++result.failures;
            continue;
        }
        ++ok;
        for (Metric m : kAllMetrics) {
            const auto i = static_cast<std::size_t>(m);
            if (!row.ratios.undefined[i] && row.ratios.ratio[i] < 1.0) result.fraction_better[i] += 1.0;
        }
    }
    for (double& f : result.fraction_better) f = ok ? f / static_cast<double>(ok) : std::nan("");
    return result;
}

CampaignResult placement_compare(const CampaignSpec& spec, std::size_t jobs) {
    Scenario a = spec.scenario;
    a.vsgs = spec.candidate.vsgs;
    Scenario b = spec.scenario;
    b.vsgs = spec.reference.vsgs;
    const double budget_a = resolve(a).grid.minimum_inertia_budget();
    const double budget_b = resolve(b).grid.minimum_inertia_budget();
    if (std::abs(budget_a - budget_b) > 1e-9) throw InertiaBudgetMismatch(budget_a, budget_b);
    return fault_campaign(spec, jobs);
}

void write_campaign_csv(std::ostream& out, const CampaignResult& r) {
    out << "rank,node,centrality,region,candidate,reference";
    for (Metric m : kAllMetrics) out << ',' << to_string(m);
    out << ",converged\n";
    for (const CampaignRow& row : r.rows) {
        out << row.rank << ',' << row.node << ',' << format_double(row.centrality) << ','
            << (row.central ? "central" : "peripheral") << ',' << r.candidate << ',' << r.reference;
        const bool ok = row.error.empty();
        for (Metric m : kAllMetrics) out << ',' << format_double(ok ? row.ratios[m] : std::nan(""));
        const bool converged = ok && row.candidate->converged && row.reference->converged;
        out << ',' << (converged ? "true" : "false") << '\n';
    }
}

double geometric_mean_ratio(const CampaignResult& result, Metric metric,
                            const std::function<bool(const CampaignRow&)>& filter) {
    double log_sum = 0.0;
    std::size_t n = 0;
    for (const CampaignRow& row : result.rows) {
        if (!row.error.empty() || !filter(row)) continue;
        log_sum += std::log(row.ratios[metric]);
        ++n;
    }
    return n ? std::exp(log_sum / static_cast<double>(n)) : std::nan("");
}

}  // namespace aisim::harness
