#pragma once

#include "aisim/dynamics.hpp"
#include "aisim/grid.hpp"
#include "aisim/metrics.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace aisim::harness {

// ============================================================================
// Scenarios
// ============================================================================

/// Which generators become VSGs.
struct VsgSelection {
    enum class Mode { None, Ids, Fraction, Areas };
    Mode mode = Mode::None;
    std::vector<std::size_t> ids;
    double fraction = 0.0;  ///< of the grid's generators, rounded to nearest
    std::vector<std::string> areas;

    [[nodiscard]] static VsgSelection none() { return {}; }
    [[nodiscard]] static VsgSelection of(std::vector<std::size_t> ids);
    [[nodiscard]] static VsgSelection random_fraction(double fraction);
    [[nodiscard]] static VsgSelection in_areas(std::vector<std::string> areas);
};

/// Generator ids selected on `grid`, ascending. The fraction mode draws without
/// replacement from a SplitMix64 stream of `seed`.
[[nodiscard]] std::vector<std::size_t> resolve_vsgs(const Grid& grid, const VsgSelection& selection,
                                                    std::uint64_t seed);

struct PolicySpec {
    VsgMode mode = VsgMode::Plain;
    double epsilon = 0.0;
    /// Rearm target per VSG id; VSGs not listed reset to their nominal m.
    std::map<std::size_t, double> m_reset;
    double band = VsgPolicy::kDefaultRearmBand;
    double hold = VsgPolicy::kDefaultRearmHold;
};

struct Scenario {
    std::string id = "scenario";
    std::shared_ptr<const Grid> grid;  ///< base grid; VSG promotion is applied on top
    std::string grid_source;           ///< file name, for provenance only
    bool sample_params = false;        ///< redraw m, d with sample_rts_params(seed)
    /// Turn every VSG of the base grid back into a generator with its nominal m
    /// (m_min when none is recorded) before applying `vsgs`.
    bool constant_inertia = false;
    VsgSelection vsgs;
    double alpha = 5.0;
    double beta = 5.0;
    double m_min_rule = 1.0 / 3.0;
    std::map<std::size_t, std::pair<double, double>> per_vsg;  ///< id -> (alpha, beta)
    PolicySpec policy;
    Fault fault;
    IntegrationOptions integration;
    MetricsOptions metrics;
    std::uint64_t seed = 0;
};

/// The concrete inputs of one run.
struct ResolvedScenario {
    Grid grid;
    Fault fault;
    VsgPolicy policy;
    std::vector<std::size_t> vsgs;
};

[[nodiscard]] ResolvedScenario resolve(const Scenario& scenario);

/// Same scenario with no VSGs at all: selected ones stay generators and
/// native ones are demoted.
[[nodiscard]] Scenario constant_baseline(const Scenario& scenario);

struct RunResult {
    std::string id;
    MetricsReport metrics;
    double omega_sync = 0.0;
    std::optional<double> rearm_time;
    StepperStats stats;
    std::optional<Trajectory> trajectory;
};

struct RunOptions {
    bool keep_trajectory = false;
    std::ostream* trajectory_csv = nullptr;
};

/// Runs one scenario with streaming metrics. Errors from lower modules are
/// re-raised as ScenarioFailed carrying the scenario id.
[[nodiscard]] RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

// ============================================================================
// Parallel execution
// ============================================================================

/// Calls fn(i) for i in [0, count) on up to `jobs` threads. Each index runs
/// exactly once; callers store results by index, so output order never
/// depends on scheduling.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

// ============================================================================
// alpha-beta sweep
// ============================================================================

/// n log-spaced values on [lo, hi] merged with `anchors` (sorted, deduplicated).
[[nodiscard]] std::vector<double> log_axis(double lo, double hi, std::size_t n,
                                           const std::vector<double>& anchors = {});

/// 10 log-spaced points on [0.1, 50] plus 5 and 10: a 12-point axis.
[[nodiscard]] std::vector<double> default_axis();

struct SweepSpec {
    Scenario scenario;
    std::vector<double> alphas = default_axis();
    std::vector<double> betas = default_axis();
};

struct SweepCell {
    double alpha = 0.0;
    double beta = 0.0;
    std::optional<MetricsReport> report;
    RatioReport ratios;
    std::string error;
};

struct SweepResult {
    MetricsReport baseline;
    std::vector<double> alphas;
    std::vector<double> betas;
    std::vector<SweepCell> cells;  ///< alpha-major

    [[nodiscard]] const SweepCell& at(std::size_t alpha_index, std::size_t beta_index) const {
        return cells.at(alpha_index * betas.size() + beta_index);
    }
};

[[nodiscard]] SweepResult sweep_alpha_beta(const SweepSpec& spec, std::size_t jobs = 1);

/// Long format `alpha,beta,metric,ratio`; failed cells carry nan.
void write_sweep_csv(std::ostream& out, const SweepResult& result);

// ============================================================================
// Fault campaigns and placement
// ============================================================================

struct CentralityEntry {
    std::size_t node;
    double score;  ///< weighted degree sum_j b_ij
};

/// Nodes by weighted degree, descending; ties by ascending id.
[[nodiscard]] std::vector<CentralityEntry> centrality_order(const Grid& grid);

struct Variant {
    std::string name;
    VsgSelection vsgs;
};

struct CampaignSpec {
    Scenario scenario;  ///< template; its fault node is replaced per run
    double threshold_mw = 100.0;
    double delta_mw = -100.0;
    double base_mva = 100.0;
    /// Fraction of the centrality ranking counted as central.
    double central_fraction = 0.5;
    Variant candidate{"adaptive", {}};
    Variant reference{"constant", VsgSelection::none()};
};

struct CampaignRow {
    std::size_t rank = 0;  ///< position in the centrality order
    std::size_t node = 0;
    double centrality = 0.0;
    bool central = false;
    std::optional<MetricsReport> candidate;
    std::optional<MetricsReport> reference;
    RatioReport ratios;
    std::string error;
};

struct CampaignResult {
    std::string candidate;
    std::string reference;
    std::vector<CampaignRow> rows;  ///< by rank
    /// Per metric, fraction of successful faults with ratio < 1.
    std::array<double, kAllMetrics.size()> fraction_better{};
    std::size_t failures = 0;
};

/// Generators (in every variant and in the base grid) with P >= threshold.
[[nodiscard]] std::vector<std::size_t> qualifying_faults(const CampaignSpec& spec);

/// Candidate vs reference for a power step on every qualifying generator.
/// Throws NoQualifyingFaults when no generator passes the threshold.
[[nodiscard]] CampaignResult fault_campaign(const CampaignSpec& spec, std::size_t jobs = 1);

/// fault_campaign with candidate = peripheral, reference = homogeneous, after
/// checking both placements leave the same minimum inertia in the grid.
/// Throws InertiaBudgetMismatch when they differ by more than 1e-9.
[[nodiscard]] CampaignResult placement_compare(const CampaignSpec& spec, std::size_t jobs = 1);

void write_campaign_csv(std::ostream& out, const CampaignResult& result);

/// Geometric mean of the per-fault ratios of `metric` over the rows passing `filter`.
[[nodiscard]] double geometric_mean_ratio(const CampaignResult& result, Metric metric,
                                          const std::function<bool(const CampaignRow&)>& filter);

}  // namespace aisim::harness
