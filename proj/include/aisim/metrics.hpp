#pragma once

#include "aisim/dynamics.hpp"
#include "aisim/tail.hpp"

#include <array>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aisim {

struct MetricsOptions {
    /// Resynchronization band, 1 mHz expressed in rad/s.
    double sync_band = 2.0 * std::numbers::pi * 1e-3;
    /// Largest acceptable tail bound relative to the accumulated integral.
    double tail_fraction = 1e-4;
    double tail_window = TailEstimator<kQuadCount>::kDefaultWindow;
};

/// Performance measures of one post-fault response.
///
/// Integrals run from the fault time to the horizon. The frequency measure sums
/// over every node (loads use their algebraic frequency); RoCoF and inertial
/// energy sum over generators and VSGs only, since loads carry no inertia.
struct MetricsReport {
    double l2_freq = 0.0;    ///< sum_i int (omega_i - omega_sync)^2 dt
    double l2_rocof = 0.0;   ///< sum_k int (domega_k/dt)^2 dt
    double e_rot = 0.0;      ///< -sum_k int m_k domega_k/dt dt
    double t_sync = 0.0;     ///< time after the fault from which all nodes stay in band
    double coherency = 0.0;  ///< sum_i int (omega_i - mean over area(i))^2 dt
    double max_rocof = 0.0;  ///< max |domega/dt| over inertial nodes and samples
    std::size_t max_rocof_node = 0;
    double horizon = 0.0;

    /// Tail bounds relative to each integral: freq, rocof, energy, coherency.
    std::array<double, kQuadCount> tail_bound{};
    /// Same integrals by the trapezoid rule on the output samples.
    std::array<double, kQuadCount> trapezoid{};
    /// Largest |RoCoF| per node (NaN for loads).
    std::vector<double> node_max_rocof;

    bool synchronized = true;
    bool coherency_available = true;
    bool converged = true;  ///< synchronized and every tail bound within tolerance
    bool from_quadrature = false;
};

/// Streaming evaluation of the measures from output samples, so long runs on
/// large grids never need a stored trajectory.
class MetricsAccumulator {
public:
    MetricsAccumulator(std::vector<NodeKind> kinds, std::vector<std::string> areas, double omega_sync,
                       double t_start, double t_end, MetricsOptions options = {});
    MetricsAccumulator(const Grid& grid, double omega_sync, double t_start, double t_end,
                       MetricsOptions options = {});

    void add(double t, std::span<const double> frequency, std::span<const double> rocof,
             std::span<const double> inertia);
    void add(const SampleView& s) { add(s.t, s.frequency, s.rocof, s.inertia); }

    /// Builds the report. With `quadrature` the integrals come from the in-solver
    /// accumulators and the trapezoid values serve as a cross-check.
    [[nodiscard]] MetricsReport finish(
        const std::optional<std::array<double, kQuadCount>>& quadrature = std::nullopt) const;

private:
    void integrands(std::span<const double> frequency, std::span<const double> rocof,
                    std::span<const double> inertia, std::array<double, kQuadCount>& out);

    std::vector<NodeKind> kinds_;
    std::vector<std::size_t> area_of_;
    std::vector<double> area_size_;
    std::vector<double> area_sum_;
    bool areas_complete_ = true;
    double omega_sync_;
    double t_start_;
    double t_end_;
    MetricsOptions opt_;
    TailEstimator<kQuadCount> tail_;

    bool have_prev_ = false;
    double t_prev_ = 0.0;
    double dev_prev_ = 0.0;
    std::array<double, kQuadCount> f_prev_{};
    std::array<double, kQuadCount> trap_{};
    bool outside_ = false;
    double sync_time_;
    double last_t_ = 0.0;
    double max_rocof_ = 0.0;
    std::size_t max_rocof_node_ = 0;
    std::vector<double> node_max_rocof_;
};

/// Report for a stored trajectory; uses its quadrature totals when present and
/// computed for the same omega_sync.
[[nodiscard]] MetricsReport compute_metrics(const Trajectory& trajectory, double omega_sync,
                                            const MetricsOptions& options = {});

// Single measures. The integral ones throw NonConvergedTail when the tail bound
// exceeds options.tail_fraction.
[[nodiscard]] double l2_freq(const Trajectory& trajectory, double omega_sync,
                             const MetricsOptions& options = {});
[[nodiscard]] double l2_rocof(const Trajectory& trajectory, const MetricsOptions& options = {});
[[nodiscard]] double inertial_energy(const Trajectory& trajectory, const MetricsOptions& options = {});
/// Throws NeverSynchronized when the last sample is still outside the band.
[[nodiscard]] double resync_time(const Trajectory& trajectory, double omega_sync,
                                 const MetricsOptions& options = {});
/// Throws MissingAreaLabel when a node has no area.
[[nodiscard]] double coherency(const Trajectory& trajectory, const MetricsOptions& options = {});

// ---------------------------------------------------------------------------
// Ratios against a baseline
// ---------------------------------------------------------------------------

enum class Metric { L2Freq, L2Rocof, Energy, TSync, Coherency, MaxRocof };

inline constexpr std::array<Metric, 4> kPerformanceMetrics = {Metric::L2Freq, Metric::L2Rocof,
                                                              Metric::Energy, Metric::TSync};
inline constexpr std::array<Metric, 6> kAllMetrics = {Metric::L2Freq,   Metric::L2Rocof,
                                                      Metric::Energy,   Metric::TSync,
                                                      Metric::Coherency, Metric::MaxRocof};

[[nodiscard]] std::string to_string(Metric metric);
[[nodiscard]] double value(const MetricsReport& report, Metric metric) noexcept;

struct RatioReport {
    std::array<double, kAllMetrics.size()> ratio{};
    /// True where the baseline value is zero; ratio then holds +inf.
    std::array<bool, kAllMetrics.size()> undefined{};

    [[nodiscard]] double operator[](Metric m) const noexcept { return ratio[static_cast<std::size_t>(m)]; }
    /// Candidate strictly better (ratio < 1) on all four performance measures.
    [[nodiscard]] bool better_on_all_four() const noexcept;
};

/// candidate / baseline for every metric.
[[nodiscard]] RatioReport ratio_report(const MetricsReport& candidate, const MetricsReport& baseline);

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

[[nodiscard]] std::string metrics_csv_header();
[[nodiscard]] std::string metrics_csv_row(const std::string& scenario_id, const MetricsReport& report);

}  // namespace aisim
