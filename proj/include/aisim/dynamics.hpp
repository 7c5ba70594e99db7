#pragma once

#include "aisim/fault.hpp"
#include "aisim/grid.hpp"
#include "aisim/integrator.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aisim {

// ---------------------------------------------------------------------------
// VSG control policy
// ---------------------------------------------------------------------------

enum class VsgMode { Plain, Deadband, Rearm };

/// How VSG inertia evolves.
///  - Plain:    dm/dt = alpha |domega/dt| - beta (m - m_min)
///  - Deadband: the |domega/dt| drive is replaced by its epsilon-regularized form
///              alpha/2 (|x + eps| + |x - eps|) - alpha eps, zero for |x| < eps
///  - Rearm:    Plain dynamics, but the run starts from m = m_reset and, once every
///              node has stayed within `band` of omega_sync for `hold` seconds,
///              m is set back to m_reset (once per run).
struct VsgPolicy {
    VsgMode mode = VsgMode::Plain;
    double epsilon = 0.0;
    std::vector<double> m_reset;  ///< one per VSG, in ascending node id order
    double band = kDefaultRearmBand;
    double hold = kDefaultRearmHold;

    static constexpr double kDefaultRearmBand = 2.0 * std::numbers::pi * 1e-4;  // 0.1 mHz
    static constexpr double kDefaultRearmHold = 60.0;

    [[nodiscard]] static VsgPolicy plain() { return {}; }
    [[nodiscard]] static VsgPolicy deadband(double epsilon);
    [[nodiscard]] static VsgPolicy rearm(std::vector<double> m_reset,
                                         double band = kDefaultRearmBand,
                                         double hold = kDefaultRearmHold);
    /// Rearm with m_reset taken from each VSG's nominal inertia `m`.
    [[nodiscard]] static VsgPolicy rearm_to_nominal(const Grid& grid,
                                                    double band = kDefaultRearmBand,
                                                    double hold = kDefaultRearmHold);

    void validate(const Grid& grid) const;
};

[[nodiscard]] std::string to_string(VsgMode mode);

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

/// Quadrature accumulators carried in the state vector.
enum QuadIndex : std::size_t {
    kQuadFrequency = 0,  ///< sum_i (omega_i - omega_sync)^2, all nodes
    kQuadRocof = 1,      ///< sum_k (domega_k/dt)^2, inertial nodes
    kQuadEnergy = 2,     ///< -sum_k m_k domega_k/dt, inertial nodes
    kQuadCoherency = 3,  ///< sum_i (omega_i - mean omega over i's area)^2
    kQuadCount = 4,
};

struct State {
    std::vector<double> theta;  ///< one per node
    std::vector<double> omega;  ///< one per inertial node (generators and VSGs)
    std::vector<double> m;      ///< one per VSG
    std::array<double, kQuadCount> quad{};

    [[nodiscard]] static State zeros(const Grid& grid);
    /// theta = theta0, omega = 0, m = m_min, quad = 0.
    [[nodiscard]] static State at_rest(const Grid& grid, std::span<const double> theta0);
};

// ---------------------------------------------------------------------------
// Right-hand side
// ---------------------------------------------------------------------------

/// Swing dynamics of a grid under fixed injections.
///
/// Flat state layout: [theta (N) | omega (inertial) | m (VSG) | quad (4)].
/// Generators and VSGs follow m dw/dt + d w = P - flow; loads follow
/// d dtheta/dt = P - flow. domega/dt is computed first and then drives dm/dt,
/// so there is no algebraic loop.
///
/// With a nonzero `frame_rate` the angle block holds theta - frame_rate * t;
/// flows only see angle differences, so nothing else changes. `observe` still
/// reports absolute frequencies.
///
/// Not thread safe (uses internal scratch); give each worker its own instance.
class SwingSystem {
public:
    SwingSystem(const Grid& grid, std::vector<double> injections, VsgPolicy policy,
                double omega_sync = 0.0, double frame_rate = 0.0);

    [[nodiscard]] std::size_t dimension() const noexcept { return dim_; }
    [[nodiscard]] std::size_t omega_offset() const noexcept { return n_; }
    [[nodiscard]] std::size_t m_offset() const noexcept { return n_ + n_inertial_; }
    [[nodiscard]] std::size_t quad_offset() const noexcept { return n_ + n_inertial_ + n_vsg_; }
    [[nodiscard]] const Grid& grid() const noexcept { return *grid_; }
    [[nodiscard]] const VsgPolicy& policy() const noexcept { return policy_; }
    [[nodiscard]] double omega_sync() const noexcept { return omega_sync_; }
    [[nodiscard]] bool areas_complete() const noexcept { return areas_complete_; }

    void derivative(std::span<const double> y, std::span<double> dy) const;

    /// Per-node observables at state y: frequency (dtheta/dt for every node),
    /// RoCoF (NaN for loads), inertia (NaN for loads) and the four integrands.
    void observe(std::span<const double> y, std::span<double> frequency, std::span<double> rocof,
                 std::span<double> inertia, std::span<double> integrand) const;

    [[nodiscard]] std::vector<double> pack(const State& s) const;
    [[nodiscard]] State unpack(std::span<const double> y) const;

private:
    const Grid* grid_;
    std::vector<double> p_;
    VsgPolicy policy_;
    double omega_sync_;
    double frame_rate_;
    std::size_t n_;
    std::size_t n_inertial_;
    std::size_t n_vsg_;
    std::size_t dim_;
    std::vector<std::size_t> area_of_;
    std::vector<double> area_size_;
    bool areas_complete_ = true;
    mutable std::vector<double> flow_;
    mutable std::vector<double> line_;
    mutable std::vector<double> area_sum_;
    mutable std::vector<double> dy_;
};

/// Derivative of `state` as a State (quad holds the integrands). Injections are
/// the grid's P plus the optional fault step.
[[nodiscard]] State rhs(const Grid& grid, const State& state, const VsgPolicy& policy,
                        const std::optional<Fault>& fault = std::nullopt, double omega_sync = 0.0);

/// rhs() with the epsilon-deadband drive.
[[nodiscard]] State rhs_deadband(const Grid& grid, const State& state, double epsilon,
                                 const std::optional<Fault>& fault = std::nullopt,
                                 double omega_sync = 0.0);

/// The |x| drive of the inertia law under a policy: |x| (Plain, Rearm) or the
/// epsilon-regularized version (Deadband).
[[nodiscard]] double inertia_drive(double rocof, const VsgPolicy& policy) noexcept;

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

struct IntegrationOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double t_end = 120.0;
    double sample_dt = 1e-3;
    double h_max = 0.0;
    /// Raise HorizonTooShort when the metric tails have not decayed by t_end.
    bool strict_horizon = false;
    double tail_fraction = 1e-4;
};

/// One dense-output sample handed to observers. Spans are valid only during the call.
struct SampleView {
    double t;
    std::span<const double> theta;
    std::span<const double> frequency;
    std::span<const double> rocof;
    std::span<const double> inertia;
    std::span<const double> integrand;
    std::span<const double> quad;
};

using SampleObserver = std::function<void(const SampleView&)>;

struct IntegrationSummary {
    double t_start = 0.0;
    double t_end = 0.0;
    double omega_sync = 0.0;
    std::array<double, kQuadCount> quad{};
    State final_state;
    StepperStats stats;
    std::optional<double> rearm_time;
    std::size_t samples = 0;
};

/// Streams the post-fault response to `observer` at every sample time.
/// Starts at t = fault.time from the pre-fault fixed point with omega = 0 and
/// m = m_min (m_reset under Rearm). Without a fault the grid is integrated at
/// its own injections.
IntegrationSummary simulate(const Grid& grid, const std::optional<Fault>& fault,
                            const VsgPolicy& policy, const IntegrationOptions& options,
                            const SampleObserver& observer);

/// Dense record of a run, or a hand-built trajectory for post-processing.
struct Trajectory {
    std::size_t node_count = 0;
    std::vector<NodeKind> kinds;
    std::vector<std::string> areas;
    double omega_sync = 0.0;
    std::vector<double> times;
    // Row-major [sample][node].
    std::vector<double> theta;
    std::vector<double> frequency;
    std::vector<double> rocof;
    std::vector<double> inertia;
    /// In-solver quadrature totals; empty for hand-built trajectories.
    std::optional<std::array<double, kQuadCount>> quad;
    std::optional<double> rearm_time;

    [[nodiscard]] static Trajectory empty_for(const Grid& grid);
    [[nodiscard]] std::size_t sample_count() const noexcept { return times.size(); }
    /// Appends one sample; times must be strictly increasing.
    void append(double t, std::span<const double> theta_row, std::span<const double> frequency_row,
                std::span<const double> rocof_row, std::span<const double> inertia_row);
    [[nodiscard]] std::span<const double> row(const std::vector<double>& field, std::size_t s) const {
        return {field.data() + s * node_count, node_count};
    }
};

[[nodiscard]] Trajectory integrate(const Grid& grid, const std::optional<Fault>& fault,
                                   const VsgPolicy& policy, const IntegrationOptions& options = {});

struct InertiaPeak {
    std::size_t node;
    double peak_m;
    double time;
};

/// Largest sampled inertia of every VSG and when it occurred. Samples within a
/// relative 1e-9 of an earlier peak are ties and the earliest one is kept.
[[nodiscard]] std::vector<InertiaPeak> max_inertia_profile(const Trajectory& trajectory);

/// Writes `t,node_id,theta,omega,rocof,m` rows; rocof and m are empty where undefined.
class TrajectoryCsvWriter {
public:
    TrajectoryCsvWriter(std::ostream& out, const Grid& grid);
    void operator()(const SampleView& sample);

private:
    std::ostream* out_;
    std::vector<bool> is_vsg_;
    std::vector<bool> inertial_;
};

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace aisim
