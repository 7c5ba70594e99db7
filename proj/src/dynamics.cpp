#include "aisim/dynamics.hpp"

#include "aisim/equilibrium.hpp"
#include "aisim/error.hpp"
#include "aisim/flows.hpp"
#include "aisim/format.hpp"
#include "aisim/tail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

namespace aisim {

// ---------------------------------------------------------------------------
// Policy
// ---------------------------------------------------------------------------

VsgPolicy VsgPolicy::deadband(double epsilon) {
    VsgPolicy p;
    p.mode = VsgMode::Deadband;
    p.epsilon = epsilon;
    return p;
}

VsgPolicy VsgPolicy::rearm(std::vector<double> m_reset, double band, double hold) {
    VsgPolicy p;
    p.mode = VsgMode::Rearm;
    p.m_reset = std::move(m_reset);
    p.band = band;
    p.hold = hold;
    return p;
}

VsgPolicy VsgPolicy::rearm_to_nominal(const Grid& grid, double band, double hold) {
    std::vector<double> reset;
    reset.reserve(grid.vsg_count());
    for (std::size_t id : grid.vsg_nodes()) {
        const Node& n = grid.node(id);
        reset.push_back(n.m > 0.0 ? n.m : n.m_min);
    }
    return rearm(std::move(reset), band, hold);
}

void VsgPolicy::validate(const Grid& grid) const {
    switch (mode) {
        case VsgMode::Plain:
            break;
        case VsgMode::Deadband:
            if (!(epsilon > 0.0)) throw Error("deadband epsilon must be > 0");
            break;
        case VsgMode::Rearm:
            if (m_reset.size() != grid.vsg_count()) {
                throw Error("rearm policy needs one m_reset per VSG (" +
                            std::to_string(grid.vsg_count()) + "), got " +
                            std::to_string(m_reset.size()));
            }
            for (std::size_t k = 0; k < m_reset.size(); ++k) {
                const Node& n = grid.node(grid.vsg_nodes()[k]);
                if (!(m_reset[k] >= n.m_min)) {
                    throw Error("rearm m_reset below m_min at node " + std::to_string(n.id));
                }
            }
            if (!(band > 0.0)) throw Error("rearm band must be > 0");
            if (!(hold > 0.0)) throw Error("rearm hold must be > 0");
            break;
    }
}

std::string to_string(VsgMode mode) {
    switch (mode) {
        case VsgMode::Plain: return "plain";
        case VsgMode::Deadband: return "deadband";
        case VsgMode::Rearm: return "rearm";
    }
    return "plain";
}

double inertia_drive(double rocof, const VsgPolicy& policy) noexcept {
    if (policy.mode == VsgMode::Deadband) {
        const double eps = policy.epsilon;
        return 0.5 * (std::abs(rocof + eps) + std::abs(rocof - eps)) - eps;
    }
    return std::abs(rocof);
}

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

State State::zeros(const Grid& grid) {
    State s;
    s.theta.assign(grid.size(), 0.0);
    s.omega.assign(grid.inertial_count(), 0.0);
    s.m.assign(grid.vsg_count(), 0.0);
    return s;
}

State State::at_rest(const Grid& grid, std::span<const double> theta0) {
    State s = zeros(grid);
    std::copy(theta0.begin(), theta0.end(), s.theta.begin());
    for (std::size_t k = 0; k < grid.vsg_count(); ++k) s.m[k] = grid.node(grid.vsg_nodes()[k]).m_min;
    return s;
}

// ---------------------------------------------------------------------------
// SwingSystem
// ---------------------------------------------------------------------------

SwingSystem::SwingSystem(const Grid& grid, std::vector<double> injections, VsgPolicy policy,
                         double omega_sync, double frame_rate)
    : grid_(&grid),
      p_(std::move(injections)),
      policy_(std::move(policy)),
      omega_sync_(omega_sync),
      frame_rate_(frame_rate),
      n_(grid.size()),
      n_inertial_(grid.inertial_count()),
      n_vsg_(grid.vsg_count()),
      dim_(n_ + n_inertial_ + n_vsg_ + kQuadCount),
      flow_(n_),
      line_(grid.lines().size()),
      dy_(dim_) {
    if (p_.size() != n_) throw Error("injection vector has wrong dimension");
    policy_.validate(grid);

    std::map<std::string, std::size_t> ids;
    area_of_.resize(n_);
    for (const Node& node : grid.nodes()) {
        if (node.area.empty()) areas_complete_ = false;
        auto [it, inserted] = ids.emplace(node.area, ids.size());
        area_of_[node.id] = it->second;
    }
    area_size_.assign(ids.size(), 0.0);
    for (std::size_t a : area_of_) area_size_[a] += 1.0;
    area_sum_.assign(ids.size(), 0.0);
}

void SwingSystem::derivative(std::span<const double> y, std::span<double> dy) const {
    const Grid& g = *grid_;
    const auto theta = y.subspan(0, n_);
    const auto omega = y.subspan(n_, n_inertial_);
    const auto m = y.subspan(m_offset(), n_vsg_);
    auto dtheta = dy.subspan(0, n_);
    auto domega = dy.subspan(n_, n_inertial_);
    auto dm = dy.subspan(m_offset(), n_vsg_);
    auto dquad = dy.subspan(quad_offset(), kQuadCount);

    node_flows(g, theta, flow_, line_);

    const auto inertial_index = g.inertial_index();
    const auto vsg_index = g.vsg_index();
    double q_freq = 0.0;
    double q_rocof = 0.0;
    double q_energy = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        const Node& node = g.nodes()[i];
        const double mismatch = p_[i] - flow_[i];
        if (node.kind == NodeKind::Load) {
            dtheta[i] = mismatch / node.d;
        } else {
            const auto k = static_cast<std::size_t>(inertial_index[i]);
            const int v = vsg_index[i];
            const double mass = v < 0 ? node.m : m[static_cast<std::size_t>(v)];
            const double rocof = (mismatch - node.d * omega[k]) / mass;
            dtheta[i] = omega[k];
            domega[k] = rocof;
            if (v >= 0) {
                const auto vi = static_cast<std::size_t>(v);
                dm[vi] = node.alpha * inertia_drive(rocof, policy_) - node.beta * (m[vi] - node.m_min);
            }
            q_rocof += rocof * rocof;
            q_energy -= mass * rocof;
        }
        const double dev = dtheta[i] - omega_sync_;
        q_freq += dev * dev;
    }

    std::fill(area_sum_.begin(), area_sum_.end(), 0.0);
    for (std::size_t i = 0; i < n_; ++i) area_sum_[area_of_[i]] += dtheta[i];
    double q_coh = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t a = area_of_[i];
        const double dev = dtheta[i] - area_sum_[a] / area_size_[a];
        q_coh += dev * dev;
    }

    if (frame_rate_ != 0.0) {
        for (double& d : dtheta) d -= frame_rate_;
    }

    dquad[kQuadFrequency] = q_freq;
    dquad[kQuadRocof] = q_rocof;
    dquad[kQuadEnergy] = q_energy;
    dquad[kQuadCoherency] = areas_complete_ ? q_coh : 0.0;
}

void SwingSystem::observe(std::span<const double> y, std::span<double> frequency,
                          std::span<double> rocof, std::span<double> inertia,
                          std::span<double> integrand) const {
    std::vector<double>& dy = dy_;
    derivative(y, dy);
    const Grid& g = *grid_;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < n_; ++i) {
        frequency[i] = dy[i] + frame_rate_;
        const int k = g.inertial_index()[i];
        if (k < 0) {
            rocof[i] = nan;
            inertia[i] = nan;
            continue;
        }
        rocof[i] = dy[n_ + static_cast<std::size_t>(k)];
        const int v = g.vsg_index()[i];
        inertia[i] = v < 0 ? g.nodes()[i].m : y[m_offset() + static_cast<std::size_t>(v)];
    }
    std::copy_n(dy.begin() + static_cast<std::ptrdiff_t>(quad_offset()), kQuadCount,
                integrand.begin());
}

std::vector<double> SwingSystem::pack(const State& s) const {
    if (s.theta.size() != n_ || s.omega.size() != n_inertial_ || s.m.size() != n_vsg_) {
        throw Error("state dimensions do not match the grid");
    }
    std::vector<double> y;
    y.reserve(dim_);
    y.insert(y.end(), s.theta.begin(), s.theta.end());
    y.insert(y.end(), s.omega.begin(), s.omega.end());
    y.insert(y.end(), s.m.begin(), s.m.end());
    y.insert(y.end(), s.quad.begin(), s.quad.end());
    return y;
}

State SwingSystem::unpack(std::span<const double> y) const {
    State s;
    s.theta.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n_));
    s.omega.assign(y.begin() + static_cast<std::ptrdiff_t>(n_),
                   y.begin() + static_cast<std::ptrdiff_t>(m_offset()));
    s.m.assign(y.begin() + static_cast<std::ptrdiff_t>(m_offset()),
               y.begin() + static_cast<std::ptrdiff_t>(quad_offset()));
    std::copy_n(y.begin() + static_cast<std::ptrdiff_t>(quad_offset()), kQuadCount, s.quad.begin());
    return s;
}

namespace {

std::vector<double> injections_for(const Grid& grid, const std::optional<Fault>& fault) {
    if (fault) {
        validate(*fault, grid);
        return post_fault_injections(grid, *fault);
    }
    std::vector<double> p(grid.size());
    for (const Node& n : grid.nodes()) p[n.id] = n.P;
    return p;
}

void require_finite(std::span<const double> v, double t) {
    for (double x : v) {
        if (!std::isfinite(x)) throw NonFiniteState(t);
    }
}

}  // namespace

State rhs(const Grid& grid, const State& state, const VsgPolicy& policy,
          const std::optional<Fault>& fault, double omega_sync) {
    SwingSystem sys(grid, injections_for(grid, fault), policy, omega_sync);
    const auto y = sys.pack(state);
    require_finite(y, 0.0);
    std::vector<double> dy(sys.dimension());
    sys.derivative(y, dy);
    return sys.unpack(dy);
}

State rhs_deadband(const Grid& grid, const State& state, double epsilon,
                   const std::optional<Fault>& fault, double omega_sync) {
    return rhs(grid, state, VsgPolicy::deadband(epsilon), fault, omega_sync);
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

IntegrationSummary simulate(const Grid& grid, const std::optional<Fault>& fault,
                            const VsgPolicy& policy, const IntegrationOptions& options,
                            const SampleObserver& observer) {
    policy.validate(grid);
    const double t0 = fault ? fault->time : 0.0;
    const double t_end = options.t_end;
    if (!(t_end > t0)) throw Error("t_end must be after the fault time");
    if (!(options.sample_dt > 0.0)) throw Error("sample_dt must be > 0");

    const FixedPoint fp = solve_fixed_point(grid);
    const double omega_sync = fault ? post_fault_sync_frequency(grid, *fault) : 0.0;
    // Angles are integrated relative to a frame rotating at omega_sync. They
    // stay O(1) instead of drifting linearly, so the relative tolerance keeps
    // its meaning on the stiff load rows late in the run.
    SwingSystem sys(grid, injections_for(grid, fault), policy, omega_sync, omega_sync);

    State init = State::at_rest(grid, fp.theta0);
    if (policy.mode == VsgMode::Rearm) init.m = policy.m_reset;
    std::vector<double> y = sys.pack(init);

    StepperOptions sopt;
    sopt.rtol = options.rtol;
    sopt.atol = options.atol;
    sopt.h_max = options.h_max;
    DormandPrince45 stepper(
        [&sys](double, std::span<const double> yy, std::span<double> dy) { sys.derivative(yy, dy); },
        sys.dimension(), sopt);
    stepper.reset(t0, y);

    // The exact flow never crosses m_min; a step may undershoot it by its own
    // error allowance, so the floor is checked with that slack.
    std::vector<double> m_floor;
    for (std::size_t id : grid.vsg_nodes()) {
        const double m_min = grid.node(id).m_min;
        m_floor.push_back(m_min - 10.0 * (options.atol + options.rtol * m_min));
    }
    auto require_floor = [&](std::span<const double> state, double t) {
        for (std::size_t k = 0; k < m_floor.size(); ++k) {
            const double m = state[sys.m_offset() + k];
            if (m < m_floor[k]) {
                const std::size_t id = grid.vsg_nodes()[k];
                throw InertiaBelowFloor(id, m, grid.node(id).m_min, t);
            }
        }
    };

    const std::size_t n = grid.size();
    std::vector<double> theta(n), frequency(n), rocof(n), inertia(n), integrand(kQuadCount);
    TailEstimator<kQuadCount> tail(t0, t_end);

    IntegrationSummary summary;
    summary.t_start = t0;
    summary.t_end = t_end;
    summary.omega_sync = omega_sync;

    const auto steps = static_cast<std::size_t>(std::floor((t_end - t0) / options.sample_dt + 1e-9));
    auto sample_time = [&](std::size_t s) {
        return s > steps ? t_end : t0 + static_cast<double>(s) * options.sample_dt;
    };
    const bool extra_final = t0 + static_cast<double>(steps) * options.sample_dt < t_end - 1e-12 * t_end;
    const std::size_t last_sample = steps + (extra_final ? 1 : 0);

    double in_band_since = std::numeric_limits<double>::quiet_NaN();  // NaN: out of band
    bool rearmed = false;

    // Returns true when the rearm event fired at this sample.
    auto emit = [&](double t, std::span<double> state) {
        sys.observe(state, frequency, rocof, inertia, integrand);
        tail.update(t, integrand);
        if (observer) {
            for (std::size_t i = 0; i < n; ++i) theta[i] = state[i] + omega_sync * (t - t0);
            observer(SampleView{t, theta, frequency, rocof, inertia, integrand,
                                state.subspan(sys.quad_offset(), kQuadCount)});
        }
        ++summary.samples;
        if (policy.mode != VsgMode::Rearm || rearmed) return false;
        double dev = 0.0;
        for (double f : frequency) dev = std::max(dev, std::abs(f - omega_sync));
        if (dev >= policy.band) {
            in_band_since = std::numeric_limits<double>::quiet_NaN();
            return false;
        }
        if (std::isnan(in_band_since)) in_band_since = t;
        if (t - in_band_since < policy.hold) return false;
        std::copy(policy.m_reset.begin(), policy.m_reset.end(),
                  state.begin() + static_cast<std::ptrdiff_t>(sys.m_offset()));
        rearmed = true;
        summary.rearm_time = t;
        return true;
    };

    std::size_t next = 0;
    emit(t0, y);
    ++next;
    std::vector<double> buf(sys.dimension());
    while (next <= last_sample) {
        stepper.step(t_end);
        require_finite(stepper.y(), stepper.t());
        require_floor(stepper.y(), stepper.t());
        while (next <= last_sample) {
            const double ts = sample_time(next);
            if (ts > stepper.t()) break;
            if (ts == stepper.t()) {
                std::copy(stepper.y().begin(), stepper.y().end(), buf.begin());
            } else {
                stepper.dense(ts, buf);
            }
            ++next;
            if (emit(ts, buf)) {
                stepper.reset(ts, buf);
                break;
            }
        }
    }

    summary.stats = stepper.stats();
    summary.final_state = sys.unpack(stepper.y());
    for (double& th : summary.final_state.theta) th += omega_sync * (stepper.t() - t0);
    summary.quad = summary.final_state.quad;

    if (options.strict_horizon) {
        const auto rel = tail.relative(summary.quad);
        for (std::size_t k = 0; k < kQuadCount; ++k) {
            if (rel[k] > options.tail_fraction) {
                throw HorizonTooShort("integrand " + std::to_string(k) + " tail bound " +
                                      format_double(rel[k]) + " of its integral at t_end = " +
                                      format_double(t_end));
            }
        }
    }
    return summary;
}

Trajectory Trajectory::empty_for(const Grid& grid) {
    Trajectory tr;
    tr.node_count = grid.size();
    for (const Node& n : grid.nodes()) {
        tr.kinds.push_back(n.kind);
        tr.areas.push_back(n.area);
    }
    return tr;
}

void Trajectory::append(double t, std::span<const double> theta_row,
                        std::span<const double> frequency_row, std::span<const double> rocof_row,
                        std::span<const double> inertia_row) {
    if (!times.empty() && !(t > times.back())) throw Error("trajectory times must increase strictly");
    if (theta_row.size() != node_count || frequency_row.size() != node_count ||
        rocof_row.size() != node_count || inertia_row.size() != node_count) {
        throw Error("trajectory row has wrong width");
    }
    times.push_back(t);
    theta.insert(theta.end(), theta_row.begin(), theta_row.end());
    frequency.insert(frequency.end(), frequency_row.begin(), frequency_row.end());
    rocof.insert(rocof.end(), rocof_row.begin(), rocof_row.end());
    inertia.insert(inertia.end(), inertia_row.begin(), inertia_row.end());
}

Trajectory integrate(const Grid& grid, const std::optional<Fault>& fault, const VsgPolicy& policy,
                     const IntegrationOptions& options) {
    Trajectory tr = Trajectory::empty_for(grid);
    const auto summary = simulate(grid, fault, policy, options, [&tr](const SampleView& s) {
        tr.append(s.t, s.theta, s.frequency, s.rocof, s.inertia);
    });
    tr.omega_sync = summary.omega_sync;
    tr.quad = summary.quad;
    tr.rearm_time = summary.rearm_time;
    return tr;
}

namespace {
constexpr double kPeakTieTolerance = 1e-9;
}  // namespace

std::vector<InertiaPeak> max_inertia_profile(const Trajectory& trajectory) {
    std::vector<InertiaPeak> peaks;
    for (std::size_t i = 0; i < trajectory.node_count; ++i) {
        if (trajectory.kinds[i] != NodeKind::Vsg) continue;
        if (trajectory.sample_count() == 0) throw Error("max_inertia_profile: empty trajectory");
        InertiaPeak peak{i, trajectory.inertia[i], trajectory.times[0]};
        for (std::size_t s = 1; s < trajectory.sample_count(); ++s) {
            const double m = trajectory.inertia[s * trajectory.node_count + i];
            // Rises within solver noise of the running peak count as ties.
            if (m > peak.peak_m + kPeakTieTolerance * std::abs(peak.peak_m)) {
                peak.peak_m = m;
                peak.time = trajectory.times[s];
            }
        }
        peaks.push_back(peak);
    }
    return peaks;
}

// ---------------------------------------------------------------------------
// CSV export
// ---------------------------------------------------------------------------

TrajectoryCsvWriter::TrajectoryCsvWriter(std::ostream& out, const Grid& grid) : out_(&out) {
    for (const Node& n : grid.nodes()) {
        is_vsg_.push_back(n.kind == NodeKind::Vsg);
        inertial_.push_back(n.inertial());
    }
    *out_ << "t,node_id,theta,omega,rocof,m\n";
}

namespace {

void write_row(std::ostream& out, double t, std::size_t i, double theta, double omega, double rocof,
               double m, bool inertial, bool vsg) {
    out << format_double(t) << ',' << i << ',' << format_double(theta) << ',' << format_double(omega)
        << ',';
    if (inertial) out << format_double(rocof);
    out << ',';
    if (vsg) out << format_double(m);
    out << '\n';
}

}  // namespace

void TrajectoryCsvWriter::operator()(const SampleView& s) {
    for (std::size_t i = 0; i < s.theta.size(); ++i) {
        write_row(*out_, s.t, i, s.theta[i], s.frequency[i], s.rocof[i], s.inertia[i], inertial_[i],
                  is_vsg_[i]);
    }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& tr) {
    out << "t,node_id,theta,omega,rocof,m\n";
    for (std::size_t s = 0; s < tr.sample_count(); ++s) {
        for (std::size_t i = 0; i < tr.node_count; ++i) {
            const std::size_t k = s * tr.node_count + i;
            write_row(out, tr.times[s], i, tr.theta[k], tr.frequency[k], tr.rocof[k], tr.inertia[k],
                      tr.kinds[i] != NodeKind::Load, tr.kinds[i] == NodeKind::Vsg);
        }
    }
}

}  // namespace aisim
