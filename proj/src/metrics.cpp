#include "aisim/metrics.hpp"

#include "aisim/error.hpp"
#include "aisim/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace aisim {

MetricsAccumulator::MetricsAccumulator(std::vector<NodeKind> kinds, std::vector<std::string> areas,
                                       double omega_sync, double t_start, double t_end,
                                       MetricsOptions options)
    : kinds_(std::move(kinds)),
      omega_sync_(omega_sync),
      t_start_(t_start),
      t_end_(t_end),
      opt_(options),
      tail_(t_start, t_end, options.tail_window),
      sync_time_(t_start),
      node_max_rocof_(kinds_.size(), std::numeric_limits<double>::quiet_NaN()) {
    if (areas.size() != kinds_.size()) throw Error("area labels do not match node count");
    std::map<std::string, std::size_t> ids;
    for (const std::string& a : areas) {
        if (a.empty()) areas_complete_ = false;
        area_of_.push_back(ids.emplace(a, ids.size()).first->second);
    }
    area_size_.assign(ids.size(), 0.0);
    area_sum_.assign(ids.size(), 0.0);
    for (std::size_t a : area_of_) area_size_[a] += 1.0;
    for (std::size_t i = 0; i < kinds_.size(); ++i) {
        if (kinds_[i] != NodeKind::Load) node_max_rocof_[i] = 0.0;
    }
}

namespace {

std::vector<NodeKind> kinds_of(const Grid& grid) {
    std::vector<NodeKind> k;
    for (const Node& n : grid.nodes()) k.push_back(n.kind);
    return k;
}

std::vector<std::string> areas_of(const Grid& grid) {
    std::vector<std::string> a;
    for (const Node& n : grid.nodes()) a.push_back(n.area);
    return a;
}

}  // namespace

MetricsAccumulator::MetricsAccumulator(const Grid& grid, double omega_sync, double t_start,
                                       double t_end, MetricsOptions options)
    : MetricsAccumulator(kinds_of(grid), areas_of(grid), omega_sync, t_start, t_end, options) {}

void MetricsAccumulator::integrands(std::span<const double> frequency, std::span<const double> rocof,
                                    std::span<const double> inertia,
                                    std::array<double, kQuadCount>& out) {
    double freq = 0.0;
    double roc = 0.0;
    double energy = 0.0;
    std::fill(area_sum_.begin(), area_sum_.end(), 0.0);
    for (std::size_t i = 0; i < kinds_.size(); ++i) {
        const double dev = frequency[i] - omega_sync_;
        freq += dev * dev;
        area_sum_[area_of_[i]] += frequency[i];
        if (kinds_[i] != NodeKind::Load) {
            roc += rocof[i] * rocof[i];
            energy -= inertia[i] * rocof[i];
        }
    }
    double coh = 0.0;
    for (std::size_t i = 0; i < kinds_.size(); ++i) {
        const std::size_t a = area_of_[i];
        const double dev = frequency[i] - area_sum_[a] / area_size_[a];
        coh += dev * dev;
    }
    out = {freq, roc, energy, coh};
}

void MetricsAccumulator::add(double t, std::span<const double> frequency,
                             std::span<const double> rocof, std::span<const double> inertia) {
    if (frequency.size() != kinds_.size()) throw Error("sample width does not match node count");
    std::array<double, kQuadCount> f{};
    integrands(frequency, rocof, inertia, f);
    tail_.update(t, f);

    double dev = 0.0;
    for (std::size_t i = 0; i < kinds_.size(); ++i) {
        dev = std::max(dev, std::abs(frequency[i] - omega_sync_));
        if (kinds_[i] != NodeKind::Load) {
            const double r = std::abs(rocof[i]);
            if (r > node_max_rocof_[i]) node_max_rocof_[i] = r;
            if (r > max_rocof_) {
                max_rocof_ = r;
                max_rocof_node_ = i;
            }
        }
    }

    if (dev >= opt_.sync_band) {
        outside_ = true;
    } else if (outside_) {
        // Re-entry: interpolate the band crossing between the two samples.
        const double frac = have_prev_ ? (dev_prev_ - opt_.sync_band) / (dev_prev_ - dev) : 1.0;
        sync_time_ = have_prev_ ? t_prev_ + frac * (t - t_prev_) : t;
        outside_ = false;
    }

    if (have_prev_) {
        const double h = t - t_prev_;
        for (std::size_t k = 0; k < kQuadCount; ++k) trap_[k] += 0.5 * h * (f_prev_[k] + f[k]);
    }
    have_prev_ = true;
    t_prev_ = t;
    dev_prev_ = dev;
    f_prev_ = f;
    last_t_ = t;
}

MetricsReport MetricsAccumulator::finish(
    const std::optional<std::array<double, kQuadCount>>& quadrature) const {
    MetricsReport r;
    r.trapezoid = trap_;
    r.from_quadrature = quadrature.has_value();
    const auto& totals = quadrature ? *quadrature : trap_;
    r.l2_freq = totals[kQuadFrequency];
    r.l2_rocof = totals[kQuadRocof];
    r.e_rot = totals[kQuadEnergy];
    r.coherency = areas_complete_ ? totals[kQuadCoherency] : std::numeric_limits<double>::quiet_NaN();
    r.coherency_available = areas_complete_;
    r.max_rocof = max_rocof_;
    r.max_rocof_node = max_rocof_node_;
    r.node_max_rocof = node_max_rocof_;
    r.horizon = last_t_ - t_start_;
    r.synchronized = !outside_;
    r.t_sync = r.synchronized ? sync_time_ - t_start_ : std::numeric_limits<double>::quiet_NaN();
    r.tail_bound = tail_.relative(totals);
    if (!areas_complete_) r.tail_bound[kQuadCoherency] = 0.0;

    r.converged = r.synchronized;
    for (double b : r.tail_bound) {
        if (!(b <= opt_.tail_fraction)) r.converged = false;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Trajectory front ends
// ---------------------------------------------------------------------------

MetricsReport compute_metrics(const Trajectory& tr, double omega_sync, const MetricsOptions& options) {
    if (tr.sample_count() == 0) throw Error("empty trajectory");
    MetricsAccumulator acc(tr.kinds, tr.areas, omega_sync, tr.times.front(), tr.times.back(), options);
    for (std::size_t s = 0; s < tr.sample_count(); ++s) {
        acc.add(tr.times[s], tr.row(tr.frequency, s), tr.row(tr.rocof, s), tr.row(tr.inertia, s));
    }
    const bool quad_usable = tr.quad.has_value() && omega_sync == tr.omega_sync;
    return acc.finish(quad_usable ? tr.quad : std::nullopt);
}

namespace {

double checked(const MetricsReport& r, QuadIndex k, const char* name, const MetricsOptions& opt) {
    if (!(r.tail_bound[k] <= opt.tail_fraction)) throw NonConvergedTail(name, r.tail_bound[k]);
    switch (k) {
        case kQuadFrequency: return r.l2_freq;
        case kQuadRocof: return r.l2_rocof;
        case kQuadEnergy: return r.e_rot;
        default: return r.coherency;
    }
}

}  // namespace

double l2_freq(const Trajectory& tr, double omega_sync, const MetricsOptions& options) {
    return checked(compute_metrics(tr, omega_sync, options), kQuadFrequency, "l2_freq", options);
}

double l2_rocof(const Trajectory& tr, const MetricsOptions& options) {
    return checked(compute_metrics(tr, tr.omega_sync, options), kQuadRocof, "l2_rocof", options);
}

double inertial_energy(const Trajectory& tr, const MetricsOptions& options) {
    return checked(compute_metrics(tr, tr.omega_sync, options), kQuadEnergy, "e_rot", options);
}

double resync_time(const Trajectory& tr, double omega_sync, const MetricsOptions& options) {
    const MetricsReport r = compute_metrics(tr, omega_sync, options);
    if (!r.synchronized) throw NeverSynchronized(r.horizon);
    return r.t_sync;
}

double coherency(const Trajectory& tr, const MetricsOptions& options) {
    for (std::size_t i = 0; i < tr.areas.size(); ++i) {
        if (tr.areas[i].empty()) throw MissingAreaLabel(i);
    }
    return checked(compute_metrics(tr, tr.omega_sync, options), kQuadCoherency, "coherency", options);
}

// ---------------------------------------------------------------------------
// Ratios
// ---------------------------------------------------------------------------

std::string to_string(Metric metric) {
    switch (metric) {
        case Metric::L2Freq: return "l2_freq";
        case Metric::L2Rocof: return "l2_rocof";
        case Metric::Energy: return "e_rot";
        case Metric::TSync: return "t_sync";
        case Metric::Coherency: return "coherency";
        case Metric::MaxRocof: return "max_rocof";
    }
    return "";
}

double value(const MetricsReport& report, Metric metric) noexcept {
    switch (metric) {
        case Metric::L2Freq: return report.l2_freq;
        case Metric::L2Rocof: return report.l2_rocof;
        case Metric::Energy: return report.e_rot;
        case Metric::TSync: return report.t_sync;
        case Metric::Coherency: return report.coherency;
        case Metric::MaxRocof: return report.max_rocof;
    }
    return 0.0;
}

bool RatioReport::better_on_all_four() const noexcept {
    for (Metric m : kPerformanceMetrics) {
        const auto k = static_cast<std::size_t>(m);
        if (undefined[k] || !(ratio[k] < 1.0)) return false;
    }
    return true;
}

RatioReport ratio_report(const MetricsReport& candidate, const MetricsReport& baseline) {
    RatioReport out;
    for (Metric m : kAllMetrics) {
        const auto k = static_cast<std::size_t>(m);
        const double base = value(baseline, m);
        if (base == 0.0) {
            out.ratio[k] = std::numeric_limits<double>::infinity();
            out.undefined[k] = true;
        } else {
            out.ratio[k] = value(candidate, m) / base;
        }
    }
    return out;
}

std::string metrics_csv_header() {
    return "scenario_id,l2_freq,l2_rocof,e_rot,t_sync,coherency,max_rocof,max_rocof_node,horizon,converged";
}

std::string metrics_csv_row(const std::string& id, const MetricsReport& r) {
    std::string row = id;
    for (double v : {r.l2_freq, r.l2_rocof, r.e_rot, r.t_sync, r.coherency, r.max_rocof}) {
        row += ',';
        row += format_double(v);
    }
    row += ',' + std::to_string(r.max_rocof_node);
    row += ',' + format_double(r.horizon);
    row += r.converged ? ",true" : ",false";
    return row;
}

}  // namespace aisim
