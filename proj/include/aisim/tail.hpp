#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace aisim {

/// Bounds the part of an integral over [0, inf) that a run truncated at t_end
/// leaves out.
///
/// The integrand envelope is the running max of |f| over two trailing windows
/// [T-2W, T-W) and [T-W, T]. If it decays, the tail is bounded by
/// envelope(T) / rate with rate = ln(e_early / e_late) / W; if it does not at
/// least halve from one window to the next, the bound is
/// envelope(T) * (T - t_start), i.e. the plateau continues for as long as the
/// run has lasted.
template <std::size_t K>
class TailEstimator {
public:
    static constexpr double kDefaultWindow = 10.0;
    static constexpr double kMinDecay = 2.0;

    TailEstimator(double t_start, double t_end, double window = kDefaultWindow)
        : t_start_(t_start), t_end_(t_end) {
        const double span = t_end - t_start;
        window_ = window < span / 4.0 ? window : span / 4.0;
    }

    void update(double t, std::span<const double> integrand) {
        if (t < t_end_ - 2.0 * window_) return;
        auto& env = t < t_end_ - window_ ? early_ : late_;
        for (std::size_t k = 0; k < K; ++k) {
            const double a = integrand[k] < 0.0 ? -integrand[k] : integrand[k];
            if (a > env[k]) env[k] = a;
        }
    }

    /// Absolute tail bound per component.
    [[nodiscard]] std::array<double, K> absolute() const;

    /// Tail bound relative to `accumulated`; 0 when both are 0, inf when only
    /// the accumulated value is 0.
    [[nodiscard]] std::array<double, K> relative(std::span<const double> accumulated) const {
        const auto abs_bound = absolute();
        std::array<double, K> rel{};
        for (std::size_t k = 0; k < K; ++k) {
            const double acc = accumulated[k] < 0.0 ? -accumulated[k] : accumulated[k];
            if (abs_bound[k] == 0.0) {
                rel[k] = 0.0;
            } else {
                rel[k] = acc > 0.0 ? abs_bound[k] / acc : std::numeric_limits<double>::infinity();
            }
        }
        return rel;
    }

    [[nodiscard]] double window() const noexcept { return window_; }

private:
    double t_start_;
    double t_end_;
    double window_;
    std::array<double, K> early_{};
    std::array<double, K> late_{};
};

template <std::size_t K>
std::array<double, K> TailEstimator<K>::absolute() const {
    std::array<double, K> bound{};
    for (std::size_t k = 0; k < K; ++k) {
        if (late_[k] == 0.0) continue;
        // Less than a halving per window is indistinguishable from a noise
        // floor, and the fitted rate would be close to zero.
        if (early_[k] >= kMinDecay * late_[k]) {
            bound[k] = late_[k] * window_ / std::log(early_[k] / late_[k]);
        } else {
            bound[k] = late_[k] * (t_end_ - t_start_);
        }
    }
    return bound;
}

}  // namespace aisim
