#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace aisim {

struct StepperOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double h_init = 0.0;  ///< 0 selects an initial step automatically
    double h_min = 1e-12;
    double h_max = 0.0;   ///< 0 means unbounded
};

struct StepperStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_calls = 0;
};

/// Dormand-Prince 5(4) embedded pair with FSAL, a PI step-size controller and
/// the fourth-order continuous extension of Hairer, Norsett & Wanner.
///
/// The vector arithmetic (stage sums and the error norm) runs through the
/// simd kernel table.
class DormandPrince45 {
public:
    using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dy)>;

    DormandPrince45(Rhs rhs, std::size_t dimension, StepperOptions options = {});

    /// Restarts from (t, y). Discards the step history.
    void reset(double t, std::span<const double> y);

    /// Advances by one accepted step that does not pass `t_limit`.
    /// Throws StepSizeUnderflow or NonFiniteState.
    void step(double t_limit);

    /// Interpolates the last accepted step; t must lie in [t_prev(), t()].
    void dense(double t, std::span<double> out) const;

    [[nodiscard]] double t() const noexcept { return t_; }
    [[nodiscard]] double t_prev() const noexcept { return t_prev_; }
    [[nodiscard]] double last_h() const noexcept { return t_ - t_prev_; }
    [[nodiscard]] std::span<const double> y() const noexcept { return y_; }
    /// Derivative at (t(), y()); available after reset() and step().
    [[nodiscard]] std::span<const double> dydt() const noexcept { return k_[0]; }
    [[nodiscard]] const StepperStats& stats() const noexcept { return stats_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return dim_; }

private:
    double initial_step(double t_limit);
    void eval(double t, std::span<const double> y, std::vector<double>& out);

    Rhs rhs_;
    std::size_t dim_;
    StepperOptions opt_;
    StepperStats stats_;

    double t_ = 0.0;
    double t_prev_ = 0.0;
    double h_ = 0.0;
    double err_old_ = 1e-4;
    bool last_rejected_ = false;

    std::vector<double> y_;
    std::vector<double> y_prev_;
    std::vector<double> y_stage_;
    std::vector<double> y_new_;
    std::vector<double> err_;
    std::vector<double> zero_;
    std::vector<double> k_[7];
    // Continuous-extension coefficients of the last accepted step.
    std::vector<double> rcont_[5];
};

}  // namespace aisim
