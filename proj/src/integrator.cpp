#include "aisim/integrator.hpp"

#include "aisim/error.hpp"
#include "aisim/simd/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace aisim {

namespace {

// Butcher tableau. Zero entries are dropped; each row lists (coefficients, stage ids).
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

constexpr std::array<double, 1> a2{1.0 / 5.0};
constexpr std::array<double, 2> a3{3.0 / 40.0, 9.0 / 40.0};
constexpr std::array<double, 3> a4{44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0};
constexpr std::array<double, 4> a5{19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0,
                                   -212.0 / 729.0};
constexpr std::array<double, 5> a6{9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
                                   -5103.0 / 18656.0};
// Fifth-order solution; stage 2 has weight zero.
constexpr std::array<double, 5> b5{35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
                                   11.0 / 84.0};
// y5 - y4 over stages 1,3,4,5,6,7.
constexpr std::array<double, 6> e{71.0 / 57600.0,     -71.0 / 16695.0, 71.0 / 1920.0,
                                  -17253.0 / 339200.0, 22.0 / 525.0,   -1.0 / 40.0};
// Dense output over stages 1,3,4,5,6,7.
constexpr std::array<double, 6> dc{-12715105075.0 / 11282082432.0, 87487479700.0 / 32700410799.0,
                                   -10690763975.0 / 1880347072.0,  701980252875.0 / 199316789632.0,
                                   -1453857185.0 / 822651844.0,    69997945.0 / 29380423.0};

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;   // largest shrink per step is 1/0.2
constexpr double kFacMax = 10.0;  // largest growth per step
constexpr double kBeta = 0.04;    // PI controller weight
constexpr double kExpo = 0.2 - kBeta * 0.75;

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

DormandPrince45::DormandPrince45(Rhs rhs, std::size_t dimension, StepperOptions options)
    : rhs_(std::move(rhs)), dim_(dimension), opt_(options) {
    for (auto* v : {&y_, &y_prev_, &y_stage_, &y_new_, &err_, &zero_}) v->assign(dim_, 0.0);
    for (auto& k : k_) k.assign(dim_, 0.0);
    for (auto& r : rcont_) r.assign(dim_, 0.0);
}

void DormandPrince45::eval(double t, std::span<const double> y, std::vector<double>& out) {
    rhs_(t, y, out);
    ++stats_.rhs_calls;
}

void DormandPrince45::reset(double t, std::span<const double> y) {
    std::copy(y.begin(), y.end(), y_.begin());
    t_ = t;
    t_prev_ = t;
    h_ = 0.0;
    err_old_ = 1e-4;
    last_rejected_ = false;
    eval(t_, y_, k_[0]);
    for (auto& r : rcont_) std::fill(r.begin(), r.end(), 0.0);
    std::copy(y_.begin(), y_.end(), rcont_[0].begin());
}

double DormandPrince45::initial_step(double t_limit) {
    // Hairer & Wanner's starting-step heuristic.
    const auto& kern = simd::active();
    const auto n = static_cast<double>(dim_);
    const double d0 = std::sqrt(kern.scaled_sq_norm(y_, y_, y_, opt_.atol, opt_.rtol) / n);
    const double d1 = std::sqrt(kern.scaled_sq_norm(k_[0], y_, y_, opt_.atol, opt_.rtol) / n);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_limit - t_);
    for (std::size_t i = 0; i < dim_; ++i) y_stage_[i] = y_[i] + h0 * k_[0][i];
    eval(t_ + h0, y_stage_, k_[1]);
    for (std::size_t i = 0; i < dim_; ++i) err_[i] = k_[1][i] - k_[0][i];
    const double d2 = std::sqrt(kern.scaled_sq_norm(err_, y_, y_, opt_.atol, opt_.rtol) / n) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    double h = std::min(100.0 * h0, h1);
    if (opt_.h_max > 0.0) h = std::min(h, opt_.h_max);
    return h;
}

void DormandPrince45::step(double t_limit) {
    const auto& kern = simd::active();
    if (h_ <= 0.0) h_ = opt_.h_init > 0.0 ? opt_.h_init : initial_step(t_limit);

    auto combine = [&](std::span<const double> base, double h, std::span<const double> coef,
                       std::initializer_list<int> ids, std::vector<double>& out) {
        std::array<const double*, 7> stages{};
        std::size_t s = 0;
        for (int id : ids) stages[s++] = k_[id].data();
        kern.rk_combine(base, h, coef, std::span<const double* const>(stages.data(), s), out);
    };

    for (;;) {
        double h = h_;
        bool last = false;
        if (opt_.h_max > 0.0) h = std::min(h, opt_.h_max);
        if (t_ + h >= t_limit || t_ + 1.01 * h >= t_limit) {
            h = t_limit - t_;
            last = true;
        }
        if (h < opt_.h_min) throw StepSizeUnderflow(t_, h);

        combine(y_, h, a2, {0}, y_stage_);
        eval(t_ + c2 * h, y_stage_, k_[1]);
        combine(y_, h, a3, {0, 1}, y_stage_);
        eval(t_ + c3 * h, y_stage_, k_[2]);
        combine(y_, h, a4, {0, 1, 2}, y_stage_);
        eval(t_ + c4 * h, y_stage_, k_[3]);
        combine(y_, h, a5, {0, 1, 2, 3}, y_stage_);
        eval(t_ + c5 * h, y_stage_, k_[4]);
        combine(y_, h, a6, {0, 1, 2, 3, 4}, y_stage_);
        eval(t_ + h, y_stage_, k_[5]);
        combine(y_, h, b5, {0, 2, 3, 4, 5}, y_new_);
        const double t_new = last ? t_limit : t_ + h;
        eval(t_new, y_new_, k_[6]);

        combine(zero_, h, e, {0, 2, 3, 4, 5, 6}, err_);
        // Unnormalized 2-norm: no component may use more than the full
        // tolerance, however many components there are.
        const double sq = kern.scaled_sq_norm(err_, y_, y_new_, opt_.atol, opt_.rtol);
        const double err = std::sqrt(sq);

        if (!std::isfinite(err) || !all_finite(y_new_)) {
            ++stats_.rejected;
            h_ = h * kFacMin;
            last_rejected_ = true;
            continue;
        }

        const double fac11 = std::pow(err, kExpo);
        double fac = fac11 / std::pow(err_old_, kBeta);
        fac = std::clamp(fac / kSafety, 1.0 / kFacMax, 1.0 / kFacMin);
        double h_new = h / fac;

        if (err <= 1.0) {
            err_old_ = std::max(err, 1e-4);
            if (last_rejected_) h_new = std::min(h_new, h);
            last_rejected_ = false;

            // Continuous extension.
            for (std::size_t i = 0; i < dim_; ++i) {
                const double ydiff = y_new_[i] - y_[i];
                const double bspl = h * k_[0][i] - ydiff;
                rcont_[0][i] = y_[i];
                rcont_[1][i] = ydiff;
                rcont_[2][i] = bspl;
                rcont_[3][i] = ydiff - h * k_[6][i] - bspl;
            }
            combine(zero_, h, dc, {0, 2, 3, 4, 5, 6}, rcont_[4]);

            y_prev_.swap(y_);
            y_.swap(y_new_);
            k_[0].swap(k_[6]);
            t_prev_ = t_;
            t_ = t_new;
            // Keep the proposal from the controller for the next step; a step
            // clipped at t_limit should not shrink it.
            h_ = last ? std::max(h_new, h_) : h_new;
            ++stats_.accepted;
            return;
        }

        ++stats_.rejected;
        h_ = h / std::min(1.0 / kFacMin, fac11 / kSafety);
        last_rejected_ = true;
    }
}

void DormandPrince45::dense(double t, std::span<double> out) const {
    const double h = t_ - t_prev_;
    if (h <= 0.0) {
        std::copy(y_.begin(), y_.end(), out.begin());
        return;
    }
    const double s = (t - t_prev_) / h;
    const double s1 = 1.0 - s;
    for (std::size_t i = 0; i < dim_; ++i) {
        out[i] = rcont_[0][i] +
                 s * (rcont_[1][i] + s1 * (rcont_[2][i] + s * (rcont_[3][i] + s1 * rcont_[4][i])));
    }
}

}  // namespace aisim
