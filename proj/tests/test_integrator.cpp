#include <catch_amalgamated.hpp>

#include "aisim/error.hpp"
#include "aisim/integrator.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace aisim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

void integrate_to(DormandPrince45& rk, double t_end) {
    while (rk.t() < t_end) rk.step(t_end);
}

}  // namespace

TEST_CASE("exponential decay", "[integrator]") {
    DormandPrince45 rk([](double, std::span<const double> y, std::span<double> dy) { dy[0] = -y[0]; }, 1);
    const std::vector<double> y0 = {1.0};
    rk.reset(0.0, y0);
    integrate_to(rk, 5.0);
    CHECK(rk.t() == 5.0);
    CHECK_THAT(rk.y()[0], WithinRel(std::exp(-5.0), 1e-7));
    CHECK(rk.stats().accepted > 0);
}

TEST_CASE("harmonic oscillator and dense output", "[integrator]") {
    DormandPrince45 rk(
        [](double, std::span<const double> y, std::span<double> dy) {
            dy[0] = y[1];
            dy[1] = -y[0];
        },
        2);
    const std::vector<double> y0 = {1.0, 0.0};
    rk.reset(0.0, y0);
    const double T = 2.0 * std::numbers::pi;
    std::vector<double> mid(2);
    double worst = 0.0;
    while (rk.t() < T) {
        rk.step(T);
        // Dense output at the middle of every step.
        const double tm = 0.5 * (rk.t_prev() + rk.t());
        rk.dense(tm, mid);
        worst = std::max(worst, std::abs(mid[0] - std::cos(tm)));
        worst = std::max(worst, std::abs(mid[1] + std::sin(tm)));
        // Endpoints are reproduced up to rounding.
        rk.dense(rk.t(), mid);
        CHECK_THAT(mid[0], WithinAbs(rk.y()[0], 1e-14));
    }
    CHECK_THAT(rk.y()[0], WithinAbs(1.0, 1e-7));
    CHECK_THAT(rk.y()[1], WithinAbs(0.0, 1e-7));
    CHECK(worst < 1e-6);
}

TEST_CASE("global error follows the tolerance", "[integrator]") {
    auto run = [](double rtol) {
        StepperOptions opt;
        opt.rtol = rtol;
        opt.atol = rtol * 1e-2;
        DormandPrince45 rk([](double t, std::span<const double> y, std::span<double> dy) { dy[0] = y[0] * std::cos(t); },
                           1, opt);
        const std::vector<double> y0 = {1.0};
        rk.reset(0.0, y0);
        integrate_to(rk, 10.0);
        return std::abs(rk.y()[0] - std::exp(std::sin(10.0)));
    };
    const double coarse = run(1e-5);
    const double fine = run(1e-9);
    CHECK(fine < coarse);
    CHECK(fine < 1e-7);
}

TEST_CASE("h_max caps the step", "[integrator]") {
    StepperOptions opt;
    opt.h_max = 0.01;
    DormandPrince45 rk([](double, std::span<const double>, std::span<double> dy) { dy[0] = 1.0; }, 1, opt);
    const std::vector<double> y0 = {0.0};
    rk.reset(0.0, y0);
    while (rk.t() < 1.0) {
        rk.step(1.0);
        CHECK(rk.last_h() <= 0.01 + 1e-15);
    }
    CHECK_THAT(rk.y()[0], WithinAbs(1.0, 1e-14));
}

TEST_CASE("finite-time blow-up is reported", "[integrator]") {
    DormandPrince45 rk([](double, std::span<const double> y, std::span<double> dy) { dy[0] = y[0] * y[0]; }, 1);
    const std::vector<double> y0 = {1.0};
    rk.reset(0.0, y0);
    CHECK_THROWS_AS(integrate_to(rk, 2.0), Error);
}

TEST_CASE("steps never pass the limit", "[integrator]") {
    DormandPrince45 rk([](double, std::span<const double> y, std::span<double> dy) { dy[0] = -2.0 * y[0]; }, 1);
    const std::vector<double> y0 = {3.0};
    rk.reset(0.0, y0);
    for (double lim : {0.1, 0.25, 0.3, 1.0}) {
        integrate_to(rk, lim);
        CHECK(rk.t() == lim);
    }
    CHECK_THAT(rk.y()[0], WithinRel(3.0 * std::exp(-2.0), 1e-7));
}
