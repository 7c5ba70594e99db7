#include "aisim/simd/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace aisim::simd::scalar {

void line_flows(std::span<const double> theta, std::span<const std::uint32_t> from,
                std::span<const std::uint32_t> to, std::span<const double> b, std::span<double> out) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = b[k] * std::sin(theta[from[k]] - theta[to[k]]);
    }
}

void rk_combine(std::span<const double> y, double h, std::span<const double> coef,
                std::span<const double* const> stages, std::span<double> out) {
    const std::size_t n = y.size();
    const std::size_t ns = coef.size();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t s = 0; s < ns; ++s) acc += coef[s] * stages[s][i];
        out[i] = y[i] + h * acc;
    }
}

double scaled_sq_norm(std::span<const double> err, std::span<const double> y0,
                      std::span<const double> y1, double atol, double rtol) {
    double sum = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        const double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = err[i] / scale;
        sum += r * r;
    }
    return sum;
}

}  // namespace aisim::simd::scalar
