#pragma once

// Data-parallel inner loops of the simulator.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, a vectorized variant. The variant is chosen once at runtime from
// CPU feature detection; AISIM_ISA=scalar|avx2 in the environment or
// `simd::select()` override the choice. Variants agree with the scalar
// reference to a few ulp (see tests/test_simd.cpp), not bit for bit.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace aisim::simd {

enum class Isa { Scalar, Avx2 };

[[nodiscard]] std::string_view to_string(Isa isa) noexcept;

struct Kernels {
    Isa isa;

    /// out[k] = b[k] * sin(theta[from[k]] - theta[to[k]]).
    void (*line_flows)(std::span<const double> theta, std::span<const std::uint32_t> from,
                       std::span<const std::uint32_t> to, std::span<const double> b,
                       std::span<double> out);

    /// out[i] = y[i] + h * sum_s coef[s] * stages[s][i].
    void (*rk_combine)(std::span<const double> y, double h, std::span<const double> coef,
                       std::span<const double* const> stages, std::span<double> out);

    /// sum_i (err[i] / (atol + rtol * max(|y0[i]|, |y1[i]|)))^2.
    double (*scaled_sq_norm)(std::span<const double> err, std::span<const double> y0,
                             std::span<const double> y1, double atol, double rtol);
};

[[nodiscard]] bool supported(Isa isa) noexcept;

/// Kernel table for one ISA; throws std::runtime_error if the CPU lacks it.
[[nodiscard]] const Kernels& kernels_for(Isa isa);

/// Currently selected kernel table.
[[nodiscard]] const Kernels& active() noexcept;

/// Overrides the runtime selection (process wide).
void select(Isa isa);

/// Best ISA available on this machine, ignoring overrides.
[[nodiscard]] Isa detect() noexcept;

namespace scalar {
void line_flows(std::span<const double> theta, std::span<const std::uint32_t> from,
                std::span<const std::uint32_t> to, std::span<const double> b, std::span<double> out);
void rk_combine(std::span<const double> y, double h, std::span<const double> coef,
                std::span<const double* const> stages, std::span<double> out);
double scaled_sq_norm(std::span<const double> err, std::span<const double> y0,
                      std::span<const double> y1, double atol, double rtol);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define AISIM_HAVE_AVX2_KERNELS 1
namespace avx2 {
void line_flows(std::span<const double> theta, std::span<const std::uint32_t> from,
                std::span<const std::uint32_t> to, std::span<const double> b, std::span<double> out);
void rk_combine(std::span<const double> y, double h, std::span<const double> coef,
                std::span<const double* const> stages, std::span<double> out);
double scaled_sq_norm(std::span<const double> err, std::span<const double> y0,
                      std::span<const double> y1, double atol, double rtol);
/// Vectorized sine used by line_flows, exposed for accuracy tests.
void sin(std::span<const double> x, std::span<double> out);
}  // namespace avx2
#else
#define AISIM_HAVE_AVX2_KERNELS 0
#endif

}  // namespace aisim::simd
