#include "aisim/simd/kernels.hpp"

#if AISIM_HAVE_AVX2_KERNELS

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#define AISIM_TARGET_AVX2 __attribute__((target("avx2,fma")))

namespace aisim::simd::avx2 {

namespace {

// pi = kPiHi + kPiLo to ~2^-107; the reduction r = x - k*pi is accurate while
// |k| stays far below 2^26, which covers any angle difference a grid can reach.
constexpr double kPiHi = 3.141592653589793116;
constexpr double kPiLo = 1.2246467991473532e-16;
constexpr double kInvPi = 0.318309886183790671538;

// Taylor coefficients (-1)^n / (2n+1)! for n = 1..11. On |r| <= pi/2 the first
// omitted term is below 1e-20, so the polynomial error is pure rounding.
constexpr double kSinCoef[11] = {
    -1.0 / 6.0,
    1.0 / 120.0,
    -1.0 / 5040.0,
    1.0 / 362880.0,
    -1.0 / 39916800.0,
    1.0 / 6227020800.0,
    -1.0 / 1307674368000.0,
    1.0 / 355687428096000.0,
    -1.0 / 121645100408832000.0,
    1.0 / 51090942171709440000.0,
    -1.0 / 25852016738884976640000.0,
};

AISIM_TARGET_AVX2 inline __m256d sin4(__m256d x) {
    const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kInvPi)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kPiHi), x);
    r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kPiLo), r);

    const __m256d r2 = _mm256_mul_pd(r, r);
    __m256d p = _mm256_set1_pd(kSinCoef[10]);
    for (int i = 9; i >= 0; --i) p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(kSinCoef[i]));
    __m256d s = _mm256_fmadd_pd(_mm256_mul_pd(p, r2), r, r);

    // sin(r + k pi) = (-1)^k sin(r). Adding 1.5 * 2^52 puts k's parity in the
    // lowest mantissa bit for either sign of k; move it to the sign bit and flip.
    const __m256d shifted = _mm256_add_pd(k, _mm256_set1_pd(0x1.8p52));
    const __m256i parity = _mm256_slli_epi64(_mm256_castpd_si256(shifted), 63);
    return _mm256_xor_pd(s, _mm256_castsi256_pd(parity));
}

AISIM_TARGET_AVX2 inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace

AISIM_TARGET_AVX2 void sin(std::span<const double> x, std::span<double> out) {
    const std::size_t n = x.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out.data() + i, sin4(_mm256_loadu_pd(x.data() + i)));
    if (i < n) {
        alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
        std::copy(x.begin() + static_cast<std::ptrdiff_t>(i), x.end(), buf);
        _mm256_store_pd(buf, sin4(_mm256_load_pd(buf)));
        std::copy(buf, buf + (n - i), out.begin() + static_cast<std::ptrdiff_t>(i));
    }
}

AISIM_TARGET_AVX2 void line_flows(std::span<const double> theta, std::span<const std::uint32_t> from,
                                  std::span<const std::uint32_t> to, std::span<const double> b,
                                  std::span<double> out) {
    const std::size_t n = b.size();
    const double* th = theta.data();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m128i fi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(from.data() + k));
        const __m128i ti = _mm_loadu_si128(reinterpret_cast<const __m128i*>(to.data() + k));
        const __m256d diff =
            _mm256_sub_pd(_mm256_i32gather_pd(th, fi, 8), _mm256_i32gather_pd(th, ti, 8));
        _mm256_storeu_pd(out.data() + k, _mm256_mul_pd(_mm256_loadu_pd(b.data() + k), sin4(diff)));
    }
    if (k < n) {
        alignas(32) double diff[4] = {0.0, 0.0, 0.0, 0.0};
        alignas(32) double bb[4] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t j = k; j < n; ++j) {
            diff[j - k] = th[from[j]] - th[to[j]];
            bb[j - k] = b[j];
        }
        _mm256_store_pd(diff, _mm256_mul_pd(_mm256_load_pd(bb), sin4(_mm256_load_pd(diff))));
        std::copy(diff, diff + (n - k), out.begin() + static_cast<std::ptrdiff_t>(k));
    }
}

AISIM_TARGET_AVX2 void rk_combine(std::span<const double> y, double h, std::span<const double> coef,
                                  std::span<const double* const> stages, std::span<double> out) {
    const std::size_t n = y.size();
    const std::size_t ns = coef.size();
    const __m256d hv = _mm256_set1_pd(h);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t s = 0; s < ns; ++s) {
            acc = _mm256_fmadd_pd(_mm256_set1_pd(coef[s]), _mm256_loadu_pd(stages[s] + i), acc);
        }
        _mm256_storeu_pd(out.data() + i, _mm256_fmadd_pd(hv, acc, _mm256_loadu_pd(y.data() + i)));
    }
    for (; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t s = 0; s < ns; ++s) acc = std::fma(coef[s], stages[s][i], acc);
        out[i] = std::fma(h, acc, y[i]);
    }
}

AISIM_TARGET_AVX2 double scaled_sq_norm(std::span<const double> err, std::span<const double> y0,
                                        std::span<const double> y1, double atol, double rtol) {
    const std::size_t n = err.size();
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d av = _mm256_set1_pd(atol);
    const __m256d rv = _mm256_set1_pd(rtol);
    __m256d sum = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_andnot_pd(sign, _mm256_loadu_pd(y0.data() + i));
        const __m256d c = _mm256_andnot_pd(sign, _mm256_loadu_pd(y1.data() + i));
        const __m256d scale = _mm256_fmadd_pd(rv, _mm256_max_pd(a, c), av);
        const __m256d r = _mm256_div_pd(_mm256_loadu_pd(err.data() + i), scale);
        sum = _mm256_fmadd_pd(r, r, sum);
    }
    double total = hsum(sum);
    for (; i < n; ++i) {
        const double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = err[i] / scale;
        total += r * r;
    }
    return total;
}

}  // namespace aisim::simd::avx2

#endif
