#include "aisim/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace aisim::simd {

namespace {

constexpr Kernels kScalar{Isa::Scalar, &scalar::line_flows, &scalar::rk_combine,
                          &scalar::scaled_sq_norm};

#if AISIM_HAVE_AVX2_KERNELS
constexpr Kernels kAvx2{Isa::Avx2, &avx2::line_flows, &avx2::rk_combine, &avx2::scaled_sq_norm};
#endif

const Kernels* initial_selection() noexcept {
    Isa isa = detect();
    if (const char* env = std::getenv("AISIM_ISA")) {
        const std::string value(env);
        if (value == "scalar") isa = Isa::Scalar;
        if (value == "avx2" && supported(Isa::Avx2)) isa = Isa::Avx2;
    }
#if AISIM_HAVE_AVX2_KERNELS
    if (isa == Isa::Avx2) return &kAvx2;
#endif
    return &kScalar;
}

std::atomic<const Kernels*>& current() noexcept {
    static std::atomic<const Kernels*> table{initial_selection()};
    return table;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
    return isa == Isa::Avx2 ? "avx2" : "scalar";
}

bool supported(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if AISIM_HAVE_AVX2_KERNELS && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

Isa detect() noexcept {
    return supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

const Kernels& kernels_for(Isa isa) {
    if (!supported(isa)) {
        throw std::runtime_error("ISA '" + std::string(to_string(isa)) + "' not supported here");
    }
#if AISIM_HAVE_AVX2_KERNELS
    if (isa == Isa::Avx2) return kAvx2;
#endif
    return kScalar;
}

const Kernels& active() noexcept {
    return *current().load(std::memory_order_acquire);
}

void select(Isa isa) {
    current().store(&kernels_for(isa), std::memory_order_release);
}

}  // namespace aisim::simd
