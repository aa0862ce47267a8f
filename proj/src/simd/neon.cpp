// AArch64 only; NEON is part of the base ISA there, so no runtime probe is needed.
#include "nlheat/simd.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace nlheat::simd {

namespace {

void stencil_row(const double* src, const std::uint64_t* mask, const double* w, std::size_t nw,
                 const double* center, double* acc, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t r = vld1q_f64(acc + i);
        const float64x2_t c = vld1q_f64(center + i);
        for (std::size_t k = 0; k < nw; ++k) {
            const float64x2_t wk = vdupq_n_f64(w[k]);
            const float64x2_t t = vmulq_f64(wk, vsubq_f64(vld1q_f64(src + i + k), c));
            const uint64x2_t m = vld1q_u64(mask + i + k);
            const float64x2_t masked =
                vreinterpretq_f64_u64(vandq_u64(m, vreinterpretq_u64_f64(t)));
            r = vaddq_f64(r, masked);
        }
        vst1q_f64(acc + i, r);
    }
    for (; i < n; ++i) {
        double r = acc[i];
        const double c = center[i];
        for (std::size_t k = 0; k < nw; ++k) {
            const double term = w[k] * (src[i + k] - c);
            r = r + (mask[i + k] ? term : 0.0);
        }
        acc[i] = r;
    }
}

void scaled_add(const double* x, double a, const double* y, double* out, std::size_t n) {
    const float64x2_t av = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(out + i, vaddq_f64(vld1q_f64(x + i), vmulq_f64(av, vld1q_f64(y + i))));
    }
    for (; i < n; ++i) {
        out[i] = x[i] + a * y[i];
    }
}

void rk4_combine(const double* u, double c, const double* k1, const double* k2, const double* k3,
                 const double* k4, double* out, std::size_t n) {
    const float64x2_t cv = vdupq_n_f64(c);
    const float64x2_t two = vdupq_n_f64(2.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t s = vaddq_f64(vld1q_f64(k1 + i), vmulq_f64(two, vld1q_f64(k2 + i)));
        s = vaddq_f64(s, vmulq_f64(two, vld1q_f64(k3 + i)));
        s = vaddq_f64(s, vld1q_f64(k4 + i));
        vst1q_f64(out + i, vaddq_f64(vld1q_f64(u + i), vmulq_f64(cv, s)));
    }
    for (; i < n; ++i) {
        out[i] = u[i] + c * (((k1[i] + 2.0 * k2[i]) + 2.0 * k3[i]) + k4[i]);
    }
}

constexpr KernelTable kTable{Isa::Neon, "neon", stencil_row, scaled_add, rk4_combine};

} // namespace

const KernelTable* neon_kernels() { return &kTable; }

} // namespace nlheat::simd

#else

namespace nlheat::simd {
const KernelTable* neon_kernels() { return nullptr; }
} // namespace nlheat::simd

#endif
