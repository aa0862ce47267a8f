// Compiled with -mavx2 (and without -mfma) on x86-64; selected at runtime.
#include "nlheat/simd.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

namespace nlheat::simd {

namespace {

void stencil_row(const double* src, const std::uint64_t* mask, const double* w, std::size_t nw,
                 const double* center, double* acc, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d r0 = _mm256_loadu_pd(acc + i);
        __m256d r1 = _mm256_loadu_pd(acc + i + 4);
        const __m256d c0 = _mm256_loadu_pd(center + i);
        const __m256d c1 = _mm256_loadu_pd(center + i + 4);
        for (std::size_t k = 0; k < nw; ++k) {
            const __m256d wk = _mm256_set1_pd(w[k]);
            const auto* m = reinterpret_cast<const double*>(mask + i + k);
            const __m256d t0 = _mm256_mul_pd(wk, _mm256_sub_pd(_mm256_loadu_pd(src + i + k), c0));
            const __m256d t1 =
                _mm256_mul_pd(wk, _mm256_sub_pd(_mm256_loadu_pd(src + i + k + 4), c1));
            r0 = _mm256_add_pd(r0, _mm256_and_pd(_mm256_loadu_pd(m), t0));
            r1 = _mm256_add_pd(r1, _mm256_and_pd(_mm256_loadu_pd(m + 4), t1));
        }
        _mm256_storeu_pd(acc + i, r0);
        _mm256_storeu_pd(acc + i + 4, r1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d r0 = _mm256_loadu_pd(acc + i);
        const __m256d c0 = _mm256_loadu_pd(center + i);
        for (std::size_t k = 0; k < nw; ++k) {
            const __m256d wk = _mm256_set1_pd(w[k]);
            const auto* m = reinterpret_cast<const double*>(mask + i + k);
            const __m256d t0 = _mm256_mul_pd(wk, _mm256_sub_pd(_mm256_loadu_pd(src + i + k), c0));
            r0 = _mm256_add_pd(r0, _mm256_and_pd(_mm256_loadu_pd(m), t0));
        }
        _mm256_storeu_pd(acc + i, r0);
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
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_add_pd(_mm256_loadu_pd(x + i),
                                        _mm256_mul_pd(av, _mm256_loadu_pd(y + i)));
        _mm256_storeu_pd(out + i, v);
    }
    for (; i < n; ++i) {
        out[i] = x[i] + a * y[i];
    }
}

void rk4_combine(const double* u, double c, const double* k1, const double* k2, const double* k3,
                 const double* k4, double* out, std::size_t n) {
    const __m256d cv = _mm256_set1_pd(c);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d s = _mm256_add_pd(_mm256_loadu_pd(k1 + i),
                                  _mm256_mul_pd(two, _mm256_loadu_pd(k2 + i)));
        s = _mm256_add_pd(s, _mm256_mul_pd(two, _mm256_loadu_pd(k3 + i)));
        s = _mm256_add_pd(s, _mm256_loadu_pd(k4 + i));
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(u + i), _mm256_mul_pd(cv, s)));
    }
    for (; i < n; ++i) {
        out[i] = u[i] + c * (((k1[i] + 2.0 * k2[i]) + 2.0 * k3[i]) + k4[i]);
    }
}

constexpr KernelTable kTable{Isa::Avx2, "avx2", stencil_row, scaled_add, rk4_combine};

} // namespace

const KernelTable* avx2_kernels() {
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &kTable : nullptr;
}

} // namespace nlheat::simd

#else

namespace nlheat::simd {
const KernelTable* avx2_kernels() { return nullptr; }
} // namespace nlheat::simd

#endif
