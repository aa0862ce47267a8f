#include "nlheat/simd.hpp"

namespace nlheat::simd {

namespace {

void stencil_row(const double* src, const std::uint64_t* mask, const double* w, std::size_t nw,
                 const double* center, double* acc, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
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
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = x[i] + a * y[i];
    }
}

void rk4_combine(const double* u, double c, const double* k1, const double* k2, const double* k3,
                 const double* k4, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = u[i] + c * (((k1[i] + 2.0 * k2[i]) + 2.0 * k3[i]) + k4[i]);
    }
}

constexpr KernelTable kTable{Isa::Scalar, "scalar", stencil_row, scaled_add, rk4_combine};

} // namespace

const KernelTable& scalar_kernels() { return kTable; }

} // namespace nlheat::simd
