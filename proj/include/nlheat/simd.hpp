#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

// Data-parallel inner loops of the operator and the time steppers.
//
// Every variant performs the same IEEE operations in the same order per
// element (no FMA contraction, no reassociation), so results are
// bit-identical across variants. Tests rely on this.

namespace nlheat::simd {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
    Isa isa;
    std::string_view name;

    /// For i in [0, n):
    ///   r = acc[i]
    ///   for k in [0, nw): r = r + (mask[i+k] ? w[k] * (src[i+k] - center[i]) : 0)
    ///   acc[i] = r
    /// mask entries are all-ones or all-zero bit patterns.
    void (*stencil_row)(const double* src, const std::uint64_t* mask, const double* w,
                        std::size_t nw, const double* center, double* acc, std::size_t n);

    /// out[i] = x[i] + a * y[i]
    void (*scaled_add)(const double* x, double a, const double* y, double* out, std::size_t n);

    /// out[i] = u[i] + c * (((k1[i] + 2 k2[i]) + 2 k3[i]) + k4[i])
    void (*rk4_combine)(const double* u, double c, const double* k1, const double* k2,
                        const double* k3, const double* k4, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();
/// nullptr when the variant is not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

/// All variants usable on this machine, scalar first.
std::vector<const KernelTable*> available();

/// Best available variant, overridable with NLHEAT_ISA=scalar|avx2|neon.
const KernelTable& active();
/// Force a variant (throws ContractError if unavailable).
void select(Isa isa);

std::string_view isa_name(Isa isa);

constexpr std::uint64_t kMaskOn = ~std::uint64_t{0};

} // namespace nlheat::simd
