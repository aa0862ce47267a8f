#include "doctest.h"

#include <cmath>
#include <cstring>
#include <random>

#include "nlheat/error.hpp"
#include "nlheat/simd.hpp"
#include "nlheat/solver.hpp"

using namespace nlheat;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = U(rng);
    return v;
}

// Restores the active variant on scope exit.
struct IsaGuard {
    simd::Isa saved = simd::active().isa;
    ~IsaGuard() { simd::select(saved); }
};

} // namespace

TEST_CASE("scalar is always available and listed first") {
    const auto all = simd::available();
    REQUIRE(!all.empty());
    CHECK(all.front()->isa == simd::Isa::Scalar);
    CHECK(simd::isa_name(simd::Isa::Avx2) == "avx2");
    for (const auto* t : all) MESSAGE("variant available: " << t->name);
}

TEST_CASE("raw kernels agree bitwise with the reference loops") {
    std::mt19937_64 rng(5);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 33u, 257u}) {
        const std::size_t nw = 9;
        const auto src = random_vector(rng, n + nw);
        const auto w = random_vector(rng, nw);
        const auto center = random_vector(rng, n);
        const auto acc0 = random_vector(rng, n);
        std::vector<std::uint64_t> mask(n + nw);
        for (auto& m : mask) m = (rng() & 3) ? simd::kMaskOn : 0;

        // Oracle: the documented loop, written out.
        std::vector<double> want = acc0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = want[i];
            for (std::size_t k = 0; k < nw; ++k) r = r + (mask[i + k] ? w[k] * (src[i + k] - center[i]) : 0.0);
            want[i] = r;
        }
        const auto x = random_vector(rng, n), y = random_vector(rng, n);
        const auto k1 = random_vector(rng, n), k2 = random_vector(rng, n);
        const auto k3 = random_vector(rng, n), k4 = random_vector(rng, n);
        std::vector<double> want_add(n), want_rk(n);
        for (std::size_t i = 0; i < n; ++i) {
            want_add[i] = x[i] + 0.37 * y[i];
            want_rk[i] = x[i] + 0.11 * (((k1[i] + 2.0 * k2[i]) + 2.0 * k3[i]) + k4[i]);
        }

        for (const auto* t : simd::available()) {
            CAPTURE(t->name);
            CAPTURE(n);
            std::vector<double> acc = acc0;
            t->stencil_row(src.data(), mask.data(), w.data(), nw, center.data(), acc.data(), n);
            CHECK(same_bits(acc, want));
            std::vector<double> out(n);
            t->scaled_add(x.data(), 0.37, y.data(), out.data(), n);
            CHECK(same_bits(out, want_add));
            t->rk4_combine(x.data(), 0.11, k1.data(), k2.data(), k3.data(), k4.data(), out.data(), n);
            CHECK(same_bits(out, want_rk));
        }
    }
}

TEST_CASE("operator application and integration are variant independent") {
    IsaGuard guard;
    const auto profile1 = KernelProfile::quartic(1);
    const auto profile2 = KernelProfile::cosine(2);
    struct Case {
        Domain domain;
        const KernelProfile* profile;
        double eps, h;
    };
    const std::vector<Case> cases{{Domain::interval(0, 1), &profile1, 0.1, 0.005},
                                  {Domain::disk({0, 0}, 1), &profile2, 0.3, 0.03}};
    for (const auto& c : cases) {
        const auto k = compute_constants(*c.profile);
        const auto grid = build_grid(c.domain, c.h);
        const auto op = assemble_operator(grid, *c.profile, k, c.eps);
        const auto collar = build_collar(c.domain, c.eps, c.h, [](const Point& x, double t) { return x.x + t; });
        const auto fa = assemble_flux(grid, collar, FluxKernelKind::g2(), *c.profile, k, c.eps);
        GridField u0;
        for (const auto& x : grid.nodes) u0.values.push_back(std::cos(3 * x.x) + x.y * x.y);

        std::vector<std::vector<double>> applied, euler, rk4;
        for (const auto* t : simd::available()) {
            simd::select(t->isa);
            CHECK(simd::active().isa == t->isa);
            applied.push_back(op.apply(u0).values);
            const double dt = auto_dt(op);
            euler.push_back(integrate(op, fa, u0, 20 * dt, dt, Scheme::Euler, {.keep_all = false}).final().values);
            rk4.push_back(integrate(op, fa, u0, 20 * dt, dt, Scheme::Rk4, {.keep_all = false}).final().values);
        }
        for (std::size_t v = 1; v < applied.size(); ++v) {
            CHECK(same_bits(applied[v], applied[0]));
            CHECK(same_bits(euler[v], euler[0]));
            CHECK(same_bits(rk4[v], rk4[0]));
        }
    }
}

TEST_CASE("selecting a missing variant fails loudly") {
    IsaGuard guard;
    for (auto isa : {simd::Isa::Avx2, simd::Isa::Neon}) {
        const bool present = (isa == simd::Isa::Avx2 ? simd::avx2_kernels() : simd::neon_kernels()) != nullptr;
        if (present) CHECK_NOTHROW(simd::select(isa));
        else CHECK_THROWS_AS(simd::select(isa), ContractError);
    }
}
