// Acceptance gate: one PASS/FAIL line per criterion, with the measured values,
// the pinned tolerance and the wall time against its budget.
// Exits 1 if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "nlheat/harness.hpp"

using namespace nlheat;
using std::numbers::pi;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [x]");
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Verdict()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v.pass = false;
        v.detail = std::string("threw: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.require(secs < budget_s, fmt("time %.2f s < %.0f s", secs, budget_s));
    std::printf("%s %2d %-22s %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
}

StudyConfig study(const std::string& case_name, const std::string& flux, std::vector<double> eps) {
    StudyConfig cfg;
    cfg.case_name = case_name;
    cfg.flux_kernel = FluxKernelKind::parse(flux);
    cfg.eps_list = std::move(eps);
    cfg.rho = 20.0;
    cfg.T = 0.1;
    cfg.validate();
    return cfg;
}

// Every halving shrinks the error by at least `ratio` (which also makes it strictly decreasing).
bool decays(const std::vector<double>& e, double ratio, std::string& out) {
    bool ok = true;
    for (std::size_t i = 0; i < e.size(); ++i) {
        out += fmt(i ? ", %.3e" : "%.3e", e[i]);
        if (i > 0) ok = ok && std::isfinite(e[i]) && e[i] > 0.0 && e[i - 1] / e[i] >= ratio;
    }
    out += " (halving ratios";
    for (std::size_t i = 1; i < e.size(); ++i) out += fmt(" %.2f", e[i - 1] / e[i]);
    out += fmt(", need >= %.1f)", ratio);
    return ok;
}

std::vector<double> column(const std::vector<StudyRow>& rows, auto field) {
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(field(r));
    return out;
}

// Conservation records from studies with g = 0, checked under criterion 10.
struct MassRecord {
    std::string label;
    double drift, scale;
};
std::vector<MassRecord> mass_records;

void record_mass(const std::string& label, const StudyConfig& cfg, const std::vector<StudyRow>& rows) {
    const double measure = cfg.problem().domain.measure();
    for (const auto& r : rows) {
        mass_records.push_back({label + fmt(" eps=%g", r.eps), std::abs(r.mass_final - r.mass_initial),
                                r.u0_sup * measure});
    }
}

// Runs the criterion's configuration with the flux datum switched off; errors are not needed.
void record_zero_flux_mass(const std::string& label, StudyConfig cfg) {
    cfg.zero_flux_datum = true;
    const ReferenceSolution none([](const Point&, double) { return 0.0; }, Provenance::Exact);
    std::vector<StudyRow> rows;
    for (double eps : cfg.eps_list) rows.push_back(run_single(cfg, eps, none).row);
    record_mass(label + " g=0", cfg, rows);
}

// ---- randomized interval fixtures for criteria 6, 7, 9 ----

struct Smooth {
    std::vector<double> a;
    double operator()(double x) const {
        double v = 0.0;
        for (std::size_t m = 0; m < a.size(); ++m) v += a[m] * std::cos(pi * m * x);
        return v;
    }
};

// Random cosine series shifted so its minimum over [0, 1] is `floor` (dense sampling plus slack).
Smooth random_smooth(std::mt19937_64& rng, double floor) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Smooth s;
    for (int m = 0; m < 5; ++m) s.a.push_back(U(rng) / (1.0 + m));
    double lo = 1e300;
    for (int i = 0; i <= 2000; ++i) lo = std::min(lo, s(i / 2000.0));
    s.a[0] += floor - lo + 1e-6;
    return s;
}

// Nonnegative, time-dependent datum on the two endpoints.
BoundaryDatum random_datum(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double l = U(rng), r = U(rng), wl = 20 * U(rng), wr = 20 * U(rng);
    return [=](const Point& x, double t) {
        return x.x < 0.5 ? l * (1.0 + std::sin(wl * t)) : r * (1.0 + std::cos(wr * t));
    };
}

struct IntervalFixture {
    KernelProfile profile = KernelProfile::quartic(1);
    NormalizationConstants k = compute_constants(profile);
    double eps = 0.1, h = 0.005;
    Grid grid = build_grid(Domain::interval(0.0, 1.0), h);
    NonlocalOperator op = assemble_operator(grid, profile, k, eps);

    FluxAssembler flux(BoundaryDatum g) const {
        return assemble_flux(grid, build_collar(grid.domain, eps, h, std::move(g)), FluxKernelKind::g2(),
                             profile, k, eps);
    }
    GridField field(const Smooth& f) const {
        GridField u;
        for (const auto& x : grid.nodes) u.values.push_back(f(x.x));
        return u;
    }
};

} // namespace

int main() {
    std::printf("environment: %s\n", environment_stamp().c_str());

    criterion(1, "constants", 1.0, [] {
        Verdict v;
        const auto profile = KernelProfile::quartic(1);
        // Closed forms for J = (3/4)(1 - z^2) on (-1, 1):
        //   int J z^2 = (3/4)(2/3 - 2/5) = 1/5,  int_{z>0} J z = (3/4)(1/2 - 1/4) = 3/16.
        const double c1_oracle = 1.0 / (0.5 * (1.0 / 5.0));
        const double c2_oracle = (1.0 / c1_oracle) / (3.0 / 16.0);
        const double c1 = compute_C1(profile), c2 = compute_C2(profile);
        v.require(std::abs(c1 - 10.0) <= 1e-8 && std::abs(c1 - c1_oracle) <= 1e-8,
                  fmt("C1 = %.12f (oracle %.12f, tol 1e-8)", c1, c1_oracle));
        v.require(std::abs(c2 - 8.0 / 15.0) <= 1e-8 && std::abs(c2 - c2_oracle) <= 1e-8,
                  fmt("C2 = %.12f (oracle %.12f, tol 1e-8)", c2, c2_oracle));
        return v;
    });

    criterion(2, "zero flux, cosine", 30.0, [] {
        Verdict v;
        const auto cfg = study("cosine", "zero", {0.2, 0.1, 0.05});
        const auto res = run_study(cfg);
        record_mass("cosine", cfg, res.rows);
        const auto sup = column(res.rows, [](const StudyRow& r) { return r.sup_error; });
        std::string s = "sup ";
        v.require(decays(sup, 1.5, s), s);
        v.require(sup.back() <= 0.02, fmt("final sup %.3e <= 0.02", sup.back()));
        return v;
    });

    criterion(3, "G1 flux, poly-flux", 60.0, [] {
        Verdict v;
        const auto cfg = study("poly-flux", "g1", {0.2, 0.1, 0.05});
        const auto res = run_study(cfg);
        const auto l1 = column(res.rows, [](const StudyRow& r) { return r.l1_error; });
        std::string s = "l1 ";
        v.require(decays(l1, 1.4, s), s);
        v.require(l1.back() <= 0.05, fmt("final l1 %.3e <= 0.05", l1.back()));
        const auto tilde = run_study(study("poly-flux", "g1tilde:0", {0.2, 0.1, 0.05}));
        double gap = 0.0;
        for (std::size_t i = 0; i < res.rows.size(); ++i) {
            gap = std::max({gap, std::abs(tilde.rows[i].l1_error - res.rows[i].l1_error),
                            std::abs(tilde.rows[i].sup_error - res.rows[i].sup_error)});
        }
        v.require(gap <= 1e-12, fmt("G1~(kappa=0) vs G1 gap %.1e <= 1e-12", gap));
        record_zero_flux_mass("poly-flux/g1", cfg);
        return v;
    });

    criterion(4, "G2 flux, weak-*", 60.0, [] {
        Verdict v;
        const auto cfg = study("poly-flux", "g2", {0.2, 0.1, 0.05});
        const auto res = run_study(cfg);
        const char* names[] = {"weak[1] ", "weak[x] ", "weak[sin] "};
        for (int j = 0; j < 3; ++j) {
            std::string s = names[j];
            v.require(decays(column(res.rows, [j](const StudyRow& r) { return r.weak[j]; }), 1.3, s), s);
        }
        const auto w1 = column(res.rows, [](const StudyRow& r) { return r.weak[0]; });
        if (*std::max_element(w1.begin(), w1.end()) < 1e-12) {
            v.detail += "; note: weak[1] is at roundoff, the discrete flux mass equals the continuum one";
        }
        std::string sup = "sup (recorded only)";
        for (const auto& r : res.rows) sup += fmt(" %.3e", r.sup_error);
        v.detail += "; " + sup;
        record_zero_flux_mass("poly-flux/g2", cfg);
        return v;
    });

    criterion(5, "disk, zero flux", 300.0, [] {
        Verdict v;
        const auto cfg = study("disk-radial", "zero", {0.2, 0.1});
        const auto res = run_study(cfg);
        record_mass("disk", cfg, res.rows);
        const auto sup = column(res.rows, [](const StudyRow& r) { return r.sup_error; });
        std::string s = "sup ";
        v.require(decays(sup, 1.3, s), s);
        v.detail += fmt("; reference est. %.1e", res.rows.back().reference_error);
        return v;
    });

    criterion(6, "comparison principle", 30.0, [] {
        Verdict v;
        IntervalFixture fx;
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        double worst = 1e300;
        for (int trial = 0; trial < 50; ++trial) {
            const auto v0s = random_smooth(rng, -1.0 + U(rng));
            const auto gap = random_smooth(rng, 0.0);
            Smooth u0s = v0s;
            for (std::size_t m = 0; m < gap.a.size(); ++m) u0s.a[m] += gap.a[m];
            const auto h = random_datum(rng), extra = random_datum(rng);
            const auto fa_u = fx.flux([=](const Point& x, double t) { return h(x, t) - 0.5 + extra(x, t); });
            const auto fa_v = fa_u.with_datum([=](const Point& x, double t) { return h(x, t) - 0.5; });
            const double dt = stability_limit(fx.op);
            const auto tu = integrate(fx.op, fa_u, fx.field(u0s), 0.05, dt, Scheme::Euler);
            const auto tv = integrate(fx.op, fa_v, fx.field(v0s), 0.05, dt, Scheme::Euler);
            for (std::size_t s = 0; s < tu.snapshots.size(); ++s)
                for (std::size_t i = 0; i < fx.grid.size(); ++i)
                    worst = std::min(worst, tu.snapshots[s][i] - tv.snapshots[s][i]);
        }
        v.require(worst >= -1e-12, fmt("50 trials, min(u - v) = %.3e >= -1e-12", worst));
        return v;
    });

    criterion(7, "nonnegativity", 30.0, [] {
        Verdict v;
        IntervalFixture fx;
        std::mt19937_64 rng(7);
        double lowest = 1e300;
        for (int trial = 0; trial < 50; ++trial) {
            // Half the trials start from data touching zero.
            const auto u0 = random_smooth(rng, trial % 2 ? 0.0 : 0.1);
            const auto fa = fx.flux(random_datum(rng));
            const auto tr = integrate(fx.op, fa, fx.field(u0), 0.05, stability_limit(fx.op), Scheme::Euler);
            for (const auto& snap : tr.snapshots)
                for (double x : snap.values) lowest = std::min(lowest, x);
        }
        v.require(lowest >= -1e-12, fmt("50 trials, min u = %.3e >= -1e-12", lowest));
        return v;
    });

    criterion(8, "Picard vs RK4", 30.0, [] {
        Verdict v;
        const auto cmp = compare_picard(study("poly-flux", "g2", {0.2}), 0.2);
        v.require(cmp.sup_gap < 1e-4, fmt("sup|picard - rk4| = %.3e < 1e-4 (t0 %.3e, horizon %.3e)",
                                          cmp.sup_gap, cmp.t0, cmp.horizon));
        v.require(cmp.max_ratio < 1.0, fmt("max increment ratio %.3f < 1 over %d iterations",
                                           cmp.max_ratio, cmp.iterations));
        return v;
    });

    criterion(9, "contraction inequality", 10.0, [] {
        Verdict v;
        IntervalFixture fx;
        fx.eps = 0.2;
        fx.h = 0.01;
        fx.grid = build_grid(Domain::interval(0.0, 1.0), fx.h);
        fx.op = assemble_operator(fx.grid, fx.profile, fx.k, fx.eps);
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        const double t0 = 0.4 / (2.0 * fx.op.max_diagonal());
        constexpr std::size_t levels = 65;
        auto samples = [&](const Smooth& f, double growth) {
            SpaceTimeSamples s(levels);
            for (std::size_t k = 0; k < levels; ++k)
                for (const auto& x : fx.grid.nodes) s[k].push_back(f(x.x) * (1.0 + growth * k / (levels - 1.0)));
            return s;
        };
        int held = 0;
        double tightest = 0.0, constant = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const auto fa_g = fx.flux(random_datum(rng));
            const auto fa_h = fa_g.with_datum(random_datum(rng));
            const auto u0 = fx.field(random_smooth(rng, U(rng) - 0.5));
            const auto v0 = fx.field(random_smooth(rng, U(rng) - 0.5));
            const auto r = contraction_test(fx.op, fa_g, fa_h, u0.values, v0.values,
                                            samples(random_smooth(rng, -0.5), U(rng)),
                                            samples(random_smooth(rng, -0.5), U(rng)), t0);
            held += r.lhs <= r.rhs ? 1 : 0;
            tightest = std::max(tightest, r.lhs / r.rhs);
            constant = r.constant;
        }
        v.require(held == 100, fmt("%d/100 trials lhs <= rhs (max lhs/rhs %.3f, C = %.1f)", held, tightest, constant));
        return v;
    });

    criterion(10, "conservation (g = 0)", 1.0, [] {
        Verdict v;
        if (mass_records.empty()) {
            v.require(false, "no configurations recorded");
            return v;
        }
        double worst = 0.0;
        std::string where;
        bool ok = true;
        for (const auto& m : mass_records) {
            ok = ok && m.drift <= 1e-9 * m.scale;
            if (m.drift / m.scale >= worst) {
                worst = m.drift / m.scale;
                where = m.label;
            }
        }
        v.require(ok, fmt("%zu runs, max |dmass|/(|u0|_inf |Omega|) = %.1e <= 1e-9 (at %s)",
                          mass_records.size(), worst, where.c_str()));
        return v;
    });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
