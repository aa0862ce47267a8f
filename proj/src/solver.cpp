#include "nlheat/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlheat/error.hpp"
#include "nlheat/simd.hpp"

namespace nlheat {

namespace {

// Relative slack on the stability test so dt = stability_limit() passes.
constexpr double kLimitSlack = 1e-12;

double l1_norm(std::span<const double> v, std::span<const double> volumes) {
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        sum += volumes[i] * std::abs(v[i]);
    }
    return sum;
}

void check_dt(const NonlocalOperator& op, double dt) {
    const double limit = stability_limit(op);
    if (!(dt > 0.0) || dt > limit * (1.0 + kLimitSlack)) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "time step " << dt << " exceeds the stability limit " << limit;
        throw StabilityError(msg.str(), limit);
    }
}

} // namespace

Scheme parse_scheme(std::string_view text) {
    if (text == "euler") {
        return Scheme::Euler;
    }
    if (text == "rk4") {
        return Scheme::Rk4;
    }
    throw ValidationError("unknown scheme '" + std::string(text) + "'");
}

std::string_view scheme_name(Scheme scheme) {
    return scheme == Scheme::Euler ? "euler" : "rk4";
}

double stability_limit(const NonlocalOperator& op) { return 1.0 / (2.0 * op.max_diagonal()); }

double auto_dt(const NonlocalOperator& op) { return 0.25 / (2.0 * op.max_diagonal()); }

void evaluate_rhs(const NonlocalOperator& op, const FluxAssembler& fa, std::span<const double> u,
                  double t, std::span<double> out) {
    op.apply(u, out);
    if (fa.empty() || !fa.collar().g) {
        return;
    }
    if (fa.grid_size() != op.size()) {
        throw ContractError("flux assembler and operator disagree on the grid");
    }
    const GridField b = fa.flux_vector(t);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += b.values[i];
    }
}

GridField step(const NonlocalOperator& op, const FluxAssembler& fa, const GridField& u, double t,
               double dt, Scheme scheme) {
    check_dt(op, dt);
    const std::size_t n = op.size();
    if (u.size() != n) {
        throw ContractError("field size does not match the operator's grid");
    }
    const auto& kt = simd::active();
    GridField next{std::vector<double>(n), t + dt};
    std::vector<double> k1(n);
    evaluate_rhs(op, fa, u.values, t, k1);
    if (scheme == Scheme::Euler) {
        kt.scaled_add(u.values.data(), dt, k1.data(), next.values.data(), n);
        return next;
    }
    std::vector<double> k2(n);
    std::vector<double> k3(n);
    std::vector<double> k4(n);
    std::vector<double> stage(n);
    kt.scaled_add(u.values.data(), 0.5 * dt, k1.data(), stage.data(), n);
    evaluate_rhs(op, fa, stage, t + 0.5 * dt, k2);
    kt.scaled_add(u.values.data(), 0.5 * dt, k2.data(), stage.data(), n);
    evaluate_rhs(op, fa, stage, t + 0.5 * dt, k3);
    kt.scaled_add(u.values.data(), dt, k3.data(), stage.data(), n);
    evaluate_rhs(op, fa, stage, t + dt, k4);
    kt.rk4_combine(u.values.data(), dt / 6.0, k1.data(), k2.data(), k3.data(), k4.data(),
                   next.values.data(), n);
    return next;
}

Trajectory integrate(const NonlocalOperator& op, const FluxAssembler& fa, const GridField& u0,
                     double T, double dt, Scheme scheme, const IntegrateOptions& options) {
    if (!(T >= 0.0)) {
        throw ContractError("integration horizon must be nonnegative");
    }
    check_dt(op, dt);
    Trajectory traj;
    traj.dt = dt;
    traj.T = T;
    traj.scheme = scheme;
    GridField u = u0;
    u.time = 0.0;
    traj.snapshots.push_back(u);
    // Step count from the ratio so rounding never leaves a sliver step.
    const auto steps = static_cast<long long>(std::ceil(T / dt * (1.0 - 1e-12)));
    for (long long s = 0; s < steps; ++s) {
        const double t = static_cast<double>(s) * dt;
        const double this_dt = (s + 1 == steps) ? T - t : dt;
        u = step(op, fa, u, t, this_dt, scheme);
        u.time = (s + 1 == steps) ? T : t + dt;
        if (options.keep_all || s + 1 == steps) {
            traj.snapshots.push_back(u);
        }
    }
    return traj;
}

SpaceTimeSamples picard_map(const NonlocalOperator& op, const FluxAssembler& fa,
                            std::span<const double> u0, const SpaceTimeSamples& w, double t0,
                            double t_start) {
    const std::size_t n = op.size();
    const std::size_t levels = w.size();
    if (levels < 2) {
        throw ContractError("picard map needs at least two snapshot times");
    }
    const double dtau = t0 / static_cast<double>(levels - 1);
    SpaceTimeSamples out(levels, std::vector<double>(u0.begin(), u0.end()));
    std::vector<double> prev(n);
    std::vector<double> cur(n);
    evaluate_rhs(op, fa, w[0], t_start, prev);
    std::vector<double> integral(n, 0.0);
    for (std::size_t k = 1; k < levels; ++k) {
        evaluate_rhs(op, fa, w[k], t_start + static_cast<double>(k) * dtau, cur);
        for (std::size_t i = 0; i < n; ++i) {
            integral[i] += 0.5 * dtau * (prev[i] + cur[i]);
            out[k][i] = u0[i] + integral[i];
        }
        std::swap(prev, cur);
    }
    return out;
}

double space_time_norm(const SpaceTimeSamples& a, const SpaceTimeSamples& b,
                       std::span<const double> volumes) {
    if (a.size() != b.size()) {
        throw ContractError("space-time samples on different time grids");
    }
    double best = 0.0;
    std::vector<double> diff;
    for (std::size_t k = 0; k < a.size(); ++k) {
        diff.resize(a[k].size());
        for (std::size_t i = 0; i < diff.size(); ++i) {
            diff[i] = a[k][i] - b[k][i];
        }
        best = std::max(best, l1_norm(diff, volumes));
    }
    return best;
}

PicardResult picard_solve(const NonlocalOperator& op, const FluxAssembler& fa, const GridField& u0,
                          const PicardConfig& cfg, double t_start) {
    const double window_limit = 0.5 / (2.0 * op.max_diagonal());
    if (!(cfg.t0 > 0.0) || !(cfg.t0 < window_limit)) {
        std::ostringstream msg;
        msg << "picard window t0 = " << cfg.t0 << " outside the contraction bound (0, "
            << window_limit << ")";
        throw ContractError(msg.str());
    }
    if (cfg.intervals < 1) {
        throw ContractError("picard needs at least one trapezoid interval");
    }
    const auto levels = static_cast<std::size_t>(cfg.intervals) + 1;
    SpaceTimeSamples w(levels, u0.values);
    PicardResult result;
    int rising = 0;
    for (int it = 1; it <= cfg.max_iters; ++it) {
        SpaceTimeSamples next = picard_map(op, fa, u0.values, w, cfg.t0, t_start);
        const double inc = space_time_norm(next, w, op.volumes());
        if (!result.increments.empty() && result.increments.back() > 0.0) {
            const double ratio = inc / result.increments.back();
            result.ratios.push_back(ratio);
            rising = ratio >= 1.0 ? rising + 1 : 0;
            if (rising >= 3) {
                std::ostringstream msg;
                msg << "picard iteration not contracting: increment ratio " << ratio
                    << " >= 1 for 3 consecutive iterations (iteration " << it << ")";
                throw ConvergenceError(msg.str());
            }
        }
        result.increments.push_back(inc);
        w = std::move(next);
        result.iterations = it;
        if (inc < cfg.tol) {
            result.value = GridField{w.back(), t_start + cfg.t0};
            return result;
        }
    }
    throw ConvergenceError("picard iteration did not reach tolerance in " +
                           std::to_string(cfg.max_iters) + " iterations");
}

PicardResult picard_integrate(const NonlocalOperator& op, const FluxAssembler& fa,
                              const GridField& u0, double T, const PicardConfig& cfg) {
    PicardResult total;
    total.value = u0;
    total.value.time = 0.0;
    double t = 0.0;
    while (t < T * (1.0 - 1e-12)) {
        PicardConfig window = cfg;
        window.t0 = std::min(cfg.t0, T - t);
        PicardResult r = picard_solve(op, fa, total.value, window, t);
        t += window.t0;
        total.value = std::move(r.value);
        total.value.time = t;
        total.iterations += r.iterations;
        total.increments = std::move(r.increments);
        total.ratios.insert(total.ratios.end(), r.ratios.begin(), r.ratios.end());
    }
    total.value.time = T;
    return total;
}

double contraction_constant(const NonlocalOperator& op, const FluxAssembler& fa) {
    // ||L e||_1 <= 2 max_i d_i ||e||_1 by detailed balance.
    return std::max(2.0 * op.max_diagonal(), fa.column_norm(op.volumes()));
}

ContractionReport contraction_test(const NonlocalOperator& op, const FluxAssembler& fa_g,
                                   const FluxAssembler& fa_h, std::span<const double> u0,
                                   std::span<const double> v0, const SpaceTimeSamples& w,
                                   const SpaceTimeSamples& z, double t0) {
    if (w.size() != z.size() || w.size() < 2) {
        throw ContractError("w and z must share a snapshot grid");
    }
    if (fa_g.collar_size() != fa_h.collar_size()) {
        throw ContractError("flux data live on different collars");
    }
    const auto& vol = op.volumes();
    const SpaceTimeSamples tw = picard_map(op, fa_g, u0, w, t0);
    const SpaceTimeSamples tz = picard_map(op, fa_h, v0, z, t0);

    ContractionReport report;
    report.lhs = space_time_norm(tw, tz, vol);

    std::vector<double> du(u0.size());
    for (std::size_t i = 0; i < du.size(); ++i) {
        du[i] = u0[i] - v0[i];
    }
    const double u_part = l1_norm(du, vol);
    const double wz = space_time_norm(w, z, vol);

    // ||g - h||_{L^inf(0,t0; L^1(collar))} on the snapshot times.
    double gh = 0.0;
    const auto& collar = fa_g.collar();
    const double dtau = t0 / static_cast<double>(w.size() - 1);
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double t = static_cast<double>(k) * dtau;
        const auto gv = fa_g.collar().flux_values(t);
        const auto hv = fa_h.collar().flux_values(t);
        double sum = 0.0;
        for (std::size_t c = 0; c < gv.size(); ++c) {
            sum += collar.volumes[c] * std::abs(gv[c] - hv[c]);
        }
        gh = std::max(gh, sum);
    }
    report.constant = std::max(contraction_constant(op, fa_g), contraction_constant(op, fa_h));
    report.rhs = u_part + report.constant * t0 * (wz + gh);
    return report;
}

} // namespace nlheat
