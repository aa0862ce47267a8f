#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "nlheat/operator.hpp"

namespace nlheat {

enum class Scheme { Euler, Rk4 };

Scheme parse_scheme(std::string_view text);
std::string_view scheme_name(Scheme scheme);

struct Trajectory {
    std::vector<GridField> snapshots; ///< time-ordered
    double dt = 0.0;
    double T = 0.0;
    Scheme scheme = Scheme::Euler;

    const GridField& final() const { return snapshots.back(); }
};

/// Largest dt with dt * 2 max_i d_i <= 1. At this limit an Euler step is a
/// convex combination of neighbor values plus dt times the flux.
double stability_limit(const NonlocalOperator& op);
/// 0.25 / (2 max_i d_i).
double auto_dt(const NonlocalOperator& op);

/// rhs_i = (L u)_i + b_i(t). An empty flux assembler contributes nothing.
void evaluate_rhs(const NonlocalOperator& op, const FluxAssembler& fa, std::span<const double> u,
                  double t, std::span<double> out);

/// One explicit step of u_t = L u + b(t). Rejects dt above stability_limit().
GridField step(const NonlocalOperator& op, const FluxAssembler& fa, const GridField& u, double t,
               double dt, Scheme scheme);

struct IntegrateOptions {
    /// Keep every step; otherwise only the initial and final fields.
    bool keep_all = true;
};

/// Snapshots at 0, dt, 2dt, ..., T; the last step is shortened to land on T.
Trajectory integrate(const NonlocalOperator& op, const FluxAssembler& fa, const GridField& u0,
                     double T, double dt, Scheme scheme, const IntegrateOptions& options = {});

struct PicardConfig {
    double t0 = 0.0;      ///< contraction window
    int max_iters = 200;
    double tol = 1e-13;   ///< on max over time of the L1 increment
    int intervals = 64;   ///< trapezoid intervals per window
};

struct PicardResult {
    GridField value;               ///< slice at the end of the window(s)
    int iterations = 0;            ///< total over all windows
    std::vector<double> increments; ///< |||w^{m+1} - w^m||| per iteration (last window)
    std::vector<double> ratios;    ///< successive increment ratios, all windows
};

/// Fixed point of w -> u0 + int_0^t (L w + b) ds on [t_start, t_start + t0],
/// time integral by composite trapezoid. Requires t0 < 0.5 / (2 max_i d_i).
/// Throws ConvergenceError when the increment ratio is >= 1 for three
/// consecutive iterations or max_iters is reached.
PicardResult picard_solve(const NonlocalOperator& op, const FluxAssembler& fa, const GridField& u0,
                          const PicardConfig& cfg, double t_start = 0.0);

/// Chains windows of length cfg.t0 (the last one shortened) to reach T.
PicardResult picard_integrate(const NonlocalOperator& op, const FluxAssembler& fa,
                              const GridField& u0, double T, const PicardConfig& cfg);

/// Time-dependent field on the uniform snapshot grid t_k = k t0 / (size-1).
using SpaceTimeSamples = std::vector<std::vector<double>>;

/// One application of T_{u0,g}; returns the field at every snapshot time.
SpaceTimeSamples picard_map(const NonlocalOperator& op, const FluxAssembler& fa,
                            std::span<const double> u0, const SpaceTimeSamples& w, double t0,
                            double t_start = 0.0);

/// max_k sum_i vol_i |a_k,i - b_k,i|.
double space_time_norm(const SpaceTimeSamples& a, const SpaceTimeSamples& b,
                       std::span<const double> volumes);

struct ContractionReport {
    double lhs = 0.0;      ///< |||T_{u0,g}(w) - T_{v0,h}(z)|||
    double rhs = 0.0;      ///< ||u0 - v0|| + C t0 (|||w - z||| + ||g - h||)
    double constant = 0.0; ///< C
};

/// Constant in the contraction bound: max(2 max_i d_i, flux column norm).
double contraction_constant(const NonlocalOperator& op, const FluxAssembler& fa);

ContractionReport contraction_test(const NonlocalOperator& op, const FluxAssembler& fa_g,
                                   const FluxAssembler& fa_h, std::span<const double> u0,
                                   std::span<const double> v0, const SpaceTimeSamples& w,
                                   const SpaceTimeSamples& z, double t0);

} // namespace nlheat
