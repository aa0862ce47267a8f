#include "nlheat/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>

#include "nlheat/error.hpp"

namespace nlheat {

namespace {

using std::numbers::pi;

// Solves a tridiagonal system in place (Thomas algorithm); diagonally dominant input.
void solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                       std::vector<double> upper, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double f = lower[i] / diag[i - 1];
        diag[i] -= f * upper[i - 1];
        rhs[i] -= f * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
}

// Node values at every time level of a 1D vertex grid.
struct Table {
    double origin = 0.0;
    double h = 0.0;
    double dt = 0.0;
    double T = 0.0;
    std::size_t nodes = 0;
    std::vector<double> values; // level-major

    double at(double coord, double t) const {
        const double sx = std::clamp((coord - origin) / h, 0.0, static_cast<double>(nodes - 1));
        const auto levels = values.size() / nodes;
        const double st = std::clamp(t / dt, 0.0, static_cast<double>(levels - 1));
        const auto i = std::min(static_cast<std::size_t>(sx), nodes - 2);
        const auto k = std::min(static_cast<std::size_t>(st), levels - 2);
        const double fx = sx - static_cast<double>(i);
        const double ft = st - static_cast<double>(k);
        auto v = [&](std::size_t kk, std::size_t ii) { return values[kk * nodes + ii]; };
        const double lo = (1.0 - fx) * v(k, i) + fx * v(k, i + 1);
        const double hi = (1.0 - fx) * v(k + 1, i) + fx * v(k + 1, i + 1);
        return (1.0 - ft) * lo + ft * hi;
    }
};

// A u = sum of diffusion stencil entries plus a source term from the boundary data.
struct SpatialOperator {
    std::vector<double> lower, diag, upper;
    // source(t) added to (A u)_i
    std::function<void(double, std::vector<double>&)> source;
};

Table crank_nicolson(const SpatialOperator& A, std::vector<double> u, double h, double origin,
                     double dt_ref, double T) {
    const std::size_t n = u.size();
    const auto steps = std::max<long long>(1, std::llround(std::ceil(T / dt_ref - 1e-9)));
    const double dt = T / static_cast<double>(steps);
    Table table;
    table.origin = origin;
    table.h = h;
    table.dt = dt;
    table.T = T;
    table.nodes = n;
    table.values.reserve(static_cast<std::size_t>(steps + 1) * n);
    table.values.insert(table.values.end(), u.begin(), u.end());

    std::vector<double> lower(n), diag(n), upper(n);
    for (std::size_t i = 0; i < n; ++i) {
        lower[i] = -0.5 * dt * A.lower[i];
        diag[i] = 1.0 - 0.5 * dt * A.diag[i];
        upper[i] = -0.5 * dt * A.upper[i];
    }
    std::vector<double> s_old(n, 0.0), s_new(n, 0.0), rhs(n);
    A.source(0.0, s_old);
    for (long long s = 0; s < steps; ++s) {
        const double t_new = static_cast<double>(s + 1) * dt;
        std::fill(s_new.begin(), s_new.end(), 0.0);
        A.source(t_new, s_new);
        for (std::size_t i = 0; i < n; ++i) {
            double au = A.diag[i] * u[i];
            if (i > 0) au += A.lower[i] * u[i - 1];
            if (i + 1 < n) au += A.upper[i] * u[i + 1];
            rhs[i] = u[i] + 0.5 * dt * au + 0.5 * dt * (s_old[i] + s_new[i]);
        }
        solve_tridiagonal(lower, diag, upper, rhs);
        u = rhs;
        table.values.insert(table.values.end(), u.begin(), u.end());
        std::swap(s_old, s_new);
    }
    return table;
}

Table solve_interval(const HeatProblem& p, double h_ref, double dt_ref) {
    const auto& iv = std::get<Interval>(p.domain.shape());
    const auto cells = static_cast<std::size_t>(std::llround((iv.b - iv.a) / h_ref));
    const double h = (iv.b - iv.a) / static_cast<double>(cells);
    const std::size_t n = cells + 1;
    SpatialOperator A;
    A.lower.assign(n, 1.0 / (h * h));
    A.upper.assign(n, 1.0 / (h * h));
    A.diag.assign(n, -2.0 / (h * h));
    // Ghost points: u_{-1} = u_1 + 2h g(a), u_{n} = u_{n-2} + 2h g(b).
    A.upper[0] = 2.0 / (h * h);
    A.lower[n - 1] = 2.0 / (h * h);
    const BoundaryDatum g = p.g;
    const double a = iv.a;
    const double b = iv.b;
    A.source = [g, h, a, b, n](double t, std::vector<double>& s) {
        if (!g) return;
        s[0] += 2.0 * g({a, 0.0}, t) / h;
        s[n - 1] += 2.0 * g({b, 0.0}, t) / h;
    };
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = p.u0({a + static_cast<double>(i) * h, 0.0});
    }
    return crank_nicolson(A, std::move(u), h, a, dt_ref, p.T);
}

Table solve_radial(const HeatProblem& p, double h_ref, double dt_ref) {
    const auto& disk = std::get<Disk>(p.domain.shape());
    const double R = disk.radius;
    const auto cells = static_cast<std::size_t>(std::llround(R / h_ref));
    const double h = R / static_cast<double>(cells);
    const std::size_t n = cells + 1;
    constexpr double dim = 2.0;
    SpatialOperator A;
    A.lower.assign(n, 0.0);
    A.upper.assign(n, 0.0);
    A.diag.assign(n, 0.0);
    // Origin: u_rr + (N-1)/r u_r -> N u_rr with the symmetric ghost u_{-1} = u_1.
    A.diag[0] = -2.0 * dim / (h * h);
    A.upper[0] = 2.0 * dim / (h * h);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double r = static_cast<double>(i) * h;
        A.lower[i] = 1.0 / (h * h) - (dim - 1.0) / (2.0 * r * h);
        A.upper[i] = 1.0 / (h * h) + (dim - 1.0) / (2.0 * r * h);
        A.diag[i] = -2.0 / (h * h);
    }
    // Outer ghost u_{n} = u_{n-2} + 2h g.
    A.lower[n - 1] = 2.0 / (h * h);
    A.diag[n - 1] = -2.0 / (h * h);
    const BoundaryDatum g = p.g;
    const Point c = disk.center;
    A.source = [g, h, R, n, c, dim](double t, std::vector<double>& s) {
        if (!g) return;
        const double gv = g({c.x + R, c.y}, t);
        s[n - 1] += 2.0 * gv / h + (dim - 1.0) / R * gv;
    };
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = p.u0({c.x + static_cast<double>(i) * h, c.y});
    }
    return crank_nicolson(A, std::move(u), h, 0.0, dt_ref, p.T);
}

ReferenceSolution wrap(const HeatProblem& p, std::shared_ptr<const Table> table, double err) {
    if (p.domain.is_interval()) {
        return ReferenceSolution(
            [table](const Point& x, double t) { return table->at(x.x, t); }, Provenance::FD1D,
            err);
    }
    const Point c = std::get<Disk>(p.domain.shape()).center;
    return ReferenceSolution(
        [table, c](const Point& x, double t) { return table->at(norm(x - c), t); },
        Provenance::FDRadial, err);
}

std::shared_ptr<const Table> solve_table(const HeatProblem& p, double h_ref, double dt_ref) {
    if (!(h_ref > 0.0) || !(dt_ref > 0.0)) {
        throw ContractError("reference resolution must be positive");
    }
    if (p.domain.is_interval()) {
        return std::make_shared<const Table>(solve_interval(p, h_ref, dt_ref));
    }
    if (!p.radial) {
        throw ContractError("disk reference supports radially symmetric data only");
    }
    return std::make_shared<const Table>(solve_radial(p, h_ref, dt_ref));
}

} // namespace

double disk_mode_wavenumber() {
    static const double lambda = boost::math::cyl_bessel_j_zero(1.0, 1);
    return lambda;
}

HeatProblem exact_catalog(std::string_view name) {
    HeatProblem p;
    p.name = std::string(name);
    if (name == "cosine") {
        p.domain = Domain::interval(0.0, 1.0);
        p.u0 = [](const Point& x) { return std::cos(pi * x.x); };
        p.exact = [](const Point& x, double t) {
            return std::exp(-pi * pi * t) * std::cos(pi * x.x);
        };
        return p;
    }
    if (name == "poly-flux") {
        p.domain = Domain::interval(0.0, 1.0);
        p.u0 = [](const Point& x) { return x.x * x.x; };
        p.g = [](const Point& xbar, double) { return xbar.x > 0.5 ? 2.0 : 0.0; };
        p.exact = [](const Point& x, double t) { return x.x * x.x + 2.0 * t; };
        return p;
    }
    if (name == "disk-radial") {
        p.domain = Domain::disk({0.0, 0.0}, 1.0);
        const double lambda = disk_mode_wavenumber();
        p.u0 = [lambda](const Point& x) { return boost::math::cyl_bessel_j(0, lambda * norm(x)); };
        p.radial = true;
        return p;
    }
    throw ValidationError("unknown case '" + std::string(name) + "'");
}

std::string_view provenance_name(Provenance p) {
    switch (p) {
    case Provenance::Exact: return "exact";
    case Provenance::FD1D: return "fd1d";
    case Provenance::FDRadial: return "fd-radial";
    }
    return "exact";
}

ReferenceSolution solve_heat_fd(const HeatProblem& problem, double h_ref, double dt_ref) {
    return wrap(problem, solve_table(problem, h_ref, dt_ref), 0.0);
}

ReferenceSolution solve_heat_fd_estimated(const HeatProblem& problem, double h_ref,
                                          double dt_ref) {
    auto coarse = solve_table(problem, h_ref, dt_ref);
    auto fine = solve_table(problem, 0.5 * h_ref, 0.5 * dt_ref);
    // Second order in both h and dt: error(coarse) ~ 4/3 |coarse - fine|.
    double diff = 0.0;
    for (std::size_t i = 0; i < coarse->nodes; ++i) {
        const double x = coarse->origin + static_cast<double>(i) * coarse->h;
        diff = std::max(diff, std::abs(coarse->at(x, problem.T) - fine->at(x, problem.T)));
    }
    return wrap(problem, coarse, 4.0 / 3.0 * diff);
}

ReferenceSolution make_reference(const HeatProblem& problem, double h_ref, double dt_ref) {
    if (problem.exact) {
        return ReferenceSolution(*problem.exact, Provenance::Exact, 0.0);
    }
    return solve_heat_fd_estimated(problem, h_ref, dt_ref);
}

} // namespace nlheat
