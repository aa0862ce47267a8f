#include "nlheat/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "nlheat/error.hpp"
#include "nlheat/simd.hpp"

namespace nlheat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDefaultRefDt = 1e-4;
// Picard comparison horizon inside a study row, in contraction windows.
constexpr int kPicardWindows = 16;

Calibration parse_calibration(std::string_view s) {
    if (s == "discrete") return Calibration::Discrete;
    if (s == "analytic") return Calibration::Analytic;
    throw ValidationError("calibration must be 'discrete' or 'analytic'");
}

FluxQuadrature parse_flux_quadrature(std::string_view s) {
    if (s == "cell-average") return FluxQuadrature::CellAverage;
    if (s == "midpoint") return FluxQuadrature::Midpoint;
    throw ValidationError("flux_quadrature must be 'cell-average' or 'midpoint'");
}

std::string_view calibration_name(Calibration c) {
    return c == Calibration::Discrete ? "discrete" : "analytic";
}

std::string_view flux_quadrature_name(FluxQuadrature q) {
    return q == FluxQuadrature::CellAverage ? "cell-average" : "midpoint";
}

double weighted_sum(std::span<const double> v, std::span<const double> vol) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += vol[i] * v[i];
    }
    return s;
}

struct Setup {
    HeatProblem problem;
    Grid grid;
    NonlocalOperator op;
    FluxAssembler fa;
    GridField u0;
};

Setup prepare(const StudyConfig& cfg, double eps) {
    Setup s;
    s.problem = cfg.problem();
    const auto& domain = s.problem.domain;
    const auto profile = KernelProfile::from_spec(cfg.kernel, domain.dim());
    const auto constants = compute_constants(profile);
    const double d = profile.support_radius();
    const double h = cfg.h_for(eps);
    s.grid = build_grid(domain, h);
    const auto variant = cfg.flux_kernel.variant;
    if (variant == FluxKernelKind::Variant::G1 || variant == FluxKernelKind::Variant::G1Tilde) {
        index_band(s.grid, eps, d);
    }
    s.op = assemble_operator(s.grid, profile, constants, eps, cfg.assembly);
    if (variant != FluxKernelKind::Variant::Zero && s.problem.g) {
        const auto collar = build_collar(domain, eps, h, s.problem.g, d);
        s.fa = assemble_flux(s.grid, collar, cfg.flux_kernel, profile, constants, eps,
                             cfg.assembly);
    }
    s.u0.values.resize(s.grid.size());
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        s.u0[i] = s.problem.u0(s.grid.nodes[i]);
    }
    return s;
}

} // namespace

const std::set<std::string>& StudyConfig::keys() {
    static const std::set<std::string> k = {
        "case",   "kernel", "flux_kernel", "eps_list",     "eps", "h",  "rho",
        "scheme", "dt",     "T",           "g",            "domain", "calibration",
        "flux_quadrature",  "output",      "picard_check", "t0",  "ref_dt"};
    return k;
}

StudyConfig StudyConfig::from_config(const KeyValueConfig& kv) {
    StudyConfig cfg;
    cfg.case_name = kv.get_or("case", cfg.case_name);
    cfg.kernel = kv.get_or("kernel", cfg.kernel);
    cfg.flux_kernel = FluxKernelKind::parse(kv.get_or("flux_kernel", "zero"));
    if (kv.has("eps_list") && kv.has("eps")) {
        throw ValidationError("give either eps or eps_list, not both");
    }
    cfg.eps_list = kv.has("eps") ? kv.number_list("eps") : kv.number_list("eps_list");
    cfg.rho = kv.number_or("rho", cfg.rho);
    cfg.h = kv.number("h");
    cfg.scheme = parse_scheme(kv.get_or("scheme", "euler"));
    if (const auto dt = kv.get("dt"); dt && *dt != "auto") {
        cfg.dt = parse_number(*dt, "dt");
    }
    cfg.T = kv.number_or("T", cfg.T);
    const auto g = kv.get_or("g", cfg.case_name);
    if (g == "zero") {
        cfg.zero_flux_datum = true;
    } else if (g != cfg.case_name) {
        throw ValidationError("g must be 'zero' or the case name '" + cfg.case_name + "'");
    }
    cfg.assembly.calibration = parse_calibration(kv.get_or("calibration", "discrete"));
    cfg.assembly.flux_quadrature =
        parse_flux_quadrature(kv.get_or("flux_quadrature", "cell-average"));
    cfg.output = kv.get_or("output", cfg.output);
    cfg.picard_check = kv.flag_or("picard_check", false);
    cfg.t0 = kv.number("t0");
    cfg.ref_dt = kv.number("ref_dt");
    if (const auto d = kv.get("domain")) {
        const auto want = Domain::parse(*d).to_string();
        const auto have = exact_catalog(cfg.case_name).domain.to_string();
        if (want != have) {
            throw ValidationError("domain " + *d + " does not match case '" + cfg.case_name +
                                  "' (" + have + ")");
        }
    }
    cfg.validate();
    return cfg;
}

StudyConfig StudyConfig::load(const std::filesystem::path& path) {
    return from_config(KeyValueConfig::load(path, keys()));
}

void StudyConfig::validate() const {
    const auto problem = exact_catalog(case_name);
    if (eps_list.empty()) {
        throw ValidationError("eps_list is empty");
    }
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0)) {
            throw ValidationError("eps values must be positive");
        }
        if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
            throw ValidationError("eps_list must be strictly decreasing");
        }
    }
    if (!h && !(rho >= 20.0)) {
        throw ValidationError("rho must be at least 20");
    }
    if (!(T > 0.0)) {
        throw ValidationError("T must be positive");
    }
    if (dt && !(*dt > 0.0)) {
        throw ValidationError("dt must be positive or 'auto'");
    }
    if (t0 && !(*t0 > 0.0)) {
        throw ValidationError("t0 must be positive");
    }
    const auto profile = KernelProfile::from_spec(kernel, problem.domain.dim());
    const double d = profile.support_radius();
    for (double eps : eps_list) {
        const double hh = h_for(eps);
        if (!(hh > 0.0) || hh > 0.5 * d * eps) {
            std::ostringstream msg;
            msg << "h = " << hh << " exceeds d*eps/2 = " << 0.5 * d * eps;
            throw ValidationError(msg.str());
        }
    }
}

HeatProblem StudyConfig::problem() const {
    auto p = exact_catalog(case_name);
    p.T = T;
    if (zero_flux_datum && p.g) {
        // The closed form no longer applies once the datum changes.
        p.g = nullptr;
        p.exact.reset();
    }
    return p;
}

std::string StudyConfig::echo() const {
    std::ostringstream out;
    out.precision(17);
    out << "case = " << case_name << '\n'
        << "kernel = " << kernel << '\n'
        << "flux_kernel = " << flux_kernel.to_string() << '\n'
        << "eps_list = ";
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        out << (i ? "," : "") << eps_list[i];
    }
    out << '\n';
    if (h) {
        out << "h = " << *h << '\n';
    } else {
        out << "rho = " << rho << '\n';
    }
    out << "scheme = " << scheme_name(scheme) << '\n';
    if (dt) {
        out << "dt = " << *dt << '\n';
    } else {
        out << "dt = auto\n";
    }
    out << "T = " << T << '\n'
        << "g = " << (zero_flux_datum ? "zero" : case_name) << '\n'
        << "calibration = " << calibration_name(assembly.calibration) << '\n'
        << "flux_quadrature = " << flux_quadrature_name(assembly.flux_quadrature) << '\n'
        << "picard_check = " << (picard_check ? "true" : "false") << '\n';
    if (t0) out << "t0 = " << *t0 << '\n';
    if (ref_dt) out << "ref_dt = " << *ref_dt << '\n';
    return out.str();
}

std::array<std::function<double(const Point&)>, 3> weak_test_functions(const Domain& domain) {
    using std::numbers::pi;
    std::function<double(const Point&)> wave;
    if (domain.is_interval()) {
        wave = [](const Point& x) { return std::sin(pi * x.x); };
    } else {
        const Point c = std::get<Disk>(domain.shape()).center;
        wave = [c](const Point& x) { return std::sin(pi * norm(x - c)); };
    }
    return {[](const Point&) { return 1.0; }, [](const Point& x) { return x.x; }, wave};
}

ErrorNorms error_norms(const Grid& grid, const GridField& u_eps, const ReferenceSolution& ref,
                       double t, std::span<const std::function<double(const Point&)>> psis) {
    if (u_eps.size() != grid.size()) {
        throw ContractError("field does not match grid");
    }
    ErrorNorms e;
    e.weak.assign(psis.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double diff = u_eps[i] - ref(grid.nodes[i], t);
        e.sup = std::max(e.sup, std::abs(diff));
        e.l1 += grid.volumes[i] * std::abs(diff);
        for (std::size_t j = 0; j < psis.size(); ++j) {
            e.weak[j] += grid.volumes[i] * diff * psis[j](grid.nodes[i]);
        }
    }
    for (auto& w : e.weak) {
        w = std::abs(w);
    }
    return e;
}

std::optional<double> fit_order(std::span<const double> eps, std::span<const double> errors) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < eps.size() && i < errors.size(); ++i) {
        if (eps[i] > 0.0 && errors[i] > 0.0 && std::isfinite(errors[i])) {
            pts.emplace_back(std::log(eps[i]), std::log(errors[i]));
        }
    }
    if (pts.size() < 2) {
        return std::nullopt;
    }
    if (pts.size() > 3) {
        pts.erase(pts.begin(), pts.end() - 3);
    }
    const double n = static_cast<double>(pts.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if (sxx == 0.0) {
        return std::nullopt;
    }
    return sxy / sxx;
}

FittedOrders fit_orders(const std::vector<StudyRow>& rows) {
    std::vector<double> eps, sup, l1;
    std::array<std::vector<double>, 3> weak;
    for (const auto& r : rows) {
        if (!r.ok) continue;
        eps.push_back(r.eps);
        sup.push_back(r.sup_error);
        l1.push_back(r.l1_error);
        for (std::size_t j = 0; j < 3; ++j) weak[j].push_back(r.weak[j]);
    }
    FittedOrders f;
    f.sup = fit_order(eps, sup);
    f.l1 = fit_order(eps, l1);
    for (std::size_t j = 0; j < 3; ++j) f.weak[j] = fit_order(eps, weak[j]);
    return f;
}

ReferenceSolution study_reference(const StudyConfig& cfg) {
    const auto problem = cfg.problem();
    double h_min = std::numeric_limits<double>::infinity();
    for (double eps : cfg.eps_list) {
        h_min = std::min(h_min, cfg.h_for(eps));
    }
    return make_reference(problem, 0.25 * h_min, cfg.ref_dt.value_or(kDefaultRefDt));
}

RunOutput run_single(const StudyConfig& cfg, double eps, const ReferenceSolution& ref) {
    const auto start = std::chrono::steady_clock::now();
    auto setup = prepare(cfg, eps);
    const auto& problem = setup.problem;
    const auto& op = setup.op;
    const auto& u0 = setup.u0;
    RunOutput out;
    out.grid = std::move(setup.grid);
    const auto& grid = out.grid;
    const double dt = cfg.dt.value_or(auto_dt(op));
    auto traj = integrate(op, setup.fa, u0, problem.T, dt, cfg.scheme, {.keep_all = false});
    out.final_field = traj.final();

    auto& row = out.row;
    row.eps = eps;
    row.h = cfg.h_for(eps);
    row.nodes = grid.size();
    row.dt = dt;
    row.mass_initial = weighted_sum(u0.values, grid.volumes);
    row.mass_final = weighted_sum(out.final_field.values, grid.volumes);
    for (double v : u0.values) {
        row.u0_sup = std::max(row.u0_sup, std::abs(v));
    }
    row.reference_error = ref.estimated_error();

    const auto psis = weak_test_functions(problem.domain);
    const auto errs = error_norms(grid, out.final_field, ref, problem.T, psis);
    row.sup_error = errs.sup;
    row.l1_error = errs.l1;
    std::copy(errs.weak.begin(), errs.weak.end(), row.weak.begin());

    if (cfg.picard_check) {
        row.picard_gap = compare_picard(cfg, eps).sup_gap;
    }

    row.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

PicardComparison compare_picard(const StudyConfig& cfg, double eps,
                                std::optional<double> horizon) {
    const auto s = prepare(cfg, eps);
    const auto& [problem, grid, op, fa, u0] = s;
    PicardComparison cmp;
    cmp.eps = eps;
    cmp.contraction_bound = 1.0 / contraction_constant(op, fa);
    PicardConfig pc;
    pc.t0 = cfg.t0.value_or(0.25 / (2.0 * op.max_diagonal()));
    cmp.t0 = pc.t0;
    cmp.horizon = horizon.value_or(std::min(problem.T, kPicardWindows * pc.t0));
    const auto picard = picard_integrate(op, fa, u0, cmp.horizon, pc);
    const double dt_fine = std::min(auto_dt(op), pc.t0 / pc.intervals);
    const auto rk = integrate(op, fa, u0, cmp.horizon, dt_fine, Scheme::Rk4, {.keep_all = false});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        cmp.sup_gap = std::max(cmp.sup_gap, std::abs(picard.value[i] - rk.final()[i]));
    }
    cmp.iterations = picard.iterations;
    for (double r : picard.ratios) {
        cmp.max_ratio = std::max(cmp.max_ratio, r);
    }
    return cmp;
}

StudyResult run_study(const StudyConfig& cfg) {
    cfg.validate();
    StudyResult result;
    result.config = cfg;
    result.environment = environment_stamp();
    const auto ref = study_reference(cfg);
    for (double eps : cfg.eps_list) {
        try {
            result.rows.push_back(run_single(cfg, eps, ref).row);
        } catch (const std::exception& e) {
            StudyRow row;
            row.eps = eps;
            row.ok = false;
            row.failure = e.what();
            row.sup_error = row.l1_error = kNaN;
            row.weak.fill(kNaN);
            row.runtime_s = kNaN;
            result.rows.push_back(row);
        }
    }
    result.orders = fit_orders(result.rows);
    return result;
}

std::string environment_stamp() {
    std::ostringstream out;
#if defined(__clang__)
    out << "clang " << __clang_major__ << '.' << __clang_minor__;
#elif defined(__GNUC__)
    out << "gcc " << __GNUC__ << '.' << __GNUC_MINOR__;
#else
    out << "unknown-compiler";
#endif
    out << "; isa=" << simd::active().name << "; c++" << __cplusplus;
    return out.str();
}

} // namespace nlheat
