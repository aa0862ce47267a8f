#include "nlheat/kernels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <cmath>
// Boost 1.74's pchip calls isnan unqualified.
namespace boost::math::interpolators {
using std::isnan;
}
#include <boost/math/interpolators/pchip.hpp>

#include "nlheat/error.hpp"
#include "quadrature.hpp"

namespace nlheat {

namespace {

using std::numbers::pi;

void check_dim(int dim) {
    if (dim != 1 && dim != 2) {
        throw ContractError("kernel dimension must be 1 or 2, got " + std::to_string(dim));
    }
}

// |S^{N-1}|
double sphere_area(int dim) { return dim == 1 ? 2.0 : 2.0 * pi; }

// int_{S^{N-1}, theta_N > 0} theta_N d sigma
double half_sphere_projection(int dim) { return dim == 1 ? 1.0 : 2.0; }

double radial_moment(const KernelProfile& p, int power) {
    return detail::integrate(
        [&](double r) { return p.density(r) * std::pow(r, power); }, 0.0, p.support_radius());
}

KernelProfile normalized(KernelProfile p) {
    const double mass = kernel_mass(p);
    if (!(mass > 0.0)) {
        throw ValidationError("kernel profile has zero mass");
    }
    return p.scaled(1.0 / mass);
}

double parse_double(std::string_view text, std::string_view what) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ValidationError("invalid number for " + std::string(what) + ": '" +
                              std::string(text) + "'");
    }
    return value;
}

} // namespace

KernelProfile KernelProfile::quartic(int dim) {
    check_dim(dim);
    return normalized(KernelProfile([](double r) { return 1.0 - r * r; }, 1.0, dim,
                                    KernelCatalog::Quartic));
}

KernelProfile KernelProfile::cosine(int dim) {
    check_dim(dim);
    return normalized(KernelProfile([](double r) { return 1.0 + std::cos(pi * r); }, 1.0, dim,
                                    KernelCatalog::Cosine));
}

KernelProfile KernelProfile::tabulated(std::vector<double> r, std::vector<double> values, int dim) {
    check_dim(dim);
    if (r.size() != values.size()) {
        throw ValidationError("tabulated kernel: column lengths differ");
    }
    if (r.size() < 4) {
        throw ValidationError("tabulated kernel: need at least 4 samples");
    }
    if (r.front() != 0.0) {
        throw ValidationError("tabulated kernel: first radius must be 0");
    }
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (!(r[i] > r[i - 1])) {
            throw ValidationError("tabulated kernel: radii must be strictly increasing");
        }
    }
    if (std::any_of(values.begin(), values.end(), [](double v) { return !(v >= 0.0); })) {
        throw ValidationError("tabulated kernel: values must be nonnegative");
    }
    const double support = r.back();
    // pchip stays within the range of adjacent samples, so the profile stays nonnegative.
    auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
        std::move(r), std::move(values));
    return normalized(KernelProfile(
        [spline](double x) { return (*spline)(x); }, support, dim,
        KernelCatalog::Custom));
}

KernelProfile KernelProfile::load(const std::filesystem::path& path, int dim) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open kernel file " + path.string());
    }
    std::vector<double> r;
    std::vector<double> v;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields(line);
        std::string a;
        std::string b;
        if (!(fields >> a)) {
            continue;
        }
        if (!(fields >> b)) {
            throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                  ": expected two columns");
        }
        r.push_back(parse_double(a, "radius"));
        v.push_back(parse_double(b, "density"));
    }
    return tabulated(std::move(r), std::move(v), dim);
}

KernelProfile KernelProfile::from_function(std::function<double(double)> radial,
                                           double support_radius, int dim, KernelCatalog id) {
    check_dim(dim);
    if (!(support_radius > 0.0)) {
        throw ContractError("support radius must be positive");
    }
    return KernelProfile(std::move(radial), support_radius, dim, id);
}

KernelProfile KernelProfile::from_spec(std::string_view spec, int dim) {
    if (spec == "quartic") {
        return quartic(dim);
    }
    if (spec == "cosine") {
        return cosine(dim);
    }
    constexpr std::string_view custom = "custom:";
    if (spec.starts_with(custom)) {
        return load(std::filesystem::path(std::string(spec.substr(custom.size()))), dim);
    }
    throw ValidationError("unknown kernel '" + std::string(spec) + "'");
}

double KernelProfile::density(double r) const {
    if (!(r < support_)) {
        return 0.0;
    }
    return scale_ * radial_(r);
}

double KernelProfile::operator()(const Point& z) const {
    return density(dim_ == 1 ? std::abs(z.x) : norm(z));
}

std::string KernelProfile::name() const {
    switch (id_) {
    case KernelCatalog::Quartic: return "quartic";
    case KernelCatalog::Cosine: return "cosine";
    case KernelCatalog::Custom: return "custom";
    }
    return "custom";
}

KernelProfile KernelProfile::scaled(double factor) const {
    KernelProfile copy = *this;
    copy.scale_ *= factor;
    return copy;
}

FluxKernelKind FluxKernelKind::parse(std::string_view text) {
    if (text == "zero") {
        return zero();
    }
    if (text == "g1") {
        return g1();
    }
    if (text == "g2") {
        return g2();
    }
    constexpr std::string_view tilde = "g1tilde:";
    if (text.starts_with(tilde)) {
        const double kappa = parse_double(text.substr(tilde.size()), "kappa");
        if (!(kappa >= 0.0)) {
            throw ValidationError("g1tilde curvature bound must be nonnegative");
        }
        return g1_tilde(kappa);
    }
    throw ValidationError("unknown flux kernel '" + std::string(text) + "'");
}

std::string FluxKernelKind::to_string() const {
    switch (variant) {
    case Variant::Zero: return "zero";
    case Variant::G1: return "g1";
    case Variant::G1Tilde: {
        std::ostringstream out;
        out << "g1tilde:" << kappa;
        return out.str();
    }
    case Variant::G2: return "g2";
    }
    return "zero";
}

double eval_J(const KernelProfile& profile, const Point& z) { return profile(z); }

double kernel_mass(const KernelProfile& profile) {
    const int n = profile.dim();
    return sphere_area(n) * radial_moment(profile, n - 1);
}

double marginal_density(const KernelProfile& profile, double t) {
    const double d = profile.support_radius();
    if (profile.dim() == 1) {
        return profile.density(std::abs(t));
    }
    if (!(std::abs(t) < d)) {
        return 0.0;
    }
    const double half_chord = std::sqrt(d * d - t * t);
    return 2.0 * detail::integrate(
                     [&](double s) { return profile.density(std::hypot(s, t)); }, 0.0, half_chord);
}

double axis_second_moment(const KernelProfile& profile, int axis) {
    const double d = profile.support_radius();
    if (profile.dim() == 1) {
        if (axis != 0) {
            throw ContractError("axis out of range for a 1D kernel");
        }
        return 2.0 * radial_moment(profile, 2);
    }
    if (axis != 0 && axis != 1) {
        throw ContractError("axis out of range for a 2D kernel");
    }
    // Outer variable a = d sin(phi), inner b; the weight sits on whichever is `axis`.
    // The substitution removes the square-root edge of the chord length at |a| = d.
    return detail::integrate(
        [&](double phi) {
            const double a = d * std::sin(phi);
            const double c = d * std::cos(phi);
            const double inner = detail::integrate(
                [&](double b) {
                    const double w = axis == 0 ? a * a : b * b;
                    return profile.density(std::hypot(a, b)) * w;
                },
                -c, c);
            return inner * c;
        },
        -0.5 * pi, 0.5 * pi);
}

double c2_residual(const KernelProfile& profile, double c2) {
    const double d = profile.support_radius();
    // int_0^d int_s^d m(t) t^power dt ds; inner variable t = d sin(phi) smooths the
    // marginal's edge at t = d. The two moments are integrated separately because a
    // relative tolerance cannot converge on an integrand whose integral is zero.
    auto nested = [&](int power) {
        return detail::integrate(
            [&](double s) {
                return detail::integrate(
                    [&](double phi) {
                        const double t = d * std::sin(phi);
                        return marginal_density(profile, t) * std::pow(t, power) * d *
                               std::cos(phi);
                    },
                    std::asin(std::min(1.0, s / d)), 0.5 * pi);
            },
            0.0, d);
    };
    return c2 * nested(0) - nested(1);
}

double compute_C1(const KernelProfile& profile) {
    const int n = profile.dim();
    // 1/2 int J z_N^2 = 1/(2N) int J |z|^2 by radial symmetry.
    const double moment = sphere_area(n) * radial_moment(profile, n + 1) / (2.0 * n);
    if (!(moment >= 1e-14)) {
        throw ValidationError("degenerate kernel: second moment below 1e-14");
    }
    return 1.0 / moment;
}

double compute_C2(const KernelProfile& profile) {
    const int n = profile.dim();
    // int_0^d int_{z_N>s} J z_N dz ds = int_{z_N>0} J z_N^2 = C1^{-1}
    // int_0^d int_{z_N>s} J dz ds     = int_{z_N>0} J z_N
    const double numerator = 1.0 / compute_C1(profile);
    const double denominator = half_sphere_projection(n) * radial_moment(profile, n);
    if (!(denominator >= 1e-14)) {
        throw ValidationError("degenerate kernel: half-space first moment below 1e-14");
    }
    return numerator / denominator;
}

NormalizationConstants compute_constants(const KernelProfile& profile) {
    return {compute_C1(profile), compute_C2(profile)};
}

double eval_J_eps(const KernelProfile& profile, double c1, double eps, const Point& xi) {
    const double scale = profile.dim() == 1 ? eps : eps * eps;
    return c1 / scale * profile(xi * (1.0 / eps));
}

double flux_kernel_density(const FluxKernelKind& kind, const KernelProfile& profile,
                           const NormalizationConstants& constants, double eps, const Point& eta,
                           const Point& xi) {
    using V = FluxKernelKind::Variant;
    if (kind.variant == V::Zero) {
        return 0.0;
    }
    const double je = eval_J_eps(profile, constants.c1, eps, xi);
    switch (kind.variant) {
    case V::G1: return je * (-dot(eta, xi)) / eps;
    case V::G1Tilde: return je * (-dot(eta, xi) + kind.kappa * eps * eps) / eps;
    case V::G2: return constants.c2 * je;
    case V::Zero: break;
    }
    return 0.0;
}

double eval_G_eps(const FluxKernelKind& kind, const KernelProfile& profile,
                  const NormalizationConstants& constants, double eps, const Point& x,
                  const Point& xbar, const Point& eta, const Point& xi) {
    const double band = profile.support_radius() * eps;
    if (!(norm(x - xbar) < band)) {
        throw ContractError("flux kernel queried outside the boundary band");
    }
    return flux_kernel_density(kind, profile, constants, eps, eta, xi);
}

KernelReport verify_kernel(const KernelProfile& profile) {
    KernelReport report;
    report.unit_mass_error = std::abs(kernel_mass(profile) - 1.0);
    const double rmax = profile.support_radius() * (1.0 - 1e-3);
    constexpr int samples = 1001;
    double lo = profile.density(0.0);
    for (int i = 1; i < samples; ++i) {
        lo = std::min(lo, profile.density(rmax * i / (samples - 1)));
    }
    report.min_on_support = lo;
    report.symmetry_error = 0.0;
    return report;
}

} // namespace nlheat
