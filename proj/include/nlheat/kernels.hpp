#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "nlheat/point.hpp"

namespace nlheat {

enum class KernelCatalog { Quartic, Cosine, Custom };

/// Radial interaction kernel J(z) = j(|z|) on R^N, supported in B(0, d).
///
/// Catalog profiles are normalized to unit mass at construction. Profiles
/// built with from_function() or scaled() keep whatever mass they have, so
/// verify_kernel() can report the defect.
class KernelProfile {
public:
    static KernelProfile quartic(int dim);
    static KernelProfile cosine(int dim);
    /// Tabulated j(r); r strictly increasing from 0, support radius = r.back().
    /// Interpolated piecewise-cubically, then rescaled to unit mass.
    static KernelProfile tabulated(std::vector<double> r, std::vector<double> values, int dim);
    /// Two-column `r value` text file.
    static KernelProfile load(const std::filesystem::path& path, int dim);
    /// Raw profile without normalization.
    static KernelProfile from_function(std::function<double(double)> radial, double support_radius,
                                       int dim, KernelCatalog id = KernelCatalog::Custom);
    /// `quartic`, `cosine` or `custom:<path>`.
    static KernelProfile from_spec(std::string_view spec, int dim);

    /// j(r); zero for r >= d.
    double density(double r) const;
    double operator()(const Point& z) const;

    double support_radius() const noexcept { return support_; }
    int dim() const noexcept { return dim_; }
    KernelCatalog catalog_id() const noexcept { return id_; }
    std::string name() const;

    KernelProfile scaled(double factor) const;

private:
    KernelProfile(std::function<double(double)> radial, double support, int dim, KernelCatalog id)
        : radial_(std::move(radial)), support_(support), dim_(dim), id_(id) {}

    std::function<double(double)> radial_;
    double support_;
    int dim_;
    KernelCatalog id_;
    double scale_ = 1.0;
};

struct NormalizationConstants {
    double c1 = 0.0; ///< Laplacian calibration, C1^{-1} = 1/2 int J z_N^2
    double c2 = 0.0; ///< flux calibration for G2
};

struct FluxKernelKind {
    enum class Variant { Zero, G1, G1Tilde, G2 };
    Variant variant = Variant::Zero;
    double kappa = 0.0; ///< curvature bound, G1Tilde only

    static FluxKernelKind zero() { return {}; }
    static FluxKernelKind g1() { return {Variant::G1, 0.0}; }
    static FluxKernelKind g1_tilde(double kappa) { return {Variant::G1Tilde, kappa}; }
    static FluxKernelKind g2() { return {Variant::G2, 0.0}; }

    /// `zero`, `g1`, `g1tilde:<kappa>`, `g2`.
    static FluxKernelKind parse(std::string_view text);
    std::string to_string() const;
    /// True for the kinds whose assembled weights are nonnegative (comparison principle).
    bool nonnegative() const { return variant != Variant::G1; }
};

struct KernelReport {
    double unit_mass_error = 0.0;
    double min_on_support = 0.0;
    double symmetry_error = 0.0;
};

double eval_J(const KernelProfile& profile, const Point& z);

/// int_{R^N} J.
double kernel_mass(const KernelProfile& profile);
/// int_{R^N} J(z) z_axis^2 dz by nested Cartesian quadrature (axis 0 or 1).
double axis_second_moment(const KernelProfile& profile, int axis);
/// Marginal density m(t) = int J(z', t) dz' of the last coordinate.
double marginal_density(const KernelProfile& profile, double t);
/// int_0^d int_{z_N > s} J(z) (c2 - z_N) dz ds, evaluated literally as a nested integral.
double c2_residual(const KernelProfile& profile, double c2);

double compute_C1(const KernelProfile& profile);
double compute_C2(const KernelProfile& profile);
NormalizationConstants compute_constants(const KernelProfile& profile);

/// C1 eps^{-N} J(xi / eps).
double eval_J_eps(const KernelProfile& profile, double c1, double eps, const Point& xi);

/// (G_kind)_eps(x, xi) = C1 eps^{-N} G_kind(x, xi / eps). `xbar`, `eta` are the
/// boundary projection and outward normal for x, which must lie in the band
/// dist(x, boundary) < d eps.
double eval_G_eps(const FluxKernelKind& kind, const KernelProfile& profile,
                  const NormalizationConstants& constants, double eps, const Point& x,
                  const Point& xbar, const Point& eta, const Point& xi);

/// eval_G_eps without the band precondition: the flux kernel as a function of
/// the outward normal at x and the displacement xi.
double flux_kernel_density(const FluxKernelKind& kind, const KernelProfile& profile,
                           const NormalizationConstants& constants, double eps, const Point& eta,
                           const Point& xi);

KernelReport verify_kernel(const KernelProfile& profile);

} // namespace nlheat
