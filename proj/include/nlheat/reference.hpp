#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlheat/geometry.hpp"

namespace nlheat {

using ScalarField = std::function<double(const Point&)>;
using SpaceTimeField = std::function<double(const Point&, double)>;

/// Classical Neumann problem u_t = Laplacian u, du/deta = g, u(.,0) = u0.
struct HeatProblem {
    std::string name;
    Domain domain;
    ScalarField u0;
    BoundaryDatum g; ///< empty means g = 0
    double T = 0.1;
    std::optional<SpaceTimeField> exact;
    /// Set for radially symmetric data on a disk.
    bool radial = false;
};

/// First positive zero of J1; J0(lambda r) is the first radial Neumann mode of the unit disk.
double disk_mode_wavenumber();

/// `cosine`, `poly-flux`, `disk-radial`.
HeatProblem exact_catalog(std::string_view name);

enum class Provenance { Exact, FD1D, FDRadial };
std::string_view provenance_name(Provenance p);

class ReferenceSolution {
public:
    ReferenceSolution(SpaceTimeField evaluator, Provenance provenance, double estimated_error = 0.0)
        : evaluator_(std::move(evaluator)), provenance_(provenance),
          estimated_error_(estimated_error) {}

    double operator()(const Point& x, double t) const { return evaluator_(x, t); }
    Provenance provenance() const noexcept { return provenance_; }
    /// Richardson estimate of the sup error at the final time (0 for Exact).
    double estimated_error() const noexcept { return estimated_error_; }

private:
    SpaceTimeField evaluator_;
    Provenance provenance_;
    double estimated_error_;
};

/// Crank-Nicolson with central differences and a ghost-point Neumann closure.
/// Intervals use FD1D; radially symmetric disk problems use FDRadial.
/// The evaluator interpolates bilinearly in (x or r, t).
ReferenceSolution solve_heat_fd(const HeatProblem& problem, double h_ref, double dt_ref);

/// Same as solve_heat_fd and also estimates its error by one refinement
/// (h/2, dt/2) with second-order Richardson.
ReferenceSolution solve_heat_fd_estimated(const HeatProblem& problem, double h_ref, double dt_ref);

/// Exact solution when the problem has one, otherwise the estimated FD solution.
ReferenceSolution make_reference(const HeatProblem& problem, double h_ref, double dt_ref);

} // namespace nlheat
