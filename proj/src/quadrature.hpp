#pragma once

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace nlheat::detail {

/// Adaptive Gauss-Kronrod on [a, b]. A panel is accepted once its error
/// estimate is below rel_tol |I| or abs_tol; the absolute floor stops the
/// bisection on near-zero integrals, whose rounding noise no relative test can beat.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 1e-16,
                 int depth = 20) {
    if (!(b > a)) {
        return 0.0;
    }
    double error = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &error);
    if (depth == 0 || error <= rel_tol * std::abs(value) || error <= abs_tol) {
        return value;
    }
    const double mid = 0.5 * (a + b);
    return integrate(f, a, mid, rel_tol, 0.5 * abs_tol, depth - 1) +
           integrate(f, mid, b, rel_tol, 0.5 * abs_tol, depth - 1);
}

} // namespace nlheat::detail
