#pragma once

// Test-side quadrature, independent of the library's integrators.

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

struct Rule {
    std::vector<double> x; // nodes on [-1, 1]
    std::vector<double> w;
};

// Gauss-Legendre by Newton iteration on P_n.
inline Rule gauss_legendre(int n) {
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        r.x[i] = z;
        r.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return r;
}

// Composite Gauss-Legendre with `panels` equal panels.
template <class F>
double integrate(F&& f, double a, double b, int n = 20, int panels = 1) {
    const Rule r = gauss_legendre(n);
    const double width = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        const double mid = lo + 0.5 * width;
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            s += r.w[i] * f(mid + 0.5 * width * r.x[i]);
        }
        sum += 0.5 * width * s;
    }
    return sum;
}

// Quartic profile j(r) = c (1 - r^2) on the unit ball, with unit mass.
inline double quartic_c(int dim) { return dim == 1 ? 0.75 : 2.0 / std::numbers::pi; }
inline double quartic(double r, int dim) { return r < 1.0 ? quartic_c(dim) * (1.0 - r * r) : 0.0; }

} // namespace oracle
