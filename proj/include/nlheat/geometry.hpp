#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nlheat/point.hpp"

namespace nlheat {

struct Interval {
    double a = 0.0;
    double b = 1.0;
};

struct Disk {
    Point center;
    double radius = 1.0;
};

struct BoundaryProjection {
    Point xbar;  ///< nearest boundary point
    Point eta;   ///< outward unit normal at xbar
    double dist; ///< |x - xbar|
};

/// Boundary-band record for a node with dist(x, boundary) < d eps.
struct BandInfo {
    Point xbar;
    Point eta;
    double depth; ///< s = dist / eps, in (0, d)
};

/// Interval or disk with exact projection, normal and signed distance.
class Domain {
public:
    using Shape = std::variant<Interval, Disk>;

    Domain() = default;
    static Domain interval(double a, double b);
    static Domain disk(Point center, double radius);
    /// `interval:a,b` or `disk:cx,cy,R`.
    static Domain parse(std::string_view text);

    const Shape& shape() const noexcept { return shape_; }
    bool is_interval() const noexcept { return std::holds_alternative<Interval>(shape_); }
    int dim() const noexcept { return is_interval() ? 1 : 2; }

    /// Negative inside, positive outside.
    double signed_distance(const Point& x) const;
    bool contains(const Point& x) const { return signed_distance(x) < 0.0; }
    BoundaryProjection project(const Point& x) const;

    double measure() const;
    double boundary_measure() const;
    double diameter() const;
    double max_curvature() const;

    std::string to_string() const;

private:
    explicit Domain(Shape shape) : shape_(shape) {}
    Shape shape_ = Interval{};
};

BoundaryProjection project_to_boundary(const Domain& domain, const Point& x);

/// Integer cell coordinates on a uniform lattice. iy = 0 in 1D.
struct Cell {
    int ix = 0;
    int iy = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Uniform cell-centered lattice: cell (ix, iy) is centered at anchor + ((ix+1/2)h, (iy+1/2)h).
struct Lattice {
    Point anchor;
    double h = 0.0;
    int dim = 1;

    Point center(const Cell& c) const {
        return {anchor.x + (c.ix + 0.5) * h, dim == 1 ? 0.0 : anchor.y + (c.iy + 0.5) * h};
    }
    double cell_volume() const { return dim == 1 ? h : h * h; }
};

/// The lattice build_grid uses for (domain, h). Collars reuse it.
Lattice lattice_for(const Domain& domain, double h);

/// Cell-centered quadrature grid for a domain; nodes in row-major (iy, ix) order.
struct Grid {
    Domain domain;
    Lattice lattice;
    double h = 0.0;
    std::vector<Point> nodes;
    std::vector<Cell> cells;
    std::vector<double> volumes;
    /// Band records for eps = band_eps; empty until index_band() runs.
    std::vector<std::optional<BandInfo>> band;
    double band_eps = 0.0;

    std::size_t size() const noexcept { return nodes.size(); }
    double total_volume() const;
};

Grid build_grid(const Domain& domain, double h);

std::optional<BandInfo> band_membership(const Domain& domain, double eps, const Point& node,
                                        double support_radius = 1.0);

/// Fills grid.band for the given eps.
void index_band(Grid& grid, double eps, double support_radius = 1.0);

/// Flux datum g(xbar, t) on the boundary. An empty function means g = 0.
using BoundaryDatum = std::function<double(const Point& xbar, double t)>;

/// Exterior cells within distance d eps of the domain, where the flux datum lives.
struct ExteriorCollar {
    double eps = 0.0;
    std::vector<Point> nodes;
    std::vector<Cell> cells;
    std::vector<double> volumes;
    std::vector<Point> projections; ///< boundary projection of each node
    BoundaryDatum g;

    std::size_t size() const noexcept { return nodes.size(); }
    /// g extended constant along normals: value at node k is g(projection_k, t).
    double flux_value(std::size_t k, double t) const;
    std::vector<double> flux_values(double t) const;
};

ExteriorCollar build_collar(const Domain& domain, double eps, double h, BoundaryDatum g,
                            double support_radius = 1.0);

} // namespace nlheat
