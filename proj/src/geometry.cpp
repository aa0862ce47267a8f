#include "nlheat/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nlheat/error.hpp"

namespace nlheat {

namespace {

std::vector<double> parse_numbers(std::string_view text) {
    std::vector<double> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        auto field = text.substr(0, comma);
        while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
        while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc{} || ptr != field.data() + field.size()) {
            throw ValidationError("invalid number '" + std::string(field) + "'");
        }
        out.push_back(value);
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
    }
    return out;
}

int disk_half_cells(const Disk& d, double h) {
    return static_cast<int>(std::ceil(d.radius / h));
}

} // namespace

Domain Domain::interval(double a, double b) {
    if (!(b > a)) {
        throw ContractError("interval requires a < b");
    }
    return Domain(Interval{a, b});
}

Domain Domain::disk(Point center, double radius) {
    if (!(radius > 0.0)) {
        throw ContractError("disk radius must be positive");
    }
    return Domain(Disk{center, radius});
}

Domain Domain::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw ValidationError("domain must be 'interval:a,b' or 'disk:cx,cy,R'");
    }
    const auto kind = text.substr(0, colon);
    const auto nums = parse_numbers(text.substr(colon + 1));
    try {
        if (kind == "interval" && nums.size() == 2) {
            return interval(nums[0], nums[1]);
        }
        if (kind == "disk" && nums.size() == 3) {
            return disk({nums[0], nums[1]}, nums[2]);
        }
    } catch (const ContractError& e) {
        throw ValidationError(e.what());
    }
    throw ValidationError("domain must be 'interval:a,b' or 'disk:cx,cy,R', got '" +
                          std::string(text) + "'");
}

double Domain::signed_distance(const Point& x) const {
    if (const auto* iv = std::get_if<Interval>(&shape_)) {
        return std::max(iv->a - x.x, x.x - iv->b);
    }
    const auto& d = std::get<Disk>(shape_);
    return norm(x - d.center) - d.radius;
}

BoundaryProjection Domain::project(const Point& x) const {
    if (const auto* iv = std::get_if<Interval>(&shape_)) {
        const double mid = 0.5 * (iv->a + iv->b);
        if (x.x <= mid) {
            return {{iv->a, 0.0}, {-1.0, 0.0}, std::abs(x.x - iv->a)};
        }
        return {{iv->b, 0.0}, {1.0, 0.0}, std::abs(x.x - iv->b)};
    }
    const auto& d = std::get<Disk>(shape_);
    const Point rel = x - d.center;
    const double r = norm(rel);
    if (!(r > 1e-14 * d.radius)) {
        throw ContractError("boundary projection is ambiguous at the disk center");
    }
    const Point eta = rel * (1.0 / r);
    return {d.center + eta * d.radius, eta, std::abs(r - d.radius)};
}

double Domain::measure() const {
    if (const auto* iv = std::get_if<Interval>(&shape_)) {
        return iv->b - iv->a;
    }
    const auto& d = std::get<Disk>(shape_);
    return std::numbers::pi * d.radius * d.radius;
}

double Domain::boundary_measure() const {
    if (is_interval()) {
        return 2.0;
    }
    return 2.0 * std::numbers::pi * std::get<Disk>(shape_).radius;
}

double Domain::diameter() const {
    if (const auto* iv = std::get_if<Interval>(&shape_)) {
        return iv->b - iv->a;
    }
    return 2.0 * std::get<Disk>(shape_).radius;
}

double Domain::max_curvature() const {
    if (is_interval()) {
        return 0.0;
    }
    return 1.0 / std::get<Disk>(shape_).radius;
}

std::string Domain::to_string() const {
    std::ostringstream out;
    out.precision(17);
    if (const auto* iv = std::get_if<Interval>(&shape_)) {
        out << "interval:" << iv->a << ',' << iv->b;
    } else {
        const auto& d = std::get<Disk>(shape_);
        out << "disk:" << d.center.x << ',' << d.center.y << ',' << d.radius;
    }
    return out.str();
}

BoundaryProjection project_to_boundary(const Domain& domain, const Point& x) {
    return domain.project(x);
}

Lattice lattice_for(const Domain& domain, double h) {
    if (const auto* iv = std::get_if<Interval>(&domain.shape())) {
        return {{iv->a, 0.0}, h, 1};
    }
    const auto& d = std::get<Disk>(domain.shape());
    const double offset = disk_half_cells(d, h) * h;
    return {{d.center.x - offset, d.center.y - offset}, h, 2};
}

double Grid::total_volume() const {
    double sum = 0.0;
    for (double v : volumes) {
        sum += v;
    }
    return sum;
}

Grid build_grid(const Domain& domain, double h) {
    if (!(h > 0.0) || !(h <= domain.diameter() / 4.0)) {
        throw ContractError("grid spacing must satisfy 0 < h <= diameter/4");
    }
    Grid grid;
    grid.domain = domain;
    grid.lattice = lattice_for(domain, h);
    grid.h = h;
    auto add = [&](Cell c) {
        const Point x = grid.lattice.center(c);
        if (domain.contains(x)) {
            grid.nodes.push_back(x);
            grid.cells.push_back(c);
            grid.volumes.push_back(grid.lattice.cell_volume());
        }
    };
    if (const auto* iv = std::get_if<Interval>(&domain.shape())) {
        const int n = static_cast<int>(std::ceil((iv->b - iv->a) / h)) + 1;
        for (int ix = 0; ix < n; ++ix) {
            add({ix, 0});
        }
    } else {
        const int cells = 2 * disk_half_cells(std::get<Disk>(domain.shape()), h);
        for (int iy = 0; iy < cells; ++iy) {
            for (int ix = 0; ix < cells; ++ix) {
                add({ix, iy});
            }
        }
    }
    return grid;
}

std::optional<BandInfo> band_membership(const Domain& domain, double eps, const Point& node,
                                        double support_radius) {
    const double depth = -domain.signed_distance(node);
    if (!(depth < support_radius * eps)) {
        return std::nullopt;
    }
    const auto proj = domain.project(node);
    return BandInfo{proj.xbar, proj.eta, proj.dist / eps};
}

void index_band(Grid& grid, double eps, double support_radius) {
    grid.band.assign(grid.size(), std::nullopt);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.band[i] = band_membership(grid.domain, eps, grid.nodes[i], support_radius);
    }
    grid.band_eps = eps;
}

double ExteriorCollar::flux_value(std::size_t k, double t) const {
    return g ? g(projections[k], t) : 0.0;
}

std::vector<double> ExteriorCollar::flux_values(double t) const {
    std::vector<double> out(size(), 0.0);
    if (g) {
        for (std::size_t k = 0; k < size(); ++k) {
            out[k] = g(projections[k], t);
        }
    }
    return out;
}

ExteriorCollar build_collar(const Domain& domain, double eps, double h, BoundaryDatum g,
                            double support_radius) {
    const double reach = support_radius * eps;
    if (!(reach > h)) {
        throw ContractError("collar unresolvable: need d*eps > h");
    }
    ExteriorCollar collar;
    collar.eps = eps;
    collar.g = std::move(g);
    const Lattice lattice = lattice_for(domain, h);
    auto add = [&](Cell c) {
        const Point y = lattice.center(c);
        const double sd = domain.signed_distance(y);
        if (sd > 0.0 && sd < reach) {
            collar.nodes.push_back(y);
            collar.cells.push_back(c);
            collar.volumes.push_back(lattice.cell_volume());
            collar.projections.push_back(domain.project(y).xbar);
        }
    };
    const int pad = static_cast<int>(std::ceil(reach / h)) + 1;
    if (const auto* iv = std::get_if<Interval>(&domain.shape())) {
        const int n = static_cast<int>(std::ceil((iv->b - iv->a) / h)) + 1;
        for (int ix = -pad; ix < n + pad; ++ix) {
            add({ix, 0});
        }
    } else {
        const int cells = 2 * disk_half_cells(std::get<Disk>(domain.shape()), h);
        for (int iy = -pad; iy < cells + pad; ++iy) {
            for (int ix = -pad; ix < cells + pad; ++ix) {
                add({ix, iy});
            }
        }
    }
    return collar;
}

} // namespace nlheat
