#include "nlheat/operator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "nlheat/error.hpp"
#include "nlheat/simd.hpp"

namespace nlheat {

namespace {

// Offsets at relative distance >= 1 - kSupportSnap are treated as outside the
// support, so lattice points that land on |z| = d up to rounding get weight 0.
constexpr double kSupportSnap = 1e-12;

struct GaussRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights; // sum to 2
};

GaussRule gauss_legendre(int n) {
    switch (n) {
    case 1: return {{0.0}, {2.0}};
    case 2: {
        const double a = 1.0 / std::sqrt(3.0);
        return {{-a, a}, {1.0, 1.0}};
    }
    case 3: {
        const double a = std::sqrt(0.6);
        return {{-a, 0.0, a}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
    }
    case 4: {
        const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(1.2));
        const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(1.2));
        const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
        const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
        return {{-b, -a, a, b}, {wb, wa, wa, wb}};
    }
    case 5: {
        const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
        const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
        const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
        const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
        return {{-b, -a, 0.0, a, b}, {wb, wa, 128.0 / 225.0, wa, wb}};
    }
    default: throw ContractError("gauss points must be in 1..5");
    }
}

// Integral of f over [lo, hi] with the rule, split at the given breakpoints.
template <class F>
double gauss_pieces(F&& f, double lo, double hi, std::span<const double> breaks,
                    const GaussRule& rule) {
    std::array<double, 8> cuts{};
    std::size_t n = 0;
    cuts[n++] = lo;
    for (double b : breaks) {
        if (b > lo && b < hi && n < cuts.size() - 1) {
            cuts[n++] = b;
        }
    }
    cuts[n++] = hi;
    std::sort(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(n));
    double total = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
        const double mid = 0.5 * (cuts[p] + cuts[p + 1]);
        const double half = 0.5 * (cuts[p + 1] - cuts[p]);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            total += rule.weights[q] * half * f(mid + half * rule.nodes[q]);
        }
    }
    return total;
}

} // namespace

NonlocalOperator assemble_operator(const Grid& grid, const KernelProfile& profile,
                                   const NormalizationConstants& constants, double eps,
                                   const AssemblyOptions& options) {
    const double h = grid.h;
    const double reach = profile.support_radius() * eps;
    if (!(eps > 0.0) || !(h <= reach)) {
        throw ContractError("operator assembly requires h <= d*eps");
    }
    if (grid.size() == 0) {
        throw ContractError("operator assembly on an empty grid");
    }
    if (profile.dim() != grid.domain.dim()) {
        throw ContractError("kernel dimension does not match the domain");
    }

    NonlocalOperator op;
    op.eps_ = eps;
    op.dim_ = grid.domain.dim();
    const int m = static_cast<int>(std::ceil(reach / h));
    op.radius_ = m;
    const int my = op.dim_ == 2 ? m : 0;
    const double vol = grid.lattice.cell_volume();

    auto raw_weight = [&](int dx, int dy) {
        if (dx == 0 && dy == 0) {
            return 0.0;
        }
        const Point z{dx * h, dy * h};
        if (!(norm(z) < reach * (1.0 - kSupportSnap))) {
            return 0.0;
        }
        return eval_J_eps(profile, constants.c1, eps, z) * vol / (eps * eps);
    };

    // Second moment along x of the interior stencil: equals 2 for an exact Laplacian.
    double moment = 0.0;
    for (int dy = -my; dy <= my; ++dy) {
        for (int dx = -m; dx <= m; ++dx) {
            moment += raw_weight(dx, dy) * (dx * h) * (dx * h);
        }
    }
    op.calibration_ = options.calibration == Calibration::Discrete ? 2.0 / moment : 1.0;
    op.norm_bound_ = 2.0 * op.calibration_ * constants.c1 / (eps * eps);

    for (int dy = -my; dy <= my; ++dy) {
        int mx = -1;
        for (int dx = 0; dx <= m; ++dx) {
            if (raw_weight(dx, dy) > 0.0) {
                mx = dx;
            }
        }
        if (mx < 0) {
            continue;
        }
        NonlocalOperator::StencilRow row{dy, -mx, {}};
        for (int dx = -mx; dx <= mx; ++dx) {
            row.weights.push_back(op.calibration_ * raw_weight(dx, dy));
        }
        op.stencil_.push_back(std::move(row));
    }

    // Padded lattice box.
    int ixmin = std::numeric_limits<int>::max();
    int ixmax = std::numeric_limits<int>::min();
    int iymin = ixmin;
    int iymax = ixmax;
    for (const Cell& c : grid.cells) {
        ixmin = std::min(ixmin, c.ix);
        ixmax = std::max(ixmax, c.ix);
        iymin = std::min(iymin, c.iy);
        iymax = std::max(iymax, c.iy);
    }
    op.width_ = ixmax - ixmin + 1 + 2 * m;
    op.height_ = iymax - iymin + 1 + 2 * my;
    const auto cells_total = static_cast<std::size_t>(op.width_) * op.height_;
    op.node_at_.assign(cells_total, -1);
    op.mask_.assign(cells_total, 0);
    op.node_offset_.resize(grid.size());
    op.cells_ = grid.cells;
    op.volumes_ = grid.volumes;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const int col = grid.cells[i].ix - ixmin + m;
        const int row = grid.cells[i].iy - iymin + my;
        const auto off = static_cast<std::size_t>(row) * op.width_ + col;
        op.node_offset_[i] = off;
        op.node_at_[off] = static_cast<std::int64_t>(i);
        op.mask_[off] = simd::kMaskOn;
    }
    for (std::size_t i = 0; i < grid.size();) {
        const int row = grid.cells[i].iy;
        std::size_t j = i;
        int lo = grid.cells[i].ix;
        int hi = lo;
        while (j < grid.size() && grid.cells[j].iy == row) {
            lo = std::min(lo, grid.cells[j].ix);
            hi = std::max(hi, grid.cells[j].ix);
            ++j;
        }
        op.rows_.push_back({i, j - i, row - iymin + my, lo - ixmin + m, hi - lo + 1});
        i = j;
    }

    // d_i = sum_j w_ij, accumulated in the same order apply() uses.
    std::vector<double> ones(grid.size(), 1.0);
    std::vector<double> zeros(grid.size(), 0.0);
    op.diagonal_.assign(grid.size(), 0.0);
    {
        std::vector<double> padded(cells_total, 0.0);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            padded[op.node_offset_[i]] = 1.0;
        }
        const auto& kt = simd::active();
        std::vector<double> acc;
        std::vector<double> center;
        for (const auto& r : op.rows_) {
            acc.assign(static_cast<std::size_t>(r.width), 0.0);
            center.assign(static_cast<std::size_t>(r.width), 0.0);
            for (const auto& s : op.stencil_) {
                const auto off = static_cast<std::size_t>(r.row + s.dy) * op.width_ +
                                 static_cast<std::size_t>(r.col_lo + s.dx_min);
                kt.stencil_row(padded.data() + off, op.mask_.data() + off, s.weights.data(),
                               s.weights.size(), center.data(), acc.data(), acc.size());
            }
            for (std::size_t i = r.first_node; i < r.first_node + r.count; ++i) {
                const auto col = op.node_offset_[i] - static_cast<std::size_t>(r.row) * op.width_;
                op.diagonal_[i] = acc[col - static_cast<std::size_t>(r.col_lo)];
            }
        }
    }
    op.max_diagonal_ = *std::max_element(op.diagonal_.begin(), op.diagonal_.end());
    return op;
}

double NonlocalOperator::stencil_weight(int dx, int dy) const {
    for (const auto& s : stencil_) {
        if (s.dy == dy) {
            const int k = dx - s.dx_min;
            if (k >= 0 && k < static_cast<int>(s.weights.size())) {
                return s.weights[static_cast<std::size_t>(k)];
            }
            return 0.0;
        }
    }
    return 0.0;
}

std::vector<Neighbor> NonlocalOperator::neighbors(std::size_t i) const {
    if (i >= size()) {
        throw ContractError("node index out of range");
    }
    std::vector<Neighbor> out;
    for (const auto& s : stencil_) {
        const auto base = static_cast<std::ptrdiff_t>(node_offset_[i]) +
                          static_cast<std::ptrdiff_t>(s.dy) * width_ + s.dx_min;
        for (std::size_t k = 0; k < s.weights.size(); ++k) {
            const auto off = static_cast<std::size_t>(base + static_cast<std::ptrdiff_t>(k));
            if (mask_[off] != 0 && s.weights[k] > 0.0) {
                out.push_back({static_cast<std::size_t>(node_at_[off]), s.weights[k]});
            }
        }
    }
    return out;
}

double NonlocalOperator::weight(std::size_t i, std::size_t j) const {
    if (i >= size() || j >= size()) {
        throw ContractError("node index out of range");
    }
    if (i == j) {
        return 0.0;
    }
    return stencil_weight(cells_[j].ix - cells_[i].ix, cells_[j].iy - cells_[i].iy);
}

void NonlocalOperator::apply(std::span<const double> u, std::span<double> out) const {
    if (u.size() != size() || out.size() != size()) {
        throw ContractError("field size does not match the operator's grid");
    }
    std::vector<double> padded(static_cast<std::size_t>(width_) * height_, 0.0);
    for (std::size_t i = 0; i < size(); ++i) {
        padded[node_offset_[i]] = u[i];
    }
    const auto& kt = simd::active();
    std::vector<double> acc;
    for (const auto& r : rows_) {
        acc.assign(static_cast<std::size_t>(r.width), 0.0);
        const auto center_off =
            static_cast<std::size_t>(r.row) * width_ + static_cast<std::size_t>(r.col_lo);
        const double* center = padded.data() + center_off;
        for (const auto& s : stencil_) {
            const auto off = static_cast<std::size_t>(r.row + s.dy) * width_ +
                             static_cast<std::size_t>(r.col_lo + s.dx_min);
            kt.stencil_row(padded.data() + off, mask_.data() + off, s.weights.data(),
                           s.weights.size(), center, acc.data(), acc.size());
        }
        for (std::size_t i = r.first_node; i < r.first_node + r.count; ++i) {
            out[i] = acc[node_offset_[i] - center_off];
        }
    }
}

GridField NonlocalOperator::apply(const GridField& u) const {
    GridField out{std::vector<double>(size(), 0.0), u.time};
    apply(u.values, out.values);
    return out;
}

GridField apply(const NonlocalOperator& op, const GridField& u) { return op.apply(u); }

std::span<const CollarWeight> FluxAssembler::weights(std::size_t i) const {
    if (weights_.empty()) {
        return {};
    }
    return std::span<const CollarWeight>(weights_).subspan(row_start_[i],
                                                           row_start_[i + 1] - row_start_[i]);
}

void FluxAssembler::flux_vector(std::span<const double> collar_values,
                                std::span<double> out) const {
    if (out.size() != grid_size_) {
        throw ContractError("flux output size does not match the grid");
    }
    if (collar_values.size() != collar_.size()) {
        throw ContractError("collar value count does not match the collar");
    }
    std::fill(out.begin(), out.end(), 0.0);
    if (weights_.empty()) {
        return;
    }
    for (std::size_t i = 0; i < grid_size_; ++i) {
        double sum = 0.0;
        for (std::size_t p = row_start_[i]; p < row_start_[i + 1]; ++p) {
            sum += weights_[p].weight * collar_values[weights_[p].collar_index];
        }
        out[i] = sum;
    }
}

GridField FluxAssembler::flux_vector(double t) const {
    GridField out{std::vector<double>(grid_size_, 0.0), t};
    if (!weights_.empty() && collar_.g) {
        flux_vector(collar_.flux_values(t), out.values);
    }
    return out;
}

double FluxAssembler::column_norm(std::span<const double> node_volumes) const {
    if (node_volumes.size() != grid_size_) {
        throw ContractError("volume count does not match the grid");
    }
    std::vector<double> column(collar_.size(), 0.0);
    for (std::size_t i = 0; i < grid_size_ && !weights_.empty(); ++i) {
        for (const auto& w : weights(i)) {
            column[w.collar_index] += node_volumes[i] * std::abs(w.weight);
        }
    }
    double best = 0.0;
    for (std::size_t k = 0; k < column.size(); ++k) {
        best = std::max(best, column[k] / collar_.volumes[k]);
    }
    return best;
}

FluxAssembler FluxAssembler::with_datum(BoundaryDatum g) const {
    FluxAssembler copy = *this;
    copy.collar_.g = std::move(g);
    return copy;
}

GridField flux_vector(const FluxAssembler& fa, double t) { return fa.flux_vector(t); }

FluxAssembler assemble_flux(const Grid& grid, const ExteriorCollar& collar,
                            const FluxKernelKind& kind, const KernelProfile& profile,
                            const NormalizationConstants& constants, double eps,
                            const AssemblyOptions& options) {
    if (collar.eps != eps) {
        throw ContractError("collar was built for a different eps");
    }
    using V = FluxKernelKind::Variant;
    const bool needs_band = kind.variant == V::G1 || kind.variant == V::G1Tilde;
    if (needs_band && (grid.band.size() != grid.size() || grid.band_eps != eps)) {
        throw ContractError("G1 flux kernels need the grid's band index for this eps");
    }

    FluxAssembler fa;
    fa.kind_ = kind;
    fa.eps_ = eps;
    fa.grid_size_ = grid.size();
    fa.collar_ = collar;
    fa.row_start_.assign(grid.size() + 1, 0);
    if (kind.variant == V::Zero || collar.size() == 0) {
        return fa;
    }

    const double h = grid.h;
    const Domain& domain = grid.domain;
    const int dim = domain.dim();
    const double reach = profile.support_radius() * eps;
    const bool cell_average = options.flux_quadrature == FluxQuadrature::CellAverage;

    // Dense map from collar lattice cells to collar indices.
    int ixmin = std::numeric_limits<int>::max();
    int ixmax = std::numeric_limits<int>::min();
    int iymin = ixmin;
    int iymax = ixmax;
    for (const Cell& c : collar.cells) {
        ixmin = std::min(ixmin, c.ix);
        ixmax = std::max(ixmax, c.ix);
        iymin = std::min(iymin, c.iy);
        iymax = std::max(iymax, c.iy);
    }
    const int cw = ixmax - ixmin + 1;
    const int ch = iymax - iymin + 1;
    std::vector<std::int64_t> collar_at(static_cast<std::size_t>(cw) * ch, -1);
    for (std::size_t k = 0; k < collar.size(); ++k) {
        const auto off = static_cast<std::size_t>(collar.cells[k].iy - iymin) * cw +
                         static_cast<std::size_t>(collar.cells[k].ix - ixmin);
        collar_at[off] = static_cast<std::int64_t>(k);
    }

    const int m = static_cast<int>(std::ceil(reach / h)) + (cell_average ? 1 : 0);
    const int my = dim == 2 ? m : 0;
    const GaussRule rule1 = gauss_legendre(options.gauss_points_1d);
    const GaussRule rule2 = gauss_legendre(options.gauss_points_2d);

    auto density = [&](const Point& eta, const Point& xi) {
        return flux_kernel_density(kind, profile, constants, eps, eta, xi) / eps;
    };

    auto pair_weight = [&](std::size_t i, std::size_t k) -> double {
        const Point x = grid.nodes[i];
        const Point y = collar.nodes[k];
        if (!cell_average) {
            if (!(norm(x - y) < reach)) {
                return 0.0;
            }
            Point xbar;
            Point eta;
            if (needs_band) {
                if (!grid.band[i]) {
                    throw ContractError("flux pair for a node missing from the band index");
                }
                xbar = grid.band[i]->xbar;
                eta = grid.band[i]->eta;
            } else {
                const auto proj = domain.project(x);
                xbar = proj.xbar;
                eta = proj.eta;
            }
            return eval_G_eps(kind, profile, constants, eps, x, xbar, eta, x - y) / eps *
                   collar.volumes[k];
        }
        if (dim == 1) {
            // (1/h) int_cell_i int_cell_k F(x - y) dy dx = (1/h) int F(s) tent(s - s0) ds.
            const Point eta = domain.project(x).eta;
            const double s0 = x.x - y.x;
            const std::array<double, 3> breaks{s0, -reach, reach};
            const auto f = [&](double s) {
                return density(eta, {s, 0.0}) * (h - std::abs(s - s0));
            };
            return gauss_pieces(f, s0 - h, s0 + h, breaks, rule1) / h;
        }
        // Tensor Gauss over both cells, restricted to x in Omega and y outside.
        double total = 0.0;
        const double half = 0.5 * h;
        const std::size_t n = rule2.nodes.size();
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                const Point xq{x.x + half * rule2.nodes[a], x.y + half * rule2.nodes[b]};
                const double sdx = domain.signed_distance(xq);
                if (!(sdx < 0.0) || !(-sdx < reach)) {
                    continue;
                }
                const Point eta = domain.project(xq).eta;
                const double wx = rule2.weights[a] * rule2.weights[b];
                for (std::size_t c = 0; c < n; ++c) {
                    for (std::size_t e = 0; e < n; ++e) {
                        const Point yq{y.x + half * rule2.nodes[c], y.y + half * rule2.nodes[e]};
                        if (!(domain.signed_distance(yq) > 0.0)) {
                            continue;
                        }
                        total += wx * rule2.weights[c] * rule2.weights[e] * density(eta, xq - yq);
                    }
                }
            }
        }
        // Each 2D rule integrates to 4 over the reference square; cell area h^2.
        return total * (half * half) * (half * half) / grid.volumes[i];
    };

    for (std::size_t i = 0; i < grid.size(); ++i) {
        fa.row_start_[i] = fa.weights_.size();
        if (!cell_average && needs_band && !grid.band[i]) {
            continue;
        }
        if (-domain.signed_distance(grid.nodes[i]) >= reach + (cell_average ? h : 0.0)) {
            continue;
        }
        const Cell ci = grid.cells[i];
        for (int dy = -my; dy <= my; ++dy) {
            const int iy = ci.iy + dy;
            if (iy < iymin || iy > iymax) {
                continue;
            }
            for (int dx = -m; dx <= m; ++dx) {
                const int ix = ci.ix + dx;
                if (ix < ixmin || ix > ixmax) {
                    continue;
                }
                const auto k = collar_at[static_cast<std::size_t>(iy - iymin) * cw +
                                         static_cast<std::size_t>(ix - ixmin)];
                if (k < 0) {
                    continue;
                }
                const double q = pair_weight(i, static_cast<std::size_t>(k));
                if (q != 0.0) {
                    fa.weights_.push_back({static_cast<std::size_t>(k), q});
                }
            }
        }
    }
    fa.row_start_[grid.size()] = fa.weights_.size();
    return fa;
}

} // namespace nlheat
