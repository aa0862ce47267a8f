#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nlheat/geometry.hpp"
#include "nlheat/kernels.hpp"

namespace nlheat {

/// Scalar field on the nodes of a grid.
struct GridField {
    std::vector<double> values;
    double time = 0.0;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

/// Normalization of the discrete interaction weights.
enum class Calibration {
    /// w_ij = eps^-2 J_eps(x_i - x_j) vol_j with the analytic C1.
    Analytic,
    /// Same weights times one factor chosen so the interior stencil reproduces
    /// the Laplacian exactly on quadratics. Removes the O((h/eps)^2) diffusivity
    /// error of the midpoint rule, which does not shrink when h = eps / rho.
    Discrete,
};

/// How the flux weights integrate over grid and collar cells.
enum class FluxQuadrature {
    /// Node value times collar cell volume.
    Midpoint,
    /// Cell-pair average (1/vol_i) int_{cell i} int_{cell k}. Captures the
    /// total boundary flux without the midpoint rule's fixed relative defect.
    CellAverage,
};

struct AssemblyOptions {
    Calibration calibration = Calibration::Discrete;
    FluxQuadrature flux_quadrature = FluxQuadrature::CellAverage;
    int gauss_points_1d = 4; ///< per half-tent for CellAverage on intervals
    int gauss_points_2d = 2; ///< per axis per cell for CellAverage on disks
};

struct Neighbor {
    std::size_t index;
    double weight;
};

/// Discrete L_eps u = eps^-2 int_Omega J_eps(x - y) (u(y) - u(x)) dy on a
/// cell-centered grid.
///
/// All weights come from one stencil over lattice offsets (the grid is
/// uniform); boundary nodes differ only in which neighbors exist. Application
/// sums per node in ascending neighbor index, independent of SIMD variant.
class NonlocalOperator {
public:
    std::size_t size() const noexcept { return diagonal_.size(); }
    double eps() const noexcept { return eps_; }
    int dim() const noexcept { return dim_; }
    double calibration_factor() const noexcept { return calibration_; }

    /// d_i = sum_j w_ij.
    std::span<const double> diagonal() const noexcept { return diagonal_; }
    double max_diagonal() const noexcept { return max_diagonal_; }
    /// 2 C1 / eps^2 (times the calibration factor).
    double operator_norm_bound() const noexcept { return norm_bound_; }
    const std::vector<double>& volumes() const noexcept { return volumes_; }

    /// w_ij for j != i, ascending j, positive weights only.
    std::vector<Neighbor> neighbors(std::size_t i) const;
    double weight(std::size_t i, std::size_t j) const;
    /// Stencil weight for a lattice offset (zero at the origin and outside the support).
    double stencil_weight(int dx, int dy) const;
    int stencil_radius() const noexcept { return radius_; }

    void apply(std::span<const double> u, std::span<double> out) const;
    GridField apply(const GridField& u) const;

private:
    friend NonlocalOperator assemble_operator(const Grid&, const KernelProfile&,
                                              const NormalizationConstants&, double,
                                              const AssemblyOptions&);

    struct StencilRow {
        int dy;
        int dx_min;
        std::vector<double> weights; ///< dx = dx_min + k
    };
    struct OutputRow {
        std::size_t first_node;
        std::size_t count;
        int row;    ///< padded row index
        int col_lo; ///< padded column of the first output slot
        int width;  ///< slots from col_lo covering the row's nodes
    };

    double eps_ = 0.0;
    int dim_ = 1;
    int radius_ = 0;
    double calibration_ = 1.0;
    double max_diagonal_ = 0.0;
    double norm_bound_ = 0.0;
    std::vector<StencilRow> stencil_;
    std::vector<double> diagonal_;
    std::vector<double> volumes_;

    // Zero-padded lattice layout.
    int width_ = 0;
    int height_ = 0;
    std::vector<std::size_t> node_offset_;    ///< padded offset of node i
    std::vector<std::int64_t> node_at_;       ///< padded offset -> node index or -1
    std::vector<std::uint64_t> mask_;         ///< padded offset -> all-ones if a node
    std::vector<Cell> cells_;
    std::vector<OutputRow> rows_;
};

NonlocalOperator assemble_operator(const Grid& grid, const KernelProfile& profile,
                                   const NormalizationConstants& constants, double eps,
                                   const AssemblyOptions& options = {});

GridField apply(const NonlocalOperator& op, const GridField& u);

struct CollarWeight {
    std::size_t collar_index;
    double weight; ///< q_ik
};

/// Discrete flux term (1/eps) int_{R^N \ Omega} G_eps(x, x - y) g(y, t) dy.
/// A default-constructed assembler has no weights and yields zero flux.
class FluxAssembler {
public:
    FluxAssembler() = default;

    const FluxKernelKind& kind() const noexcept { return kind_; }
    double eps() const noexcept { return eps_; }
    std::size_t grid_size() const noexcept { return grid_size_; }
    std::size_t collar_size() const noexcept { return collar_.size(); }
    bool empty() const noexcept { return weights_.empty(); }

    std::span<const CollarWeight> weights(std::size_t i) const;
    const ExteriorCollar& collar() const noexcept { return collar_; }

    /// b_i(t) = sum_k q_ik g(y_k, t); `grid_size` nodes, zero off the band.
    GridField flux_vector(double t) const;
    /// Same with explicit collar values g_k.
    void flux_vector(std::span<const double> collar_values, std::span<double> out) const;

    /// max_k (sum_i vol_i |q_ik|) / vol_k, the L1 operator norm of the flux map.
    double column_norm(std::span<const double> node_volumes) const;

    /// Same weights, different datum.
    FluxAssembler with_datum(BoundaryDatum g) const;

private:
    friend FluxAssembler assemble_flux(const Grid&, const ExteriorCollar&, const FluxKernelKind&,
                                       const KernelProfile&, const NormalizationConstants&,
                                       double, const AssemblyOptions&);

    FluxKernelKind kind_;
    double eps_ = 0.0;
    std::size_t grid_size_ = 0;
    std::vector<std::size_t> row_start_;
    std::vector<CollarWeight> weights_;
    ExteriorCollar collar_;
};

/// Requires grid.band indexed for eps when kind is G1 or G1Tilde.
FluxAssembler assemble_flux(const Grid& grid, const ExteriorCollar& collar,
                            const FluxKernelKind& kind, const KernelProfile& profile,
                            const NormalizationConstants& constants, double eps,
                            const AssemblyOptions& options = {});

GridField flux_vector(const FluxAssembler& fa, double t);

} // namespace nlheat
