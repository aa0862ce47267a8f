#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlheat/config.hpp"
#include "nlheat/kernels.hpp"
#include "nlheat/operator.hpp"
#include "nlheat/reference.hpp"
#include "nlheat/solver.hpp"

namespace nlheat {

struct StudyConfig {
    std::string case_name = "cosine";
    std::string kernel = "quartic";
    FluxKernelKind flux_kernel;
    std::vector<double> eps_list;  ///< strictly decreasing
    double rho = 20.0;             ///< h = eps / rho unless h is fixed
    std::optional<double> h;
    Scheme scheme = Scheme::Euler;
    std::optional<double> dt;      ///< empty means auto_dt()
    double T = 0.1;
    bool zero_flux_datum = false;  ///< `g = zero` replaces the case datum
    AssemblyOptions assembly;
    std::string output = "study";
    bool picard_check = false;
    std::optional<double> t0;      ///< Picard window; default half the contraction bound
    std::optional<double> ref_dt;  ///< reference time step; default 1e-4

    /// Keys accepted in config files.
    static const std::set<std::string>& keys();
    static StudyConfig from_config(const KeyValueConfig& kv);
    static StudyConfig load(const std::filesystem::path& path);

    /// Throws ValidationError on a violated invariant.
    void validate() const;
    double h_for(double eps) const { return h ? *h : eps / rho; }
    HeatProblem problem() const;
    std::string echo() const;
};

/// Weak test functions, in CSV column order: 1, x, sin(pi x) (sin(pi r) on the disk).
std::array<std::function<double(const Point&)>, 3> weak_test_functions(const Domain& domain);

struct ErrorNorms {
    double sup = 0.0;
    double l1 = 0.0;
    std::vector<double> weak;
};

ErrorNorms error_norms(const Grid& grid, const GridField& u_eps, const ReferenceSolution& ref,
                       double t, std::span<const std::function<double(const Point&)>> psis);

struct StudyRow {
    double eps = 0.0;
    double sup_error = 0.0;
    double l1_error = 0.0;
    std::array<double, 3> weak{};
    double runtime_s = 0.0;

    // Diagnostics, not part of the CSV.
    bool ok = true;
    std::string failure;
    double h = 0.0;
    std::size_t nodes = 0;
    double dt = 0.0;
    double mass_initial = 0.0;
    double mass_final = 0.0;
    double u0_sup = 0.0;
    double reference_error = 0.0;
    std::optional<double> picard_gap;
};

/// Log-log slopes over the last three valid rows; absent with fewer than two.
struct FittedOrders {
    std::optional<double> sup, l1;
    std::array<std::optional<double>, 3> weak;
};

struct StudyResult {
    StudyConfig config;
    std::vector<StudyRow> rows;
    FittedOrders orders;
    std::string environment;
};

/// Least-squares slope of log(error) against log(eps) over the last three
/// pairs with positive finite error.
std::optional<double> fit_order(std::span<const double> eps, std::span<const double> errors);
FittedOrders fit_orders(const std::vector<StudyRow>& rows);

/// Everything one eps row produces, including the final field.
struct RunOutput {
    StudyRow row;
    Grid grid;
    GridField final_field;
};

/// Builds grid and collar, assembles, integrates to T and measures errors.
RunOutput run_single(const StudyConfig& cfg, double eps, const ReferenceSolution& ref);

/// Reference resolved to a quarter of the finest h.
ReferenceSolution study_reference(const StudyConfig& cfg);

StudyResult run_study(const StudyConfig& cfg);

struct PicardComparison {
    double eps = 0.0;
    double t0 = 0.0;
    double horizon = 0.0;
    double sup_gap = 0.0;      ///< max_i |picard - rk4| at the horizon
    double max_ratio = 0.0;    ///< largest successive increment ratio
    int iterations = 0;
    double contraction_bound = 0.0; ///< 1 / contraction_constant
};

/// Picard fixed point against RK4 on [0, horizon]; horizon defaults to
/// min(T, 16 t0).
PicardComparison compare_picard(const StudyConfig& cfg, double eps,
                                std::optional<double> horizon = std::nullopt);

struct OutputPaths {
    std::filesystem::path csv, plot, manifest;
    static OutputPaths from_prefix(const std::string& prefix);
};

void write_csv(const std::vector<StudyRow>& rows, const std::filesystem::path& path);
std::string format_csv(const std::vector<StudyRow>& rows);
std::vector<StudyRow> parse_csv(std::string_view text);
void emit_outputs(const StudyResult& result, const OutputPaths& paths);

std::string environment_stamp();

} // namespace nlheat
