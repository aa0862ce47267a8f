// Command-line front end: kernel checks, single runs, eps sweeps and the
// Picard-versus-stepper comparison.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "nlheat/error.hpp"
#include "nlheat/harness.hpp"

using namespace nlheat;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

// Tolerances for accepting a kernel profile.
constexpr double kMassTol = 1e-6;
constexpr double kSymmetryTol = 1e-12;

int cmd_verify_kernel(const std::string& spec, int dim) {
    const auto profile = KernelProfile::from_spec(spec, dim);
    const auto report = verify_kernel(profile);
    const auto c = compute_constants(profile);
    std::printf("kernel        %s (N=%d, d=%g)\n", profile.name().c_str(), dim,
                profile.support_radius());
    std::printf("mass error    %.3e\n", report.unit_mass_error);
    std::printf("min on supp   %.6e\n", report.min_on_support);
    std::printf("symmetry      %.3e\n", report.symmetry_error);
    std::printf("C1            %.15g\n", c.c1);
    std::printf("C2            %.15g\n", c.c2);
    if (report.unit_mass_error > kMassTol || report.min_on_support < 0.0 ||
        report.symmetry_error > kSymmetryTol) {
        std::fprintf(stderr, "kernel rejected\n");
        return kExitValidation;
    }
    return 0;
}

void print_row(const StudyRow& r) {
    if (!r.ok) {
        std::printf("%-10.4g FAILED: %s\n", r.eps, r.failure.c_str());
        return;
    }
    std::printf("%-10.4g %-12.4e %-12.4e %-12.4e %-12.4e %-12.4e %.2fs\n", r.eps, r.sup_error,
                r.l1_error, r.weak[0], r.weak[1], r.weak[2], r.runtime_s);
}

void print_header() {
    std::printf("%-10s %-12s %-12s %-12s %-12s %-12s %s\n", "eps", "sup", "l1", "weak_1",
                "weak_x", "weak_sin", "time");
}

int cmd_run(const std::string& path) {
    auto cfg = StudyConfig::load(path);
    const double eps = cfg.eps_list.front();
    cfg.eps_list = {eps};
    const auto ref = study_reference(cfg);
    const auto out = run_single(cfg, eps, ref);
    print_header();
    print_row(out.row);
    std::printf("nodes %zu, dt %.4e, mass %.12e -> %.12e\n", out.row.nodes, out.row.dt,
                out.row.mass_initial, out.row.mass_final);
    if (out.row.picard_gap) {
        std::printf("picard gap %.3e\n", *out.row.picard_gap);
    }

    const std::string field_path = cfg.output + "_field.csv";
    std::ofstream f(field_path);
    if (!f) {
        throw std::runtime_error("cannot open " + field_path + " for writing");
    }
    f << "x,y,u,reference\n";
    char buf[128];
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
        const auto& x = out.grid.nodes[i];
        std::snprintf(buf, sizeof buf, "%.6e,%.6e,%.9e,%.9e\n", x.x, x.y, out.final_field[i],
                      ref(x, cfg.T));
        f << buf;
    }
    std::printf("wrote %s\n", field_path.c_str());
    return 0;
}

int cmd_study(const std::string& path) {
    const auto cfg = StudyConfig::load(path);
    const auto result = run_study(cfg);
    print_header();
    for (const auto& r : result.rows) {
        print_row(r);
    }
    auto order = [](const std::optional<double>& p) {
        return p ? std::to_string(*p) : std::string("absent");
    };
    std::printf("orders: sup %s, l1 %s, weak_1 %s, weak_x %s, weak_sin %s\n",
                order(result.orders.sup).c_str(), order(result.orders.l1).c_str(),
                order(result.orders.weak[0]).c_str(), order(result.orders.weak[1]).c_str(),
                order(result.orders.weak[2]).c_str());
    const auto paths = OutputPaths::from_prefix(cfg.output);
    emit_outputs(result, paths);
    std::printf("wrote %s, %s, %s\n", paths.csv.string().c_str(), paths.plot.string().c_str(),
                paths.manifest.string().c_str());
    return 0;
}

int cmd_compare(const std::string& path) {
    const auto cfg = StudyConfig::load(path);
    std::printf("%-10s %-12s %-12s %-12s %-8s %s\n", "eps", "t0", "horizon", "sup gap", "iters",
                "max ratio");
    for (double eps : cfg.eps_list) {
        const auto c = compare_picard(cfg, eps);
        std::printf("%-10.4g %-12.4e %-12.4e %-12.4e %-8d %.4f\n", c.eps, c.t0, c.horizon,
                    c.sup_gap, c.iterations, c.max_ratio);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlocal Neumann diffusion and its heat-equation limit"};
    app.require_subcommand(1);

    std::string kernel;
    int dim = 1;
    auto* verify = app.add_subcommand("verify-kernel", "check a kernel profile and print C1, C2");
    verify->add_option("kernel", kernel, "quartic | cosine | custom:<path>")->required();
    verify->add_option("--dim", dim, "space dimension")->check(CLI::Range(1, 2));

    std::string config;
    auto* run = app.add_subcommand("run", "integrate one eps and write the final field");
    run->add_option("config", config)->required();
    auto* study = app.add_subcommand("study", "eps sweep with CSV, plot script and manifest");
    study->add_option("config", config)->required();
    auto* compare = app.add_subcommand("compare", "Picard iteration against RK4");
    compare->add_option("config", config)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*verify) return cmd_verify_kernel(kernel, dim);
        if (*run) return cmd_run(config);
        if (*study) return cmd_study(config);
        if (*compare) return cmd_compare(config);
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kExitValidation;
    } catch (const ContractError& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitRuntime;
}
