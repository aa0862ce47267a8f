#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "nlheat/error.hpp"
#include "nlheat/harness.hpp"

namespace nlheat {

namespace {

constexpr const char* kCsvHeader = "eps,sup_error,l1_error,weak_1,weak_x,weak_sin,runtime_s";

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

nlohmann::json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

// JSON has no NaN; failed rows carry null.
nlohmann::json finite_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

std::string plot_script(const StudyResult& result, const OutputPaths& paths) {
    std::ostringstream gp;
    gp << "# log-log error curves\n"
       << "set datafile separator ','\n"
       << "set logscale xy\n"
       << "set key left top\n"
       << "set xlabel 'eps'\n"
       << "set ylabel 'error at T'\n"
       << "set title '" << result.config.case_name << ", flux "
       << result.config.flux_kernel.to_string() << "'\n"
       << "set terminal pngcairo size 900,650\n"
       << "set output '" << paths.csv.stem().string() << ".png'\n"
       << "file = '" << paths.csv.filename().string() << "'\n"
       << "plot file every ::1 using 1:2 with linespoints title 'sup', \\\n"
       << "     file every ::1 using 1:3 with linespoints title 'L1', \\\n"
       << "     file every ::1 using 1:4 with linespoints title 'weak 1', \\\n"
       << "     file every ::1 using 1:5 with linespoints title 'weak x', \\\n"
       << "     file every ::1 using 1:6 with linespoints title 'weak sin'\n";
    return gp.str();
}

} // namespace

OutputPaths OutputPaths::from_prefix(const std::string& prefix) {
    return {prefix + ".csv", prefix + ".gp", prefix + ".json"};
}

std::string format_csv(const std::vector<StudyRow>& rows) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += sci(r.eps) + ',' + sci(r.sup_error) + ',' + sci(r.l1_error) + ',' +
               sci(r.weak[0]) + ',' + sci(r.weak[1]) + ',' + sci(r.weak[2]) + ',' +
               sci(r.runtime_s) + '\n';
    }
    return out;
}

void write_csv(const std::vector<StudyRow>& rows, const std::filesystem::path& path) {
    write_text(path, format_csv(rows));
}

std::vector<StudyRow> parse_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw ValidationError("unexpected CSV header");
    }
    std::vector<StudyRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> f;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            // strtod accepts the nan/inf spellings printf produces.
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0') {
                throw ValidationError("bad CSV field '" + cell + "'");
            }
            f.push_back(v);
        }
        if (f.size() != 7) {
            throw ValidationError("CSV row has " + std::to_string(f.size()) + " fields");
        }
        StudyRow r;
        r.eps = f[0];
        r.sup_error = f[1];
        r.l1_error = f[2];
        r.weak = {f[3], f[4], f[5]};
        r.runtime_s = f[6];
        r.ok = std::isfinite(r.sup_error);
        rows.push_back(r);
    }
    return rows;
}

void emit_outputs(const StudyResult& result, const OutputPaths& paths) {
    write_csv(result.rows, paths.csv);
    write_text(paths.plot, plot_script(result, paths));

    nlohmann::json manifest;
    manifest["config"] = result.config.echo();
    manifest["environment"] = result.environment;
    manifest["orders"] = {
        {"sup", optional_number(result.orders.sup)},
        {"l1", optional_number(result.orders.l1)},
        {"weak_1", optional_number(result.orders.weak[0])},
        {"weak_x", optional_number(result.orders.weak[1])},
        {"weak_sin", optional_number(result.orders.weak[2])},
    };
    auto& rows = manifest["rows"] = nlohmann::json::array();
    for (const auto& r : result.rows) {
        nlohmann::json j = {
            {"eps", r.eps},
            {"ok", r.ok},
            {"h", r.h},
            {"nodes", r.nodes},
            {"dt", r.dt},
            {"sup_error", finite_or_null(r.sup_error)},
            {"l1_error", finite_or_null(r.l1_error)},
            {"weak", {finite_or_null(r.weak[0]), finite_or_null(r.weak[1]),
                      finite_or_null(r.weak[2])}},
            {"mass_initial", r.mass_initial},
            {"mass_final", r.mass_final},
            {"reference_error", r.reference_error},
            {"picard_gap", optional_number(r.picard_gap)},
        };
        if (!r.ok) j["failure"] = r.failure;
        rows.push_back(std::move(j));
    }
    manifest["outputs"] = {{"csv", paths.csv.string()}, {"plot", paths.plot.string()}};
    write_text(paths.manifest, manifest.dump(2) + '\n');
}

} // namespace nlheat
