#pragma once

// Experiment reports: a versioned JSON document per experiment and a CSV
// summary per batch.  The JSON form leaves out wall time so that repeated
// runs with the same config and seed are byte-identical; the CSV carries it.

#include "../serialize.hpp"
#include "config.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace gspine::lab {

inline constexpr int report_schema = 1;

struct ExperimentReport {
    std::string experiment;
    std::uint64_t seed = 0;
    json config;                // echo of the effective configuration
    std::optional<Dims> dims;   // set when the run used a single (r, d, n)
    std::string verdict;        // short outcome, e.g. "Full" or "TwoElement"
    json metrics = json::object();
    bool pass = false;
    double wall_time = 0.0;     // seconds; not part of the JSON form
    std::vector<std::string> artifacts;  // file names relative to the report
    std::string error;          // non-empty if the run failed before its predicate
};

enum class ReportFormat { json, csv_summary };

inline json report_json(const ExperimentReport& r)
{
    json out{{"schema", report_schema},
             {"experiment", r.experiment},
             {"seed", r.seed},
             {"config", r.config},
             {"verdict", r.verdict},
             {"metrics", r.metrics},
             {"pass", r.pass},
             {"artifacts", r.artifacts}};
    if (r.dims) out["dims"] = {{"r", r.dims->r}, {"d", r.dims->d}, {"n", r.dims->n}};
    if (!r.error.empty()) out["error"] = r.error;
    return out;
}

/// Stable JSON text of the report.  A NaN or infinity anywhere in the
/// metrics marks the report failed and throws SerializationError.
inline std::string report_text(ExperimentReport& r)
{
    try {
        return dump_stable(report_json(r));
    } catch (const SerializationError& e) {
        r.pass = false;
        r.error = e.what();
        throw;
    }
}

inline void write_csv_header(std::ostream& os)
{
    os << "experiment,seed,r,d,n,verdict,pass,wall_time_s\n";
}

inline void write_csv_row(std::ostream& os, const ExperimentReport& r)
{
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.3f", r.wall_time);
    os << r.experiment << ',' << r.seed << ',';
    if (r.dims)
        os << r.dims->r << ',' << r.dims->d << ',' << r.dims->n;
    else
        os << ",,";
    os << ',' << r.verdict << ',' << (r.pass ? "true" : "false") << ',' << wall << '\n';
}

inline void write_csv_summary(std::ostream& os, const std::vector<ExperimentReport>& reports)
{
    write_csv_header(os);
    for (const auto& r : reports) write_csv_row(os, r);
}

/// Writes `<dir>/<experiment>.json` or `<dir>/summary.csv` and returns the path.
inline std::filesystem::path emit_report(ExperimentReport& report, ReportFormat format,
                                         const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    if (format == ReportFormat::json) {
        const std::filesystem::path path = dir / (report.experiment + ".json");
        const std::string text = report_text(report);
        std::ofstream out(path, std::ios::binary);
        out << text;
        if (!out) throw std::runtime_error("emit_report: cannot write " + path.string());
        return path;
    }
    const std::filesystem::path path = dir / "summary.csv";
    std::ofstream out(path, std::ios::binary);
    write_csv_summary(out, {report});
    if (!out) throw std::runtime_error("emit_report: cannot write " + path.string());
    return path;
}

inline std::filesystem::path emit_summary(const std::vector<ExperimentReport>& reports,
                                          const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    const std::filesystem::path path = dir / "summary.csv";
    std::ofstream out(path, std::ios::binary);
    write_csv_summary(out, reports);
    if (!out) throw std::runtime_error("emit_summary: cannot write " + path.string());
    return path;
}

} // namespace gspine::lab
