// gspine_lab: run the registered experiments, sweeps and closures from the
// command line.  Exit status: 0 all pass, 1 some check failed, 2 usage or
// precondition error.

#include <gspine/closure.hpp>
#include <gspine/lab/config.hpp>
#include <gspine/lab/experiments.hpp>
#include <gspine/lab/report.hpp>
#include <gspine/lab/svg.hpp>
#include <gspine/serialize.hpp>
#include <gspine/sweep.hpp>

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace gspine;
using namespace gspine::lab;

namespace {

struct CommonFlags {
    std::optional<std::uint64_t> seed;
    std::string config;
    std::string out;
    std::string dims;
    std::optional<int> trials;
    std::optional<int> seeds;
    bool parallel = false;
};

void add_common(CLI::App* cmd, CommonFlags& f)
{
    cmd->add_option("--seed", f.seed, "64-bit seed");
    cmd->add_option("--config", f.config, "TOML or JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--dims", f.dims, "r,d,n");
    cmd->add_flag("--parallel", f.parallel, "run independent work concurrently");
}

// defaults < config file < flags
ExperimentConfig effective_config(const CommonFlags& f, const std::string& experiment = {})
{
    ExperimentConfig cfg;
    if (!f.config.empty()) cfg = load_config(f.config);
    if (!experiment.empty()) cfg.experiment = experiment;
    if (f.seed) cfg.seed = *f.seed;
    if (!f.out.empty()) cfg.output_dir = f.out;
    if (!f.dims.empty()) cfg.dims = parse_dims(f.dims);
    if (f.trials) cfg.trials = *f.trials;
    if (f.seeds) cfg.seeds = *f.seeds;
    if (f.parallel) cfg.parallel = true;
    return cfg;
}

void print_line(const ExperimentReport& r)
{
    std::printf("%-16s %-5s %-24s %8.2fs%s%s\n", r.experiment.c_str(), r.pass ? "PASS" : "FAIL", r.verdict.c_str(),
                r.wall_time, r.error.empty() ? "" : "  ", r.error.c_str());
}

json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("'" + path + "' is not valid JSON");
    return j;
}

void write_file(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

// A radial function from JSON: either {grid_size, values} or {points: [[x, y], ...]}.
RadialFunction radial_input(const json& j, int grid)
{
    if (j.contains("points")) {
        PointCloud2D cloud;
        for (const auto& p : j.at("points")) cloud.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        return radial_from_points(cloud, grid);
    }
    return radial_from_json(j);
}

int cmd_run(const std::string& name, const CommonFlags& f)
{
    const ExperimentConfig cfg = effective_config(f, name);
    const ExperimentReport r = run_experiment(cfg);
    print_line(r);
    return r.pass ? 0 : 1;
}

int cmd_verify(const CommonFlags& f)
{
    ExperimentConfig base = effective_config(f);
    if (f.out.empty() && f.config.empty()) base.output_dir = "gspine-verify";
    const auto reports = verify(base);
    bool all = true;
    for (const auto& r : reports) {
        print_line(r);
        all = all && r.pass;
    }
    std::printf("%s: %zu experiments, reports in %s\n", all ? "all passed" : "FAILURES", reports.size(),
                base.output_dir.c_str());
    return all ? 0 : 1;
}

int cmd_sweep(const CommonFlags& f, const std::string& shape, const std::string& input, int grid, double tol,
              int max_iter)
{
    ExperimentConfig cfg = effective_config(f);
    if (grid > 0) cfg.sweep.grid_size = grid;
    if (tol > 0) cfg.sweep.tol = tol;
    if (max_iter > 0) cfg.sweep.max_iter = max_iter;
    const int n = cfg.sweep.grid_size;

    RadialFunction rho0;
    if (!input.empty()) {
        rho0 = radial_input(read_json(input), n);
    } else if (shape == "spike") {
        rho0 = radial_from_points({{1.0, 0.0}}, n);
    } else if (shape == "circle") {
        rho0 = RadialFunction::circle_through_origin(1.0, n);
    } else if (shape == "constant") {
        rho0 = RadialFunction::constant(1.0, n);
    } else if (shape == "random") {
        CounterRng rng(cfg.seed, 900);
        rho0 = random_star_shaped(rng, n);
    } else {
        throw ConfigError("sweep: unknown shape '" + shape + "' (spike, circle, constant, random)");
    }

    const SweepResult res = iterate_sweep(rho0, cfg.sweep.tol, cfg.sweep.max_iter, std::max(1, cfg.sweep.max_iter));
    const fs::path dir = cfg.output_dir;
    json out{{"schema", report_schema},
             {"initial_max", rho0.max()},
             {"iterations", res.iterations},
             {"converged", res.converged},
             {"final_min", res.final.min()},
             {"final_max", res.final.max()},
             {"sup_deltas", res.sup_deltas},
             {"final", to_json_value(res.final)}};
    write_file(dir / "sweep.json", dump_stable(out));
    std::ostringstream csv;
    write_csv(csv, res.final);
    write_file(dir / "sweep-final.csv", csv.str());

    std::vector<LabelledCurve> curves{{"input", rho0}};
    RadialFunction d = rho0;
    for (int it = 1; it <= std::min(4, res.iterations); ++it) {
        d = delta_radial(d);
        curves.emplace_back("D" + std::to_string(it), d);
    }
    curves.emplace_back("after " + std::to_string(res.iterations) + " sweeps", res.final);
    render_radial_svg(curves, dir / "sweep.svg");

    std::printf("sweep: %d iterations, %s, final range %.3g (max %.17g)\n", res.iterations,
                res.converged ? "converged" : "not converged", res.final.max() - res.final.min(), res.final.max());
    return res.converged ? 0 : 1;
}

int cmd_closure(const CommonFlags& f, const std::string& input, int planes, std::optional<int> d_flag)
{
    const ExperimentConfig cfg = effective_config(f);
    CounterRng rng(cfg.seed, 1000);
    std::optional<RPlaneSet<Real>> initial;
    int d = 0;
    if (!input.empty()) {
        const json j = read_json(input);
        initial = plane_set_from_json<Real>(j, cfg.max_ambient_dim);
        d = j.value("d", 0);
    } else {
        if (!cfg.dims) throw ConfigError("closure: give --input or --dims r,d,n");
        const Dims& dims = *cfg.dims;
        if (dims.n > cfg.max_ambient_dim) throw PreconditionError("closure: n exceeds max_ambient_dim");
        std::vector<RealSubspace> start;
        for (int i = 0; i < planes; ++i) start.push_back(random_subspace<Real>(dims.n, dims.r, rng));
        initial = RPlaneSet<Real>::from_planes(start, cfg.tolerances);
        d = dims.d;
    }
    if (d_flag) d = *d_flag;
    const auto res = closure(*initial, d, cfg.closure, rng);

    json out = to_json_value(res.verdict);
    out["schema"] = report_schema;
    out["initial_size"] = initial->size();
    out["final_size"] = res.set.size();
    out["hit_size_cap"] = res.hit_size_cap;
    out["r"] = initial->r();
    out["d"] = d;
    out["n"] = initial->ambient_dim();
    const fs::path dir = cfg.output_dir;
    write_file(dir / "closure.json", dump_stable(out));
    std::printf("closure: %s, %zu planes after %d rounds, density %.3f\n", to_string(res.verdict.kind),
                res.set.size(), res.verdict.evidence.rounds, res.verdict.evidence.density);
    return res.verdict.kind == VerdictKind::unresolved ? 1 : 0;
}

int cmd_render(const std::vector<std::string>& inputs, const std::string& out, int sweeps, int grid)
{
    std::vector<LabelledCurve> curves;
    for (const auto& spec : inputs) {
        const auto eq = spec.find('=');
        const std::string label = eq == std::string::npos ? fs::path(spec).stem().string() : spec.substr(0, eq);
        const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
        curves.emplace_back(label, radial_input(read_json(path), grid));
    }
    if (curves.empty()) throw ConfigError("render: no inputs");
    RadialFunction d = curves.front().second;
    for (int it = 1; it <= sweeps; ++it) {
        d = delta_radial(d);
        curves.emplace_back(curves.front().first + ", D" + std::to_string(it), d);
    }
    render_radial_svg(curves, out);
    std::printf("render: %zu curves -> %s\n", curves.size(), out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"gspine_lab: projection saturation and diametric sweep experiments"};
    app.require_subcommand(1);

    CommonFlags run_flags, verify_flags, sweep_flags, closure_flags;

    std::string experiment;
    auto* run = app.add_subcommand("run", "run one registered experiment");
    run->add_option("experiment", experiment, "experiment name (see `list`)")->required();
    add_common(run, run_flags);
    run->add_option("--trials", run_flags.trials, "sample count override");
    run->add_option("--seeds", run_flags.seeds, "number of consecutive seeds for multi-seed experiments");

    auto* verify_cmd = app.add_subcommand("verify", "run every experiment at its default configuration");
    add_common(verify_cmd, verify_flags);

    std::string shape = "circle", sweep_input;
    int grid = 0, max_iter = 0;
    double tol = 0.0;
    auto* sweep = app.add_subcommand("sweep", "iterate the diametric sweep on one input");
    add_common(sweep, sweep_flags);
    sweep->add_option("--shape", shape, "spike, circle, constant or random");
    sweep->add_option("--input", sweep_input, "radial JSON {grid_size, values} or {points: [[x, y], ...]}");
    sweep->add_option("--grid", grid, "grid size (power of two)");
    sweep->add_option("--tol", tol, "sup-norm step tolerance");
    sweep->add_option("--max-iter", max_iter, "iteration cap");

    std::string closure_input;
    int planes = 2;
    std::optional<int> closure_d;
    auto* closure_cmd = app.add_subcommand("closure", "sampled saturation of a plane set");
    add_common(closure_cmd, closure_flags);
    closure_cmd->add_option("--input", closure_input, "plane set JSON {r, d, planes}");
    closure_cmd->add_option("--planes", planes, "number of Haar-random starting planes (with --dims)");
    closure_cmd->add_option("-d", closure_d, "override d");

    std::vector<std::string> render_inputs;
    std::string render_out = "radial.svg";
    int render_sweeps = 0;
    int render_grid = default_grid_size;
    auto* render = app.add_subcommand("render", "polar SVG of radial functions");
    render->add_option("inputs", render_inputs, "[label=]file.json ...")->required();
    render->add_option("--out", render_out, "SVG path");
    render->add_option("--sweeps", render_sweeps, "also draw this many sweeps of the first input");
    render->add_option("--grid", render_grid, "grid size for point-cloud inputs");

    auto* list = app.add_subcommand("list", "list registered experiments");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(experiment, run_flags);
        if (*verify_cmd) return cmd_verify(verify_flags);
        if (*sweep) return cmd_sweep(sweep_flags, shape, sweep_input, grid, tol, max_iter);
        if (*closure_cmd) return cmd_closure(closure_flags, closure_input, planes, closure_d);
        if (*render) return cmd_render(render_inputs, render_out, render_sweeps, render_grid);
        if (*list) {
            for (const auto& e : registry()) std::printf("%-16s %s\n", e.name.c_str(), e.claim.c_str());
            return 0;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const PreconditionError& e) {
        std::fprintf(stderr, "precondition: %s\n", e.what());
        return 2;
    } catch (const DimensionError& e) {
        std::fprintf(stderr, "dimension: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
