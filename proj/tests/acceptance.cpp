// Acceptance suite: one line per criterion, "PASS"/"FAIL", with the measured
// quantity and wall time.  Exit status is nonzero if any criterion fails.

#include <gspine/lab/experiments.hpp>

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace gspine;
using namespace gspine::lab;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

fs::path scratch_root()
{
    const fs::path root = fs::temp_directory_path() / ("gspine-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(root);
    return root;
}

ExperimentReport run_default(const std::string& name, std::uint64_t seed, const fs::path& root)
{
    ExperimentConfig cfg;
    cfg.experiment = name;
    cfg.seed = seed;
    cfg.output_dir = (root / name).string();
    return run_experiment(cfg);
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

int main()
{
    const fs::path root = scratch_root();
    int failures = 0;

    auto criterion = [&](int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < limit_s;
        const bool ok = o.ok && in_time;
        if (!ok) ++failures;
        std::printf("[%s] %2d %-34s %s; %.2fs (limit %.0fs)%s\n", ok ? "PASS" : "FAIL", id, title, o.detail.c_str(),
                    secs, limit_s, in_time ? "" : " TOO SLOW");
        std::fflush(stdout);
    };

    criterion(1, "cardioid oracle", 1, [&] {
        const auto r = run_default("sweep-cardioid", 7, root);
        const double err = r.metrics.at("sup_error").get<double>();
        return Outcome{err < 1e-4, "sup error " + fmt("%.3e", err)};
    });

    criterion(2, "ball fixed points", 5, [&] {
        const auto r = run_default("sweep-fixed", 7, root);
        const double moved = r.metrics.at("constant_move").get<double>();
        const double least = r.metrics.at("smallest_move").get<double>();
        const double range = r.metrics.at("smallest_input_range").get<double>();
        return Outcome{moved == 0.0 && least > 1e-3 && range >= 0.1 && r.metrics.at("random_inputs") == 100,
                       "constants move " + fmt("%g", moved) + ", least random move " + fmt("%.3e", least)};
    });

    criterion(3, "sweep convergence to max ball", 30, [&] {
        const auto r = run_default("sweep-converge", 7, root);
        const auto& inputs = r.metrics.at("inputs");
        int ok = 0;
        double worst = 0.0;
        for (const auto& in : inputs) {
            const double err = in.at("limit_error").get<double>();
            worst = std::max(worst, err);
            if (in.at("converged").get<bool>() && in.at("final_range").get<double>() < 1e-5 && err <= 1e-6) ++ok;
        }
        return Outcome{ok == static_cast<int>(inputs.size()) && inputs.size() == 22,
                       std::to_string(ok) + "/" + std::to_string(inputs.size()) + " reach the ball, worst |final - max| " +
                           fmt("%.3e", worst)};
    });

    criterion(4, "projection-locus circle", 2, [&] {
        const auto r = run_default("locus-circle", 7, root);
        const double worst = r.metrics.at("worst_distance").get<double>();
        return Outcome{worst < 1e-9 && r.metrics.at("samples") == 1000, "max distance " + fmt("%.3e", worst)};
    });

    criterion(5, "lines saturate to P(V)", 60, [&] {
        const auto r = run_default("closure-lines", 1, root);
        int full = 0, spine = 0, total = 0;
        for (const auto& p : r.metrics.at("pairs")) {
            ++total;
            full += p.at("kind") == "Full" && p.at("probes") == 1000 && p.at("density") == 1.0;
        }
        for (const auto& s : r.metrics.at("singletons")) spine += s.at("kind") == "Spine" && s.at("core_error") < 1e-6;
        return Outcome{full == 10 && spine == 10 && total == 10,
                       std::to_string(full) + "/10 pairs Full, " + std::to_string(spine) + "/10 singletons Spine"};
    });

    criterion(6, "planes: Full and Spine(line)", 300, [&] {
        const auto r = run_default("closure-planes", 1, root);
        int full = 0, spine = 0;
        double defect = 0.0;
        for (const auto& p : r.metrics.at("trivial_meet")) full += p.at("kind") == "Full";
        for (const auto& p : r.metrics.at("shared_line")) {
            const double d = p.at("member_core_defect").get<double>();
            defect = std::max(defect, d);
            spine += p.at("kind") == "Spine" && d <= 1e-8 && p.at("core_error") < 1e-6;
        }
        return Outcome{full == 3 && spine == 3, std::to_string(full) + "/3 Full, " + std::to_string(spine) +
                                                    "/3 Spine, member defect " + fmt("%.1e", defect)};
    });

    criterion(7, "lemma pairs are saturated", 30, [&] {
        const auto r = run_default("lemma-pair", 7, root);
        int ok = 0;
        long long samples = 0, escapes = 0;
        for (const auto& run : r.metrics.at("runs")) {
            samples += run.at("stability_samples").get<long long>();
            escapes += run.at("escapes").get<long long>();
            ok += run.at("kind") == "TwoElement" && run.at("final_size") == 2 && run.at("escapes") == 0 &&
                  run.at("stability_samples").get<long long>() >= 20000;
        }
        return Outcome{ok == 2, std::to_string(ok) + "/2 TwoElement, " + std::to_string(escapes) + " escapes in " +
                                    std::to_string(samples) + " projections"};
    });

    criterion(8, "asymmetry example", 10, [&] {
        const auto r = run_default("asymmetry", 7, root);
        const auto& m = r.metrics;
        const bool ok = m.at("forward_error").get<double>() < 1e-10 && m.at("sum_dim") == 4 &&
                        m.at("reverse_samples") == 10000 && m.at("reverse_hits") == 0;
        return Outcome{ok, "forward error " + fmt("%.1e", m.at("forward_error").get<double>()) + ", dim sum " +
                               std::to_string(m.at("sum_dim").get<int>()) + ", reverse hits " +
                               std::to_string(m.at("reverse_hits").get<int>())};
    });

    criterion(9, "spine saturation", 60, [&] {
        const auto r = run_default("spine-sat", 7, root);
        const auto& m = r.metrics;
        return Outcome{m.at("trials") == 500 && m.at("violations") == 0 && m.at("witnesses") > 0,
                       std::to_string(m.at("witnesses").get<int>()) + " witnesses, worst defect " +
                           fmt("%.1e", m.at("worst_defect").get<double>())};
    });

    criterion(10, "dimension-lift invariance", 5, [&] {
        const auto r = run_default("lift-check", 7, root);
        const double worst = r.metrics.at("worst_discrepancy").get<double>();
        return Outcome{worst < 1e-10 && r.metrics.at("trials") == 1000, "max discrepancy " + fmt("%.1e", worst)};
    });

    criterion(11, "prescribed intersections", 60, [&] {
        const auto r = run_default("prescribe", 7, root);
        int passed = 0, rejected = 0;
        double worst = 0.0;
        for (const auto& run : r.metrics.at("runs")) {
            passed += run.at("passed").get<int>();
            rejected += run.at("rejected").get<int>();
            worst = std::max(worst, run.at("worst_error").get<double>());
        }
        return Outcome{passed == 400 && rejected == 4, std::to_string(passed) + "/400 verified (worst " +
                                                           fmt("%.1e", worst) + "), " + std::to_string(rejected) +
                                                           "/4 infeasible targets rejected"};
    });

    criterion(12, "verify is byte-reproducible", 600, [&] {
        ExperimentConfig base;
        base.seed = 7;
        base.output_dir = (root / "verify-a").string();
        verify(base);
        base.output_dir = (root / "verify-b").string();
        verify(base);
        int files = 0, same = 0;
        for (const auto& entry : fs::directory_iterator(root / "verify-a")) {
            if (entry.path().extension() != ".json") continue;
            ++files;
            const fs::path twin = root / "verify-b" / entry.path().filename();
            same += fs::exists(twin) && slurp(entry.path()) == slurp(twin);
        }
        return Outcome{files >= 11 && same == files,
                       std::to_string(same) + "/" + std::to_string(files) + " JSON reports identical"};
    });

    std::error_code ec;
    fs::remove_all(root, ec);
    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
