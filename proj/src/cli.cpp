#include "framelayout/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "framelayout/errors.hpp"
#include "framelayout/graph.hpp"
#include "framelayout/harness.hpp"
#include "framelayout/imagination.hpp"
#include "framelayout/metrics.hpp"
#include "framelayout/optimizer.hpp"
#include "framelayout/scene.hpp"

namespace framelayout {

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"] = kind;
    j["message"] = message;
    err << j.dump() << '\n';
}

// Written next to the destination and renamed into place.
void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write '" + path + "'");
        f << content;
        if (!f.flush()) throw IoError("cannot write '" + path + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) throw IoError("cannot write '" + path + "': " + ec.message());
}

SceneSpec load_scene(const std::string& path) {
    if (!std::filesystem::is_regular_file(path)) throw IoError("cannot open '" + path + "'");
    return load_scene_file(path);
}

std::uint64_t parse_seed(const std::string& text, const std::string& source) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(text, &used);
        if (used != text.size() || text.front() == '-') throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw CLI::ValidationError(source, "seed must be a non-negative integer, got '" + text + "'");
    }
}

std::uint64_t effective_seed(const std::optional<std::uint64_t>& flag, const SceneSpec& spec) {
    if (flag) return *flag;
    if (const char* env = std::getenv(kSeedEnvVar); env && *env) return parse_seed(env, kSeedEnvVar);
    return spec.seed;
}

double worst_relation(const SceneSpec& spec, const Layout& layout) {
    double worst = 0.0;
    for (const auto& c : relation_penalties(spec, layout)) worst = std::max(worst, c.penalty);
    return worst;
}

}  // namespace

int cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Frame-aware furniture layout solver", "framelayout"};
    app.require_subcommand(1);

    std::string scene_path, layout_path, out_path, svg_path, trace_path, report_path, csv_path, curves_path;
    std::optional<std::uint64_t> seed;
    std::size_t iterations = OptimizerConfig{}.iterations;
    std::size_t budget = 10;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    double threshold = 0.1;

    auto* solve_cmd = app.add_subcommand("solve", "optimize a layout for a scene");
    solve_cmd->add_option("scene", scene_path, "scene file")->required();
    solve_cmd->add_option("--seed", seed, "random seed (overrides the environment and the scene)");
    solve_cmd->add_option("--out", out_path, "layout output file (default: stdout)");
    solve_cmd->add_option("--svg", svg_path, "SVG output file");
    solve_cmd->add_option("--trace", trace_path, "loss trace CSV output file");
    solve_cmd->add_option("--iterations", iterations, "iterations per stage")->check(CLI::PositiveNumber);

    auto* validate_cmd = app.add_subcommand("validate", "imagine, detect and revise relation conflicts");
    validate_cmd->add_option("scene", scene_path, "scene file")->required();
    validate_cmd->add_option("--budget", budget, "revision iterations")->check(CLI::PositiveNumber);
    validate_cmd->add_option("--report", report_path, "report output file");
    validate_cmd->add_option("--out", out_path, "revised scene output file");

    auto* analyze_cmd = app.add_subcommand("analyze", "frame-switch cost report of the relation graph");
    analyze_cmd->add_option("scene", scene_path, "scene file")->required();
    analyze_cmd->add_option("--csv", csv_path, "CSV output file");

    auto* eval_cmd = app.add_subcommand("eval", "collision and out-of-room metrics of a layout");
    eval_cmd->add_option("scene", scene_path, "scene file")->required();
    eval_cmd->add_option("layout", layout_path, "layout file")->required();

    auto* bench_cmd = app.add_subcommand("bench", "convergence of the mixed and the global parameterization");
    bench_cmd->add_option("scene", scene_path, "scene file")->required();
    bench_cmd->add_option("--seeds", seeds, "comma-separated seeds")->delimiter(',');
    bench_cmd->add_option("--threshold", threshold, "normalized loss threshold in (0, 1)")
        ->check(CLI::Range(0.0, 1.0));
    bench_cmd->add_option("--iterations", iterations, "iterations per stage")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--curves", curves_path, "EMA-smoothed curves CSV output file");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        report_error(err, "usage", e.what());
        err << app.help();
        return kExitUsage;
    }

    try {
        const SceneSpec spec = load_scene(scene_path);

        if (*solve_cmd) {
            OptimizerConfig config;
            config.iterations = iterations;
            config.seed = effective_seed(seed, spec);
            const SolveResult result = solve(spec, config);
            const std::string layout_text = serialize_layout(result.layout);
            if (!out_path.empty()) {
                write_file(out_path, layout_text);
            }
            if (!svg_path.empty()) write_file(svg_path, render_svg(spec, result.layout));
            if (!trace_path.empty()) write_file(trace_path, result.trace.to_csv());
            const PhysicalReport physical = eval_physical(spec, result.layout);
            nlohmann::ordered_json summary;
            summary["seed"] = config.seed;
            summary["cr_percent"] = physical.cr_percent;
            summary["or_percent"] = physical.or_percent;
            summary["max_relation_penalty"] = worst_relation(spec, result.layout);
            summary["final_loss"] = result.trace.rows.empty() ? 0.0 : result.trace.rows.back().total;
            if (out_path.empty()) out << layout_text;
            out << summary.dump() << '\n';
            return kExitOk;
        }
        if (*validate_cmd) {
            const RevisionResult result = imagine_and_revise(spec, baseline_reviser, budget);
            const std::string report = result.report.to_json();
            if (!report_path.empty()) write_file(report_path, report);
            if (!out_path.empty()) write_file(out_path, serialize_scene(result.spec));
            out << report;
            return result.report.converged ? kExitOk : kExitInvalid;
        }
        if (*analyze_cmd) {
            const RelationGraph g = build_graph(spec);
            const CostReport report = decomposition_savings(g, unit_groups(spec, g));
            if (!csv_path.empty()) write_file(csv_path, report.to_csv());
            out << report.to_json();
            return kExitOk;
        }
        if (*eval_cmd) {
            if (!std::filesystem::is_regular_file(layout_path)) throw IoError("cannot open '" + layout_path + "'");
            out << physical_report_json(eval_physical(spec, load_layout_file(layout_path)));
            return kExitOk;
        }
        if (*bench_cmd) {
            OptimizerConfig config;
            config.iterations = iterations;
            const std::string id = std::filesystem::path(scene_path).stem().stem().string();
            const auto results = convergence_benchmark(spec, id, seeds, threshold, config);
            if (!curves_path.empty()) write_file(curves_path, benchmark_curves_csv(results));
            out << benchmark_json(results);
            const bool any_failed = std::any_of(results.begin(), results.end(), [](const auto& r) { return r.failed; });
            return any_failed ? kExitInfeasible : kExitOk;
        }
    } catch (const IoError& e) {
        report_error(err, "io", e.what());
        return kExitUsage;
    } catch (const SyntaxError& e) {
        report_error(err, "syntax", e.what());
        return kExitUsage;
    } catch (const CLI::ValidationError& e) {
        report_error(err, "usage", e.what());
        return kExitUsage;
    } catch (const SemanticError& e) {
        report_error(err, "semantic", e.what());
        return kExitInvalid;
    } catch (const RevisionError& e) {
        report_error(err, "revision", e.what());
        return kExitInvalid;
    } catch (const InfeasibleRoom& e) {
        report_error(err, "infeasible", e.what());
        return kExitInfeasible;
    } catch (const DivergenceError& e) {
        report_error(err, "diverged", e.what());
        return kExitInfeasible;
    } catch (const std::exception& e) {
        report_error(err, "internal", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace framelayout
