#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "framelayout/optimizer.hpp"
#include "framelayout/scene.hpp"

namespace framelayout {

/// Top-down SVG 1.1 view. Footprints are drawn in room metres inside a
/// flipped group so their points match geometry corners directly.
std::string render_svg(const SceneSpec& spec, const Layout& layout);

inline constexpr double kEmaAlpha = 0.85;

/// s_0 = x_0, s_t = alpha * s_{t-1} + (1 - alpha) * x_t.
std::vector<double> ema(const std::vector<double>& values, double alpha = kEmaAlpha);

struct BenchmarkResult {
    std::string scene;
    std::uint64_t seed = 0;
    double threshold = 0.0;
    std::optional<std::size_t> reparam_iterations;  // first iteration with loss_t / loss_0 <= threshold
    std::optional<std::size_t> baseline_iterations;
    std::optional<double> speedup;                  // baseline / reparam
    bool failed = false;
    std::string error;
    std::vector<double> reparam_curve;   // normalized loss, raw
    std::vector<double> baseline_curve;
};

/// Runs `solve` and `solve_global_baseline` per seed with the same config.
/// Throws std::invalid_argument unless 0 < threshold < 1.
std::vector<BenchmarkResult> convergence_benchmark(const SceneSpec& spec, const std::string& scene_id,
                                                   const std::vector<std::uint64_t>& seeds, double threshold,
                                                   OptimizerConfig config = {});

std::string benchmark_json(const std::vector<BenchmarkResult>& results);

/// EMA-smoothed normalized curves: iteration, seed, reparam, baseline.
std::string benchmark_curves_csv(const std::vector<BenchmarkResult>& results, double alpha = kEmaAlpha);

}  // namespace framelayout
