#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "framelayout/constraints.hpp"
#include "framelayout/objective.hpp"
#include "framelayout/scene.hpp"

namespace framelayout {

enum class ClipMode {
    per_pose,    // each pose's (x, y) norm and |theta| separately
    group_norm,  // one norm over all positions, one over all angles, one over shared parameters
};

struct OptimizerConfig {
    std::size_t iterations = 600;  // per stage
    double lr_position = 0.5;
    double lr_rotation = 0.3;
    double momentum = 0.9;
    double clip_position = 1.0;  // per-pose (x, y) gradient 2-norm
    double clip_rotation = 0.3;  // per-pose |d/dtheta|
    double lr_shared = 0.1;
    double clip_shared = 1.0;
    ClipMode clip_mode = ClipMode::group_norm;
    double prior_weight = 1.0;
    bool overlap_floor = true;  // see ObjectiveOptions::overlap_floor
    std::uint64_t seed = 0;
};

struct TraceRow {
    std::size_t iteration = 0;  // counts across both stages
    int stage = 1;
    double total = 0.0;
    double collision = 0.0;
    double boundary = 0.0;
    double relation = 0.0;
    double prior = 0.0;
    double lr_factor = 1.0;
    double elapsed_seconds = 0.0;  // not exported, keeps the CSV reproducible
};

struct Trace {
    std::vector<TraceRow> rows;

    /// Columns: iteration, stage, total, collision, boundary, relation, prior, lr.
    std::string to_csv() const;
    std::vector<double> totals(int stage) const;
};

/// Cosine annealing factor 0.5 * (1 + cos(pi * t / T)).
double cosine_factor(std::size_t t, std::size_t total);

/// Per-pose clipping of (x, y) norm and |theta|, plus |shared| clipping.
void clip_gradients(std::span<double> grads, const SlotLayout& layout, const OptimizerConfig& config);

/// Random initial mixed state. Throws InfeasibleRoom when an asset cannot fit.
ParamState init_state(const SceneSpec& spec, const SceneIndex& index, std::uint64_t seed);
ParamState init_state(const SceneSpec& spec, std::uint64_t seed);

struct StepReport {
    ObjectiveTerms terms;  // evaluated before the update
    double lr_factor = 1.0;
};

/// One momentum-SGD update of the mixed state at iteration `t` of a stage.
/// Stage 1 optimizes relation penalties only with shared parameters frozen;
/// stage 2 adds physics, learnable shared parameters and the prior.
/// Throws DivergenceError on a non-finite loss.
StepReport step(const SceneIndex& index, ParamState& state, const OptimizerConfig& config, const Weights& weights,
                int stage, std::size_t t);

struct SolveResult {
    Layout layout;
    Trace trace;
    std::vector<Pose2D> poses;  // room frame, scene asset order
    std::vector<double> shared_values;
};

SolveResult solve(const SceneSpec& spec, const OptimizerConfig& config, const Weights& weights = {});

/// Same objective and schedule with every asset pose optimized directly in
/// the room frame. Starts from the same geometric configuration as `solve`.
SolveResult solve_global_baseline(const SceneSpec& spec, const OptimizerConfig& config, const Weights& weights = {});

/// Layout with z = h / 2 and angles normalized to (-pi, pi].
Layout make_layout(const SceneSpec& spec, std::span<const Pose2D> poses);

}  // namespace framelayout
