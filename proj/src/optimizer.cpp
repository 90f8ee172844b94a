#include "framelayout/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "framelayout/errors.hpp"

namespace framelayout {

namespace {

using Evaluator = std::function<ObjectiveTerms(std::span<const double>, const ObjectiveOptions&)>;

struct Problem {
    SlotLayout layout;
    Evaluator evaluate;
    std::vector<std::size_t> nonnegative_slots;  // shared distances and gaps
};

ObjectiveOptions stage_options(int stage, const OptimizerConfig& config) {
    ObjectiveOptions o;
    o.physics = stage == 2;
    o.prior = stage == 2;
    o.prior_weight = config.prior_weight;
    o.overlap_floor = config.overlap_floor;
    return o;
}

std::vector<std::size_t> nonnegative_shared(const SceneIndex& index, const SlotLayout& layout) {
    std::vector<std::size_t> slots;
    for (std::size_t s = 0; s < index.shared_names.size(); ++s) {
        for (const auto& cr : index.relations) {
            if (cr.shared != s) continue;
            if (cr.relation.kind == RelationKind::distance || cr.relation.kind == RelationKind::gap) {
                slots.push_back(layout.shared_slots[s]);
            }
            break;
        }
    }
    return slots;
}

StepReport update(const Problem& problem, std::vector<double>& flat, std::vector<double>& velocity,
                  const OptimizerConfig& config, int stage, std::size_t t) {
    const ObjectiveOptions options = stage_options(stage, config);
    StepReport report{problem.evaluate(flat, options), cosine_factor(t, config.iterations)};
    const double loss = report.terms.total.value();
    if (!std::isfinite(loss)) throw DivergenceError(t, "non-finite objective");

    std::vector<double> grads(flat.size());
    for (std::size_t i = 0; i < flat.size(); ++i) grads[i] = report.terms.total.partial(i);
    if (stage == 1) {
        for (std::size_t s : problem.layout.shared_slots) grads[s] = 0.0;
    }
    clip_gradients(grads, problem.layout, config);
    for (double g : grads) {
        if (!std::isfinite(g)) throw DivergenceError(t, "non-finite gradient");
    }

    std::vector<double> lr(flat.size(), 0.0);
    for (std::size_t b : problem.layout.pose_blocks) {
        lr[b] = lr[b + 1] = config.lr_position;
        lr[b + 2] = config.lr_rotation;
    }
    for (std::size_t s : problem.layout.shared_slots) lr[s] = stage == 2 ? config.lr_shared : 0.0;

    for (std::size_t i = 0; i < flat.size(); ++i) {
        velocity[i] = config.momentum * velocity[i] + grads[i];
        flat[i] -= report.lr_factor * lr[i] * velocity[i];
    }
    for (std::size_t s : problem.nonnegative_slots) flat[s] = std::max(flat[s], 0.0);
    return report;
}

void run_stages(const Problem& problem, std::vector<double>& flat, const OptimizerConfig& config, Trace& trace) {
    const auto start = std::chrono::steady_clock::now();
    std::size_t iteration = 0;
    for (int stage = 1; stage <= 2; ++stage) {
        std::vector<double> velocity(flat.size(), 0.0);
        for (std::size_t t = 0; t < config.iterations; ++t, ++iteration) {
            const StepReport r = update(problem, flat, velocity, config, stage, t);
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            trace.rows.push_back({iteration, stage, r.terms.total.value(), r.terms.collision.value(),
                                  r.terms.boundary.value(), r.terms.relation.value(), r.terms.prior.value(),
                                  r.lr_factor, elapsed.count()});
        }
    }
}

}  // namespace

std::string Trace::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "iteration,stage,total,collision,boundary,relation,prior,lr\n";
    for (const auto& r : rows) {
        out << r.iteration << ',' << r.stage << ',' << r.total << ',' << r.collision << ',' << r.boundary << ','
            << r.relation << ',' << r.prior << ',' << r.lr_factor << '\n';
    }
    return out.str();
}

std::vector<double> Trace::totals(int stage) const {
    std::vector<double> out;
    for (const auto& r : rows) {
        if (r.stage == stage) out.push_back(r.total);
    }
    return out;
}

double cosine_factor(std::size_t t, std::size_t total) {
    if (total == 0) return 0.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(t) / static_cast<double>(total)));
}

void clip_gradients(std::span<double> grads, const SlotLayout& layout, const OptimizerConfig& config) {
    if (config.clip_mode == ClipMode::group_norm) {
        auto clip_group = [&](const std::vector<std::size_t>& slots, double limit) {
            double sq = 0.0;
            for (std::size_t s : slots) sq += grads[s] * grads[s];
            const double norm = std::sqrt(sq);
            if (norm <= limit) return;
            for (std::size_t s : slots) grads[s] *= limit / norm;
        };
        std::vector<std::size_t> positions, angles;
        for (std::size_t b : layout.pose_blocks) {
            positions.push_back(b);
            positions.push_back(b + 1);
            angles.push_back(b + 2);
        }
        clip_group(positions, config.clip_position);
        clip_group(angles, config.clip_rotation);
        clip_group(layout.shared_slots, config.clip_shared);
        return;
    }
    for (std::size_t b : layout.pose_blocks) {
        const double norm = std::hypot(grads[b], grads[b + 1]);
        if (norm > config.clip_position) {
            const double s = config.clip_position / norm;
            grads[b] *= s;
            grads[b + 1] *= s;
        }
        grads[b + 2] = std::clamp(grads[b + 2], -config.clip_rotation, config.clip_rotation);
    }
    for (std::size_t s : layout.shared_slots) grads[s] = std::clamp(grads[s], -config.clip_shared, config.clip_shared);
}

ParamState init_state(const SceneSpec& spec, const SceneIndex& index, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto room_pose = [&](std::size_t asset) {
        const FootprintBox& shape = index.shapes[asset];
        const double margin = std::max(shape.half_l, shape.half_w);
        if (2.0 * margin > spec.room.length || 2.0 * margin > spec.room.width) {
            throw InfeasibleRoom("asset '" + spec.assets[asset].id + "' does not fit in the room");
        }
        const double x = uniform(margin, spec.room.length - margin);
        const double y = uniform(margin, spec.room.width - margin);
        return Pose2D{x, y, uniform(-std::numbers::pi, std::numbers::pi)};
    };

    ParamState state;
    for (std::size_t a : index.independents) state.independent_poses.push_back(room_pose(a));
    for (std::size_t k = 0; k < index.unit_count(); ++k) {
        const auto& assets = index.unit_assets[k];
        state.unit_poses.push_back(room_pose(assets[0]));
        auto& members = state.member_local_poses.emplace_back();
        for (std::size_t m = 1; m < assets.size(); ++m) {
            const double x = uniform(-1.0, 1.0);
            const double y = uniform(-1.0, 1.0);
            members.push_back({x, y, uniform(-std::numbers::pi, std::numbers::pi)});
        }
    }
    for (std::size_t s = 0; s < index.shared_names.size(); ++s) {
        state.shared_params.push_back({index.shared_names[s], index.shared_priors[s], index.shared_priors[s]});
    }
    state.velocity.assign(state.dof(), 0.0);
    return state;
}

ParamState init_state(const SceneSpec& spec, std::uint64_t seed) { return init_state(spec, index_scene(spec), seed); }

StepReport step(const SceneIndex& index, ParamState& state, const OptimizerConfig& config, const Weights& weights,
                int stage, std::size_t t) {
    const SlotLayout layout = mixed_layout(index, state);
    Problem problem{layout,
                    [&](std::span<const double> flat, const ObjectiveOptions& o) {
                        return evaluate_objective(index, mixed_inputs(index, flat), weights, o);
                    },
                    nonnegative_shared(index, layout)};
    std::vector<double> flat = state.flatten();
    if (state.velocity.size() != flat.size()) state.velocity.assign(flat.size(), 0.0);
    StepReport report = update(problem, flat, state.velocity, config, stage, t);
    state.assign(flat);
    return report;
}

Layout make_layout(const SceneSpec& spec, std::span<const Pose2D> poses) {
    Layout layout;
    for (std::size_t a = 0; a < spec.assets.size(); ++a) {
        layout.poses[spec.assets[a].id] = {poses[a].x, poses[a].y, 0.5 * spec.assets[a].h,
                                           normalize_angle(poses[a].theta)};
    }
    return layout;
}

SolveResult solve(const SceneSpec& spec, const OptimizerConfig& config, const Weights& weights) {
    const SceneIndex index = index_scene(spec);
    ParamState state = init_state(spec, index, config.seed);
    const SlotLayout layout = mixed_layout(index, state);
    const Problem problem{layout,
                          [&](std::span<const double> flat, const ObjectiveOptions& o) {
                              return evaluate_objective(index, mixed_inputs(index, flat), weights, o);
                          },
                          nonnegative_shared(index, layout)};

    SolveResult result;
    std::vector<double> flat = state.flatten();
    run_stages(problem, flat, config, result.trace);
    state.assign(flat);
    result.poses = global_poses(index, state);
    for (const auto& s : state.shared_params) result.shared_values.push_back(s.value);
    result.layout = make_layout(spec, result.poses);
    return result;
}

SolveResult solve_global_baseline(const SceneSpec& spec, const OptimizerConfig& config, const Weights& weights) {
    const SceneIndex index = index_scene(spec);
    const std::size_t n = spec.assets.size();
    const ParamState initial = init_state(spec, index, config.seed);
    const SlotLayout layout = global_layout(index, n);
    const Problem problem{layout,
                          [&](std::span<const double> flat, const ObjectiveOptions& o) {
                              return evaluate_objective(index, global_inputs(index, flat, n), weights, o);
                          },
                          nonnegative_shared(index, layout)};

    SolveResult result;
    std::vector<double> flat = global_from_mixed(index, initial, n);
    run_stages(problem, flat, config, result.trace);
    for (std::size_t a = 0; a < n; ++a) result.poses.push_back({flat[3 * a], flat[3 * a + 1], flat[3 * a + 2]});
    for (std::size_t s : layout.shared_slots) result.shared_values.push_back(flat[s]);
    result.layout = make_layout(spec, result.poses);
    return result;
}

}  // namespace framelayout
