#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "framelayout/constraints.hpp"
#include "framelayout/geometry.hpp"
#include "framelayout/scene.hpp"

namespace framelayout {

/// Where a relation endpoint lives in the mixed representation.
struct EntityRef {
    enum class Kind { independent, unit_anchor, unit_local };
    Kind kind = Kind::independent;
    std::size_t index = 0;  // independent index, or unit index
    std::size_t slot = 0;   // position inside the unit (0 = anchor) for unit_local
};

struct CompiledRelation {
    Relation relation;
    std::vector<EntityRef> sources;
    std::optional<EntityRef> target;  // empty for walls, corners and the scene
    std::optional<std::size_t> shared;
};

/// Scene lowered to index form for evaluation. Unit asset lists start with
/// the anchor, followed by members in declaration order.
struct SceneIndex {
    Room room;
    std::vector<std::size_t> independents;            // asset indices with pi = 0
    std::vector<std::vector<std::size_t>> unit_assets;  // per unit: anchor, members...
    std::vector<FootprintBox> shapes;                 // per asset: zero pose, half-extents
    std::vector<CompiledRelation> relations;
    std::vector<std::string> shared_names;
    std::vector<double> shared_priors;

    std::size_t unit_count() const { return unit_assets.size(); }
    std::size_t member_count() const;
};

SceneIndex index_scene(const SceneSpec& spec);

struct SharedParam {
    std::string name;
    double value = 0.0;
    double prior = 0.0;
};

/// Mixed representation: independent poses and unit poses in the room
/// frame, member poses in their unit's frame (anchors sit at the unit
/// origin and carry no local pose), plus shared relation parameters.
///
/// Flat order: independents (x, y, theta), unit poses, member local poses
/// unit by unit, then shared parameters.
struct ParamState {
    std::vector<Pose2D> independent_poses;
    std::vector<Pose2D> unit_poses;
    std::vector<std::vector<Pose2D>> member_local_poses;  // per unit, members only
    std::vector<SharedParam> shared_params;
    std::vector<double> velocity;  // one per degree of freedom

    std::size_t dof() const;
    std::vector<double> flatten() const;
    void assign(std::span<const double> flat);
};

/// Pose blocks and shared slots of a flat parameter vector, used for
/// per-group learning rates and clipping.
struct SlotLayout {
    std::vector<std::size_t> pose_blocks;  // first slot of each (x, y, theta) block
    std::vector<std::size_t> shared_slots;
    std::size_t dof = 0;
};

/// Jet-valued inputs to the objective, all differentiated w.r.t. one flat
/// parameter vector.
struct FrameInputs {
    std::vector<JetPose> independent;
    std::vector<JetPose> unit;                // P_k
    std::vector<std::vector<JetPose>> local;  // per unit: anchor (identity), members...
    std::vector<Jet> shared;
};

SlotLayout mixed_layout(const SceneIndex& index, const ParamState& state);
FrameInputs mixed_inputs(const SceneIndex& index, std::span<const double> flat);

/// Baseline parameterization: every asset pose in the room frame, in scene
/// asset order, then shared parameters. Local poses are derived as
/// anchor^-1 ⊕ member, so the objective is the same function of geometry.
SlotLayout global_layout(const SceneIndex& index, std::size_t asset_count);
FrameInputs global_inputs(const SceneIndex& index, std::span<const double> flat, std::size_t asset_count);
std::vector<double> global_from_mixed(const SceneIndex& index, const ParamState& state, std::size_t asset_count);

struct ObjectiveOptions {
    bool physics = true;  // collision and boundary terms
    bool prior = false;   // shared-parameter prior
    double prior_weight = 1.0;
    /// Adds rho to every pair's collision penalty. The plain penalty turns
    /// negative inside the overlap of boxes of unequal size, so its minimum
    /// is not at separation; with rho added the penalty is >= IoU.
    bool overlap_floor = false;
};

/// Weighted terms of the two-level objective; `total` is their sum.
struct ObjectiveTerms {
    Jet collision;
    Jet boundary;
    Jet relation;
    Jet prior;
    Jet total;
};

ObjectiveTerms evaluate_objective(const SceneIndex& index, const FrameInputs& inputs, const Weights& weights,
                                  const ObjectiveOptions& options);

/// Member-level collisions plus intra relations of unit `k`, evaluated
/// entirely in the unit frame.
Jet local_term(const SceneIndex& index, const FrameInputs& inputs, std::size_t k, const Weights& weights,
               bool physics = true, bool overlap_floor = false);

/// Boundary and collision over independents and unit bounding boxes, plus
/// inter relations.
Jet global_term(const SceneIndex& index, const FrameInputs& inputs, const Weights& weights, bool physics = true,
                bool overlap_floor = false);

/// Penalty of one relation, intra relations in the unit frame and inter
/// relations in the room frame.
Jet compiled_relation_penalty(const SceneIndex& index, const FrameInputs& inputs, const CompiledRelation& cr);

/// Unit-frame AABB enclosing every unit asset, carried by P_k.
JetBox unit_box(const SceneIndex& index, const FrameInputs& inputs, std::size_t k);

/// Box of an endpoint in the frame the relation is evaluated in.
JetBox endpoint_box(const SceneIndex& index, const FrameInputs& inputs, const EntityRef& ref);

/// Gradients are over ParamState's flat order.
LossValue aggregate_local(const SceneIndex& index, std::size_t k, const ParamState& state, const Weights& weights);
LossValue aggregate_global(const SceneIndex& index, const ParamState& state, const Weights& weights);

/// Room-frame pose of every asset, in scene asset order.
std::vector<Pose2D> global_poses(const SceneIndex& index, const ParamState& state);

}  // namespace framelayout
