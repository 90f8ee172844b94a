#include "framelayout/objective.hpp"

#include <map>
#include <stdexcept>

namespace framelayout {

namespace {

JetPose variable_pose(std::span<const double> flat, std::size_t first) {
    const std::size_t dim = flat.size();
    return {Jet::variable(flat[first], first, dim), Jet::variable(flat[first + 1], first + 1, dim),
            Jet::variable(flat[first + 2], first + 2, dim)};
}

JetBox with_shape(const JetPose& pose, const FootprintBox& shape) {
    return {pose, Jet(shape.half_l), Jet(shape.half_w)};
}

LossValue to_loss(const Jet& j, std::size_t dim) {
    LossValue out{j.value(), std::vector<double>(dim, 0.0)};
    for (std::size_t i = 0; i < dim; ++i) out.grads[i] = j.partial(i);
    return out;
}

Jet pair_collision(const JetBox& a, const JetBox& b, bool overlap_floor) {
    Jet c = penalty::collision(a, b);
    if (overlap_floor) c += penalty::overlap_ratio(a, b);
    return c;
}

Jet member_collisions(const SceneIndex& index, const FrameInputs& inputs, std::size_t k, bool overlap_floor) {
    const auto& assets = index.unit_assets[k];
    std::vector<JetBox> boxes;
    for (std::size_t j = 0; j < assets.size(); ++j) boxes.push_back(with_shape(inputs.local[k][j], index.shapes[assets[j]]));
    Jet total(0.0);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        for (std::size_t j = i + 1; j < boxes.size(); ++j) total += pair_collision(boxes[i], boxes[j], overlap_floor);
    }
    return total;
}

std::optional<std::size_t> owning_unit(const CompiledRelation& cr) {
    if (cr.relation.scope != Scope::intra) return std::nullopt;
    return cr.sources.front().index;
}

}  // namespace

Jet compiled_relation_penalty(const SceneIndex& index, const FrameInputs& inputs, const CompiledRelation& cr) {
    const Relation& rel = cr.relation;
    auto box_of = [&](const std::string& id) -> JetBox {
        if (cr.target && id == rel.target) return endpoint_box(index, inputs, *cr.target);
        for (std::size_t i = 0; i < rel.sources.size(); ++i) {
            if (rel.sources[i] == id) return endpoint_box(index, inputs, cr.sources[i]);
        }
        throw std::logic_error("relation endpoint '" + id + "' not compiled");
    };
    const Jet metric = cr.shared ? inputs.shared[*cr.shared] : Jet(rel.metric);
    return relation_penalty(rel, box_of, metric, index.room);
}

std::size_t SceneIndex::member_count() const {
    std::size_t n = 0;
    for (const auto& u : unit_assets) n += u.size() - 1;
    return n;
}

SceneIndex index_scene(const SceneSpec& spec) {
    SceneIndex index;
    index.room = spec.room;
    index.unit_assets.resize(spec.units.size());

    std::map<std::string, EntityRef> global_ref;  // entity id -> room-frame endpoint
    std::map<std::string, EntityRef> local_ref;   // asset id -> unit-frame endpoint
    for (std::size_t k = 0; k < spec.units.size(); ++k) {
        const Unit& u = spec.units[k];
        index.unit_assets[k].push_back(*spec.asset_index(u.anchor));
        local_ref[u.anchor] = {EntityRef::Kind::unit_local, k, 0};
        for (std::size_t m = 0; m < u.members.size(); ++m) {
            index.unit_assets[k].push_back(*spec.asset_index(u.members[m]));
            local_ref[u.members[m]] = {EntityRef::Kind::unit_local, k, m + 1};
        }
        global_ref[u.id] = {EntityRef::Kind::unit_anchor, k, 0};
        global_ref[u.anchor] = {EntityRef::Kind::unit_anchor, k, 0};
    }
    for (std::size_t a = 0; a < spec.assets.size(); ++a) {
        const Asset& asset = spec.assets[a];
        index.shapes.push_back({{}, 0.5 * asset.l, 0.5 * asset.w});
        if (assignment(spec, asset.id) == 0) {
            global_ref[asset.id] = {EntityRef::Kind::independent, index.independents.size(), 0};
            index.independents.push_back(a);
        }
    }

    std::map<std::string, std::size_t> shared_slot;
    for (const Relation& rel : spec.relations) {
        CompiledRelation cr{rel, {}, std::nullopt, std::nullopt};
        const auto& refs = rel.scope == Scope::intra ? local_ref : global_ref;
        auto lookup = [&](const std::string& id) {
            auto it = refs.find(id);
            if (it == refs.end()) throw std::logic_error("unresolved relation endpoint '" + id + "'");
            return it->second;
        };
        for (const auto& id : rel.sources) cr.sources.push_back(lookup(id));
        if (!is_scene_anchored(rel.kind)) cr.target = lookup(rel.target);
        if (rel.shared_param) {
            auto [it, inserted] = shared_slot.emplace(*rel.shared_param, index.shared_names.size());
            if (inserted) {
                index.shared_names.push_back(*rel.shared_param);
                index.shared_priors.push_back(rel.metric);
            }
            cr.shared = it->second;
        }
        index.relations.push_back(std::move(cr));
    }
    return index;
}

std::size_t ParamState::dof() const {
    std::size_t members = 0;
    for (const auto& m : member_local_poses) members += m.size();
    return 3 * (independent_poses.size() + unit_poses.size() + members) + shared_params.size();
}

std::vector<double> ParamState::flatten() const {
    std::vector<double> flat;
    flat.reserve(dof());
    auto push = [&](const Pose2D& p) {
        flat.push_back(p.x);
        flat.push_back(p.y);
        flat.push_back(p.theta);
    };
    for (const auto& p : independent_poses) push(p);
    for (const auto& p : unit_poses) push(p);
    for (const auto& unit : member_local_poses) {
        for (const auto& p : unit) push(p);
    }
    for (const auto& s : shared_params) flat.push_back(s.value);
    return flat;
}

void ParamState::assign(std::span<const double> flat) {
    if (flat.size() != dof()) throw std::invalid_argument("parameter vector size mismatch");
    std::size_t i = 0;
    auto pull = [&](Pose2D& p) {
        p = {flat[i], flat[i + 1], flat[i + 2]};
        i += 3;
    };
    for (auto& p : independent_poses) pull(p);
    for (auto& p : unit_poses) pull(p);
    for (auto& unit : member_local_poses) {
        for (auto& p : unit) pull(p);
    }
    for (auto& s : shared_params) s.value = flat[i++];
}

SlotLayout mixed_layout(const SceneIndex& index, const ParamState& state) {
    SlotLayout layout;
    const std::size_t blocks = index.independents.size() + index.unit_count() + index.member_count();
    for (std::size_t b = 0; b < blocks; ++b) layout.pose_blocks.push_back(3 * b);
    for (std::size_t s = 0; s < state.shared_params.size(); ++s) layout.shared_slots.push_back(3 * blocks + s);
    layout.dof = 3 * blocks + state.shared_params.size();
    return layout;
}

FrameInputs mixed_inputs(const SceneIndex& index, std::span<const double> flat) {
    FrameInputs in;
    std::size_t slot = 0;
    for (std::size_t i = 0; i < index.independents.size(); ++i, slot += 3) in.independent.push_back(variable_pose(flat, slot));
    for (std::size_t k = 0; k < index.unit_count(); ++k, slot += 3) in.unit.push_back(variable_pose(flat, slot));
    in.local.resize(index.unit_count());
    for (std::size_t k = 0; k < index.unit_count(); ++k) {
        in.local[k].push_back(JetPose{});
        for (std::size_t m = 1; m < index.unit_assets[k].size(); ++m, slot += 3) {
            in.local[k].push_back(variable_pose(flat, slot));
        }
    }
    for (; slot < flat.size(); ++slot) in.shared.push_back(Jet::variable(flat[slot], slot, flat.size()));
    return in;
}

SlotLayout global_layout(const SceneIndex& index, std::size_t asset_count) {
    SlotLayout layout;
    for (std::size_t a = 0; a < asset_count; ++a) layout.pose_blocks.push_back(3 * a);
    for (std::size_t s = 0; s < index.shared_names.size(); ++s) layout.shared_slots.push_back(3 * asset_count + s);
    layout.dof = 3 * asset_count + index.shared_names.size();
    return layout;
}

FrameInputs global_inputs(const SceneIndex& index, std::span<const double> flat, std::size_t asset_count) {
    FrameInputs in;
    for (std::size_t a : index.independents) in.independent.push_back(variable_pose(flat, 3 * a));
    in.local.resize(index.unit_count());
    for (std::size_t k = 0; k < index.unit_count(); ++k) {
        const auto& assets = index.unit_assets[k];
        const JetPose anchor = variable_pose(flat, 3 * assets[0]);
        const JetPose to_unit = invert(anchor);
        in.unit.push_back(anchor);
        in.local[k].push_back(JetPose{});
        for (std::size_t m = 1; m < assets.size(); ++m) {
            in.local[k].push_back(compose(to_unit, variable_pose(flat, 3 * assets[m])));
        }
    }
    for (std::size_t s = 3 * asset_count; s < flat.size(); ++s) {
        in.shared.push_back(Jet::variable(flat[s], s, flat.size()));
    }
    return in;
}

std::vector<double> global_from_mixed(const SceneIndex& index, const ParamState& state, std::size_t asset_count) {
    const std::vector<Pose2D> poses = global_poses(index, state);
    if (poses.size() != asset_count) throw std::invalid_argument("asset count mismatch");
    std::vector<double> flat;
    for (const auto& p : poses) {
        flat.push_back(p.x);
        flat.push_back(p.y);
        flat.push_back(p.theta);
    }
    for (const auto& s : state.shared_params) flat.push_back(s.value);
    return flat;
}

JetBox endpoint_box(const SceneIndex& index, const FrameInputs& inputs, const EntityRef& ref) {
    switch (ref.kind) {
        case EntityRef::Kind::independent:
            return with_shape(inputs.independent[ref.index], index.shapes[index.independents[ref.index]]);
        case EntityRef::Kind::unit_anchor:
            return with_shape(inputs.unit[ref.index], index.shapes[index.unit_assets[ref.index][0]]);
        case EntityRef::Kind::unit_local:
            return with_shape(inputs.local[ref.index][ref.slot], index.shapes[index.unit_assets[ref.index][ref.slot]]);
    }
    throw std::logic_error("bad entity reference");
}

JetBox unit_box(const SceneIndex& index, const FrameInputs& inputs, std::size_t k) {
    const auto& assets = index.unit_assets[k];
    Jet lo_x, hi_x, lo_y, hi_y;
    for (std::size_t j = 0; j < assets.size(); ++j) {
        const JetBox b = with_shape(inputs.local[k][j], index.shapes[assets[j]]);
        const auto e = footprint_extents(b);
        const Jet x0 = b.pose.x - e.x * 0.5;
        const Jet x1 = b.pose.x + e.x * 0.5;
        const Jet y0 = b.pose.y - e.y * 0.5;
        const Jet y1 = b.pose.y + e.y * 0.5;
        if (j == 0) {
            lo_x = x0, hi_x = x1, lo_y = y0, hi_y = y1;
        } else {
            lo_x = min(lo_x, x0);
            hi_x = max(hi_x, x1);
            lo_y = min(lo_y, y0);
            hi_y = max(hi_y, y1);
        }
    }
    const JetPose centre{(lo_x + hi_x) * 0.5, (lo_y + hi_y) * 0.5, Jet(0.0)};
    return {compose(inputs.unit[k], centre), (hi_x - lo_x) * 0.5, (hi_y - lo_y) * 0.5};
}

Jet local_term(const SceneIndex& index, const FrameInputs& inputs, std::size_t k, const Weights& weights,
               bool physics, bool overlap_floor) {
    const Jet collisions = physics ? member_collisions(index, inputs, k, overlap_floor) : Jet(0.0);
    Jet relations(0.0);
    for (const auto& cr : index.relations) {
        if (owning_unit(cr) == k) relations += compiled_relation_penalty(index, inputs, cr);
    }
    return weights.lambda_col * collisions + weights.lambda_rel * relations;
}

namespace {

struct GlobalParts {
    Jet boundary;
    Jet collision;
    Jet relation;
};

std::vector<JetBox> global_entities(const SceneIndex& index, const FrameInputs& inputs) {
    std::vector<JetBox> boxes;
    for (std::size_t i = 0; i < index.independents.size(); ++i) {
        boxes.push_back(endpoint_box(index, inputs, {EntityRef::Kind::independent, i, 0}));
    }
    for (std::size_t k = 0; k < index.unit_count(); ++k) boxes.push_back(unit_box(index, inputs, k));
    return boxes;
}

GlobalParts global_parts(const SceneIndex& index, const FrameInputs& inputs, bool physics, bool overlap_floor) {
    GlobalParts parts{Jet(0.0), Jet(0.0), Jet(0.0)};
    if (physics) {
        const std::vector<JetBox> boxes = global_entities(index, inputs);
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            parts.boundary += penalty::boundary(boxes[i], index.room);
            for (std::size_t j = i + 1; j < boxes.size(); ++j) parts.collision += pair_collision(boxes[i], boxes[j], overlap_floor);
        }
    }
    for (const auto& cr : index.relations) {
        if (cr.relation.scope == Scope::inter) parts.relation += compiled_relation_penalty(index, inputs, cr);
    }
    return parts;
}

}  // namespace

Jet global_term(const SceneIndex& index, const FrameInputs& inputs, const Weights& weights, bool physics,
                bool overlap_floor) {
    const GlobalParts p = global_parts(index, inputs, physics, overlap_floor);
    return weights.lambda_bd * p.boundary + weights.lambda_col * p.collision + weights.lambda_rel * p.relation;
}

ObjectiveTerms evaluate_objective(const SceneIndex& index, const FrameInputs& inputs, const Weights& weights,
                                  const ObjectiveOptions& options) {
    const GlobalParts g = global_parts(index, inputs, options.physics, options.overlap_floor);
    Jet collision = g.collision;
    Jet relation = g.relation;
    if (options.physics) {
        for (std::size_t k = 0; k < index.unit_count(); ++k) collision += member_collisions(index, inputs, k, options.overlap_floor);
    }
    for (const auto& cr : index.relations) {
        if (cr.relation.scope == Scope::intra) relation += compiled_relation_penalty(index, inputs, cr);
    }

    Jet prior(0.0);
    if (options.prior) {
        for (std::size_t s = 0; s < inputs.shared.size(); ++s) prior += square(inputs.shared[s] - index.shared_priors[s]);
        prior = options.prior_weight * prior;
    }

    ObjectiveTerms t{weights.lambda_col * collision, weights.lambda_bd * g.boundary, weights.lambda_rel * relation,
                     prior, Jet(0.0)};
    t.total = t.collision + t.boundary + t.relation + t.prior;
    return t;
}

LossValue aggregate_local(const SceneIndex& index, std::size_t k, const ParamState& state, const Weights& weights) {
    if (k >= index.unit_count()) throw std::out_of_range("unit index out of range");
    const std::vector<double> flat = state.flatten();
    return to_loss(local_term(index, mixed_inputs(index, flat), k, weights), flat.size());
}

LossValue aggregate_global(const SceneIndex& index, const ParamState& state, const Weights& weights) {
    const std::vector<double> flat = state.flatten();
    return to_loss(global_term(index, mixed_inputs(index, flat), weights), flat.size());
}

std::vector<Pose2D> global_poses(const SceneIndex& index, const ParamState& state) {
    std::vector<Pose2D> poses(index.shapes.size());
    for (std::size_t i = 0; i < index.independents.size(); ++i) poses[index.independents[i]] = state.independent_poses[i];
    for (std::size_t k = 0; k < index.unit_count(); ++k) {
        const auto& assets = index.unit_assets[k];
        poses[assets[0]] = state.unit_poses[k];
        for (std::size_t m = 1; m < assets.size(); ++m) {
            poses[assets[m]] = compose(state.unit_poses[k], state.member_local_poses[k][m - 1]);
        }
    }
    return poses;
}

}  // namespace framelayout
