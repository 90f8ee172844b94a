#include "framelayout/imagination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "framelayout/constraints.hpp"
#include "framelayout/errors.hpp"

namespace framelayout {

namespace {

constexpr double kPi = std::numbers::pi;

MapEntry make_entry(const Pose2D& pose, double l, double w) {
    MapEntry e;
    e.pose = pose;
    e.l = l;
    e.w = w;
    e.extents = footprint_extents(e.box());
    e.bounds = axis_bounds(e.box());
    return e;
}

double overlap(const Interval& a, const Interval& b) { return std::min(a.hi, b.hi) - std::max(a.lo, b.lo); }

Conflict make_conflict(ConflictLevel level, const std::string& scope, const std::string& a, const MapEntry& ea,
                       const std::string& b, const MapEntry& eb) {
    Conflict c;
    c.level = level;
    c.scope = scope;
    c.pair = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    c.overlap_x = overlap(ea.bounds.x, eb.bounds.x);
    c.overlap_y = overlap(ea.bounds.y, eb.bounds.y);
    return c;
}

// Half-width of an axis-aligned proxy along unit direction u.
double support(const FootprintExtents& e, const Vec2& u) { return 0.5 * (e.x * std::abs(u.x) + e.y * std::abs(u.y)); }

Vec2 rotate(double theta, const Vec2& v) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

// Direction of the k-th spread placement around one reference: the four
// local axes first, then the diagonals, then finer bisections.
double spread_angle(std::size_t k) {
    double fraction = 0.0, bit = 0.5;
    for (std::size_t level = k / 4; level > 0; level /= 2, bit *= 0.5) {
        if (level % 2) fraction += bit;
    }
    return static_cast<double>(k % 4) * 0.5 * kPi + fraction * 0.5 * kPi;
}

/// Forward placement state. Independents and anchors live in the room
/// frame; members live in their unit's anchor frame where the anchor sits at
/// the identity.
class Interpreter {
public:
    explicit Interpreter(const SceneSpec& spec) : spec_(spec), slots_(spec.assets.size()) {
        for (std::size_t a = 0; a < spec.assets.size(); ++a) {
            slots_[a].half_l = 0.5 * spec.assets[a].l;
            slots_[a].half_w = 0.5 * spec.assets[a].w;
        }
        for (const Unit& u : spec.units) {
            const std::size_t anchor = *spec.asset_index(u.anchor);
            for (const auto& m : u.members) {
                const std::size_t i = *spec.asset_index(m);
                slots_[i].unit_anchor = anchor;
            }
        }
    }

    void apply(const Relation& rel) {
        const bool intra = rel.scope == Scope::intra;
        switch (rel.kind) {
            case RelationKind::against_wall: {
                Slot& s = at(resolve(rel.source(), intra));
                s.pose.theta = wall_facing(*wall_from_string(rel.target));
                const auto e = extents(s);
                switch (*wall_from_string(rel.target)) {
                    case Wall::left: set_x(s, 0.5 * e.x); break;
                    case Wall::right: set_x(s, spec_.room.length - 0.5 * e.x); break;
                    case Wall::bottom: set_y(s, 0.5 * e.y); break;
                    case Wall::top: set_y(s, spec_.room.width - 0.5 * e.y); break;
                }
                return;
            }
            case RelationKind::corner: {
                Slot& s = at(resolve(rel.source(), intra));
                const Corner c = *corner_from_string(rel.target);
                s.pose.theta = wall_facing(*rel.wall);
                const auto e = extents(s);
                const bool left = c == Corner::bottom_left || c == Corner::top_left;
                const bool bottom = c == Corner::bottom_left || c == Corner::bottom_right;
                set_x(s, left ? 0.5 * e.x : spec_.room.length - 0.5 * e.x);
                set_y(s, bottom ? 0.5 * e.y : spec_.room.width - 0.5 * e.y);
                return;
            }
            case RelationKind::h_place: set_x(at(resolve(rel.source(), intra)), rel.metric); return;
            case RelationKind::v_place: set_y(at(resolve(rel.source(), intra)), rel.metric); return;
            case RelationKind::distance:
            case RelationKind::gap: place_apart(rel, intra); return;
            case RelationKind::left_of:
            case RelationKind::right_of:
            case RelationKind::in_front_of:
            case RelationKind::behind_of: place_beside(rel, intra); return;
            case RelationKind::facing: {
                const std::size_t src = resolve(rel.source(), intra);
                if (fixed(src, intra)) return;
                const Pose2D from = view(src, intra);
                const Pose2D to = view(resolve(rel.target, intra), intra);
                if (std::hypot(to.x - from.x, to.y - from.y) > 1e-12) {
                    slots_[src].pose.theta = std::atan2(to.y - from.y, to.x - from.x);
                }
                return;
            }
            case RelationKind::angle_offset: {
                const std::size_t src = resolve(rel.source(), intra);
                const std::size_t tgt = resolve(rel.target, intra);
                if (!fixed(src, intra)) {
                    slots_[src].pose.theta = view(tgt, intra).theta + rel.metric;
                } else if (!fixed(tgt, intra)) {
                    slots_[tgt].pose.theta = view(src, intra).theta - rel.metric;
                }
                return;
            }
            case RelationKind::around: place_around(rel, intra); return;
        }
    }

    std::map<std::string, Pose2D> room_poses() {
        std::map<std::string, Pose2D> out;
        for (std::size_t a = 0; a < slots_.size(); ++a) {
            const Pose2D p = position(a);
            if (slots_[a].unit_anchor) {
                out[spec_.assets[a].id] = compose(position(*slots_[a].unit_anchor), p);
            } else {
                out[spec_.assets[a].id] = p;
            }
        }
        return out;
    }

private:
    struct Slot {
        Pose2D pose;
        double half_l = 0.0;
        double half_w = 0.0;
        bool has_x = false;
        bool has_y = false;
        std::optional<std::size_t> unit_anchor;  // set for unit members
    };

    Slot& at(std::size_t i) { return slots_[i]; }

    std::size_t resolve(const std::string& id, bool intra) const {
        if (!intra) {
            if (auto asset = entity_asset(spec_, id)) return *spec_.asset_index(*asset);
        }
        return *spec_.asset_index(id);
    }

    // Inside its own unit the anchor is the frame origin and never moves.
    bool fixed(std::size_t i, bool intra) const { return intra && is_anchor(i); }

    bool is_anchor(std::size_t i) const {
        for (const Unit& u : spec_.units) {
            if (u.anchor == spec_.assets[i].id) return true;
        }
        return false;
    }

    static void set_x(Slot& s, double x) {
        s.pose.x = x;
        s.has_x = true;
    }
    static void set_y(Slot& s, double y) {
        s.pose.y = y;
        s.has_y = true;
    }

    static FootprintExtents extents(const Slot& s) { return footprint_extents(FootprintBox{s.pose, s.half_l, s.half_w}); }

    // Pose in the slot's own frame; unresolved coordinates are pinned to the
    // room centre the first time they are read.
    Pose2D position(std::size_t i) {
        Slot& s = slots_[i];
        if (!s.has_x || !s.has_y) {
            Vec2 center{0.5 * spec_.room.length, 0.5 * spec_.room.width};
            if (s.unit_anchor) center = to_local(position(*s.unit_anchor), center);
            if (!s.has_x) set_x(s, center.x);
            if (!s.has_y) set_y(s, center.y);
        }
        return s.pose;
    }

    // Pose as seen from the relation's frame: inside a unit the anchor is
    // the origin.
    Pose2D view(std::size_t i, bool intra) { return fixed(i, intra) ? Pose2D{} : position(i); }

    FootprintExtents view_extents(std::size_t i, bool intra) {
        const Slot& s = slots_[i];
        return footprint_extents(FootprintBox{view(i, intra), s.half_l, s.half_w});
    }

    void move_to(std::size_t i, const Vec2& p) {
        set_x(slots_[i], p.x);
        set_y(slots_[i], p.y);
    }

    void place_apart(const Relation& rel, bool intra) {
        std::size_t mover = resolve(rel.source(), intra);
        std::size_t ref = resolve(rel.target, intra);
        if (fixed(mover, intra)) std::swap(mover, ref);
        const Pose2D r = view(ref, intra);
        Vec2 u;
        const Slot& m = slots_[mover];
        const double dx = m.pose.x - r.x, dy = m.pose.y - r.y;
        if (m.has_x && m.has_y && std::hypot(dx, dy) > 1e-9) {
            const double n = std::hypot(dx, dy);
            u = {dx / n, dy / n};
        } else {
            std::size_t& k = spread_count_[ref];
            u = rotate(r.theta + spread_angle(k++), {1.0, 0.0});
        }
        double reach = rel.metric;
        if (rel.kind == RelationKind::gap) reach += support(view_extents(ref, intra), u) + support(extents(m), u);
        move_to(mover, {r.x + reach * u.x, r.y + reach * u.y});
    }

    void place_beside(const Relation& rel, bool intra) {
        const std::size_t src = resolve(rel.source(), intra);
        const std::size_t tgt = resolve(rel.target, intra);
        const Slot& s = slots_[src];
        const Slot& t = slots_[tgt];
        const double rel_theta = view(src, intra).theta - view(tgt, intra).theta;
        const double c = std::abs(std::cos(rel_theta)), sn = std::abs(std::sin(rel_theta));
        const double rx = s.half_l * c + s.half_w * sn;
        const double ry = s.half_l * sn + s.half_w * c;
        const double skew = 2.0 * rel.fraction - 1.0;
        Vec2 offset;
        switch (rel.kind) {
            case RelationKind::left_of: offset = {-(t.half_l + rx), skew * (t.half_w - ry)}; break;
            case RelationKind::right_of: offset = {t.half_l + rx, skew * (t.half_w - ry)}; break;
            case RelationKind::in_front_of: offset = {skew * (t.half_l - rx), t.half_w + ry}; break;
            default: offset = {skew * (t.half_l - rx), -(t.half_w + ry)}; break;
        }
        if (fixed(src, intra)) {
            const Pose2D p = view(src, intra);
            const Vec2 o = rotate(slots_[tgt].pose.theta, offset);
            move_to(tgt, {p.x - o.x, p.y - o.y});
        } else {
            const Pose2D p = view(tgt, intra);
            const Vec2 o = rotate(p.theta, offset);
            move_to(src, {p.x + o.x, p.y + o.y});
        }
    }

    void place_around(const Relation& rel, bool intra) {
        const std::size_t focal = resolve(rel.target, intra);
        const Pose2D f = view(focal, intra);
        const double n = static_cast<double>(rel.sources.size());
        const bool closed = rel.metric >= 2.0 * kPi - 1e-9;
        const double step = closed ? rel.metric / n : rel.metric / (n - 1.0);
        const double start = closed ? rel.center : rel.center - 0.5 * rel.metric;
        const double focal_reach = std::hypot(slots_[focal].half_l, slots_[focal].half_w);
        for (std::size_t i = 0; i < rel.sources.size(); ++i) {
            const std::size_t src = resolve(rel.sources[i], intra);
            if (fixed(src, intra)) continue;
            const double bearing = start + step * static_cast<double>(i);
            const double r = focal_reach + std::hypot(slots_[src].half_l, slots_[src].half_w);
            const Vec2 o = rotate(f.theta, {r * std::sin(bearing), r * std::cos(bearing)});
            move_to(src, {f.x + o.x, f.y + o.y});
            slots_[src].pose.theta = std::atan2(-o.y, -o.x);
        }
    }

    const SceneSpec& spec_;
    std::vector<Slot> slots_;
    std::map<std::size_t, std::size_t> spread_count_;
};

bool same_relation(const Relation& a, const Relation& b) {
    return std::tie(a.kind, a.sources, a.target, a.scope, a.unit, a.shared_param, a.metric, a.fraction, a.margin,
                    a.center, a.wall) == std::tie(b.kind, b.sources, b.target, b.scope, b.unit, b.shared_param,
                                                   b.metric, b.fraction, b.margin, b.center, b.wall);
}

std::string scope_of(const Relation& r) { return r.scope == Scope::intra ? r.unit : std::string(kGlobalScope); }

bool links(const Relation& r, const std::pair<std::string, std::string>& pair) {
    if (r.kind != RelationKind::distance && r.kind != RelationKind::gap) return false;
    return (r.source() == pair.first && r.target == pair.second) ||
           (r.source() == pair.second && r.target == pair.first);
}

// Smallest centre travel along u that separates two proxies whose centres
// start offset by `delta` (mover minus reference, beyond the travel).
double separating_travel(const Vec2& u, const Vec2& delta, double sx, double sy) {
    double best = std::numeric_limits<double>::infinity();
    if (std::abs(u.x) > 1e-12) best = std::min(best, (sx - std::copysign(1.0, u.x) * delta.x) / std::abs(u.x));
    if (std::abs(u.y) > 1e-12) best = std::min(best, (sy - std::copysign(1.0, u.y) * delta.y) / std::abs(u.y));
    return std::max(best, 0.0);
}

nlohmann::ordered_json conflict_json(const Conflict& c) {
    nlohmann::ordered_json j;
    j["level"] = c.level == ConflictLevel::intra ? "intra" : "inter";
    j["scope"] = c.scope;
    j["pair"] = {c.pair.first, c.pair.second};
    j["overlap"] = {c.overlap_x, c.overlap_y};
    return j;
}

}  // namespace

CognitiveMaps build_maps(const SceneSpec& spec, const std::map<std::string, Pose2D>& poses) {
    auto pose_of = [&](const std::string& id) {
        auto it = poses.find(id);
        if (it == poses.end()) throw std::invalid_argument("no pose for asset '" + id + "'");
        return it->second;
    };
    CognitiveMaps maps;
    maps.global.scope = std::string(kGlobalScope);
    std::set<std::string> in_unit;
    for (const Unit& u : spec.units) {
        CognitiveMap& local = maps.local.emplace_back();
        local.scope = u.id;
        local.frame = pose_of(u.anchor);
        const Pose2D to_unit = invert(local.frame);
        std::vector<std::string> ids{u.anchor};
        ids.insert(ids.end(), u.members.begin(), u.members.end());
        Interval bx{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        Interval by = bx;
        for (const auto& id : ids) {
            const Asset& a = *spec.find_asset(id);
            const Pose2D p = id == u.anchor ? Pose2D{} : compose(to_unit, pose_of(id));
            const MapEntry e = make_entry(p, a.l, a.w);
            bx = {std::min(bx.lo, e.bounds.x.lo), std::max(bx.hi, e.bounds.x.hi)};
            by = {std::min(by.lo, e.bounds.y.lo), std::max(by.hi, e.bounds.y.hi)};
            local.entries[id] = e;
            in_unit.insert(id);
        }
        const Pose2D center = compose(local.frame, Pose2D{0.5 * (bx.lo + bx.hi), 0.5 * (by.lo + by.hi), 0.0});
        maps.global.entries[u.id] = make_entry(center, bx.length(), by.length());
    }
    for (const Asset& a : spec.assets) {
        if (in_unit.count(a.id)) continue;
        maps.global.entries[a.id] = make_entry(pose_of(a.id), a.l, a.w);
    }
    return maps;
}

CognitiveMaps build_maps(const SceneSpec& spec, const Layout& layout) {
    std::map<std::string, Pose2D> poses;
    for (const auto& [id, p] : layout.poses) poses[id] = {p.x, p.y, p.theta};
    return build_maps(spec, poses);
}

std::vector<Conflict> detect_conflicts(const CognitiveMaps& maps) {
    std::vector<Conflict> out;
    std::map<std::string, const CognitiveMap*> units;
    for (const CognitiveMap& m : maps.local) {
        units[m.scope] = &m;
        for (auto i = m.entries.begin(); i != m.entries.end(); ++i) {
            for (auto j = std::next(i); j != m.entries.end(); ++j) {
                if (collide_proxy(i->second.box(), j->second.box())) {
                    out.push_back(make_conflict(ConflictLevel::intra, m.scope, i->first, i->second, j->first, j->second));
                }
            }
        }
    }

    auto members_collide = [](const CognitiveMap& a, const CognitiveMap& b) {
        for (const auto& [ia, ea] : a.entries) {
            const FootprintBox ba{compose(a.frame, ea.pose), 0.5 * ea.l, 0.5 * ea.w};
            for (const auto& [ib, eb] : b.entries) {
                if (collide_proxy(ba, {compose(b.frame, eb.pose), 0.5 * eb.l, 0.5 * eb.w})) return true;
            }
        }
        return false;
    };
    const auto& g = maps.global.entries;
    for (auto i = g.begin(); i != g.end(); ++i) {
        for (auto j = std::next(i); j != g.end(); ++j) {
            if (!collide_proxy(i->second.box(), j->second.box())) continue;
            auto ui = units.find(i->first), uj = units.find(j->first);
            if (ui != units.end() && uj != units.end() && !members_collide(*ui->second, *uj->second)) continue;
            out.push_back(make_conflict(ConflictLevel::inter, maps.global.scope, i->first, i->second, j->first,
                                        j->second));
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Conflict& a, const Conflict& b) {
        return std::tie(a.level, a.scope, a.pair) < std::tie(b.level, b.scope, b.pair);
    });
    return out;
}

std::map<std::string, Pose2D> imagine_poses(const SceneSpec& spec) {
    Interpreter interpreter(spec);
    for (const Relation& r : spec.relations) interpreter.apply(r);
    return interpreter.room_poses();
}

std::vector<Relation> baseline_reviser(const SceneSpec& spec, const std::vector<Conflict>& conflicts) {
    std::vector<Relation> relations = spec.relations;
    if (conflicts.empty()) return relations;
    const CognitiveMaps maps = build_maps(spec, imagine_poses(spec));

    for (const Conflict& c : conflicts) {
        const bool intra = c.level == ConflictLevel::intra;
        const CognitiveMap* map = &maps.global;
        if (intra) {
            for (const auto& m : maps.local) {
                if (m.scope == c.scope) map = &m;
            }
        }
        const MapEntry& ea = map->entries.at(c.pair.first);
        const MapEntry& eb = map->entries.at(c.pair.second);

        auto linked = std::find_if(relations.begin(), relations.end(), [&](const Relation& r) {
            return (intra ? r.scope == Scope::intra && r.unit == c.scope : r.scope == Scope::inter) && links(r, c.pair);
        });
        if (linked == relations.end()) {
            Relation gap;
            gap.kind = RelationKind::gap;
            gap.scope = intra ? Scope::intra : Scope::inter;
            gap.unit = intra ? c.scope : std::string();
            gap.metric = kRevisionMargin;
            const Unit* unit = intra ? spec.find_unit(c.scope) : nullptr;
            const bool second_is_anchor = unit && unit->anchor == c.pair.second;
            gap.sources = {second_is_anchor ? c.pair.first : c.pair.second};
            gap.target = second_is_anchor ? c.pair.second : c.pair.first;
            relations.push_back(std::move(gap));
            continue;
        }

        if (linked->kind == RelationKind::gap) {
            linked->metric += kRevisionMargin;
            continue;
        }
        // Entity positions as the interpreter moves them: unit anchors for
        // units in the global map, entry centres everywhere else.
        auto handle = [&](const std::string& id, const MapEntry& e) {
            if (!intra) {
                for (const auto& m : maps.local) {
                    if (m.scope == id) return Vec2{m.frame.x, m.frame.y};
                }
            }
            return Vec2{e.pose.x, e.pose.y};
        };
        const Vec2 ha = handle(c.pair.first, ea), hb = handle(c.pair.second, eb);
        const double dx = hb.x - ha.x, dy = hb.y - ha.y;
        const double n = std::hypot(dx, dy);
        const Vec2 u = n > 1e-12 ? Vec2{dx / n, dy / n} : Vec2{1.0, 0.0};
        const Vec2 delta{(eb.pose.x - hb.x) - (ea.pose.x - ha.x), (eb.pose.y - hb.y) - (ea.pose.y - ha.y)};
        const double required = separating_travel(u, delta, 0.5 * (ea.extents.x + eb.extents.x),
                                                  0.5 * (ea.extents.y + eb.extents.y));
        linked->metric = std::max(required, linked->metric) + kRevisionMargin;
    }
    return relations;
}

std::string RevisionReport::to_json() const {
    nlohmann::ordered_json j;
    j["converged"] = converged;
    j["iterations"] = iterations;
    j["budget"] = budget;
    j["history"] = nlohmann::ordered_json::array();
    for (const auto& it : history) {
        nlohmann::ordered_json h;
        h["t"] = it.t;
        h["conflicts"] = nlohmann::ordered_json::array();
        for (const auto& c : it.conflicts) h["conflicts"].push_back(conflict_json(c));
        h["edits"] = nlohmann::ordered_json::array();
        for (const auto& e : it.edits) {
            h["edits"].push_back({{"index", e.index},
                                  {"appended", e.appended},
                                  {"kind", e.kind},
                                  {"source", e.source},
                                  {"target", e.target},
                                  {"scope", e.scope},
                                  {"before", e.before},
                                  {"after", e.after}});
        }
        j["history"].push_back(std::move(h));
    }
    j["remaining"] = nlohmann::ordered_json::array();
    for (const auto& c : remaining) j["remaining"].push_back(conflict_json(c));
    return j.dump(2) + "\n";
}

RevisionResult imagine_and_revise(const SceneSpec& spec, const Reviser& reviser, std::size_t budget) {
    if (budget == 0) throw std::invalid_argument("revision budget must be at least 1");
    RevisionResult result{spec, {}};
    result.report.budget = budget;
    for (std::size_t t = 1; t <= budget; ++t) {
        RevisionIteration iteration;
        iteration.t = t;
        iteration.conflicts = detect_conflicts(build_maps(result.spec, imagine_poses(result.spec)));
        result.report.iterations = t;
        if (iteration.conflicts.empty()) {
            result.report.converged = true;
            result.report.remaining.clear();
            result.report.history.push_back(std::move(iteration));
            return result;
        }

        SceneSpec revised = result.spec;
        revised.relations = reviser(result.spec, iteration.conflicts);
        try {
            validate_scene(revised);
        } catch (const SemanticError& e) {
            throw RevisionError(std::string("reviser produced an invalid relation: ") + e.what());
        }

        std::set<std::string> implicated;
        for (const auto& c : iteration.conflicts) implicated.insert(c.scope);
        auto check_scope = [&](const Relation& r) {
            if (!implicated.count(scope_of(r))) {
                throw RevisionError("reviser edited scope '" + scope_of(r) + "' which has no conflict");
            }
        };
        const auto& before = result.spec.relations;
        const auto& after = revised.relations;
        for (std::size_t i = 0; i < std::max(before.size(), after.size()); ++i) {
            const Relation* old_rel = i < before.size() ? &before[i] : nullptr;
            const Relation* new_rel = i < after.size() ? &after[i] : nullptr;
            if (old_rel && new_rel && same_relation(*old_rel, *new_rel)) continue;
            if (old_rel) check_scope(*old_rel);
            if (!new_rel) continue;
            check_scope(*new_rel);
            iteration.edits.push_back({i, old_rel == nullptr, std::string(to_string(new_rel->kind)),
                                       new_rel->sources.front(), new_rel->target, scope_of(*new_rel),
                                       old_rel ? old_rel->metric : 0.0, new_rel->metric});
        }
        result.report.remaining = iteration.conflicts;
        result.report.history.push_back(std::move(iteration));
        result.spec = std::move(revised);
    }
    return result;
}

}  // namespace framelayout
