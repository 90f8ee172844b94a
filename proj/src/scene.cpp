#include "framelayout/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "framelayout/errors.hpp"

namespace framelayout {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<RelationKind, std::string_view>, 13> kKindNames{{
    {RelationKind::distance, "distance"},
    {RelationKind::gap, "gap"},
    {RelationKind::against_wall, "against_wall"},
    {RelationKind::corner, "corner"},
    {RelationKind::facing, "facing"},
    {RelationKind::left_of, "left_of"},
    {RelationKind::right_of, "right_of"},
    {RelationKind::in_front_of, "in_front_of"},
    {RelationKind::behind_of, "behind_of"},
    {RelationKind::angle_offset, "angle_offset"},
    {RelationKind::h_place, "h_place"},
    {RelationKind::v_place, "v_place"},
    {RelationKind::around, "around"},
}};

constexpr std::array<std::pair<Wall, std::string_view>, 4> kWallNames{{
    {Wall::left, "L"},
    {Wall::right, "R"},
    {Wall::top, "T"},
    {Wall::bottom, "B"},
}};

constexpr std::array<std::pair<Corner, std::string_view>, 4> kCornerNames{{
    {Corner::bottom_left, "BL"},
    {Corner::bottom_right, "BR"},
    {Corner::top_right, "TR"},
    {Corner::top_left, "TL"},
}};

// JSON key holding the bindable metric of each kind.
std::string_view metric_key(RelationKind kind) {
    switch (kind) {
        case RelationKind::distance: return "d";
        case RelationKind::gap: return "g";
        case RelationKind::angle_offset: return "alpha";
        case RelationKind::h_place: return "x";
        case RelationKind::v_place: return "y";
        case RelationKind::around: return "sweep";
        default: return {};
    }
}

[[noreturn]] void syntax(const std::string& where, const std::string& what) {
    throw SyntaxError(where + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) syntax(where, std::string("missing key '") + key + "'");
    return *it;
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) syntax(where, "expected a number");
    return v.get<double>();
}

std::string string(const json& v, const std::string& where) {
    if (!v.is_string()) syntax(where, "expected a string");
    return v.get<std::string>();
}

double optional_number(const json& obj, const char* key, double fallback, const std::string& where) {
    auto it = obj.find(key);
    return it == obj.end() ? fallback : number(*it, where + "." + key);
}

Relation parse_relation(const json& r, const std::string& where) {
    if (!r.is_object()) syntax(where, "expected an object");
    Relation rel;
    const std::string kind_name = string(require(r, "kind", where), where + ".kind");
    const auto kind = relation_kind_from_string(kind_name);
    if (!kind) throw SemanticError(where + ".kind", "unknown relation kind '" + kind_name + "'");
    rel.kind = *kind;

    if (rel.kind == RelationKind::around) {
        const json& srcs = require(r, "sources", where);
        if (!srcs.is_array()) syntax(where + ".sources", "expected an array");
        for (std::size_t i = 0; i < srcs.size(); ++i) {
            rel.sources.push_back(string(srcs[i], where + ".sources[" + std::to_string(i) + "]"));
        }
    } else {
        rel.sources.push_back(string(require(r, "source", where), where + ".source"));
    }

    if (auto it = r.find("target"); it != r.end()) {
        rel.target = string(*it, where + ".target");
    } else if (rel.kind == RelationKind::h_place || rel.kind == RelationKind::v_place) {
        rel.target = std::string(kSceneNode);
    } else {
        syntax(where, "missing key 'target'");
    }

    if (auto it = r.find("unit"); it != r.end()) {
        rel.scope = Scope::intra;
        rel.unit = string(*it, where + ".unit");
    }
    if (auto it = r.find("shared"); it != r.end()) rel.shared_param = string(*it, where + ".shared");

    if (const std::string_view key = metric_key(rel.kind); !key.empty()) {
        const std::string k(key);
        rel.metric = number(require(r, k.c_str(), where), where + "." + k);
    }
    rel.fraction = optional_number(r, "p", 0.5, where);
    rel.margin = optional_number(r, "m", 0.0, where);
    rel.center = optional_number(r, "center", 0.0, where);
    if (auto it = r.find("wall"); it != r.end()) {
        const std::string tag = string(*it, where + ".wall");
        rel.wall = wall_from_string(tag);
        if (!rel.wall) throw SemanticError(where + ".wall", "unknown wall tag '" + tag + "'");
    }
    return rel;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::string_view to_string(RelationKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "?";
}

std::optional<RelationKind> relation_kind_from_string(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

std::string_view to_string(Wall wall) {
    for (const auto& [w, name] : kWallNames) {
        if (w == wall) return name;
    }
    return "?";
}

std::optional<Wall> wall_from_string(std::string_view tag) {
    for (const auto& [w, name] : kWallNames) {
        if (name == tag) return w;
    }
    return std::nullopt;
}

std::string_view to_string(Corner corner) {
    for (const auto& [c, name] : kCornerNames) {
        if (c == corner) return name;
    }
    return "?";
}

std::optional<Corner> corner_from_string(std::string_view tag) {
    for (const auto& [c, name] : kCornerNames) {
        if (name == tag) return c;
    }
    return std::nullopt;
}

bool is_directional(RelationKind kind) {
    return kind == RelationKind::left_of || kind == RelationKind::right_of || kind == RelationKind::in_front_of ||
           kind == RelationKind::behind_of;
}

bool is_scene_anchored(RelationKind kind) {
    return kind == RelationKind::against_wall || kind == RelationKind::corner || kind == RelationKind::h_place ||
           kind == RelationKind::v_place;
}

bool has_metric(RelationKind kind) { return !metric_key(kind).empty(); }

bool wall_adjacent(Corner corner, Wall wall) {
    switch (corner) {
        case Corner::bottom_left: return wall == Wall::left || wall == Wall::bottom;
        case Corner::bottom_right: return wall == Wall::right || wall == Wall::bottom;
        case Corner::top_right: return wall == Wall::right || wall == Wall::top;
        case Corner::top_left: return wall == Wall::left || wall == Wall::top;
    }
    return false;
}

const Asset* SceneSpec::find_asset(std::string_view id) const {
    auto it = std::find_if(assets.begin(), assets.end(), [&](const Asset& a) { return a.id == id; });
    return it == assets.end() ? nullptr : &*it;
}

const Unit* SceneSpec::find_unit(std::string_view id) const {
    auto it = std::find_if(units.begin(), units.end(), [&](const Unit& u) { return u.id == id; });
    return it == units.end() ? nullptr : &*it;
}

std::optional<std::size_t> SceneSpec::asset_index(std::string_view id) const {
    const Asset* a = find_asset(id);
    if (!a) return std::nullopt;
    return static_cast<std::size_t>(a - assets.data());
}

std::optional<std::size_t> SceneSpec::unit_index(std::string_view id) const {
    const Unit* u = find_unit(id);
    if (!u) return std::nullopt;
    return static_cast<std::size_t>(u - units.data());
}

std::size_t assignment(const SceneSpec& spec, std::string_view asset_id) {
    if (!spec.find_asset(asset_id)) throw std::out_of_range("unknown asset '" + std::string(asset_id) + "'");
    for (std::size_t k = 0; k < spec.units.size(); ++k) {
        const Unit& u = spec.units[k];
        if (u.anchor == asset_id || std::find(u.members.begin(), u.members.end(), asset_id) != u.members.end()) {
            return k + 1;
        }
    }
    return 0;
}

std::optional<std::string> entity_asset(const SceneSpec& spec, std::string_view id) {
    if (const Unit* u = spec.find_unit(id)) return u->anchor;
    if (spec.find_asset(id)) return std::string(id);
    return std::nullopt;
}

void validate_scene(const SceneSpec& spec) {
    const Room& room = spec.room;
    if (!finite_positive(room.length) || !finite_positive(room.width) || !finite_positive(room.height)) {
        throw SemanticError("room", "dimensions must be positive");
    }

    std::set<std::string> ids;
    for (std::size_t i = 0; i < spec.assets.size(); ++i) {
        const Asset& a = spec.assets[i];
        const std::string where = "assets[" + std::to_string(i) + "]";
        if (a.id.empty()) throw SemanticError(where, "empty id");
        if (a.id == kSceneNode || wall_from_string(a.id) || corner_from_string(a.id)) {
            throw SemanticError(where, "id '" + a.id + "' is reserved");
        }
        if (!ids.insert(a.id).second) throw SemanticError(where, "duplicate id '" + a.id + "'");
        if (!finite_positive(a.l) || !finite_positive(a.w) || !finite_positive(a.h)) {
            throw SemanticError(where, "size of '" + a.id + "' must be positive");
        }
    }

    std::map<std::string, std::string> owner;  // asset id -> unit id
    for (std::size_t k = 0; k < spec.units.size(); ++k) {
        const Unit& u = spec.units[k];
        const std::string where = "units[" + std::to_string(k) + "]";
        if (u.id.empty()) throw SemanticError(where, "empty id");
        if (u.id == kSceneNode || wall_from_string(u.id) || corner_from_string(u.id)) {
            throw SemanticError(where, "id '" + u.id + "' is reserved");
        }
        if (!ids.insert(u.id).second) throw SemanticError(where, "duplicate id '" + u.id + "'");
        if (!spec.find_asset(u.anchor)) throw SemanticError(where + ".anchor", "unknown asset '" + u.anchor + "'");
        if (owner.count(u.anchor)) {
            throw SemanticError(where + ".anchor", "asset '" + u.anchor + "' already belongs to unit '" +
                                                       owner[u.anchor] + "'");
        }
        owner[u.anchor] = u.id;
        for (std::size_t m = 0; m < u.members.size(); ++m) {
            const std::string& id = u.members[m];
            const std::string mw = where + ".members[" + std::to_string(m) + "]";
            if (id == u.anchor) throw SemanticError(mw, "anchor '" + id + "' listed as a member");
            if (!spec.find_asset(id)) throw SemanticError(mw, "unknown asset '" + id + "'");
            if (owner.count(id)) {
                throw SemanticError(mw, "asset '" + id + "' already belongs to unit '" + owner[id] + "'");
            }
            owner[id] = u.id;
        }
    }

    auto is_member = [&](const std::string& id) {
        auto it = owner.find(id);
        return it != owner.end() && spec.find_unit(it->second)->anchor != id;
    };

    std::map<std::string, RelationKind> shared_kinds;
    for (std::size_t r = 0; r < spec.relations.size(); ++r) {
        const Relation& rel = spec.relations[r];
        const std::string where = "relations[" + std::to_string(r) + "]";
        const std::string kind(to_string(rel.kind));

        if (rel.sources.empty()) throw SemanticError(where, "relation has no source");
        if (rel.kind == RelationKind::around) {
            if (rel.sources.size() < 2) throw SemanticError(where, "around needs at least 2 sources");
        } else if (rel.sources.size() != 1) {
            throw SemanticError(where, kind + " takes exactly one source");
        }
        std::set<std::string> distinct(rel.sources.begin(), rel.sources.end());
        if (distinct.size() != rel.sources.size()) throw SemanticError(where, "duplicate source");

        // Endpoint shapes.
        std::vector<std::string> endpoints = rel.sources;
        switch (rel.kind) {
            case RelationKind::against_wall:
                if (!wall_from_string(rel.target)) {
                    throw SemanticError(where + ".target", "unknown wall tag '" + rel.target + "'");
                }
                break;
            case RelationKind::corner: {
                const auto c = corner_from_string(rel.target);
                if (!c) throw SemanticError(where + ".target", "unknown corner tag '" + rel.target + "'");
                if (!rel.wall) throw SemanticError(where, "corner relation needs a wall");
                if (!wall_adjacent(*c, *rel.wall)) {
                    throw SemanticError(where + ".wall", "wall " + std::string(to_string(*rel.wall)) +
                                                             " is not adjacent to corner " + rel.target);
                }
                break;
            }
            case RelationKind::h_place:
            case RelationKind::v_place:
                if (rel.target != kSceneNode) throw SemanticError(where + ".target", "placement targets the scene");
                break;
            default:
                if (distinct.count(rel.target)) throw SemanticError(where, "relation links an entity to itself");
                endpoints.push_back(rel.target);
                break;
        }
        if (rel.wall && rel.kind != RelationKind::corner) {
            throw SemanticError(where + ".wall", "only corner relations take a wall");
        }

        if (rel.scope == Scope::intra) {
            const Unit* unit = spec.find_unit(rel.unit);
            if (!unit) throw SemanticError(where + ".unit", "unknown unit '" + rel.unit + "'");
            if (is_scene_anchored(rel.kind)) {
                throw SemanticError(where, kind + " references the scene and cannot be intra-unit");
            }
            for (const auto& id : endpoints) {
                auto it = owner.find(id);
                if (!spec.find_asset(id)) throw SemanticError(where, "unknown asset '" + id + "'");
                if (it == owner.end() || it->second != unit->id) {
                    throw SemanticError(where, "intra relation of unit '" + unit->id + "' references '" + id +
                                                   "' outside the unit");
                }
            }
        } else {
            for (const auto& id : endpoints) {
                if (spec.find_unit(id)) continue;
                if (!spec.find_asset(id)) throw SemanticError(where, "unknown entity '" + id + "'");
                if (is_member(id)) {
                    throw SemanticError(where, "unit member '" + id + "' cannot take part in inter-unit relation " +
                                                   where + " (" + kind + ")");
                }
            }
            std::set<std::string> resolved;
            for (const auto& id : endpoints) resolved.insert(*entity_asset(spec, id));
            if (resolved.size() != endpoints.size()) throw SemanticError(where, "relation links an entity to itself");
        }

        // Parameters.
        const auto bad = [&](const char* what) { throw SemanticError(where, what); };
        if (!std::isfinite(rel.metric) || !std::isfinite(rel.fraction) || !std::isfinite(rel.margin) ||
            !std::isfinite(rel.center)) {
            bad("non-finite parameter");
        }
        if ((rel.kind == RelationKind::distance || rel.kind == RelationKind::gap) && rel.metric < 0.0) {
            bad("distance and gap must be nonnegative");
        }
        if (is_directional(rel.kind) && (rel.fraction < 0.0 || rel.fraction > 1.0)) bad("p must lie in [0, 1]");
        if (rel.margin < 0.0) bad("margin m must be nonnegative");
        if (rel.kind == RelationKind::around && (rel.metric <= 0.0 || rel.metric > 2.0 * std::numbers::pi)) {
            bad("sweep must lie in (0, 2*pi]");
        }

        if (rel.shared_param) {
            if (!has_metric(rel.kind)) bad("this relation kind has no metric to share");
            auto [it, inserted] = shared_kinds.emplace(*rel.shared_param, rel.kind);
            if (!inserted && it->second != rel.kind) {
                throw SemanticError(where + ".shared", "shared parameter '" + *rel.shared_param +
                                                           "' mixes relation kinds " +
                                                           std::string(to_string(it->second)) + " and " + kind);
            }
        }
    }
}

SceneSpec parse_scene(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw SyntaxError(std::string("malformed scene document: ") + e.what());
    }
    if (!doc.is_object()) syntax("$", "scene document must be an object");

    SceneSpec spec;
    const json& room = require(doc, "room", "$");
    spec.room.length = number(require(room, "length", "room"), "room.length");
    spec.room.width = number(require(room, "width", "room"), "room.width");
    spec.room.height = number(require(room, "height", "room"), "room.height");

    const json& assets = require(doc, "assets", "$");
    if (!assets.is_array()) syntax("assets", "expected an array");
    for (std::size_t i = 0; i < assets.size(); ++i) {
        const std::string where = "assets[" + std::to_string(i) + "]";
        const json& a = assets[i];
        if (!a.is_object()) syntax(where, "expected an object");
        Asset asset;
        asset.id = string(require(a, "id", where), where + ".id");
        if (auto it = a.find("description"); it != a.end()) asset.description = string(*it, where + ".description");
        const json& size = require(a, "size", where);
        if (!size.is_array() || size.size() != 3) syntax(where + ".size", "expected [l, w, h]");
        asset.l = number(size[0], where + ".size[0]");
        asset.w = number(size[1], where + ".size[1]");
        asset.h = number(size[2], where + ".size[2]");
        spec.assets.push_back(std::move(asset));
    }

    if (auto it = doc.find("units"); it != doc.end()) {
        if (!it->is_array()) syntax("units", "expected an array");
        for (std::size_t k = 0; k < it->size(); ++k) {
            const std::string where = "units[" + std::to_string(k) + "]";
            const json& u = (*it)[k];
            if (!u.is_object()) syntax(where, "expected an object");
            Unit unit;
            unit.id = string(require(u, "id", where), where + ".id");
            unit.anchor = string(require(u, "anchor", where), where + ".anchor");
            const json& members = require(u, "members", where);
            if (!members.is_array()) syntax(where + ".members", "expected an array");
            for (std::size_t m = 0; m < members.size(); ++m) {
                unit.members.push_back(string(members[m], where + ".members[" + std::to_string(m) + "]"));
            }
            spec.units.push_back(std::move(unit));
        }
    }

    if (auto it = doc.find("relations"); it != doc.end()) {
        if (!it->is_array()) syntax("relations", "expected an array");
        for (std::size_t r = 0; r < it->size(); ++r) {
            spec.relations.push_back(parse_relation((*it)[r], "relations[" + std::to_string(r) + "]"));
        }
    }

    if (auto it = doc.find("seed"); it != doc.end()) {
        if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
            syntax("seed", "expected a nonnegative integer");
        }
        spec.seed = it->get<std::uint64_t>();
    }

    validate_scene(spec);
    return spec;
}

SceneSpec load_scene_file(const std::string& path) { return parse_scene(read_file(path)); }

std::string serialize_scene(const SceneSpec& spec) {
    ordered_json doc;
    doc["room"] = {{"length", spec.room.length}, {"width", spec.room.width}, {"height", spec.room.height}};
    doc["assets"] = ordered_json::array();
    for (const Asset& a : spec.assets) {
        ordered_json j;
        j["id"] = a.id;
        if (!a.description.empty()) j["description"] = a.description;
        j["size"] = {a.l, a.w, a.h};
        doc["assets"].push_back(std::move(j));
    }
    doc["units"] = ordered_json::array();
    for (const Unit& u : spec.units) {
        doc["units"].push_back({{"id", u.id}, {"anchor", u.anchor}, {"members", u.members}});
    }
    doc["relations"] = ordered_json::array();
    for (const Relation& r : spec.relations) {
        ordered_json j;
        j["kind"] = std::string(to_string(r.kind));
        if (r.kind == RelationKind::around) {
            j["sources"] = r.sources;
        } else {
            j["source"] = r.source();
        }
        j["target"] = r.target;
        if (r.scope == Scope::intra) j["unit"] = r.unit;
        if (const std::string_view key = metric_key(r.kind); !key.empty()) j[std::string(key)] = r.metric;
        if (is_directional(r.kind)) j["p"] = r.fraction;
        if ((r.kind == RelationKind::h_place || r.kind == RelationKind::v_place) && r.margin != 0.0) j["m"] = r.margin;
        if (r.kind == RelationKind::around) j["center"] = r.center;
        if (r.wall) j["wall"] = std::string(to_string(*r.wall));
        if (r.shared_param) j["shared"] = *r.shared_param;
        doc["relations"].push_back(std::move(j));
    }
    doc["seed"] = spec.seed;
    return doc.dump(2) + "\n";
}

std::string serialize_layout(const Layout& layout) {
    // std::map iteration gives lexicographic, deterministic key order.
    ordered_json poses = ordered_json::object();
    for (const auto& [id, p] : layout.poses) {
        poses[id] = {{"x", p.x}, {"y", p.y}, {"z", p.z}, {"theta", p.theta}};
    }
    ordered_json doc;
    doc["poses"] = std::move(poses);
    return doc.dump(2) + "\n";
}

Layout parse_layout(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw SyntaxError(std::string("malformed layout document: ") + e.what());
    }
    if (!doc.is_object()) syntax("$", "layout document must be an object");
    const json& poses = require(doc, "poses", "$");
    if (!poses.is_object()) syntax("poses", "expected an object");
    Layout layout;
    for (const auto& [id, p] : poses.items()) {
        const std::string where = "poses." + id;
        if (!p.is_object()) syntax(where, "expected an object");
        layout.poses[id] = {number(require(p, "x", where), where + ".x"), number(require(p, "y", where), where + ".y"),
                            number(require(p, "z", where), where + ".z"),
                            number(require(p, "theta", where), where + ".theta")};
    }
    return layout;
}

Layout load_layout_file(const std::string& path) { return parse_layout(read_file(path)); }

}  // namespace framelayout
