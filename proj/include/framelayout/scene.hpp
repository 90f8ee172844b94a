#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace framelayout {

struct Room {
    double length = 0.0;  // along x
    double width = 0.0;   // along y
    double height = 0.0;
};

struct Asset {
    std::string id;
    std::string description;
    double l = 0.0;
    double w = 0.0;
    double h = 0.0;
};

/// A frame-invariant unit: a rigid assembly whose local frame is its anchor's.
struct Unit {
    std::string id;
    std::string anchor;
    std::vector<std::string> members;  // excludes the anchor
};

enum class RelationKind {
    distance,
    gap,
    against_wall,
    corner,
    facing,
    left_of,
    right_of,
    in_front_of,
    behind_of,
    angle_offset,
    h_place,
    v_place,
    around,
};

enum class Wall { left, right, top, bottom };
enum class Corner { bottom_left, bottom_right, top_right, top_left };
enum class Scope { intra, inter };

std::string_view to_string(RelationKind kind);
std::optional<RelationKind> relation_kind_from_string(std::string_view name);
std::string_view to_string(Wall wall);
std::optional<Wall> wall_from_string(std::string_view tag);
std::string_view to_string(Corner corner);
std::optional<Corner> corner_from_string(std::string_view tag);

bool is_directional(RelationKind kind);
bool is_scene_anchored(RelationKind kind);  // against_wall, corner, h_place, v_place
bool has_metric(RelationKind kind);         // kinds whose metric can be bound to a shared parameter
bool wall_adjacent(Corner corner, Wall wall);

inline constexpr std::string_view kSceneNode = "scene";

/// One metricized relation. `sources` has exactly one entry except for
/// `around`. `target` is an entity id, a wall/corner tag, or "scene".
struct Relation {
    RelationKind kind = RelationKind::distance;
    std::vector<std::string> sources;
    std::string target;
    Scope scope = Scope::inter;
    std::string unit;                          // owning unit when scope is intra
    std::optional<std::string> shared_param;   // binds `metric` across relations

    double metric = 0.0;    // d*, g, alpha, x*, y*, or sweep S depending on kind
    double fraction = 0.5;  // directional alignment p
    double margin = 0.0;    // placement margin m
    double center = 0.0;    // around: arc center c (radians)
    std::optional<Wall> wall;  // corner: the wall to sit flush against

    const std::string& source() const { return sources.front(); }
};

/// Validated scene. Immutable once parsed.
struct SceneSpec {
    Room room;
    std::vector<Asset> assets;
    std::vector<Unit> units;
    std::vector<Relation> relations;
    std::uint64_t seed = 0;

    const Asset* find_asset(std::string_view id) const;
    const Unit* find_unit(std::string_view id) const;
    std::optional<std::size_t> asset_index(std::string_view id) const;
    std::optional<std::size_t> unit_index(std::string_view id) const;  // 0-based
};

/// Unit assignment pi(i): 1-based unit index, or 0 for an independent asset.
/// Throws std::out_of_range for an unknown id.
std::size_t assignment(const SceneSpec& spec, std::string_view asset_id);

/// Asset id that stands for an entity: units resolve to their anchor.
/// Returns std::nullopt for tags and unknown ids.
std::optional<std::string> entity_asset(const SceneSpec& spec, std::string_view id);

/// Throws SyntaxError or SemanticError.
SceneSpec parse_scene(std::string_view text);
SceneSpec load_scene_file(const std::string& path);

/// Runs every scene invariant check; throws SemanticError on violation.
void validate_scene(const SceneSpec& spec);

std::string serialize_scene(const SceneSpec& spec);

struct PlacedPose {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double theta = 0.0;

    bool operator==(const PlacedPose&) const = default;
};

struct Layout {
    std::map<std::string, PlacedPose> poses;

    bool operator==(const Layout&) const = default;
};

std::string serialize_layout(const Layout& layout);
Layout parse_layout(std::string_view text);
Layout load_layout_file(const std::string& path);

}  // namespace framelayout
