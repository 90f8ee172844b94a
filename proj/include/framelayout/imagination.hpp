#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "framelayout/geometry.hpp"
#include "framelayout/scene.hpp"

namespace framelayout {

struct MapEntry {
    Pose2D pose;
    double l = 0.0;  // footprint length used for the extents
    double w = 0.0;
    FootprintExtents extents;
    AxisBounds bounds;

    FootprintBox box() const { return {pose, 0.5 * l, 0.5 * w}; }
};

/// A local map holds a unit's anchor and members in the anchor frame; the
/// global map holds units (as member-enclosing boxes) and independents in
/// the room frame.
struct CognitiveMap {
    std::string scope;    // unit id, or "global"
    Pose2D frame;         // room pose of the map frame (the unit pose for local maps)
    std::map<std::string, MapEntry> entries;
};

inline constexpr std::string_view kGlobalScope = "global";

struct CognitiveMaps {
    std::vector<CognitiveMap> local;  // scene unit order
    CognitiveMap global;
};

/// Builds every map from room-frame poses. Throws std::invalid_argument when
/// an asset has no pose.
CognitiveMaps build_maps(const SceneSpec& spec, const std::map<std::string, Pose2D>& poses);
CognitiveMaps build_maps(const SceneSpec& spec, const Layout& layout);

enum class ConflictLevel { intra, inter };

struct Conflict {
    ConflictLevel level = ConflictLevel::inter;
    std::string scope;                        // unit id for intra, "global" otherwise
    std::pair<std::string, std::string> pair;  // lexicographically ordered
    double overlap_x = 0.0;
    double overlap_y = 0.0;
};

/// Proxy collisions among the entries of each map. A unit-versus-unit hit in
/// the global map is kept only when some pair of their members also collides.
std::vector<Conflict> detect_conflicts(const CognitiveMaps& maps);

/// Deterministic forward placement of every asset from the relation list.
std::map<std::string, Pose2D> imagine_poses(const SceneSpec& spec);

using Reviser = std::function<std::vector<Relation>(const SceneSpec&, const std::vector<Conflict>&)>;

inline constexpr double kRevisionMargin = 0.05;  // m

/// Raises the metric of the distance/gap relation linking each conflicting
/// pair, or appends a gap relation when none links it.
std::vector<Relation> baseline_reviser(const SceneSpec& spec, const std::vector<Conflict>& conflicts);

struct RelationEdit {
    std::size_t index = 0;  // position in the revised relation list
    bool appended = false;
    std::string kind;
    std::string source;
    std::string target;
    std::string scope;
    double before = 0.0;
    double after = 0.0;
};

struct RevisionIteration {
    std::size_t t = 0;
    std::vector<Conflict> conflicts;
    std::vector<RelationEdit> edits;
};

struct RevisionReport {
    bool converged = false;
    std::size_t iterations = 0;  // last iteration run
    std::size_t budget = 0;
    std::vector<RevisionIteration> history;
    std::vector<Conflict> remaining;

    std::string to_json() const;
};

struct RevisionResult {
    SceneSpec spec;
    RevisionReport report;
};

/// Imagine, detect and revise for at most `budget` iterations. Throws
/// std::invalid_argument when budget is 0 and RevisionError when the reviser
/// returns an invalid relation list or edits a scope no conflict implicates.
RevisionResult imagine_and_revise(const SceneSpec& spec, const Reviser& reviser, std::size_t budget);

}  // namespace framelayout
