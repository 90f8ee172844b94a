#pragma once

#include <string>
#include <vector>

#include "framelayout/geometry.hpp"
#include "framelayout/scene.hpp"

namespace framelayout {

inline constexpr double kCollisionTolerance = 0.0003;  // m^2
inline constexpr double kOutOfRoomTolerance = 0.0003;  // m^2

struct PhysicalReport {
    double cr_percent = 0.0;
    double or_percent = 0.0;
    std::vector<std::string> colliding_ids;  // sorted, unique
    std::vector<std::string> oob_ids;        // sorted
    double tau_c = kCollisionTolerance;
    double tau_o = kOutOfRoomTolerance;
};

/// Room-frame footprint of every asset, in scene asset order. Throws
/// std::invalid_argument when the layout misses an asset.
std::vector<FootprintBox> layout_boxes(const SceneSpec& spec, const Layout& layout);

/// Exact rotated-footprint collision and out-of-room metrics.
PhysicalReport eval_physical(const SceneSpec& spec, const Layout& layout, double tau_c = kCollisionTolerance,
                             double tau_o = kOutOfRoomTolerance);

std::string physical_report_json(const PhysicalReport& report);

struct RelationCheck {
    std::size_t index = 0;  // position in spec.relations
    std::string kind;
    double penalty = 0.0;
};

/// Penalty of every relation on a layout, using the metric values written
/// in the scene (not learned shared values).
std::vector<RelationCheck> relation_penalties(const SceneSpec& spec, const Layout& layout);

}  // namespace framelayout
