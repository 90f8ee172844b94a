#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "framelayout/geometry.hpp"
#include "framelayout/jet.hpp"
#include "framelayout/scene.hpp"

namespace framelayout {

/// Scalar penalty plus its gradient. Slot layout is documented per function:
/// each participating box contributes (x, y, theta) in argument order,
/// followed by the relation's metric parameter when it has one.
struct LossValue {
    double value = 0.0;
    std::vector<double> grads;
};

struct Weights {
    double lambda_col = 1.0;
    double lambda_rel = 1.0;
    double lambda_bd = 1.0;
};

enum class PlacementAxis { horizontal, vertical };

inline constexpr double kFacingEpsilon = 1e-8;

/// Wall-normal orientation facing into the room: L -> 0, R -> pi, B -> pi/2, T -> -pi/2.
double wall_facing(Wall wall);

/// Penalty kernels over jets. Every input may carry derivatives (including
/// box half-extents, which vary for unit bounding boxes); the result carries
/// the matching chain-ruled derivative.
namespace penalty {

Jet collision(const JetBox& a, const JetBox& b);
/// rho: proxy overlap area over the smaller proxy area; 0 when disjoint.
Jet overlap_ratio(const JetBox& a, const JetBox& b);
Jet boundary(const JetBox& box, const Room& room);
Jet distance(const JetBox& a, const JetBox& b, const Jet& d_star);
Jet gap(const JetBox& a, const JetBox& b, const Jet& g);
Jet against_wall(const JetBox& box, Wall wall, const Room& room);
Jet corner(const JetBox& box, Corner corner, Wall wall, const Room& room);
Jet facing(const JetBox& a, const JetBox& b);
Jet directional(const JetBox& source, const JetBox& target, RelationKind direction, double p);
Jet angle(const JetBox& a, const JetBox& b, const Jet& alpha);
Jet placement(const JetBox& box, PlacementAxis axis, const Jet& target, const Room& room, double margin);
Jet around(std::span<const JetBox> sources, const JetBox& focal, const Jet& sweep, double center);

}  // namespace penalty

/// Penalty for one relation. `box_of` maps each endpoint id (sources, and the
/// target when it is an entity) to its box in a common frame.
Jet relation_penalty(const Relation& rel, const std::function<JetBox(const std::string&)>& box_of, const Jet& metric,
                     const Room& room);

// ---------------------------------------------------------------------------
// Double-argument entry points returning value and gradient.

/// Slots: a(x,y,theta), b(x,y,theta).
LossValue collision_loss(const FootprintBox& a, const FootprintBox& b);
/// Slots: box(x,y,theta).
LossValue boundary_loss(const FootprintBox& box, const Room& room);
/// Slots: a, b, d_star.
LossValue distance_loss(const FootprintBox& a, const FootprintBox& b, double d_star);
/// Slots: a, b, g.
LossValue gap_loss(const FootprintBox& a, const FootprintBox& b, double g);
/// Slots: box.
LossValue against_wall_loss(const FootprintBox& box, Wall wall, const Room& room);
/// Slots: box. Throws std::invalid_argument when `wall` is not adjacent to `corner`.
LossValue corner_loss(const FootprintBox& box, Corner corner, Wall wall, const Room& room);
/// Slots: a, b.
LossValue facing_loss(const FootprintBox& a, const FootprintBox& b);
/// Slots: source, target. `direction` must be one of the four directional kinds.
LossValue directional_loss(const FootprintBox& source, const FootprintBox& target, RelationKind direction, double p);
/// Slots: a, b, alpha.
LossValue angle_loss(const FootprintBox& a, const FootprintBox& b, double alpha);
/// Slots: box, target.
LossValue placement_loss(const FootprintBox& box, PlacementAxis axis, double target, const Room& room,
                         double margin = 0.0);
/// Slots: each source in order, then focal, then sweep. Throws std::invalid_argument for fewer than 2 sources.
LossValue around_loss(std::span<const FootprintBox> sources, const FootprintBox& focal, double sweep, double center);

/// Seeds (x, y, theta) of `box` as slots [first, first + 3) of a `dim`-slot space;
/// half-extents stay constant.
JetBox seed_box(const FootprintBox& box, std::size_t first, std::size_t dim);
JetBox constant_box(const FootprintBox& box);
FootprintBox box_value(const JetBox& box);

}  // namespace framelayout
