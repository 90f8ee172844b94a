#include "framelayout/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace framelayout {

namespace {

constexpr double kPi = std::numbers::pi;

LossValue to_loss(const Jet& j, std::size_t dim) {
    LossValue out{j.value(), std::vector<double>(dim, 0.0)};
    for (std::size_t i = 0; i < dim; ++i) out.grads[i] = j.partial(i);
    return out;
}

struct AxisBox {
    Jet x0, x1, y0, y1, area;
};

AxisBox proxy_bounds(const JetBox& b) {
    const auto e = footprint_extents(b);
    const Jet hx = e.x * 0.5;
    const Jet hy = e.y * 0.5;
    return {b.pose.x - hx, b.pose.x + hx, b.pose.y - hy, b.pose.y + hy, e.x * e.y};
}

}  // namespace

double wall_facing(Wall wall) {
    switch (wall) {
        case Wall::left: return 0.0;
        case Wall::right: return kPi;
        case Wall::bottom: return 0.5 * kPi;
        case Wall::top: return -0.5 * kPi;
    }
    return 0.0;
}

namespace penalty {

Jet collision(const JetBox& a, const JetBox& b) {
    const AxisBox pa = proxy_bounds(a);
    const AxisBox pb = proxy_bounds(b);
    const Jet ix = min(pa.x1, pb.x1) - max(pa.x0, pb.x0);
    const Jet iy = min(pa.y1, pb.y1) - max(pa.y0, pb.y0);
    if (ix.value() <= 0.0 || iy.value() <= 0.0) return Jet(0.0);

    const Jet inter = ix * iy;
    const Jet iou = inter / (pa.area + pb.area - inter);
    const Jet cx = max(pa.x1, pb.x1) - min(pa.x0, pb.x0);
    const Jet cy = max(pa.y1, pb.y1) - min(pa.y0, pb.y0);
    const Jet d2 = square(a.pose.x - b.pose.x) + square(a.pose.y - b.pose.y);
    // Overlap-gated DIoU: the centre-distance push only acts while the
    // proxies overlap, so touching boxes are not repelled.
    const Jet rho = inter / min(pa.area, pb.area);
    return iou - d2 / (cx * cx + cy * cy) * rho;
}

Jet overlap_ratio(const JetBox& a, const JetBox& b) {
    const AxisBox pa = proxy_bounds(a);
    const AxisBox pb = proxy_bounds(b);
    const Jet ix = min(pa.x1, pb.x1) - max(pa.x0, pb.x0);
    const Jet iy = min(pa.y1, pb.y1) - max(pa.y0, pb.y0);
    if (ix.value() <= 0.0 || iy.value() <= 0.0) return Jet(0.0);
    return ix * iy / min(pa.area, pb.area);
}

Jet boundary(const JetBox& box, const Room& room) {
    Jet total(0.0);
    for (const auto& c : corners(box)) {
        total += hinge(-c.x) + hinge(c.x - room.length) + hinge(-c.y) + hinge(c.y - room.width);
    }
    return total;
}

Jet distance(const JetBox& a, const JetBox& b, const Jet& d_star) {
    const Jet d = sqrt(square(a.pose.x - b.pose.x) + square(a.pose.y - b.pose.y));
    return square(d - d_star);
}

Jet gap(const JetBox& a, const JetBox& b, const Jet& g) { return square(min_boundary_distance(a, b) - g); }

Jet against_wall(const JetBox& box, Wall wall, const Room& room) {
    const auto e = footprint_extents(box);
    Jet offset;
    switch (wall) {
        case Wall::left: offset = box.pose.x - e.x * 0.5; break;
        case Wall::right: offset = box.pose.x - (room.length - e.x * 0.5); break;
        case Wall::bottom: offset = box.pose.y - e.y * 0.5; break;
        case Wall::top: offset = box.pose.y - (room.width - e.y * 0.5); break;
    }
    return square(offset) + (1.0 - cos(box.pose.theta - wall_facing(wall)));
}

Jet corner(const JetBox& box, Corner corner, Wall wall, const Room& room) {
    if (!wall_adjacent(corner, wall)) throw std::invalid_argument("wall is not adjacent to corner");
    const auto e = footprint_extents(box);
    const bool left = corner == Corner::bottom_left || corner == Corner::top_left;
    const bool bottom = corner == Corner::bottom_left || corner == Corner::bottom_right;
    const Jet tx = left ? e.x * 0.5 : room.length - e.x * 0.5;
    const Jet ty = bottom ? e.y * 0.5 : room.width - e.y * 0.5;
    return square(box.pose.x - tx) + square(box.pose.y - ty) + (1.0 - cos(box.pose.theta - wall_facing(wall)));
}

Jet facing(const JetBox& a, const JetBox& b) {
    const Jet dx = b.pose.x - a.pose.x;
    const Jet dy = b.pose.y - a.pose.y;
    const Jet n = sqrt(dx * dx + dy * dy);
    return 1.0 - (cos(a.pose.theta) * dx + sin(a.pose.theta) * dy) / (n + kFacingEpsilon);
}

Jet directional(const JetBox& source, const JetBox& target, RelationKind direction, double p) {
    const auto local = to_local(target.pose, BasicVec2<Jet>{source.pose.x, source.pose.y});
    const Jet rel = source.pose.theta - target.pose.theta;
    const Jet c = cos(rel);
    const Jet s = sin(rel);
    const Jet rx = abs(source.half_l * c) + abs(source.half_w * s);
    const Jet ry = abs(source.half_l * s) + abs(source.half_w * c);
    const Jet& ex = target.half_l;
    const Jet& ey = target.half_w;
    const double skew = 2.0 * p - 1.0;
    switch (direction) {
        case RelationKind::left_of: return hinge_sq(local.x + rx + ex) + abs(local.y - skew * (ey - ry));
        case RelationKind::right_of: return hinge_sq(ex - local.x + rx) + abs(local.y - skew * (ey - ry));
        case RelationKind::in_front_of: return hinge_sq(ey - local.y + ry) + abs(local.x - skew * (ex - rx));
        case RelationKind::behind_of: return hinge_sq(local.y + ry + ey) + abs(local.x - skew * (ex - rx));
        default: throw std::invalid_argument("not a directional relation kind");
    }
}

Jet angle(const JetBox& a, const JetBox& b, const Jet& alpha) {
    return 1.0 - cos(a.pose.theta - b.pose.theta - alpha);
}

Jet placement(const JetBox& box, PlacementAxis axis, const Jet& target, const Room& room, double margin) {
    const bool h = axis == PlacementAxis::horizontal;
    const Jet& coord = h ? box.pose.x : box.pose.y;
    return hinge_sq(abs(coord - target) - margin * (h ? room.length : room.width));
}

Jet around(std::span<const JetBox> sources, const JetBox& focal, const Jet& sweep, double center) {
    const std::size_t n = sources.size();
    if (n < 2) throw std::invalid_argument("around needs at least 2 sources");

    // Bearing of each source in the focal frame, measured from local +y
    // toward +x so that (sin, cos) is its unit direction.
    std::vector<Jet> bearings;
    bearings.reserve(n);
    for (const JetBox& s : sources) {
        const auto local = to_local(focal.pose, BasicVec2<Jet>{s.pose.x, s.pose.y});
        Jet b = atan2(local.x, local.y);
        // Shift by a constant multiple of 2*pi so the arc centred on `center`
        // never straddles the cut; gaps are unaffected.
        const double wrap = std::round((b.value() - center) / (2.0 * kPi)) * 2.0 * kPi;
        bearings.push_back(b - wrap);
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return bearings[i].value() < bearings[j].value(); });

    const double gaps = static_cast<double>(n - 1);
    const Jet ideal = sweep / gaps;
    Jet spread(0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        spread += square(bearings[order[i + 1]] - bearings[order[i]] - ideal);
    }
    spread = spread / gaps;

    Jet mean_s(0.0);
    Jet mean_c(0.0);
    for (const Jet& b : bearings) {
        mean_s += sin(b);
        mean_c += cos(b);
    }
    mean_s = mean_s / static_cast<double>(n);
    mean_c = mean_c / static_cast<double>(n);

    // Mean resultant length of n equally spaced bearings: sin(n d) / (n sin d).
    const Jet delta = sweep / (2.0 * gaps);
    Jet resultant;
    if (std::abs(std::sin(delta.value())) < 1e-12) {
        // Limits: 1 as delta -> 0, (-1)^(n+1) as delta -> pi.
        resultant = Jet(delta.value() < 0.5 * kPi || n % 2 == 1 ? 1.0 : -1.0);
    } else {
        resultant = sin(delta * static_cast<double>(n)) / (sin(delta) * static_cast<double>(n));
    }
    const Jet target_s = resultant * std::sin(center);
    const Jet target_c = resultant * std::cos(center);
    return spread + square(mean_s - target_s) + square(mean_c - target_c);
}

}  // namespace penalty

Jet relation_penalty(const Relation& rel, const std::function<JetBox(const std::string&)>& box_of, const Jet& metric,
                     const Room& room) {
    switch (rel.kind) {
        case RelationKind::distance: return penalty::distance(box_of(rel.source()), box_of(rel.target), metric);
        case RelationKind::gap: return penalty::gap(box_of(rel.source()), box_of(rel.target), metric);
        case RelationKind::against_wall:
            return penalty::against_wall(box_of(rel.source()), *wall_from_string(rel.target), room);
        case RelationKind::corner:
            return penalty::corner(box_of(rel.source()), *corner_from_string(rel.target), rel.wall.value(), room);
        case RelationKind::facing: return penalty::facing(box_of(rel.source()), box_of(rel.target));
        case RelationKind::left_of:
        case RelationKind::right_of:
        case RelationKind::in_front_of:
        case RelationKind::behind_of:
            return penalty::directional(box_of(rel.source()), box_of(rel.target), rel.kind, rel.fraction);
        case RelationKind::angle_offset: return penalty::angle(box_of(rel.source()), box_of(rel.target), metric);
        case RelationKind::h_place:
            return penalty::placement(box_of(rel.source()), PlacementAxis::horizontal, metric, room, rel.margin);
        case RelationKind::v_place:
            return penalty::placement(box_of(rel.source()), PlacementAxis::vertical, metric, room, rel.margin);
        case RelationKind::around: {
            std::vector<JetBox> sources;
            sources.reserve(rel.sources.size());
            for (const auto& id : rel.sources) sources.push_back(box_of(id));
            return penalty::around(sources, box_of(rel.target), metric, rel.center);
        }
    }
    throw std::invalid_argument("unhandled relation kind");
}

JetBox seed_box(const FootprintBox& box, std::size_t first, std::size_t dim) {
    return {{Jet::variable(box.pose.x, first, dim), Jet::variable(box.pose.y, first + 1, dim),
             Jet::variable(box.pose.theta, first + 2, dim)},
            Jet(box.half_l),
            Jet(box.half_w)};
}

JetBox constant_box(const FootprintBox& box) {
    return {{Jet(box.pose.x), Jet(box.pose.y), Jet(box.pose.theta)}, Jet(box.half_l), Jet(box.half_w)};
}

FootprintBox box_value(const JetBox& box) {
    return {{box.pose.x.value(), box.pose.y.value(), box.pose.theta.value()}, box.half_l.value(), box.half_w.value()};
}

LossValue collision_loss(const FootprintBox& a, const FootprintBox& b) {
    return to_loss(penalty::collision(seed_box(a, 0, 6), seed_box(b, 3, 6)), 6);
}

LossValue boundary_loss(const FootprintBox& box, const Room& room) {
    return to_loss(penalty::boundary(seed_box(box, 0, 3), room), 3);
}

LossValue distance_loss(const FootprintBox& a, const FootprintBox& b, double d_star) {
    return to_loss(penalty::distance(seed_box(a, 0, 7), seed_box(b, 3, 7), Jet::variable(d_star, 6, 7)), 7);
}

LossValue gap_loss(const FootprintBox& a, const FootprintBox& b, double g) {
    return to_loss(penalty::gap(seed_box(a, 0, 7), seed_box(b, 3, 7), Jet::variable(g, 6, 7)), 7);
}

LossValue against_wall_loss(const FootprintBox& box, Wall wall, const Room& room) {
    return to_loss(penalty::against_wall(seed_box(box, 0, 3), wall, room), 3);
}

LossValue corner_loss(const FootprintBox& box, Corner corner, Wall wall, const Room& room) {
    return to_loss(penalty::corner(seed_box(box, 0, 3), corner, wall, room), 3);
}

LossValue facing_loss(const FootprintBox& a, const FootprintBox& b) {
    return to_loss(penalty::facing(seed_box(a, 0, 6), seed_box(b, 3, 6)), 6);
}

LossValue directional_loss(const FootprintBox& source, const FootprintBox& target, RelationKind direction, double p) {
    return to_loss(penalty::directional(seed_box(source, 0, 6), seed_box(target, 3, 6), direction, p), 6);
}

LossValue angle_loss(const FootprintBox& a, const FootprintBox& b, double alpha) {
    return to_loss(penalty::angle(seed_box(a, 0, 7), seed_box(b, 3, 7), Jet::variable(alpha, 6, 7)), 7);
}

LossValue placement_loss(const FootprintBox& box, PlacementAxis axis, double target, const Room& room, double margin) {
    return to_loss(penalty::placement(seed_box(box, 0, 4), axis, Jet::variable(target, 3, 4), room, margin), 4);
}

LossValue around_loss(std::span<const FootprintBox> sources, const FootprintBox& focal, double sweep, double center) {
    if (sources.size() < 2) throw std::invalid_argument("around needs at least 2 sources");
    const std::size_t dim = 3 * (sources.size() + 1) + 1;
    std::vector<JetBox> seeded;
    seeded.reserve(sources.size());
    for (std::size_t i = 0; i < sources.size(); ++i) seeded.push_back(seed_box(sources[i], 3 * i, dim));
    const JetBox f = seed_box(focal, 3 * sources.size(), dim);
    return to_loss(penalty::around(seeded, f, Jet::variable(sweep, dim - 1, dim), center), dim);
}

}  // namespace framelayout
