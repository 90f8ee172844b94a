#include "framelayout/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace framelayout {

namespace {

constexpr double kConvexityTolerance = 1e-12;

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double shoelace(const std::vector<Vec2>& v) {
    double twice = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& p = v[i];
        const Vec2& q = v[(i + 1) % v.size()];
        twice += p.x * q.y - q.x * p.y;
    }
    return 0.5 * twice;
}

// Intersection of segment p->q with the infinite line through a->b.
Vec2 line_intersection(const Vec2& p, const Vec2& q, const Vec2& a, const Vec2& b) {
    const double dp = cross(a, b, p);
    const double dq = cross(a, b, q);
    const double t = dp / (dp - dq);
    return {p.x + (q.x - p.x) * t, p.y + (q.y - p.y) * t};
}

}  // namespace

double normalize_angle(double theta) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(theta, two_pi);
    if (r <= -std::numbers::pi) r += two_pi;
    if (r > std::numbers::pi) r -= two_pi;
    return r;
}

double angle_difference(double a, double b) { return normalize_angle(a - b); }

AxisBounds axis_bounds(const FootprintBox& box) {
    const FootprintExtents e = footprint_extents(box);
    return {{box.pose.x - 0.5 * e.x, box.pose.x + 0.5 * e.x}, {box.pose.y - 0.5 * e.y, box.pose.y + 0.5 * e.y}};
}

bool collide_proxy(const FootprintBox& a, const FootprintBox& b) {
    const AxisBounds ba = axis_bounds(a);
    const AxisBounds bb = axis_bounds(b);
    const double ox = std::min(ba.x.hi, bb.x.hi) - std::max(ba.x.lo, bb.x.lo);
    const double oy = std::min(ba.y.hi, bb.y.hi) - std::max(ba.y.lo, bb.y.lo);
    return ox > 0.0 && oy > 0.0;
}

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3) throw std::invalid_argument("convex polygon needs at least 3 vertices");
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const Vec2& o = vertices_[i];
        const Vec2& a = vertices_[(i + 1) % vertices_.size()];
        const Vec2& b = vertices_[(i + 2) % vertices_.size()];
        if (!std::isfinite(o.x) || !std::isfinite(o.y)) throw std::invalid_argument("non-finite polygon vertex");
        if (cross(o, a, b) < -kConvexityTolerance) {
            throw std::invalid_argument("polygon is not convex or not counter-clockwise");
        }
    }
}

ConvexPolygon ConvexPolygon::from_box(const FootprintBox& box) {
    const auto c = corners(box);
    return ConvexPolygon({c.begin(), c.end()});
}

ConvexPolygon ConvexPolygon::rectangle(double min_x, double min_y, double max_x, double max_y) {
    return ConvexPolygon({{min_x, min_y}, {max_x, min_y}, {max_x, max_y}, {min_x, max_y}});
}

double ConvexPolygon::area() const { return empty() ? 0.0 : std::max(0.0, shoelace(vertices_)); }

bool ConvexPolygon::contains(const Vec2& p) const {
    if (empty()) return false;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (cross(vertices_[i], vertices_[(i + 1) % vertices_.size()], p) < 0.0) return false;
    }
    return true;
}

ConvexPolygon polygon_intersection(const ConvexPolygon& a, const ConvexPolygon& b) {
    if (a.empty() || b.empty() || a.area() <= 0.0 || b.area() <= 0.0) return {};

    // Sutherland-Hodgman: clip `a` against every edge of convex `b`.
    std::vector<Vec2> out = a.vertices();
    const auto& clip = b.vertices();
    for (std::size_t i = 0; i < clip.size() && !out.empty(); ++i) {
        const Vec2& ea = clip[i];
        const Vec2& eb = clip[(i + 1) % clip.size()];
        std::vector<Vec2> in;
        in.swap(out);
        for (std::size_t j = 0; j < in.size(); ++j) {
            const Vec2& cur = in[j];
            const Vec2& prev = in[(j + in.size() - 1) % in.size()];
            const bool cur_in = cross(ea, eb, cur) >= 0.0;
            const bool prev_in = cross(ea, eb, prev) >= 0.0;
            if (cur_in) {
                if (!prev_in) out.push_back(line_intersection(prev, cur, ea, eb));
                out.push_back(cur);
            } else if (prev_in) {
                out.push_back(line_intersection(prev, cur, ea, eb));
            }
        }
    }
    if (out.size() < 3 || shoelace(out) <= 0.0) return {};

    // Clipping convex inputs yields a convex polygon; round-off can leave tiny
    // negative turns on near-collinear vertices, so skip re-validation.
    return ConvexPolygon(std::move(out), ConvexPolygon::Unchecked{});
}

double polygon_intersection_area(const ConvexPolygon& a, const ConvexPolygon& b) {
    return polygon_intersection(a, b).area();
}

}  // namespace framelayout
