#pragma once

#include <array>
#include <numbers>
#include <span>
#include <vector>

#include "framelayout/jet.hpp"

namespace framelayout {

template <class T>
struct BasicVec2 {
    T x{};
    T y{};
};

/// Planar pose. `theta` is stored raw and only normalized where angles are
/// compared, so losses built from cos/sin stay wrap-free.
template <class T>
struct BasicPose {
    T x{};
    T y{};
    T theta{};
};

/// Upright box projected to the floor: `half_l` runs along local x and
/// `half_w` along local y at theta = 0.
template <class T>
struct BasicBox {
    BasicPose<T> pose;
    T half_l{};
    T half_w{};
};

template <class T>
struct BasicExtents {
    T x{};
    T y{};
};

using Vec2 = BasicVec2<double>;
using Pose2D = BasicPose<double>;
using FootprintBox = BasicBox<double>;
using FootprintExtents = BasicExtents<double>;

using JetPose = BasicPose<Jet>;
using JetBox = BasicBox<Jet>;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
};

struct AxisBounds {
    Interval x;
    Interval y;
};

/// Maps an angle to (-pi, pi].
double normalize_angle(double theta);

/// Signed difference a - b normalized to (-pi, pi].
double angle_difference(double a, double b);

// ---------------------------------------------------------------------------
// Pose algebra

/// outer ⊕ inner: express `inner` (given in outer's frame) in outer's parent frame.
template <class T>
BasicPose<T> compose(const BasicPose<T>& outer, const BasicPose<T>& inner) {
    const T c = cos(outer.theta);
    const T s = sin(outer.theta);
    return {outer.x + inner.x * c - inner.y * s, outer.y + inner.x * s + inner.y * c, outer.theta + inner.theta};
}

template <class T>
BasicPose<T> invert(const BasicPose<T>& p) {
    const T c = cos(p.theta);
    const T s = sin(p.theta);
    return {-(p.x * c + p.y * s), p.x * s - p.y * c, -p.theta};
}

/// Point given in the pose's frame, returned in the parent frame.
template <class T>
BasicVec2<T> transform_point(const BasicPose<T>& pose, const BasicVec2<T>& local) {
    const T c = cos(pose.theta);
    const T s = sin(pose.theta);
    return {pose.x + local.x * c - local.y * s, pose.y + local.x * s + local.y * c};
}

/// Point given in the parent frame, returned in the pose's frame: R(theta)^T (p - t).
template <class T>
BasicVec2<T> to_local(const BasicPose<T>& pose, const BasicVec2<T>& world) {
    const T c = cos(pose.theta);
    const T s = sin(pose.theta);
    const T dx = world.x - pose.x;
    const T dy = world.y - pose.y;
    return {dx * c + dy * s, dy * c - dx * s};
}

// ---------------------------------------------------------------------------
// Footprints

/// Full axis-aligned extents of the yaw-rotated footprint.
template <class T>
BasicExtents<T> footprint_extents(const BasicBox<T>& box) {
    const T c = cos(box.pose.theta);
    const T s = sin(box.pose.theta);
    const T l = box.half_l * 2.0;
    const T w = box.half_w * 2.0;
    return {abs(l * c) + abs(w * s), abs(l * s) + abs(w * c)};
}

AxisBounds axis_bounds(const FootprintBox& box);

/// Proxy collision: strictly positive interval overlap on both axes.
bool collide_proxy(const FootprintBox& a, const FootprintBox& b);

/// Rotated corners, counter-clockwise starting from local (-l/2, -w/2).
template <class T>
std::array<BasicVec2<T>, 4> corners(const BasicBox<T>& box) {
    const T hl = box.half_l;
    const T hw = box.half_w;
    return {transform_point(box.pose, BasicVec2<T>{-hl, -hw}), transform_point(box.pose, BasicVec2<T>{hl, -hw}),
            transform_point(box.pose, BasicVec2<T>{hl, hw}), transform_point(box.pose, BasicVec2<T>{-hl, hw})};
}

/// Signed distance from a world point to the box: negative inside.
template <class T>
T signed_distance_to_box(const BasicVec2<T>& point, const BasicBox<T>& box) {
    const BasicVec2<T> local = to_local(box.pose, point);
    const T qx = abs(local.x) - box.half_l;
    const T qy = abs(local.y) - box.half_w;
    if (value_of(qx) > 0.0 && value_of(qy) > 0.0) return sqrt(qx * qx + qy * qy);
    return max(qx, qy);
}

inline constexpr int kSamplesPerEdge = 4;

/// Boundary probes: the 4 corners plus kSamplesPerEdge interior points per edge.
template <class T>
std::vector<BasicVec2<T>> boundary_samples(const BasicBox<T>& box) {
    const auto c = corners(box);
    std::vector<BasicVec2<T>> out;
    out.reserve(4 * (1 + kSamplesPerEdge));
    for (int e = 0; e < 4; ++e) {
        const auto& p = c[e];
        const auto& q = c[(e + 1) % 4];
        out.push_back(p);
        for (int k = 1; k <= kSamplesPerEdge; ++k) {
            const double t = static_cast<double>(k) / (kSamplesPerEdge + 1);
            out.push_back({p.x + (q.x - p.x) * t, p.y + (q.y - p.y) * t});
        }
    }
    return out;
}

/// Approximate minimum distance between box boundaries via probe-to-box
/// signed distances in both directions. Exact for disjoint boxes (a closest
/// pair of convex polygons always involves a vertex); negative when the
/// boxes interpenetrate.
template <class T>
T min_boundary_distance(const BasicBox<T>& a, const BasicBox<T>& b) {
    T best;
    bool first = true;
    auto consider = [&](const BasicBox<T>& from, const BasicBox<T>& to) {
        for (const auto& p : boundary_samples(from)) {
            T d = signed_distance_to_box(p, to);
            if (first || value_of(d) < value_of(best)) {
                best = std::move(d);
                first = false;
            }
        }
    };
    consider(a, b);
    consider(b, a);
    return best;
}

// ---------------------------------------------------------------------------
// Exact convex polygons (evaluation grade, double only)

class ConvexPolygon {
public:
    ConvexPolygon() = default;

    /// Vertices must be counter-clockwise and convex (collinear runs allowed).
    /// Throws std::invalid_argument otherwise.
    explicit ConvexPolygon(std::vector<Vec2> vertices);

    static ConvexPolygon from_box(const FootprintBox& box);
    static ConvexPolygon rectangle(double min_x, double min_y, double max_x, double max_y);

    const std::vector<Vec2>& vertices() const { return vertices_; }
    bool empty() const { return vertices_.size() < 3; }
    double area() const;
    bool contains(const Vec2& p) const;

private:
    struct Unchecked {};
    ConvexPolygon(std::vector<Vec2> vertices, Unchecked) : vertices_(std::move(vertices)) {}
    friend ConvexPolygon polygon_intersection(const ConvexPolygon& a, const ConvexPolygon& b);

    std::vector<Vec2> vertices_;
};

/// Convex clipping; the result may be empty.
ConvexPolygon polygon_intersection(const ConvexPolygon& a, const ConvexPolygon& b);

double polygon_intersection_area(const ConvexPolygon& a, const ConvexPolygon& b);

}  // namespace framelayout
