#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "framelayout/errors.hpp"
#include "framelayout/geometry.hpp"
#include "framelayout/imagination.hpp"
#include "framelayout/scene.hpp"
#include "support/oracles.hpp"
#include "support/paths.hpp"

using namespace framelayout;
using oracle::kPi;

namespace {

const char* kUnitScene = R"({
  "room": {"length": 8, "width": 6, "height": 3},
  "assets": [{"id": "desk", "size": [2, 1, 0.75]}, {"id": "chair", "size": [1, 1, 0.9]},
             {"id": "lamp", "size": [0.4, 0.4, 1.5]}],
  "units": [{"id": "u", "anchor": "desk", "members": ["chair"]}],
  "relations": [], "seed": 0})";

SceneSpec two_boxes(double d) {
    return parse_scene(R"({"room": {"length": 6, "width": 5, "height": 2.5},
      "assets": [{"id": "a", "size": [1, 1, 1]}, {"id": "b", "size": [1, 1, 1]}], "units": [],
      "relations": [{"kind": "distance", "source": "b", "target": "a", "d": )" +
                       std::to_string(d) + "}]}");
}

std::vector<Relation> no_op(const SceneSpec& spec, const std::vector<Conflict>&) { return spec.relations; }

}  // namespace

TEST_SUITE("imagination") {

TEST_CASE("axis-aligned poses give raw sizes as extents") {
    const SceneSpec spec = parse_scene(kUnitScene);
    const CognitiveMaps maps =
        build_maps(spec, {{"desk", {3, 2, 0}}, {"chair", {3, 3.5, 0}}, {"lamp", {7, 5, 0}}});
    const MapEntry& lamp = maps.global.entries.at("lamp");
    CHECK(lamp.extents.x == doctest::Approx(0.4));
    CHECK(lamp.extents.y == doctest::Approx(0.4));
    const MapEntry& chair = maps.local[0].entries.at("chair");
    CHECK(chair.extents.x == doctest::Approx(1.0));
    CHECK(chair.pose.y == doctest::Approx(1.5));
}

TEST_CASE("hand-computed bounds for a rotated unit") {
    // Anchor 2 x 1 at (3, 2) turned by pi/2; chair 1 x 1 at (3, 3.5).
    // In the anchor frame the chair sits at (1.5, 0), so the unit box spans
    // x in [-1, 2], y in [-0.5, 0.5]: 3 x 1 centred at local (0.5, 0), which
    // is room (3, 2.5). Turned by pi/2 its room bounds are x [2.5, 3.5], y [1, 4].
    const SceneSpec spec = parse_scene(kUnitScene);
    const CognitiveMaps maps =
        build_maps(spec, {{"desk", {3, 2, kPi / 2}}, {"chair", {3, 3.5, kPi / 2}}, {"lamp", {7, 5, 0}}});
    REQUIRE(maps.local.size() == 1);
    const CognitiveMap& local = maps.local[0];
    CHECK(local.scope == "u");
    const MapEntry& anchor = local.entries.at("desk");
    CHECK(anchor.pose.x == 0.0);
    CHECK(anchor.bounds.x.lo == doctest::Approx(-1.0));
    CHECK(anchor.bounds.y.hi == doctest::Approx(0.5));
    const MapEntry& chair = local.entries.at("chair");
    CHECK(chair.pose.x == doctest::Approx(1.5));
    CHECK(std::abs(chair.pose.y) < 1e-12);
    CHECK(chair.bounds.x.lo == doctest::Approx(1.0));
    CHECK(chair.bounds.x.hi == doctest::Approx(2.0));

    const MapEntry& unit = maps.global.entries.at("u");
    CHECK(unit.l == doctest::Approx(3.0));
    CHECK(unit.w == doctest::Approx(1.0));
    CHECK(unit.pose.x == doctest::Approx(3.0));
    CHECK(unit.pose.y == doctest::Approx(2.5));
    CHECK(unit.bounds.x.lo == doctest::Approx(2.5));
    CHECK(unit.bounds.x.hi == doctest::Approx(3.5));
    CHECK(unit.bounds.y.lo == doctest::Approx(1.0));
    CHECK(unit.bounds.y.hi == doctest::Approx(4.0));
    CHECK(maps.global.entries.count("desk") == 0);
    CHECK(maps.global.entries.count("chair") == 0);
}

TEST_CASE("member boxes lie inside the unit's global bounds") {
    const SceneSpec spec = load_scene_file(test_paths::scene("dining_set"));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.5, 4.0), a(-kPi, kPi);
    for (int i = 0; i < 100; ++i) {
        std::map<std::string, Pose2D> poses;
        for (const Asset& asset : spec.assets) poses[asset.id] = {u(rng), u(rng), a(rng)};
        const CognitiveMaps maps = build_maps(spec, poses);
        for (const CognitiveMap& local : maps.local) {
            const AxisBounds outer = maps.global.entries.at(local.scope).bounds;
            for (const auto& [id, e] : local.entries) {
                const Pose2D room = compose(local.frame, e.pose);
                for (const auto& p : oracle::rotated_corners(room.x, room.y, room.theta, e.l, e.w)) {
                    CHECK(p.x >= outer.x.lo - 1e-9);
                    CHECK(p.x <= outer.x.hi + 1e-9);
                    CHECK(p.y >= outer.y.lo - 1e-9);
                    CHECK(p.y <= outer.y.hi + 1e-9);
                }
            }
        }
    }
}

TEST_CASE("missing pose is reported") {
    const SceneSpec spec = parse_scene(kUnitScene);
    CHECK_THROWS_AS(build_maps(spec, {{"desk", {3, 2, 0}}}), std::invalid_argument);
}

TEST_CASE("conflict detection cases") {
    const SceneSpec spec = parse_scene(kUnitScene);
    SUBCASE("disjoint scene") {
        const auto maps = build_maps(spec, {{"desk", {2, 2, 0}}, {"chair", {2, 3.5, 0}}, {"lamp", {6, 5, 0}}});
        CHECK(detect_conflicts(maps).empty());
    }
    SUBCASE("coincident independents") {
        const SceneSpec pair = two_boxes(1.0);
        const auto conflicts = detect_conflicts(build_maps(pair, {{"a", {2, 2, 0}}, {"b", {2, 2, 0}}}));
        REQUIRE(conflicts.size() == 1);
        CHECK(conflicts[0].level == ConflictLevel::inter);
        CHECK(conflicts[0].scope == "global");
        CHECK(conflicts[0].pair == std::pair<std::string, std::string>{"a", "b"});
        CHECK(conflicts[0].overlap_x == doctest::Approx(1.0));
        CHECK(conflicts[0].overlap_y == doctest::Approx(1.0));
    }
    SUBCASE("intra conflict inside the unit") {
        const auto conflicts =
            detect_conflicts(build_maps(spec, {{"desk", {2, 2, 0}}, {"chair", {2.5, 2.2, 0}}, {"lamp", {6, 5, 0}}}));
        REQUIRE(conflicts.size() == 1);
        CHECK(conflicts[0].level == ConflictLevel::intra);
        CHECK(conflicts[0].scope == "u");
        CHECK(conflicts[0].pair == std::pair<std::string, std::string>{"chair", "desk"});
        CHECK(conflicts[0].overlap_x == doctest::Approx(1.0));
        CHECK(conflicts[0].overlap_y == doctest::Approx(0.8));
    }
    SUBCASE("independent inside the unit box") {
        const auto conflicts =
            detect_conflicts(build_maps(spec, {{"desk", {2, 2, 0}}, {"chair", {2, 3.5, 0}}, {"lamp", {2.5, 2.7, 0}}}));
        REQUIRE(conflicts.size() == 1);
        CHECK(conflicts[0].pair == std::pair<std::string, std::string>{"lamp", "u"});
    }
}

TEST_CASE("unit boxes that overlap without member contact are not confirmed") {
    // Two L-shaped units whose enclosing boxes interleave.
    const SceneSpec spec = parse_scene(R"({"room": {"length": 10, "width": 10, "height": 3},
      "assets": [{"id": "a1", "size": [1, 1, 1]}, {"id": "a2", "size": [1, 1, 1]},
                 {"id": "b1", "size": [1, 1, 1]}, {"id": "b2", "size": [1, 1, 1]}],
      "units": [{"id": "ua", "anchor": "a1", "members": ["a2"]}, {"id": "ub", "anchor": "b1", "members": ["b2"]}],
      "relations": []})");
    const auto maps = build_maps(spec, {{"a1", {1, 1, 0}}, {"a2", {3, 3, 0}}, {"b1", {3, 1, 0}}, {"b2", {5, 3, 0}}});
    const AxisBounds& ua = maps.global.entries.at("ua").bounds;
    const AxisBounds& ub = maps.global.entries.at("ub").bounds;
    CHECK(ua.x.hi > ub.x.lo);  // the enclosing boxes do overlap
    CHECK(detect_conflicts(maps).empty());

    const auto touching =
        detect_conflicts(build_maps(spec, {{"a1", {1, 1, 0}}, {"a2", {3, 3, 0}}, {"b1", {3.5, 3.2, 0}}, {"b2", {5, 5, 0}}}));
    REQUIRE(touching.size() == 1);
    CHECK(touching[0].pair == std::pair<std::string, std::string>{"ua", "ub"});
}

TEST_CASE("proxy and exact test agree at axis-aligned angles") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0, 3), s(0.1, 1.0);
    std::uniform_int_distribution<int> q(0, 3);
    for (int i = 0; i < 500; ++i) {
        const FootprintBox a{{u(rng), u(rng), q(rng) * kPi / 2}, s(rng), s(rng)};
        const FootprintBox b{{u(rng), u(rng), q(rng) * kPi / 2}, s(rng), s(rng)};
        const double exact = polygon_intersection_area(ConvexPolygon::from_box(a), ConvexPolygon::from_box(b));
        if (exact > 1e-9) CHECK(collide_proxy(a, b));
        else if (exact == 0.0 && min_boundary_distance(a, b) > 1e-9) CHECK_FALSE(collide_proxy(a, b));
    }
}

TEST_CASE("conflict-free specs are returned unchanged at t = 1") {
    for (const char* name : {"dining_set", "star_unit", "bookstore_rows", "mixed_ten"}) {
        CAPTURE(name);
        const SceneSpec spec = load_scene_file(test_paths::scene(name));
        const RevisionResult r = imagine_and_revise(spec, baseline_reviser, 10);
        CHECK(r.report.converged);
        CHECK(r.report.iterations == 1);
        CHECK(serialize_scene(r.spec) == serialize_scene(spec));
        SceneSpec same = spec;
        same.relations = baseline_reviser(spec, {});
        CHECK(serialize_scene(same) == serialize_scene(spec));
    }
}

TEST_CASE("baseline reviser bumps a short distance past the half-extent sum") {
    const SceneSpec spec = two_boxes(0.5);
    const auto first = detect_conflicts(build_maps(spec, imagine_poses(spec)));
    REQUIRE(first.size() == 1);

    const std::vector<Relation> edited = baseline_reviser(spec, first);
    REQUIRE(edited.size() == 1);
    CHECK(edited[0].metric == doctest::Approx(0.5 + 0.5 + kRevisionMargin));

    const RevisionResult r = imagine_and_revise(spec, baseline_reviser, 10);
    CHECK(r.report.converged);
    CHECK(r.report.iterations == 2);
    CHECK(r.spec.relations[0].metric == doctest::Approx(1.05));
    REQUIRE(r.report.history.size() == 2);
    REQUIRE(r.report.history[0].edits.size() == 1);
    CHECK(r.report.history[0].edits[0].before == 0.5);
    CHECK(detect_conflicts(build_maps(r.spec, imagine_poses(r.spec))).empty());
}

TEST_CASE("a pair with no linking relation gets an appended gap") {
    const SceneSpec spec = parse_scene(R"({"room": {"length": 6, "width": 5, "height": 2.5},
      "assets": [{"id": "a", "size": [1, 1, 1]}, {"id": "b", "size": [1, 1, 1]}], "units": [],
      "relations": []})");
    const auto conflicts = detect_conflicts(build_maps(spec, imagine_poses(spec)));
    REQUIRE(conflicts.size() == 1);
    const std::vector<Relation> edited = baseline_reviser(spec, conflicts);
    REQUIRE(edited.size() == 1);
    CHECK(edited[0].kind == RelationKind::gap);
    CHECK(edited[0].metric == doctest::Approx(kRevisionMargin));
    CHECK(edited[0].scope == Scope::inter);
    CHECK(imagine_and_revise(spec, baseline_reviser, 5).report.converged);
}

TEST_CASE("budget exhaustion and loop errors") {
    const SceneSpec spec = two_boxes(0.5);
    const RevisionResult r = imagine_and_revise(spec, no_op, 3);
    CHECK_FALSE(r.report.converged);
    CHECK(r.report.iterations == 3);
    CHECK(r.report.history.size() == 3);
    REQUIRE(r.report.remaining.size() == 1);
    CHECK(r.report.remaining[0].pair == std::pair<std::string, std::string>{"a", "b"});
    const auto doc = nlohmann::json::parse(r.report.to_json());
    CHECK(doc.at("converged") == false);
    CHECK(doc.at("remaining").size() == 1);

    CHECK_THROWS_AS(imagine_and_revise(spec, baseline_reviser, 0), std::invalid_argument);

    const Reviser broken = [](const SceneSpec& s, const std::vector<Conflict>&) {
        std::vector<Relation> out = s.relations;
        out[0].target = "nowhere";
        return out;
    };
    CHECK_THROWS_AS(imagine_and_revise(spec, broken, 3), RevisionError);
}

TEST_CASE("revision edits stay inside implicated scopes") {
    const SceneSpec spec = load_scene_file(test_paths::scene("conflict_room"));
    const RevisionResult r = imagine_and_revise(spec, baseline_reviser, 10);
    CHECK(r.report.converged);
    for (const RevisionIteration& it : r.report.history) {
        std::set<std::string> scopes;
        for (const Conflict& c : it.conflicts) scopes.insert(c.scope);
        for (const RelationEdit& e : it.edits) {
            CAPTURE(e.index);
            CHECK(scopes.count(e.scope) == 1);
        }
    }

}

TEST_CASE("a reviser editing an unimplicated scope is rejected") {
    const SceneSpec spec = parse_scene(R"({"room": {"length": 6, "width": 5, "height": 2.5},
      "assets": [{"id": "desk", "size": [1.2, 0.8, 1]}, {"id": "chair", "size": [0.5, 0.5, 1]},
                 {"id": "lamp", "size": [0.3, 0.3, 1]}],
      "units": [{"id": "u", "anchor": "desk", "members": ["chair"]}],
      "relations": [{"kind": "distance", "source": "chair", "target": "desk", "unit": "u", "d": 0.2},
                    {"kind": "against_wall", "source": "lamp", "target": "L"}]})");
    const auto conflicts = detect_conflicts(build_maps(spec, imagine_poses(spec)));
    REQUIRE(conflicts.size() == 1);
    CHECK(conflicts[0].level == ConflictLevel::intra);

    const Reviser meddling = [](const SceneSpec& s, const std::vector<Conflict>& c) {
        std::vector<Relation> out = baseline_reviser(s, c);
        out[1].target = "R";
        return out;
    };
    CHECK_THROWS_AS(imagine_and_revise(spec, meddling, 5), RevisionError);
    const RevisionResult ok = imagine_and_revise(spec, baseline_reviser, 5);
    CHECK(ok.report.converged);
    CHECK(ok.spec.relations[1].target == "L");
}

}  // TEST_SUITE
