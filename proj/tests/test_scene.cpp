#include <doctest.h>

#include <string>

#include "framelayout/errors.hpp"
#include "framelayout/scene.hpp"
#include "support/paths.hpp"

using namespace framelayout;

namespace {

std::string minimal(const std::string& relations, const std::string& units = "[]") {
    return R"({"room": {"length": 4, "width": 3, "height": 2.5},
      "assets": [{"id": "a", "size": [1, 1, 1]}, {"id": "b", "size": [1, 1, 1]}, {"id": "c", "size": [1, 1, 1]}],
      "units": )" + units + R"(, "relations": )" + relations + R"(, "seed": 3})";
}

}  // namespace

TEST_SUITE("scene") {

TEST_CASE("minimal scene parses") {
    const SceneSpec s = parse_scene(
        R"({"room": {"length": 4, "width": 3, "height": 2.5}, "assets": [{"id": "a", "size": [1, 0.5, 0.7]}],
            "units": [], "relations": [], "seed": 1})");
    CHECK(s.units.empty());
    CHECK(s.assets.size() == 1);
    CHECK(s.assets[0].w == 0.5);
    CHECK(s.seed == 1);
}

TEST_CASE("dining fixture parses with one shared group") {
    const SceneSpec s = load_scene_file(test_paths::scene("dining_set"));
    REQUIRE(s.units.size() == 1);
    CHECK(s.units[0].anchor == "table");
    CHECK(s.units[0].members.size() == 4);
    int intra = 0;
    for (const auto& r : s.relations) {
        if (r.scope == Scope::intra) {
            ++intra;
            CHECK(r.kind == RelationKind::distance);
            CHECK(r.shared_param == std::optional<std::string>("chair_spacing"));
        }
    }
    CHECK(intra == 4);
}

TEST_CASE("every bundled fixture parses and validates") {
    for (const char* name : {"dining_set", "star_unit", "bookstore_rows", "conflict_room", "mixed_ten"}) {
        CAPTURE(name);
        CHECK_NOTHROW(validate_scene(load_scene_file(test_paths::scene(name))));
    }
}

TEST_CASE("syntax and semantic errors") {
    CHECK_THROWS_AS(parse_scene("{not json"), SyntaxError);
    CHECK_THROWS_AS(parse_scene(R"({"room": 3})"), SyntaxError);
    CHECK_THROWS_AS(parse_scene(minimal(R"([{"kind": "distance", "source": "a", "target": "zzz", "d": 1}])")),
                    SemanticError);
    CHECK_THROWS_AS(parse_scene(minimal(R"([{"kind": "teleport", "source": "a", "target": "b"}])")), SemanticError);
    CHECK_THROWS_AS(parse_scene(R"({"room": {"length": 4, "width": 3, "height": 2.5},
        "assets": [{"id": "a", "size": [0, 1, 1]}], "units": [], "relations": []})"),
                    SemanticError);
}

TEST_CASE("member in an inter relation names the relation") {
    const std::string units = R"([{"id": "u", "anchor": "a", "members": ["b"]}])";
    try {
        parse_scene(minimal(R"([{"kind": "distance", "source": "b", "target": "c", "d": 1}])", units));
        FAIL("expected SemanticError");
    } catch (const SemanticError& e) {
        CHECK(e.location() == "relations[0]");
        CHECK(std::string(e.what()).find("member") != std::string::npos);
    }
}

TEST_CASE("duplicate anchors and intra relations outside the unit are rejected") {
    CHECK_THROWS_AS(parse_scene(minimal("[]", R"([{"id": "u", "anchor": "a", "members": ["b"]},
                                                 {"id": "v", "anchor": "a", "members": ["c"]}])")),
                    SemanticError);
    CHECK_THROWS_AS(
        parse_scene(minimal(R"([{"kind": "gap", "source": "b", "target": "c", "unit": "u", "g": 0.1}])",
                            R"([{"id": "u", "anchor": "a", "members": ["b"]}])")),
        SemanticError);
    CHECK_THROWS_AS(parse_scene(minimal(R"([{"kind": "distance", "source": "a", "target": "b", "d": 1, "shared": "s"},
                                             {"kind": "gap", "source": "a", "target": "c", "g": 1, "shared": "s"}])")),
                    SemanticError);
}

TEST_CASE("assignment follows the unit partition") {
    const SceneSpec s = parse_scene(minimal("[]", R"([{"id": "u", "anchor": "a", "members": ["b"]}])"));
    CHECK(assignment(s, "a") == 1);
    CHECK(assignment(s, "b") == 1);
    CHECK(assignment(s, "c") == 0);
    CHECK_THROWS_AS(assignment(s, "nope"), std::out_of_range);
    CHECK(entity_asset(s, "u") == std::optional<std::string>("a"));
}

TEST_CASE("layout serialization round-trips and is canonical") {
    Layout empty;
    CHECK(parse_layout(serialize_layout(empty)) == empty);

    Layout l;
    l.poses["zeta"] = {1.25, 2.5, 0.4, -0.75};
    l.poses["alpha"] = {0.1, 0.2, 0.5, 3.0};
    const std::string text = serialize_layout(l);
    CHECK(parse_layout(text) == l);
    CHECK(serialize_layout(parse_layout(text)) == text);
    CHECK(text.find("alpha") < text.find("zeta"));
}

TEST_CASE("scene serialization round-trips") {
    const SceneSpec s = load_scene_file(test_paths::scene("mixed_ten"));
    const std::string text = serialize_scene(s);
    CHECK(serialize_scene(parse_scene(text)) == text);
}

}  // TEST_SUITE
