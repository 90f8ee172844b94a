// Acceptance runner: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
//
// Usage: acceptance <path-to-framelayout-cli> [scratch-dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "framelayout/constraints.hpp"
#include "framelayout/geometry.hpp"
#include "framelayout/graph.hpp"
#include "framelayout/harness.hpp"
#include "framelayout/imagination.hpp"
#include "framelayout/jet.hpp"
#include "framelayout/metrics.hpp"
#include "framelayout/objective.hpp"
#include "framelayout/optimizer.hpp"
#include "framelayout/scene.hpp"
#include "support/gradient_cases.hpp"
#include "support/graph_gen.hpp"
#include "support/oracles.hpp"
#include "support/paths.hpp"

using namespace framelayout;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream o;
    o.precision(3);
    o << v;
    return o.str();
}

double cpu_seconds() { return static_cast<double>(std::clock()) / CLOCKS_PER_SEC; }

const std::vector<std::string> kFixtures{"dining_set", "star_unit", "bookstore_rows", "conflict_room", "mixed_ten"};

// ---------------------------------------------------------------------------

Verdict gradients() {
    const double start = cpu_seconds();
    std::size_t failures = 0, checked = 0;
    double worst = 0.0;
    std::string worst_name;
    std::uint64_t seed = 1000;
    for (const auto& gen : gradcase::generators()) {
        const auto rep = gradcase::run_generator(gen, 200, seed++);
        failures += rep.failures;
        checked += rep.accepted;
        if (rep.accepted < 200) ++failures;
        if (rep.worst_rel > worst) {
            worst = rep.worst_rel;
            worst_name = rep.name;
        }
    }
    const double elapsed = cpu_seconds() - start;
    return {failures == 0 && elapsed < 30.0,
            std::to_string(gradcase::generators().size()) + " losses, " + std::to_string(checked) +
                " configurations, failures " + std::to_string(failures) + ", worst rel " + fmt(worst) + " (" +
                worst_name + "), " + fmt(elapsed) + " s"};
}

// ---------------------------------------------------------------------------

SceneSpec random_unit_scene(std::mt19937_64& rng) {
    auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    SceneSpec s;
    s.room = {20.0, 20.0, 3.0};
    const std::size_t members = pick(2, 10);
    Unit u{"u", "anchor", {}};
    s.assets.push_back({"anchor", "", uni(0.5, 2.0), uni(0.5, 2.0), 1.0});
    for (std::size_t m = 0; m < members; ++m) {
        const std::string id = "m" + std::to_string(m);
        s.assets.push_back({id, "", uni(0.3, 1.2), uni(0.3, 1.2), 1.0});
        u.members.push_back(id);
    }
    s.units.push_back(u);
    s.assets.push_back({"outside", "", 1.0, 1.0, 1.0});

    const std::vector<RelationKind> kinds{RelationKind::distance,  RelationKind::gap,         RelationKind::facing,
                                          RelationKind::left_of,   RelationKind::right_of,    RelationKind::in_front_of,
                                          RelationKind::behind_of, RelationKind::angle_offset};
    const std::size_t count = pick(1, 15);
    for (std::size_t r = 0; r < count; ++r) {
        Relation rel;
        rel.kind = kinds[pick(0, kinds.size() - 1)];
        rel.scope = Scope::intra;
        rel.unit = "u";
        const std::size_t a = pick(0, members), b = (a + pick(1, members)) % (members + 1);
        auto name = [&](std::size_t i) { return i == 0 ? std::string("anchor") : "m" + std::to_string(i - 1); };
        rel.sources = {name(a)};
        rel.target = name(b);
        rel.metric = rel.kind == RelationKind::angle_offset ? uni(-3.0, 3.0) : uni(0.2, 2.0);
        rel.fraction = uni(0.0, 1.0);
        s.relations.push_back(rel);
    }
    validate_scene(s);
    return s;
}

Verdict cancellation_gradient() {
    std::mt19937_64 rng(2024);
    double worst_analytic = 0.0, worst_fd = 0.0, worst_rigid = 0.0;
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        const SceneSpec spec = random_unit_scene(rng);
        const SceneIndex index = index_scene(spec);
        const ParamState state = init_state(spec, index, static_cast<std::uint64_t>(trial));
        const std::vector<double> flat = state.flatten();
        const std::size_t unit_slot = 3 * index.independents.size();
        const std::size_t n = spec.assets.size();

        auto intra_sum = [&](const FrameInputs& in) {
            Jet total(0.0);
            for (const auto& cr : index.relations) {
                if (cr.relation.scope == Scope::intra) total += compiled_relation_penalty(index, in, cr);
            }
            return total;
        };
        const Jet mixed = intra_sum(mixed_inputs(index, flat));
        for (std::size_t c = 0; c < 3; ++c) worst_analytic = std::max(worst_analytic, std::abs(mixed.partial(unit_slot + c)));
        for (std::size_t c = 0; c < 3; ++c) {
            std::vector<double> up = flat, down = flat;
            up[unit_slot + c] += h;
            down[unit_slot + c] -= h;
            const double fd = (intra_sum(mixed_inputs(index, up)).value() - intra_sum(mixed_inputs(index, down)).value()) /
                              (2 * h);
            worst_fd = std::max(worst_fd, std::abs(fd));
        }

        // The same cancellation seen from the room frame: moving every unit
        // asset rigidly by a small transform leaves the intra sum unchanged.
        const std::vector<double> room = global_from_mixed(index, state, n);
        for (std::size_t c = 0; c < 3; ++c) {
            auto moved = [&](double step) {
                Pose2D delta{0, 0, 0};
                (c == 0 ? delta.x : c == 1 ? delta.y : delta.theta) = step;
                const Pose2D unit = state.unit_poses[0];
                const Pose2D shifted = compose(compose(unit, delta), invert(unit));
                std::vector<double> out = room;
                for (std::size_t a : index.unit_assets[0]) {
                    const Pose2D p = compose(shifted, Pose2D{room[3 * a], room[3 * a + 1], room[3 * a + 2]});
                    out[3 * a] = p.x;
                    out[3 * a + 1] = p.y;
                    out[3 * a + 2] = p.theta;
                }
                return intra_sum(global_inputs(index, out, n)).value();
            };
            worst_rigid = std::max(worst_rigid, std::abs((moved(h) - moved(-h)) / (2 * h)));
        }
    }
    return {worst_analytic == 0.0 && worst_fd < 1e-6 && worst_rigid < 1e-6,
            "20 units, max |analytic| " + fmt(worst_analytic) + ", max |FD| " + fmt(worst_fd) +
                ", max |FD| under rigid room-frame motion " + fmt(worst_rigid)};
}

// ---------------------------------------------------------------------------

Verdict savings_closed_form() {
    std::mt19937_64 rng(77);
    int exact = 0;
    std::size_t largest = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const graphgen::Sample s = graphgen::cut_vertex_graph(rng, 50);
        largest = std::max(largest, s.nodes);
        const CostReport r = decomposition_savings(graphgen::to_graph(s), s.units);
        bool valid = true;
        for (const auto& u : r.units) valid = valid && u.valid;
        if (valid && r.closed_form == graphgen::direct_delta(s) && r.delta == r.closed_form) ++exact;
    }
    return {exact == 50, std::to_string(exact) + "/50 graphs exact, largest n = " + std::to_string(largest)};
}

// ---------------------------------------------------------------------------

Verdict star_stiffness() {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst = 0.0;
    for (std::size_t m : {2, 8, 32}) {
        std::vector<double> x(2 * (m + 1)), d(2 * m);
        for (double& v : x) v = u(rng);
        for (double& v : d) v = u(rng);
        auto root_gradient = [&](const std::vector<double>& at) {
            const std::size_t dim = at.size();
            std::vector<Jet> v;
            for (std::size_t i = 0; i < dim; ++i) v.push_back(Jet::variable(at[i], i, dim));
            Jet f(0.0);
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t c = 0; c < 2; ++c) {
                    const Jet r = (v[2 * (i + 1) + c] - v[c]) - Jet(d[2 * i + c]);
                    f += 0.5 * r * r;
                }
            }
            return std::vector<double>{f.partial(0), f.partial(1)};
        };
        const std::vector<double> before = root_gradient(x);
        const double delta[2] = {u(rng) * 0.1, u(rng) * 0.1};
        std::vector<double> moved = x;
        moved[0] += delta[0];
        moved[1] += delta[1];
        const std::vector<double> after = root_gradient(moved);
        for (std::size_t c = 0; c < 2; ++c) {
            worst = std::max(worst, std::abs((after[c] - before[c]) - static_cast<double>(m) * delta[c]));
        }
    }
    return {worst < 1e-10, "M in {2, 8, 32}, max |shift - M*delta| " + fmt(worst)};
}

// ---------------------------------------------------------------------------

Verdict cancellation_identity() {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-10.0, 10.0), a(-oracle::kPi, oracle::kPi);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Pose2D P{u(rng), u(rng), a(rng)}, pi{u(rng), u(rng), a(rng)}, pj{u(rng), u(rng), a(rng)};
        const Pose2D lhs = compose(invert(compose(P, pi)), compose(P, pj));
        const Pose2D rhs = compose(invert(pi), pj);
        worst = std::max({worst, std::abs(lhs.x - rhs.x), std::abs(lhs.y - rhs.y),
                          std::abs(angle_difference(lhs.theta, rhs.theta))});
    }
    return {worst < 1e-9, "1000 triples, max mismatch " + fmt(worst)};
}

// ---------------------------------------------------------------------------

Verdict fixtures_feasible() {
    bool ok = true;
    std::string detail;
    for (const auto& name : kFixtures) {
        const SceneSpec spec = load_scene_file(test_paths::scene(name));
        OptimizerConfig config;
        config.seed = spec.seed;
        const double start = cpu_seconds();
        const SolveResult r = solve(spec, config);
        const double elapsed = cpu_seconds() - start;
        const PhysicalReport phys = eval_physical(spec, r.layout);
        double worst = 0.0;
        for (const auto& c : relation_penalties(spec, r.layout)) worst = std::max(worst, c.penalty);
        const bool pass = phys.cr_percent == 0.0 && phys.or_percent == 0.0 && worst < 1e-3 && elapsed < 120.0 &&
                          r.trace.rows.size() == 2 * config.iterations;
        ok = ok && pass;
        if (!detail.empty()) detail += "; ";
        detail += name + " seed " + std::to_string(spec.seed) + (pass ? "" : " FAIL") + " CR " + fmt(phys.cr_percent) +
                  " OR " + fmt(phys.or_percent) + " max rel " + fmt(worst) + " " + fmt(elapsed) + " s";
    }
    return {ok, detail};
}

// ---------------------------------------------------------------------------

Verdict benchmark_speedup() {
    const SceneSpec spec = load_scene_file(test_paths::scene("star_unit"));
    const auto results = convergence_benchmark(spec, "star_unit", {0, 1, 2, 3, 4}, 0.1);
    int no_worse = 0;
    double sum = 0.0;
    int counted = 0;
    std::string per_seed;
    for (const auto& r : results) {
        const bool reached = !r.failed && r.reparam_iterations.has_value();
        if (reached && (!r.baseline_iterations || *r.reparam_iterations <= *r.baseline_iterations)) ++no_worse;
        if (r.speedup) {
            sum += *r.speedup;
            ++counted;
        }
        per_seed += " " + (r.reparam_iterations ? std::to_string(*r.reparam_iterations) : std::string("-")) + "/" +
                    (r.baseline_iterations ? std::to_string(*r.baseline_iterations) : std::string("-"));
    }
    // A seed whose speedup is undefined counts as 0 in the mean.
    const double mean = sum / static_cast<double>(results.size());
    return {no_worse >= 4 && mean >= 1.2 && counted == static_cast<int>(results.size()),
            std::to_string(no_worse) + "/5 seeds no worse, mean speedup " + fmt(mean) +
                ", iterations reparam/baseline:" + per_seed};
}

// ---------------------------------------------------------------------------

struct FastBox {
    double cx, cy, c, s, hl, hw;
    explicit FastBox(const FootprintBox& b)
        : cx(b.pose.x), cy(b.pose.y), c(std::cos(b.pose.theta)), s(std::sin(b.pose.theta)), hl(b.half_l), hw(b.half_w) {}
    bool inside(double px, double py) const {
        const double dx = px - cx, dy = py - cy;
        return std::abs(c * dx + s * dy) <= hl && std::abs(-s * dx + c * dy) <= hw;
    }
};

// Monte-Carlo area of {p in region : pred(p)} over an axis-aligned region.
template <typename Pred>
double mc_region(double x0, double x1, double y0, double y1, std::size_t samples, std::mt19937_64& rng, Pred pred) {
    if (x1 <= x0 || y1 <= y0) return 0.0;
    std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double px = ux(rng), py = uy(rng);
        if (pred(px, py)) ++hits;
    }
    return (x1 - x0) * (y1 - y0) * static_cast<double>(hits) / static_cast<double>(samples);
}

Verdict metric_oracle() {
    constexpr std::size_t kSamples = 1000000;
    std::mt19937_64 rng(404), mc(505);
    auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    std::size_t compared = 0, excluded = 0, mismatches = 0;
    for (int scene = 0; scene < 100; ++scene) {
        SceneSpec spec;
        spec.room = {uni(3.0, 6.0), uni(3.0, 6.0), 2.5};
        Layout layout;
        const int n = static_cast<int>(uni(3, 7));
        for (int i = 0; i < n; ++i) {
            const std::string id = "a" + std::to_string(i);
            spec.assets.push_back({id, "", uni(0.3, 1.5), uni(0.3, 1.5), 1.0});
            layout.poses[id] = {uni(-0.3, spec.room.length + 0.3), uni(-0.3, spec.room.width + 0.3), 0.5,
                                uni(-oracle::kPi, oracle::kPi)};
        }
        const PhysicalReport report = eval_physical(spec, layout);
        const auto boxes = layout_boxes(spec, layout);
        const ConvexPolygon room = ConvexPolygon::rectangle(0, 0, spec.room.length, spec.room.width);

        std::vector<bool> mc_collide(n, false), skip_collide(n, false);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double exact =
                    polygon_intersection_area(ConvexPolygon::from_box(boxes[i]), ConvexPolygon::from_box(boxes[j]));
                const AxisBounds bi = axis_bounds(boxes[i]), bj = axis_bounds(boxes[j]);
                const FastBox fi(boxes[i]), fj(boxes[j]);
                const double est = mc_region(std::max(bi.x.lo, bj.x.lo), std::min(bi.x.hi, bj.x.hi),
                                             std::max(bi.y.lo, bj.y.lo), std::min(bi.y.hi, bj.y.hi), kSamples, mc,
                                             [&](double x, double y) { return fi.inside(x, y) && fj.inside(x, y); });
                if (std::abs(exact - kCollisionTolerance) < 1e-5) {
                    skip_collide[i] = skip_collide[j] = true;
                    continue;
                }
                if (est > kCollisionTolerance) mc_collide[i] = mc_collide[j] = true;
            }
        }
        for (int i = 0; i < n; ++i) {
            const std::string& id = spec.assets[i].id;
            const bool flagged =
                std::find(report.colliding_ids.begin(), report.colliding_ids.end(), id) != report.colliding_ids.end();
            // An asset in any near-threshold pair has an undecidable flag.
            if (skip_collide[i]) {
                ++excluded;
            } else {
                ++compared;
                if (flagged != mc_collide[i]) ++mismatches;
            }

            const double inside = polygon_intersection_area(ConvexPolygon::from_box(boxes[i]), room);
            const double exact_out = 4 * boxes[i].half_l * boxes[i].half_w - inside;
            const bool oob = std::find(report.oob_ids.begin(), report.oob_ids.end(), id) != report.oob_ids.end();
            if (std::abs(exact_out - kOutOfRoomTolerance) < 1e-5) {
                ++excluded;
                continue;
            }
            const AxisBounds b = axis_bounds(boxes[i]);
            const FastBox f(boxes[i]);
            const double est_out = mc_region(b.x.lo, b.x.hi, b.y.lo, b.y.hi, kSamples, mc, [&](double x, double y) {
                return f.inside(x, y) && (x < 0 || y < 0 || x > spec.room.length || y > spec.room.width);
            });
            ++compared;
            if (oob != (est_out > kOutOfRoomTolerance)) ++mismatches;
        }
    }
    return {mismatches == 0, "100 scenes, " + std::to_string(compared) + " flags compared, " + std::to_string(excluded) +
                                 " boundary cases excluded, mismatches " + std::to_string(mismatches)};
}

// ---------------------------------------------------------------------------

Verdict revision_loop() {
    bool ok = true;
    std::string detail;
    for (const auto& name : kFixtures) {
        const SceneSpec spec = load_scene_file(test_paths::scene(name));
        const RevisionResult r = imagine_and_revise(spec, baseline_reviser, 10);
        std::size_t edits = 0;
        for (const auto& it : r.report.history) edits += it.edits.size();
        const bool unchanged = serialize_scene(r.spec) == serialize_scene(spec);
        bool pass = r.report.converged;
        if (name != "conflict_room") pass = pass && r.report.iterations == 1 && unchanged && edits == 0;
        else pass = pass && !unchanged;
        ok = ok && pass;
        if (!detail.empty()) detail += "; ";
        detail += name + (r.report.converged ? " converged at t=" + std::to_string(r.report.iterations) : " not converged") +
                  ", " + std::to_string(edits) + " edits";
    }
    return {ok, detail};
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict cli_determinism(const std::string& cli, const fs::path& scratch) {
    fs::create_directories(scratch);
    std::vector<std::string> outputs[2];
    for (int run = 0; run < 2; ++run) {
        const fs::path base = scratch / ("run" + std::to_string(run));
        const std::string cmd = "\"" + cli + "\" solve \"" + test_paths::scene("mixed_ten") + "\" --seed 3 --out \"" +
                                base.string() + ".json\" --svg \"" + base.string() + ".svg\" --trace \"" + base.string() +
                                ".csv\" > \"" + base.string() + ".stdout\"";
        if (std::system(cmd.c_str()) != 0) return {false, "cli solve exited non-zero: " + cmd};
        for (const char* ext : {".json", ".csv", ".svg"}) outputs[run].push_back(slurp(base.string() + ext));
    }
    bool same = true;
    std::string detail;
    const char* names[] = {"layout", "trace", "svg"};
    for (int k = 0; k < 3; ++k) {
        const bool eq = !outputs[0][k].empty() && outputs[0][k] == outputs[1][k];
        same = same && eq;
        detail += std::string(k ? ", " : "") + names[k] + (eq ? " identical" : " DIFFERENT") + " (" +
                  std::to_string(outputs[0][k].size()) + " bytes)";
    }
    return {same, detail};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <framelayout-cli> [scratch-dir]\n";
        return 64;
    }
    const std::string cli = argv[1];
    const fs::path scratch = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "framelayout_acceptance";

    struct Criterion {
        const char* name;
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> criteria{
        {"finite-difference gradients", gradients},
        {"intra-unit gradient cancellation", cancellation_gradient},
        {"closed-form frame-switch savings", savings_closed_form},
        {"star-graph stiffness", star_stiffness},
        {"relative-pose cancellation identity", cancellation_identity},
        {"solver feasibility on fixtures", fixtures_feasible},
        {"convergence speedup on star unit", benchmark_speedup},
        {"physical metrics vs Monte-Carlo oracle", metric_oracle},
        {"imagine-and-revise convergence", revision_loop},
        {"cli solve determinism", [&] { return cli_determinism(cli, scratch); }},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!v.pass) ++failed;
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << " (" << criteria[i].name << "): " << v.detail
                  << " [" << fmt(secs) << " s wall]" << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed;
}
