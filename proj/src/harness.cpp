#include "framelayout/harness.hpp"

#include <array>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "framelayout/geometry.hpp"
#include "framelayout/metrics.hpp"

namespace framelayout {

namespace {

constexpr double kPixelsPerMetre = 100.0;
constexpr double kPadding = 20.0;

constexpr std::array<const char*, 8> kUnitColours{"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                                                  "#76b7b2", "#edc948", "#b07aa1", "#ff9da7"};
constexpr const char* kIndependentColour = "#9c9c9c";

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::optional<std::size_t> first_at_or_below(const std::vector<double>& curve, double threshold) {
    for (std::size_t t = 0; t < curve.size(); ++t) {
        if (curve[t] <= threshold) return t;
    }
    return std::nullopt;
}

std::vector<double> normalized(const Trace& trace) {
    std::vector<double> out;
    if (trace.rows.empty()) return out;
    const double first = trace.rows.front().total;
    for (const auto& r : trace.rows) out.push_back(first != 0.0 ? r.total / first : 0.0);
    return out;
}

}  // namespace

std::string render_svg(const SceneSpec& spec, const Layout& layout) {
    const double width_px = spec.room.length * kPixelsPerMetre + 2.0 * kPadding;
    const double height_px = spec.room.width * kPixelsPerMetre + 2.0 * kPadding;
    std::map<std::string, std::size_t> unit_of;
    for (std::size_t k = 0; k < spec.units.size(); ++k) {
        unit_of[spec.units[k].anchor] = k;
        for (const auto& m : spec.units[k].members) unit_of[m] = k;
    }

    std::ostringstream svg;
    svg << std::fixed << std::setprecision(6);
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width_px << "\" height=\""
        << height_px << "\" viewBox=\"0 0 " << width_px << ' ' << height_px << "\">\n";
    svg << "<g transform=\"translate(" << kPadding << ' ' << kPadding + spec.room.width * kPixelsPerMetre
        << ") scale(" << kPixelsPerMetre << ' ' << -kPixelsPerMetre << ")\">\n";
    svg << "<rect class=\"room\" x=\"0\" y=\"0\" width=\"" << spec.room.length << "\" height=\"" << spec.room.width
        << "\" fill=\"#fbfaf7\" stroke=\"#333333\" stroke-width=\"0.03\"/>\n";

    const std::vector<FootprintBox> boxes = spec.assets.empty() ? std::vector<FootprintBox>{}
                                                                : layout_boxes(spec, layout);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const Asset& a = spec.assets[i];
        auto u = unit_of.find(a.id);
        const char* colour = u == unit_of.end() ? kIndependentColour : kUnitColours[u->second % kUnitColours.size()];
        svg << "<polygon class=\"asset\" data-id=\"" << xml_escape(a.id) << "\"";
        if (u != unit_of.end()) svg << " data-unit=\"" << xml_escape(spec.units[u->second].id) << "\"";
        svg << " points=\"";
        const auto pts = corners(boxes[i]);
        for (std::size_t c = 0; c < pts.size(); ++c) svg << (c ? " " : "") << pts[c].x << ',' << pts[c].y;
        svg << "\" fill=\"" << colour << "\" fill-opacity=\"0.45\" stroke=\"" << colour
            << "\" stroke-width=\"0.02\"/>\n";

        // Facing arrow along local +x.
        const Pose2D& p = boxes[i].pose;
        const double reach = 0.8 * boxes[i].half_l;
        const Vec2 tip = transform_point(p, Vec2{reach, 0.0});
        const Vec2 left = transform_point(p, Vec2{reach - 0.12, 0.06});
        const Vec2 right = transform_point(p, Vec2{reach - 0.12, -0.06});
        svg << "<line class=\"facing\" x1=\"" << p.x << "\" y1=\"" << p.y << "\" x2=\"" << tip.x << "\" y2=\"" << tip.y
            << "\" stroke=\"#222222\" stroke-width=\"0.02\"/>\n";
        svg << "<polygon class=\"arrowhead\" points=\"" << tip.x << ',' << tip.y << ' ' << left.x << ',' << left.y
            << ' ' << right.x << ',' << right.y << "\" fill=\"#222222\"/>\n";
    }
    svg << "</g>\n";

    // Labels sit outside the flipped group so the text stays upright.
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const double x = kPadding + boxes[i].pose.x * kPixelsPerMetre;
        const double y = kPadding + (spec.room.width - boxes[i].pose.y) * kPixelsPerMetre;
        svg << "<text x=\"" << x << "\" y=\"" << y
            << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\" fill=\"#111111\">"
            << xml_escape(spec.assets[i].id) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::vector<double> ema(const std::vector<double>& values, double alpha) {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(out.empty() ? v : alpha * out.back() + (1.0 - alpha) * v);
    return out;
}

std::vector<BenchmarkResult> convergence_benchmark(const SceneSpec& spec, const std::string& scene_id,
                                                   const std::vector<std::uint64_t>& seeds, double threshold,
                                                   OptimizerConfig config) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
    std::vector<BenchmarkResult> results;
    for (std::uint64_t seed : seeds) {
        BenchmarkResult r;
        r.scene = scene_id;
        r.seed = seed;
        r.threshold = threshold;
        config.seed = seed;
        try {
            r.reparam_curve = normalized(solve(spec, config).trace);
            r.baseline_curve = normalized(solve_global_baseline(spec, config).trace);
        } catch (const std::exception& e) {
            r.failed = true;
            r.error = e.what();
            results.push_back(std::move(r));
            continue;
        }
        r.reparam_iterations = first_at_or_below(r.reparam_curve, threshold);
        r.baseline_iterations = first_at_or_below(r.baseline_curve, threshold);
        if (r.reparam_iterations && r.baseline_iterations && *r.reparam_iterations > 0) {
            r.speedup = static_cast<double>(*r.baseline_iterations) / static_cast<double>(*r.reparam_iterations);
        }
        results.push_back(std::move(r));
    }
    return results;
}

std::string benchmark_json(const std::vector<BenchmarkResult>& results) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        nlohmann::ordered_json jr;
        jr["scene"] = r.scene;
        jr["seed"] = r.seed;
        jr["threshold"] = r.threshold;
        auto opt = [](const auto& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr); };
        jr["reparam_iterations"] = opt(r.reparam_iterations);
        jr["baseline_iterations"] = opt(r.baseline_iterations);
        jr["speedup"] = opt(r.speedup);
        jr["failed"] = r.failed;
        if (r.failed) jr["error"] = r.error;
        j.push_back(std::move(jr));
    }
    return j.dump(2) + "\n";
}

std::string benchmark_curves_csv(const std::vector<BenchmarkResult>& results, double alpha) {
    std::ostringstream out;
    out.precision(17);
    out << "seed,iteration,reparam,baseline\n";
    for (const auto& r : results) {
        if (r.failed) continue;
        const auto a = ema(r.reparam_curve, alpha);
        const auto b = ema(r.baseline_curve, alpha);
        for (std::size_t t = 0; t < std::min(a.size(), b.size()); ++t) {
            out << r.seed << ',' << t << ',' << a[t] << ',' << b[t] << '\n';
        }
    }
    return out.str();
}

}  // namespace framelayout
