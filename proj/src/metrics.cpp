#include "framelayout/metrics.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "framelayout/objective.hpp"
#include "json.hpp"

namespace framelayout {

std::vector<FootprintBox> layout_boxes(const SceneSpec& spec, const Layout& layout) {
    std::vector<FootprintBox> boxes;
    boxes.reserve(spec.assets.size());
    for (const Asset& a : spec.assets) {
        auto it = layout.poses.find(a.id);
        if (it == layout.poses.end()) throw std::invalid_argument("layout has no pose for asset '" + a.id + "'");
        boxes.push_back({{it->second.x, it->second.y, it->second.theta}, 0.5 * a.l, 0.5 * a.w});
    }
    return boxes;
}

PhysicalReport eval_physical(const SceneSpec& spec, const Layout& layout, double tau_c, double tau_o) {
    const std::vector<FootprintBox> boxes = layout_boxes(spec, layout);
    std::vector<ConvexPolygon> polys;
    for (const auto& b : boxes) polys.push_back(ConvexPolygon::from_box(b));
    const ConvexPolygon room = ConvexPolygon::rectangle(0.0, 0.0, spec.room.length, spec.room.width);

    PhysicalReport report;
    report.tau_c = tau_c;
    report.tau_o = tau_o;
    std::set<std::string> colliding;
    for (std::size_t i = 0; i < polys.size(); ++i) {
        for (std::size_t j = i + 1; j < polys.size(); ++j) {
            if (polygon_intersection_area(polys[i], polys[j]) > tau_c) {
                colliding.insert(spec.assets[i].id);
                colliding.insert(spec.assets[j].id);
            }
        }
        if (polys[i].area() - polygon_intersection_area(polys[i], room) > tau_o) {
            report.oob_ids.push_back(spec.assets[i].id);
        }
    }
    report.colliding_ids.assign(colliding.begin(), colliding.end());
    std::sort(report.oob_ids.begin(), report.oob_ids.end());
    if (!polys.empty()) {
        const double n = static_cast<double>(polys.size());
        report.cr_percent = 100.0 * static_cast<double>(report.colliding_ids.size()) / n;
        report.or_percent = 100.0 * static_cast<double>(report.oob_ids.size()) / n;
    }
    return report;
}

std::string physical_report_json(const PhysicalReport& report) {
    nlohmann::ordered_json j;
    j["cr_percent"] = report.cr_percent;
    j["or_percent"] = report.or_percent;
    j["colliding_ids"] = report.colliding_ids;
    j["oob_ids"] = report.oob_ids;
    j["tau_c"] = report.tau_c;
    j["tau_o"] = report.tau_o;
    return j.dump(2) + "\n";
}

std::vector<RelationCheck> relation_penalties(const SceneSpec& spec, const Layout& layout) {
    SceneIndex index = index_scene(spec);
    for (auto& cr : index.relations) cr.shared.reset();

    const std::vector<FootprintBox> boxes = layout_boxes(spec, layout);
    std::vector<double> flat;
    for (const auto& b : boxes) {
        flat.push_back(b.pose.x);
        flat.push_back(b.pose.y);
        flat.push_back(b.pose.theta);
    }
    const FrameInputs inputs = global_inputs(index, flat, boxes.size());

    std::vector<RelationCheck> out;
    for (std::size_t r = 0; r < index.relations.size(); ++r) {
        const auto& cr = index.relations[r];
        out.push_back({r, std::string(to_string(cr.relation.kind)), compiled_relation_penalty(index, inputs, cr).value()});
    }
    return out;
}

}  // namespace framelayout
