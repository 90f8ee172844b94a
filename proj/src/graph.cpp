#include "framelayout/graph.hpp"

#include <deque>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "framelayout/errors.hpp"

namespace framelayout {

RelationGraph::RelationGraph(const std::vector<std::string>& assets) {
    names_.push_back(std::string(kSceneNode));
    names_.insert(names_.end(), assets.begin(), assets.end());
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (!index_.emplace(names_[i], i).second) throw std::invalid_argument("duplicate node '" + names_[i] + "'");
    }
    adjacency_.resize(names_.size());
}

std::optional<std::size_t> RelationGraph::node(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void RelationGraph::add_edge(std::size_t from, std::size_t to) {
    if (from >= names_.size() || to >= names_.size()) throw std::out_of_range("edge endpoint out of range");
    edges_.emplace_back(from, to);
    adjacency_[from].insert(to);
}

std::vector<std::optional<std::size_t>> RelationGraph::hops_from(std::size_t from,
                                                                 std::optional<std::size_t> removed) const {
    std::vector<std::optional<std::size_t>> dist(names_.size());
    if (removed == from) return dist;
    dist[from] = 0;
    std::deque<std::size_t> queue{from};
    while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        for (std::size_t v : adjacency_[u]) {
            if (v == removed || dist[v]) continue;
            dist[v] = *dist[u] + 1;
            queue.push_back(v);
        }
    }
    return dist;
}

RelationGraph build_graph(const SceneSpec& spec) {
    std::vector<std::string> ids;
    for (const Asset& a : spec.assets) ids.push_back(a.id);
    RelationGraph g(ids);
    auto node_of = [&](const std::string& id) { return *g.node(*entity_asset(spec, id)); };
    for (const Relation& r : spec.relations) {
        if (is_scene_anchored(r.kind)) {
            g.add_edge(RelationGraph::kRoot, node_of(r.source()));
        } else {
            for (const auto& s : r.sources) g.add_edge(node_of(r.target), node_of(s));
        }
    }
    return g;
}

std::size_t path_cost(const RelationGraph& g, std::size_t from, std::size_t to) {
    if (from == to) throw std::invalid_argument("path_cost needs two distinct nodes");
    const auto dist = g.hops_from(from)[to];
    if (!dist) {
        throw Unreachable("no path from '" + g.name(from) + "' to '" + g.name(to) + "'");
    }
    return *dist - 1;
}

std::vector<UnitGroup> unit_groups(const SceneSpec& spec, const RelationGraph& g) {
    std::vector<UnitGroup> out;
    for (const Unit& u : spec.units) {
        UnitGroup group{u.id, *g.node(u.anchor), {}};
        for (const auto& m : u.members) group.members.push_back(*g.node(m));
        out.push_back(std::move(group));
    }
    return out;
}

CostReport decomposition_savings(const RelationGraph& g, const std::vector<UnitGroup>& units) {
    CostReport report;
    const auto from_root = g.hops_from(RelationGraph::kRoot);
    for (std::size_t v = 1; v < g.node_count(); ++v) {
        if (from_root[v]) {
            report.cost += static_cast<long long>(*from_root[v]) - 1;
        } else {
            report.unreachable.push_back(g.name(v));
        }
    }

    // Members of valid units switch to anchor-rooted costs.
    report.cost_prime = report.cost;
    for (const UnitGroup& unit : units) {
        UnitCost uc;
        uc.id = unit.id;
        uc.anchor = g.name(unit.anchor);
        uc.members = unit.members.size();
        const auto without_anchor = g.hops_from(RelationGraph::kRoot, unit.anchor);
        const auto from_anchor = g.hops_from(unit.anchor);
        if (!from_root[unit.anchor] || *from_root[unit.anchor] == 0) {
            uc.reason = "anchor unreachable from the scene node";
        }
        for (std::size_t m : unit.members) {
            if (!uc.reason.empty()) break;
            if (without_anchor[m]) {
                uc.reason = "anchor is not a cut vertex for member '" + g.name(m) + "'";
            } else if (!from_anchor[m] || *from_anchor[m] == 0) {
                uc.reason = "member '" + g.name(m) + "' unreachable from the anchor";
            }
        }
        if (uc.reason.empty()) {
            uc.valid = true;
            uc.anchor_depth = *from_root[unit.anchor];
            uc.savings = static_cast<long long>(uc.members * uc.anchor_depth);
            report.closed_form += uc.savings;
            for (std::size_t m : unit.members) {
                report.cost_prime -= static_cast<long long>(*from_root[m]) - 1;
                report.cost_prime += static_cast<long long>(*from_anchor[m]) - 1;
            }
        }
        report.units.push_back(std::move(uc));
    }
    report.delta = report.cost - report.cost_prime;
    return report;
}

std::string CostReport::to_json() const {
    nlohmann::ordered_json j;
    j["cost"] = cost;
    j["cost_prime"] = cost_prime;
    j["delta"] = delta;
    j["closed_form"] = closed_form;
    j["units"] = nlohmann::ordered_json::array();
    for (const auto& u : units) {
        nlohmann::ordered_json ju;
        ju["id"] = u.id;
        ju["anchor"] = u.anchor;
        ju["members"] = u.members;
        ju["anchor_depth"] = u.anchor_depth;
        ju["savings"] = u.savings;
        ju["valid"] = u.valid;
        if (!u.valid) ju["reason"] = u.reason;
        j["units"].push_back(std::move(ju));
    }
    j["unreachable"] = unreachable;
    return j.dump(2) + "\n";
}

std::string CostReport::to_csv() const {
    std::ostringstream out;
    out << "scope,anchor,members,anchor_depth,savings,valid\n";
    for (const auto& u : units) {
        out << u.id << ',' << u.anchor << ',' << u.members << ',' << u.anchor_depth << ',' << u.savings << ','
            << (u.valid ? "true" : "false") << '\n';
    }
    out << "# cost=" << cost << " cost_prime=" << cost_prime << " delta=" << delta << '\n';
    return out.str();
}

std::map<std::size_t, HopBucket> hop_histogram(const RelationGraph& g, const std::set<std::string>& flagged) {
    for (const auto& id : flagged) {
        auto n = g.node(id);
        if (!n || *n == RelationGraph::kRoot) throw std::invalid_argument("flag '" + id + "' is not an asset");
    }
    const auto dist = g.hops_from(RelationGraph::kRoot);
    std::map<std::size_t, HopBucket> out;
    for (std::size_t v = 1; v < g.node_count(); ++v) {
        if (!dist[v]) continue;
        HopBucket& b = out[*dist[v]];
        ++b.total;
        if (flagged.count(g.name(v))) ++b.flagged;
    }
    for (auto& [hop, b] : out) b.rate_percent = 100.0 * static_cast<double>(b.flagged) / static_cast<double>(b.total);
    return out;
}

}  // namespace framelayout
