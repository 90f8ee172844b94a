#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "framelayout/scene.hpp"

namespace framelayout {

/// Directed relation graph. Node 0 is the scene node; the rest are assets.
/// An edge u -> v means v's pose is constrained in u's frame.
class RelationGraph {
public:
    static constexpr std::size_t kRoot = 0;

    explicit RelationGraph(const std::vector<std::string>& assets);

    std::size_t node_count() const { return names_.size(); }
    const std::string& name(std::size_t node) const { return names_.at(node); }
    std::optional<std::size_t> node(const std::string& name) const;

    /// Records one edge. Parallel edges are kept in edges() and collapsed in
    /// successors().
    void add_edge(std::size_t from, std::size_t to);

    const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }
    const std::set<std::size_t>& successors(std::size_t node) const { return adjacency_.at(node); }

    /// BFS hop counts from `from`; unreachable nodes are nullopt. `removed`
    /// is treated as deleted from the graph.
    std::vector<std::optional<std::size_t>> hops_from(std::size_t from,
                                                      std::optional<std::size_t> removed = std::nullopt) const;

private:
    std::vector<std::string> names_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::pair<std::size_t, std::size_t>> edges_;
    std::vector<std::set<std::size_t>> adjacency_;
};

/// One edge per relation, reference -> constrained entity; scene-anchored
/// relations hang off the scene node, units resolve to their anchor, and
/// `around` contributes one edge per source.
RelationGraph build_graph(const SceneSpec& spec);

/// Frame switches along the shortest path: hops - 1. Throws Unreachable.
std::size_t path_cost(const RelationGraph& g, std::size_t from, std::size_t to);

struct UnitGroup {
    std::string id;
    std::size_t anchor = 0;
    std::vector<std::size_t> members;
};

std::vector<UnitGroup> unit_groups(const SceneSpec& spec, const RelationGraph& g);

struct UnitCost {
    std::string id;
    std::string anchor;
    std::size_t members = 0;
    std::size_t anchor_depth = 0;  // d(s, anchor)
    long long savings = 0;         // |M_k| * d(s, anchor)
    bool valid = false;
    std::string reason;            // why the unit was skipped
};

struct CostReport {
    long long cost = 0;
    long long cost_prime = 0;
    long long delta = 0;
    long long closed_form = 0;  // sum of savings over valid units
    std::vector<UnitCost> units;
    std::vector<std::string> unreachable;  // assets with no path from the scene node, excluded from both costs

    std::string to_json() const;
    std::string to_csv() const;
};

/// Total frame switches with and without anchor-local reasoning. A unit
/// whose anchor does not separate the scene node from every member, or whose
/// members are not all reachable from the anchor, is reported and skipped.
CostReport decomposition_savings(const RelationGraph& g, const std::vector<UnitGroup>& units);

struct HopBucket {
    std::size_t total = 0;
    std::size_t flagged = 0;
    double rate_percent = 0.0;
};

/// Error rate per hop distance from the scene node. Unreachable assets are
/// left out. Throws std::invalid_argument for a flag that is not an asset.
std::map<std::size_t, HopBucket> hop_histogram(const RelationGraph& g, const std::set<std::string>& flagged);

}  // namespace framelayout
