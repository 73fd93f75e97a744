#pragma once

#include <utility>
#include <vector>

namespace ilscsl {

using Edge = std::pair<int, int>;  // (parent, child)

// Directed acyclic graph over variables 0..n-1. Stored as per-node parent
// sets; the edge list is a derived view of the same relation. Every mutation
// is checked, so an instance is acyclic at all times.
class Dag {
public:
    explicit Dag(int n);

    // Builds from an edge list. Throws InputError on bad indices or self
    // loops and ConsistencyError if the edges contain a cycle.
    static Dag from_edges(int n, const std::vector<Edge>& edges);

    int n() const { return n_; }
    int edge_count() const { return edge_count_; }

    bool has_edge(int parent, int child) const;
    const std::vector<int>& parents(int child) const;  // ascending

    // Edge list sorted by (parent, child).
    std::vector<Edge> edges() const;

    // Adds parent -> child. Returns false (graph untouched) if the edge is
    // already present or would close a cycle. Throws InputError on bad
    // indices or parent == child.
    bool add_edge(int parent, int child);

    // Removes parent -> child; returns false if absent.
    bool remove_edge(int parent, int child);

    // True if a directed path src ~> dst exists (src == dst counts).
    bool reachable(int src, int dst) const;

    // Topological order; ties broken by ascending variable index.
    std::vector<int> topological_order() const;

    bool operator==(const Dag& other) const {
        return n_ == other.n_ && parents_ == other.parents_;
    }

private:
    void check_node(int v) const;

    int n_;
    int edge_count_ = 0;
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> children_;
};

// True if the edge list over n nodes is acyclic. Duplicate edges are allowed;
// indices are validated. Self loops count as cycles.
bool is_acyclic(int n, const std::vector<Edge>& edges);

}  // namespace ilscsl
