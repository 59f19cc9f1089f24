#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "redci/model.hpp"

namespace redci {

struct Edge {
    int a = 0;
    int b = 0;
    bool operator==(const Edge& o) const { return a == o.a && b == o.b; }
    bool operator<(const Edge& o) const { return a != o.a ? a < o.a : b < o.b; }
};

class UndirectedGraph {
public:
    UndirectedGraph() = default;
    explicit UndirectedGraph(VariableUniverse u)
        : universe_(std::move(u)), adj_(universe_.size(), 0) {}

    UndirectedGraph(VariableUniverse u, const std::vector<Edge>& edges)
        : UndirectedGraph(std::move(u)) {
        for (const auto& e : edges) add_edge(e.a, e.b);
    }

    const VariableUniverse& universe() const { return universe_; }
    int node_count() const { return universe_.size(); }

    void add_edge(int a, int b) {
        check_nodes(a, b);
        adj_[a] |= single(b);
        adj_[b] |= single(a);
    }

    bool has_edge(int a, int b) const { return contains(adj_[a], b); }
    VarSet adjacent(int a) const { return adj_[a]; }

    int edge_count() const {
        int c = 0;
        for (VarSet s : adj_) c += set_size(s);
        return c / 2;
    }

    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        for (int a = 0; a < node_count(); ++a)
            for_each_member(adj_[a], [&](int b) {
                if (a < b) out.push_back(Edge{a, b});
            });
        return out;
    }

    UndirectedGraph without_edge(int a, int b) const {
        if (!has_edge(a, b)) throw EdgeAbsentError("edge not present");
        UndirectedGraph g = *this;
        g.adj_[a] &= ~single(b);
        g.adj_[b] &= ~single(a);
        return g;
    }

    bool connected() const {
        if (node_count() == 0) return true;
        VarSet seen = single(0);
        VarSet frontier = seen;
        while (frontier) {
            VarSet next = 0;
            for_each_member(frontier, [&](int v) { next |= adj_[v]; });
            frontier = next & ~seen;
            seen |= frontier;
        }
        return seen == universe_.all();
    }

    bool operator==(const UndirectedGraph& o) const {
        return universe_ == o.universe_ && adj_ == o.adj_;
    }

private:
    void check_nodes(int a, int b) const {
        if (a == b) throw Error("self-loops are not allowed");
        if (a < 0 || b < 0 || a >= node_count() || b >= node_count())
            throw UnknownVariableError("edge endpoint outside universe");
    }

    VariableUniverse universe_;
    std::vector<VarSet> adj_;
};

class Dag {
public:
    Dag() = default;
    explicit Dag(VariableUniverse u)
        : universe_(std::move(u)),
          parents_(universe_.size(), 0),
          children_(universe_.size(), 0) {}

    Dag(VariableUniverse u, const std::vector<Edge>& edges) : Dag(std::move(u)) {
        for (const auto& e : edges) add_edge_unchecked(e.a, e.b);
        if (!acyclic()) throw Error("graph has a directed cycle");
    }

    const VariableUniverse& universe() const { return universe_; }
    int node_count() const { return universe_.size(); }

    bool has_edge(int from, int to) const { return contains(children_[from], to); }
    VarSet parents(int v) const { return parents_[v]; }
    VarSet children(int v) const { return children_[v]; }
    VarSet adjacent(int v) const { return parents_[v] | children_[v]; }

    int edge_count() const {
        int c = 0;
        for (VarSet s : children_) c += set_size(s);
        return c;
    }

    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        for (int a = 0; a < node_count(); ++a)
            for_each_member(children_[a], [&](int b) { out.push_back(Edge{a, b}); });
        return out;
    }

    Dag without_edge(int from, int to) const {
        if (!has_edge(from, to)) throw EdgeAbsentError("edge not present");
        Dag g = *this;
        g.children_[from] &= ~single(to);
        g.parents_[to] &= ~single(from);
        return g;
    }

    // Nodes v with a directed path v ->* of any length into `targets`,
    // including the targets themselves.
    VarSet ancestors_of(VarSet targets) const {
        VarSet seen = targets;
        VarSet frontier = targets;
        while (frontier) {
            VarSet next = 0;
            for_each_member(frontier, [&](int v) { next |= parents_[v]; });
            frontier = next & ~seen;
            seen |= frontier;
        }
        return seen;
    }

    // Nodes reachable from `sources` along directed edges, sources included.
    VarSet descendants_of(VarSet sources) const {
        VarSet seen = sources;
        VarSet frontier = sources;
        while (frontier) {
            VarSet next = 0;
            for_each_member(frontier, [&](int v) { next |= children_[v]; });
            frontier = next & ~seen;
            seen |= frontier;
        }
        return seen;
    }

    std::vector<int> topological_order() const {
        std::vector<int> indeg(node_count());
        for (int v = 0; v < node_count(); ++v) indeg[v] = set_size(parents_[v]);
        std::vector<int> order;
        VarSet ready = 0;
        for (int v = 0; v < node_count(); ++v)
            if (indeg[v] == 0) ready |= single(v);
        while (ready) {
            int v = lowest_bit(ready);
            ready &= ~single(v);
            order.push_back(v);
            for_each_member(children_[v], [&](int c) {
                if (--indeg[c] == 0) ready |= single(c);
            });
        }
        return order;  // size < n would mean a cycle; construction prevents it
    }

    UndirectedGraph skeleton() const {
        UndirectedGraph g(universe_);
        for (const auto& e : edges()) g.add_edge(e.a, e.b);
        return g;
    }

    bool operator==(const Dag& o) const {
        return universe_ == o.universe_ && children_ == o.children_;
    }

private:
    void add_edge_unchecked(int from, int to) {
        if (from == to) throw Error("self-loops are not allowed");
        if (from < 0 || to < 0 || from >= node_count() || to >= node_count())
            throw UnknownVariableError("edge endpoint outside universe");
        children_[from] |= single(to);
        parents_[to] |= single(from);
    }

    bool acyclic() const { return static_cast<int>(topological_order().size()) == node_count(); }

    VariableUniverse universe_;
    std::vector<VarSet> parents_;
    std::vector<VarSet> children_;
};

using AnyGraph = std::variant<Dag, UndirectedGraph>;

inline const VariableUniverse& universe_of(const AnyGraph& g) {
    return std::visit([](const auto& gg) -> const VariableUniverse& { return gg.universe(); }, g);
}

// --- separation ------------------------------------------------------------

inline void check_separation_query(VarSet x, VarSet y, VarSet z) {
    if (!x || !y) throw EmptySideError("separation query sides must be nonempty");
    if (!disjoint(x, y) || !disjoint(x, z) || !disjoint(y, z))
        throw OverlapError("separation query sets must be pairwise disjoint");
}

// True iff every path from x to y passes through z.
inline bool separated(const UndirectedGraph& g, VarSet x, VarSet y, VarSet z) {
    check_separation_query(x, y, z);
    VarSet seen = x;
    VarSet frontier = x;
    while (frontier) {
        VarSet next = 0;
        for_each_member(frontier, [&](int v) { next |= g.adjacent(v); });
        next &= ~z;  // conditioning nodes block
        frontier = next & ~seen;
        seen |= frontier;
    }
    return disjoint(seen, y);
}

// d-separation via reachability over (node, travel direction) states.
// Colliders pass only when they or a descendant are conditioned on;
// non-colliders block exactly when conditioned on.
inline bool d_separated(const Dag& g, VarSet x, VarSet y, VarSet z) {
    check_separation_query(x, y, z);
    // anc_z: nodes that are in z or have a descendant in z.
    VarSet anc_z = g.ancestors_of(z);

    // State encoding: visited_up[v] = reached v from a child (or as a source),
    // visited_down[v] = reached v from a parent.
    VarSet up = 0, down = 0;
    std::vector<std::pair<int, bool>> stack;  // (node, came_from_child)
    for_each_member(x, [&](int v) { stack.push_back({v, true}); });
    while (!stack.empty()) {
        auto [v, from_child] = stack.back();
        stack.pop_back();
        if (from_child) {
            if (contains(up, v)) continue;
            up |= single(v);
        } else {
            if (contains(down, v)) continue;
            down |= single(v);
        }
        if (contains(y, v)) return false;
        if (from_child) {
            if (!contains(z, v)) {
                for_each_member(g.parents(v), [&](int p) { stack.push_back({p, true}); });
                for_each_member(g.children(v), [&](int c) { stack.push_back({c, false}); });
            }
        } else {
            if (!contains(z, v))
                for_each_member(g.children(v), [&](int c) { stack.push_back({c, false}); });
            if (contains(anc_z, v))
                for_each_member(g.parents(v), [&](int p) { stack.push_back({p, true}); });
        }
    }
    return true;
}

inline bool separated(const Dag& g, VarSet x, VarSet y, VarSet z) {
    return d_separated(g, x, y, z);
}

inline bool separated(const AnyGraph& g, VarSet x, VarSet y, VarSet z) {
    return std::visit([&](const auto& gg) { return separated(gg, x, y, z); }, g);
}

// Independent-route oracle for d-separation: moralize the ancestral subgraph
// of x, y, z and test plain separation there (Lauritzen's criterion).
inline bool d_separated_moral_oracle(const Dag& g, VarSet x, VarSet y, VarSet z) {
    check_separation_query(x, y, z);
    VarSet anc = g.ancestors_of(x | y | z);
    UndirectedGraph moral(g.universe());
    for (int v = 0; v < g.node_count(); ++v) {
        if (!contains(anc, v)) continue;
        VarSet ps = g.parents(v) & anc;
        for_each_member(ps, [&](int p) { moral.add_edge(p, v); });
        // marry parents
        for_each_member(ps, [&](int p1) {
            for_each_member(ps, [&](int p2) {
                if (p1 < p2) moral.add_edge(p1, p2);
            });
        });
    }
    // Restrict reachability to the ancestral set by blocking everything else.
    VarSet outside = g.universe().all() & ~anc;
    return separated(moral, x, y, z | outside);
}

// Maps every triple in s to Independent/Dependent via (d-)separation.
template <typename GraphT>
inline IndependenceModel implied_model(const GraphT& g, const TripleSet& s) {
    IndependenceModel m(g.universe());
    for (const auto& t : s)
        m.set(t, separated(g, t.x, t.y, t.z) ? Status::Independent : Status::Dependent);
    return m;
}

inline IndependenceModel implied_model(const AnyGraph& g, const TripleSet& s) {
    return std::visit([&](const auto& gg) { return implied_model(gg, s); }, g);
}

// connected and |E| = |V|-1
inline bool is_spanning_tree(const UndirectedGraph& g) {
    return g.edge_count() == g.node_count() - 1 && g.connected();
}

// Number of differing edges between two graphs over the same universe.
inline int structural_hamming_distance(const UndirectedGraph& a, const UndirectedGraph& b) {
    int d = 0;
    for (int v = 0; v < a.node_count(); ++v) d += set_size(a.adjacent(v) ^ b.adjacent(v));
    return d / 2;
}

}  // namespace redci
