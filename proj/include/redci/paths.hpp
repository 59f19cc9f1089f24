#pragma once

#include <functional>
#include <type_traits>
#include <vector>

#include "redci/graph.hpp"

namespace redci {

namespace detail {

inline VarSet neighbors(const UndirectedGraph& g, int v) { return g.adjacent(v); }
inline VarSet neighbors(const Dag& g, int v) { return g.adjacent(v); }

// Activity of the contiguous segment path[i..j], evaluated as a path of its
// own: only its internal nodes matter, the segment endpoints are free.
inline bool segment_active(const UndirectedGraph&, const std::vector<int>& path, int i, int j,
                           VarSet cond, VarSet /*anc_cond*/) {
    for (int t = i + 1; t < j; ++t)
        if (contains(cond, path[t])) return false;
    return true;
}

inline bool segment_active(const Dag& g, const std::vector<int>& path, int i, int j, VarSet cond,
                           VarSet anc_cond) {
    for (int t = i + 1; t < j; ++t) {
        int v = path[t];
        bool collider = g.has_edge(path[t - 1], v) && g.has_edge(path[t + 1], v);
        if (collider) {
            if (!contains(anc_cond, v)) return false;
        } else {
            if (contains(cond, v)) return false;
        }
    }
    return true;
}

inline VarSet conditioning_closure(const UndirectedGraph&, VarSet cond) { return cond; }
inline VarSet conditioning_closure(const Dag& g, VarSet cond) { return g.ancestors_of(cond); }

// Once `next` is appended, path.back() becomes an internal node and its role
// on the path is fixed; reject extensions that already violate activity.
inline bool internal_role_ok(const UndirectedGraph&, const std::vector<int>& path, int /*next*/,
                             VarSet cond, VarSet /*anc_cond*/) {
    if (path.size() < 2) return true;  // start node is unconstrained
    return !contains(cond, path.back());
}

inline bool internal_role_ok(const Dag& g, const std::vector<int>& path, int next, VarSet cond,
                             VarSet anc_cond) {
    if (path.size() < 2) return true;
    int v = path.back();
    bool collider = g.has_edge(path[path.size() - 2], v) && g.has_edge(next, v);
    if (collider) return contains(anc_cond, v);
    return !contains(cond, v);
}

}  // namespace detail

// Searches for a simple path from a node in `from` to a node in `to` that is
// active given `cond` and contains no contiguous sub-path with one endpoint
// in sx and the other in sy that is active given sz. Exhaustive simple-path
// walk with activity pruning; exponential in the worst case. Intended for
// graphs of a dozen-odd nodes, including the duplicated ones the separating
// surgery produces.
template <typename GraphT>
inline bool s_active_path_exists(const GraphT& g, VarSet from, VarSet to, VarSet cond, VarSet sx,
                                 VarSet sy, VarSet sz) {
    check_separation_query(from, to, cond);
    const VarSet anc_cond = detail::conditioning_closure(g, cond);
    const VarSet anc_sz = detail::conditioning_closure(g, sz);
    std::vector<int> path;
    VarSet on_path = 0;
    bool found = false;

    auto path_is_s_active = [&]() {
        const int k = static_cast<int>(path.size()) - 1;
        for (int i = 0; i <= k; ++i) {
            for (int j = i + 1; j <= k; ++j) {
                bool endpoints_match = (contains(sx, path[i]) && contains(sy, path[j])) ||
                                       (contains(sy, path[i]) && contains(sx, path[j]));
                if (!endpoints_match) continue;
                if (detail::segment_active(g, path, i, j, sz, anc_sz)) return false;
            }
        }
        return true;
    };

    std::function<void(int)> dfs = [&](int v) {
        if (found) return;
        if (contains(to, v)) {
            if (path_is_s_active()) found = true;
            return;
        }
        VarSet cand = detail::neighbors(g, v) & ~on_path & ~from;
        for_each_member(cand, [&](int w) {
            if (found) return;
            // In undirected graphs a conditioned node can never sit on an
            // active path; in DAGs it may still act as an opened collider.
            if constexpr (std::is_same_v<GraphT, UndirectedGraph>) {
                if (contains(cond, w)) return;
            }
            if (!detail::internal_role_ok(g, path, w, cond, anc_cond)) return;
            path.push_back(w);
            on_path |= single(w);
            dfs(w);
            on_path &= ~single(w);
            path.pop_back();
        });
    };

    for_each_member(from, [&](int a) {
        if (found) return;
        path.assign(1, a);
        on_path = single(a);
        dfs(a);
    });
    return found;
}

// a and b are coupled over s given c iff they are connected given c but no
// connecting path survives once every active x-y channel of s is discounted.
template <typename GraphT>
inline bool coupled_over(const GraphT& g, VarSet a, VarSet b, VarSet c, VarSet sx, VarSet sy,
                         VarSet sz) {
    if (separated(g, a, b, c)) return false;
    return !s_active_path_exists(g, a, b, c, sx, sy, sz);
}

template <typename GraphT>
inline bool coupled_over(const GraphT& g, int a, int b, VarSet c, const CiTriple& s) {
    return coupled_over(g, single(a), single(b), c, s.x, s.y, s.z);
}

// Direct coupling of two singleton nodes given z.
inline bool coupled(const UndirectedGraph& g, int x, int y, VarSet z) {
    if (!g.has_edge(x, y)) return false;
    VarSet allowed = single(x) | single(y) | z;
    return subset_of(g.adjacent(x), allowed) || subset_of(g.adjacent(y), allowed);
}

inline bool coupled(const Dag& g, int x, int y, VarSet z) {
    VarSet allowed = single(x) | single(y) | z;
    // For singleton sides the quantified separator collapses to z itself.
    if (g.has_edge(x, y) && subset_of(g.parents(y), allowed) &&
        d_separated(g.without_edge(x, y), single(x), single(y), z))
        return true;
    if (g.has_edge(y, x) && subset_of(g.parents(x), allowed) &&
        d_separated(g.without_edge(y, x), single(x), single(y), z))
        return true;
    return false;
}

inline bool coupled(const AnyGraph& g, int x, int y, VarSet z) {
    return std::visit([&](const auto& gg) { return coupled(gg, x, y, z); }, g);
}

// Nodes that lie on some active x..y connection given z, endpoints excluded.
// For undirected graphs these are the nodes reachable from both sides while
// avoiding z. For DAGs the computation runs over (node, arrival direction)
// reachability states, which also picks up collider-opening descendant
// chains and the co-parents of conditioned colliders; all of them carry
// x..y flow and all of them have to be duplicated by the separating surgery.
inline VarSet active_channel_nodes(const UndirectedGraph& g, VarSet x, VarSet y, VarSet z) {
    auto reach = [&](VarSet from, VarSet stop) {
        VarSet seen = from;
        VarSet frontier = from;
        while (frontier) {
            VarSet next = 0;
            for_each_member(frontier & ~stop, [&](int v) { next |= g.adjacent(v); });
            next &= ~z;
            frontier = next & ~seen;
            seen |= frontier;
        }
        return seen;
    };
    return reach(x, y) & reach(y, x) & ~(x | y);
}

inline VarSet active_channel_nodes(const Dag& g, VarSet x, VarSet y, VarSet z) {
    const int n = g.node_count();
    const VarSet anc_z = g.ancestors_of(z);
    // state = v * 2 + dir, dir 0: arrived from a child (or source), 1: from
    // a parent
    auto transitions = [&](int v, int dir, auto&& visit) {
        if (dir == 0) {
            if (!contains(z, v)) {
                for_each_member(g.parents(v), [&](int p) { visit(p, 0); });
                for_each_member(g.children(v), [&](int c) { visit(c, 1); });
            }
        } else {
            if (!contains(z, v))
                for_each_member(g.children(v), [&](int c) { visit(c, 1); });
            if (contains(anc_z, v))
                for_each_member(g.parents(v), [&](int p) { visit(p, 0); });
        }
    };

    // forward reachability from the x side
    std::vector<char> fwd(2 * n, 0);
    std::vector<std::pair<int, int>> stack;
    for_each_member(x, [&](int v) { stack.push_back({v, 0}); });
    while (!stack.empty()) {
        auto [v, d] = stack.back();
        stack.pop_back();
        if (fwd[2 * v + d]) continue;
        fwd[2 * v + d] = 1;
        if (contains(y, v)) continue;  // the walk may stop here
        transitions(v, d, [&](int w, int dw) { stack.push_back({w, dw}); });
    }

    // backward: states from which some y arrival is reachable
    std::vector<std::vector<int>> rev(2 * n);
    for (int v = 0; v < n; ++v)
        for (int d = 0; d < 2; ++d)
            if (!contains(y, v))
                transitions(v, d, [&](int w, int dw) { rev[2 * w + dw].push_back(2 * v + d); });
    std::vector<char> bwd(2 * n, 0);
    std::vector<int> bstack;
    for_each_member(y, [&](int v) {
        bstack.push_back(2 * v);
        bstack.push_back(2 * v + 1);
    });
    while (!bstack.empty()) {
        int s = bstack.back();
        bstack.pop_back();
        if (bwd[s]) continue;
        bwd[s] = 1;
        for (int p : rev[s]) bstack.push_back(p);
    }

    VarSet out = 0;
    for (int v = 0; v < n; ++v)
        for (int d = 0; d < 2; ++d)
            if (fwd[2 * v + d] && bwd[2 * v + d]) out |= single(v);
    return out & ~(x | y);
}

}  // namespace redci
