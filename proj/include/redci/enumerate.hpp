#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_set>
#include <vector>

#include "redci/graph.hpp"

namespace redci {

enum class GraphClass { Dags, UndirectedGraphs, SpanningTrees };

inline constexpr int kDagEnumCap = 5;
inline constexpr int kUndirectedEnumCap = 6;
inline constexpr int kSpanningTreeEnumCap = 9;

namespace detail {

// Packs a DAG's edge set into one word; needs n*n <= 64.
inline std::uint64_t edge_key(const Dag& g) {
    std::uint64_t key = 0;
    const int n = g.node_count();
    for (const auto& e : g.edges()) key |= std::uint64_t{1} << (e.a * n + e.b);
    return key;
}

}  // namespace detail

// Visits every DAG over the universe exactly once. Builds graphs by choosing
// parent sets position by position along every node order and deduplicates
// by edge set; validated against the labelled-DAG counting recurrence.
template <typename Fn>
inline void for_each_dag(const VariableUniverse& u, Fn&& fn) {
    const int n = u.size();
    if (n > kDagEnumCap) throw CapExceededError("DAG enumeration capped at 5 nodes");
    std::unordered_set<std::uint64_t> seen;
    std::vector<int> order;
    std::vector<Edge> edges;
    VarSet used = 0;

    std::function<void()> place = [&]() {
        if (static_cast<int>(order.size()) == n) {
            Dag g(u, edges);
            if (seen.insert(detail::edge_key(g)).second) fn(g);
            return;
        }
        for (int v = 0; v < n; ++v) {
            if (contains(used, v)) continue;
            VarSet prev = used;
            used |= single(v);
            order.push_back(v);
            for_each_subset(prev, [&](VarSet parents) {
                std::size_t mark = edges.size();
                for_each_member(parents, [&](int p) { edges.push_back(Edge{p, v}); });
                place();
                edges.resize(mark);
            });
            order.pop_back();
            used &= ~single(v);
        }
    };
    place();
}

template <typename Fn>
inline void for_each_undirected(const VariableUniverse& u, Fn&& fn) {
    const int n = u.size();
    if (n > kUndirectedEnumCap)
        throw CapExceededError("undirected enumeration capped at 6 nodes");
    std::vector<Edge> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.push_back(Edge{i, j});
    const std::uint64_t total = std::uint64_t{1} << pairs.size();
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        UndirectedGraph g(u);
        for (std::size_t k = 0; k < pairs.size(); ++k)
            if ((mask >> k) & 1) g.add_edge(pairs[k].a, pairs[k].b);
        fn(g);
    }
}

// Decodes a Pruefer sequence of length n-2 into a labelled tree.
inline UndirectedGraph tree_from_pruefer(const VariableUniverse& u,
                                         const std::vector<int>& seq) {
    const int n = u.size();
    UndirectedGraph g(u);
    if (n == 1) return g;
    std::vector<int> degree(n, 1);
    for (int s : seq) ++degree[s];
    VarSet leaves = 0;
    for (int v = 0; v < n; ++v)
        if (degree[v] == 1) leaves |= single(v);
    for (int s : seq) {
        int leaf = lowest_bit(leaves);
        leaves &= ~single(leaf);
        g.add_edge(leaf, s);
        if (--degree[s] == 1) leaves |= single(s);
    }
    int a = lowest_bit(leaves);
    leaves &= ~single(a);
    int b = lowest_bit(leaves);
    g.add_edge(a, b);
    return g;
}

// Visits every labelled spanning tree exactly once (n^(n-2) trees).
template <typename Fn>
inline void for_each_spanning_tree(const VariableUniverse& u, Fn&& fn) {
    const int n = u.size();
    if (n > kSpanningTreeEnumCap)
        throw CapExceededError("spanning-tree enumeration capped at 9 nodes");
    if (n == 1) {
        fn(UndirectedGraph(u));
        return;
    }
    std::vector<int> seq(n > 2 ? n - 2 : 0, 0);
    while (true) {
        fn(tree_from_pruefer(u, seq));
        int i = static_cast<int>(seq.size()) - 1;
        while (i >= 0 && seq[i] == n - 1) seq[i--] = 0;
        if (i < 0) break;
        ++seq[i];
    }
}

inline std::vector<Dag> all_dags(const VariableUniverse& u) {
    std::vector<Dag> out;
    for_each_dag(u, [&](const Dag& g) { out.push_back(g); });
    return out;
}

inline std::vector<UndirectedGraph> all_undirected(const VariableUniverse& u) {
    std::vector<UndirectedGraph> out;
    for_each_undirected(u, [&](const UndirectedGraph& g) { out.push_back(g); });
    return out;
}

inline std::vector<UndirectedGraph> all_spanning_trees(const VariableUniverse& u) {
    std::vector<UndirectedGraph> out;
    for_each_spanning_tree(u, [&](const UndirectedGraph& g) { out.push_back(g); });
    return out;
}

// Streams every graph of the class through fn as AnyGraph.
template <typename Fn>
inline void for_each_graph(const VariableUniverse& u, GraphClass cls, Fn&& fn) {
    switch (cls) {
        case GraphClass::Dags:
            for_each_dag(u, [&](const Dag& g) { fn(AnyGraph{g}); });
            break;
        case GraphClass::UndirectedGraphs:
            for_each_undirected(u, [&](const UndirectedGraph& g) { fn(AnyGraph{g}); });
            break;
        case GraphClass::SpanningTrees:
            for_each_spanning_tree(u, [&](const UndirectedGraph& g) { fn(AnyGraph{g}); });
            break;
    }
}

}  // namespace redci
