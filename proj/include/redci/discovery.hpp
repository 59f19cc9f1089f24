#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "redci/enumerate.hpp"
#include "redci/oracle.hpp"

namespace redci {

// --- ordering-based DAG construction -------------------------------------------

struct OrderDagResult {
    Dag dag;
    std::vector<CiStatement> conducted;
};

// For every node X in order, each earlier node Y is queried given all other
// earlier nodes; the dependent ones become X's parents.
inline OrderDagResult dag_from_order(CiOracle& oracle, const std::vector<int>& order) {
    const VariableUniverse& u = oracle.universe();
    if (static_cast<int>(order.size()) != u.size())
        throw PreconditionError("order must be a permutation of the universe");
    OrderDagResult res;
    std::vector<Edge> edges;
    VarSet before = 0;
    for (int k = 0; k < static_cast<int>(order.size()); ++k) {
        int x = order[k];
        for (int j = 0; j < k; ++j) {
            int y = order[j];
            CiStatement st = oracle.query(CiTriple{single(x), single(y), before & ~single(y)});
            res.conducted.push_back(st);
            if (st.verdict == Verdict::Dependent) edges.push_back(Edge{y, x});
        }
        before |= single(x);
    }
    res.dag = Dag(u, edges);
    return res;
}

struct UndirectedResult {
    UndirectedGraph graph;
    std::vector<CiStatement> conducted;
};

// Edge X - Y iff X and Y are dependent given everything else; n(n-1)/2
// queries.
inline UndirectedResult undirected_full_conditional(CiOracle& oracle) {
    const VariableUniverse& u = oracle.universe();
    UndirectedResult res{UndirectedGraph(u), {}};
    for (int i = 0; i < u.size(); ++i)
        for (int j = i + 1; j < u.size(); ++j) {
            VarSet rest = u.all() & ~(single(i) | single(j));
            CiStatement st = oracle.query(CiTriple{single(i), single(j), rest});
            res.conducted.push_back(st);
            if (st.verdict == Verdict::Dependent) res.graph.add_edge(i, j);
        }
    return res;
}

// --- sparsest permutation --------------------------------------------------------

struct SpResult {
    std::vector<Dag> sparsest;          // edge-minimal results, unique edge sets
    int min_edges = 0;
    std::vector<int> per_permutation_edges;
    // number of Markov-equivalence classes among the sparsest graphs
    int equivalence_classes = 0;
};

inline constexpr int kSpCap = 7;

inline SpResult sp(CiOracle& oracle) {
    const VariableUniverse& u = oracle.universe();
    const int n = u.size();
    if (n > kSpCap) throw CapExceededError("sparsest-permutation search capped at 7 nodes");
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;

    SpResult res;
    res.min_edges = n * n;
    std::vector<Dag> winners;
    do {
        auto run = dag_from_order(oracle, perm);
        int edges = run.dag.edge_count();
        res.per_permutation_edges.push_back(edges);
        if (edges < res.min_edges) {
            res.min_edges = edges;
            winners.clear();
        }
        if (edges == res.min_edges) winners.push_back(run.dag);
    } while (std::next_permutation(perm.begin(), perm.end()));

    // deduplicate by edge set
    for (const auto& g : winners) {
        bool dup = false;
        for (const auto& h : res.sparsest) dup |= h == g;
        if (!dup) res.sparsest.push_back(g);
    }
    // group by implied singleton model
    auto ts = all_triples(u);
    std::vector<std::vector<CiStatement>> sigs;
    for (const auto& g : res.sparsest) {
        auto sig = implied_model(g, ts).statements();
        bool seen = false;
        for (const auto& s : sigs) seen |= s == sig;
        if (!seen) sigs.push_back(sig);
    }
    res.equivalence_classes = static_cast<int>(sigs.size());
    return res;
}

// --- minimum-distance decoding ----------------------------------------------------

struct MmdTreeResult {
    std::vector<UndirectedGraph> minimizers;
    UndirectedGraph representative;  // smallest edge list among the minimizers
    int distance = 0;
    bool tie = false;
};

namespace detail {

// Mismatch count of a spanning tree against singleton-pair statements,
// evaluated through per-pair path masks (the unique tree path between x and
// y is blocked iff it meets the conditioning set).
class TreeEvaluator {
public:
    explicit TreeEvaluator(const UndirectedGraph& tree) : n_(tree.node_count()) {
        path_.assign(static_cast<std::size_t>(n_) * n_, 0);
        for (int s = 0; s < n_; ++s) {
            // BFS recording parents
            std::vector<int> parent(n_, -1);
            VarSet seen = single(s);
            std::vector<int> queue{s};
            for (std::size_t h = 0; h < queue.size(); ++h) {
                int v = queue[h];
                for_each_member(tree.adjacent(v) & ~seen, [&](int w) {
                    parent[w] = v;
                    seen |= single(w);
                    queue.push_back(w);
                });
            }
            for (int t = 0; t < n_; ++t) {
                if (t == s) continue;
                VarSet internals = 0;
                int v = t;
                while (parent[v] != -1 && v != s) {
                    v = parent[v];
                    if (v != s) internals |= single(v);
                }
                path_[static_cast<std::size_t>(s) * n_ + t] = internals;
            }
        }
    }

    bool tree_independent(const CiTriple& t) const {
        int a = lowest_bit(t.x), b = lowest_bit(t.y);
        return (path_[static_cast<std::size_t>(a) * n_ + b] & t.z) != 0;
    }

    int mismatches(const std::vector<CiStatement>& statements) const {
        int d = 0;
        for (const auto& st : statements)
            if (tree_independent(st.triple) != (st.verdict == Verdict::Independent)) ++d;
        return d;
    }

private:
    int n_;
    std::vector<VarSet> path_;
};

}  // namespace detail

// Spanning tree(s) with the fewest disagreements against the statements; all
// minimizers are returned, the representative is deterministic.
inline MmdTreeResult mmd_tree(const VariableUniverse& u,
                              const std::vector<CiStatement>& statements) {
    for (const auto& st : statements)
        if (set_size(st.triple.x) != 1 || set_size(st.triple.y) != 1)
            throw PreconditionError("tree decoding needs singleton-pair statements");
    MmdTreeResult res;
    res.distance = static_cast<int>(statements.size()) + 1;
    for_each_spanning_tree(u, [&](const UndirectedGraph& tree) {
        detail::TreeEvaluator ev(tree);
        int d = ev.mismatches(statements);
        if (d < res.distance) {
            res.distance = d;
            res.minimizers.clear();
        }
        if (d == res.distance) res.minimizers.push_back(tree);
    });
    res.tie = res.minimizers.size() > 1;
    res.representative = res.minimizers.front();
    for (const auto& t : res.minimizers)
        if (t.edges() < res.representative.edges()) res.representative = t;
    return res;
}

// Model variant over the |Z|=1 singleton pool.
inline MmdTreeResult mmd_tree(const IndependenceModel& model) {
    std::vector<CiStatement> statements;
    for (const auto& t : single_conditioner_triples(model.universe())) {
        Status s = model.status(t);
        if (s == Status::Unknown)
            throw UnknownStatusError("tree decoding needs a fully determined model on " +
                                     to_string(t, model.universe()));
        statements.push_back(
            CiStatement{t, s == Status::Independent ? Verdict::Independent : Verdict::Dependent});
    }
    return mmd_tree(model.universe(), statements);
}

struct MmdDagResult {
    // one representative per Markov-equivalence class among the minimizers
    std::vector<Dag> representatives;
    int distance = 0;
    long minimizer_count = 0;
};

// Argmin of the disagreement count over every DAG, against the full singleton
// triple pool.
inline MmdDagResult mmd_dag(const IndependenceModel& model) {
    const VariableUniverse& u = model.universe();
    auto ts = all_triples(u);
    std::vector<bool> want_indep;
    want_indep.reserve(ts.size());
    for (const auto& t : ts) {
        Status s = model.status(t);
        if (s == Status::Unknown)
            throw UnknownStatusError("dag decoding needs a fully determined model on " +
                                     to_string(t, u));
        want_indep.push_back(s == Status::Independent);
    }

    MmdDagResult res;
    res.distance = static_cast<int>(ts.size()) + 1;
    std::vector<Dag> winners;
    for_each_dag(u, [&](const Dag& g) {
        int d = 0;
        for (std::size_t i = 0; i < ts.size(); ++i)
            if (separated(g, ts[i].x, ts[i].y, ts[i].z) != want_indep[i]) ++d;
        if (d < res.distance) {
            res.distance = d;
            winners.clear();
        }
        if (d == res.distance) winners.push_back(g);
    });
    res.minimizer_count = static_cast<long>(winners.size());

    // deduplicate the winners by their implied singleton model
    std::vector<std::vector<bool>> sigs;
    for (const auto& g : winners) {
        std::vector<bool> sig;
        sig.reserve(ts.size());
        for (const auto& t : ts) sig.push_back(separated(g, t.x, t.y, t.z));
        bool seen = false;
        for (const auto& s : sigs) seen |= s == sig;
        if (!seen) {
            sigs.push_back(std::move(sig));
            res.representatives.push_back(g);
        }
    }
    return res;
}

// --- simplified tree recovery -------------------------------------------------

struct TreePcResult {
    UndirectedGraph graph;
    std::vector<CiStatement> conducted;
    bool tie = false;  // set when the result is not a spanning tree
};

// Start complete, skip marginal tests, remove an edge on the first
// independent verdict with a single conditioning node; stop as soon as the
// working graph is a tree.
inline TreePcResult tree_pc(CiOracle& oracle) {
    const VariableUniverse& u = oracle.universe();
    const int n = u.size();
    UndirectedGraph g(u);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
    TreePcResult res{g, {}, false};
    for (int i = 0; i < n && !is_spanning_tree(res.graph); ++i) {
        for (int j = i + 1; j < n && !is_spanning_tree(res.graph); ++j) {
            if (!res.graph.has_edge(i, j)) continue;
            for (int k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                CiStatement st = oracle.query(CiTriple{single(i), single(j), single(k)});
                res.conducted.push_back(st);
                if (st.verdict == Verdict::Independent) {
                    res.graph = res.graph.without_edge(i, j);
                    break;
                }
            }
        }
    }
    res.tie = !is_spanning_tree(res.graph);
    return res;
}

// --- a small PC variant ---------------------------------------------------------

struct Pdag {
    VariableUniverse universe;
    std::vector<Edge> directed;    // a -> b
    std::vector<Edge> undirected;  // a - b with a < b
};

struct PcLiteResult {
    Pdag graph;
    std::vector<CiStatement> conducted;
    std::map<std::pair<int, int>, VarSet> sepsets;
    bool non_markovian = false;
    bool fully_directed = false;
};

// Skeleton phase with growing conditioning sets over current neighbourhoods
// (first separating set found is recorded), collider orientation where the
// midpoint is missing from the recorded separating set (first orientation
// wins on conflicts), then the first orientation-propagation rule to a fixed
// point.
inline PcLiteResult pc_lite(CiOracle& oracle) {
    const VariableUniverse& u = oracle.universe();
    const int n = u.size();
    std::vector<VarSet> adj(n);
    for (int i = 0; i < n; ++i) adj[i] = u.all() & ~single(i);

    PcLiteResult res;
    res.graph.universe = u;

    auto remove_edge = [&](int a, int b) {
        adj[a] &= ~single(b);
        adj[b] &= ~single(a);
    };

    // skeleton
    for (int level = 0;; ++level) {
        bool any_candidate = false;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                if (!contains(adj[i], j)) continue;
                bool removed = false;
                const VarSet first_pool = adj[i] & ~single(j);
                for (int side = 0; side < 2 && !removed; ++side) {
                    VarSet pool = (side == 0 ? first_pool : adj[j] & ~single(i));
                    if (set_size(pool) < level) continue;
                    any_candidate = true;
                    // all subsets of the neighbourhood with exactly `level`
                    // members, in combination order
                    std::vector<int> nodes = members(pool);
                    std::vector<int> pick(level);
                    std::function<void(int, int)> combos = [&](int start, int depth) {
                        if (removed) return;
                        if (depth == level) {
                            VarSet zz = 0;
                            for (int idx : pick) zz |= single(nodes[idx]);
                            if (side == 1 && subset_of(zz, first_pool)) return;  // already tried
                            CiStatement st =
                                oracle.query(CiTriple{single(i), single(j), zz});
                            res.conducted.push_back(st);
                            if (st.verdict == Verdict::Independent) {
                                remove_edge(i, j);
                                res.sepsets[{i, j}] = zz;
                                removed = true;
                            }
                            return;
                        }
                        for (int idx = start; idx < static_cast<int>(nodes.size()); ++idx) {
                            pick[depth] = idx;
                            combos(idx + 1, depth + 1);
                        }
                    };
                    combos(0, 0);
                }
            }
        if (!any_candidate) break;
    }

    // orientation: -1 undirected, 0 a->b, 1 b->a for pair (a < b)
    std::map<std::pair<int, int>, int> orient;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (contains(adj[i], j)) orient[{i, j}] = -1;

    auto set_dir = [&](int from, int to) {
        auto key = std::make_pair(std::min(from, to), std::max(from, to));
        int want = from < to ? 0 : 1;
        if (orient[key] == -1) orient[key] = want;  // first orientation wins
    };

    // unshielded colliders
    for (int b = 0; b < n; ++b) {
        std::vector<int> nb = members(adj[b]);
        for (std::size_t p = 0; p < nb.size(); ++p)
            for (std::size_t q = p + 1; q < nb.size(); ++q) {
                int a = nb[p], c = nb[q];
                if (contains(adj[a], c)) continue;  // shielded
                auto it = res.sepsets.find({std::min(a, c), std::max(a, c)});
                VarSet sep = it == res.sepsets.end() ? 0 : it->second;
                if (!contains(sep, b)) {
                    set_dir(a, b);
                    set_dir(c, b);
                }
            }
    }

    // orientation propagation: a -> b - c with a, c non-adjacent gives b -> c
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [key, dir] : orient) {
            if (dir != -1) continue;
            auto [b, c] = key;
            for (int other = 0; other < 2; ++other) {
                int mid = other == 0 ? b : c;
                int tail = other == 0 ? c : b;
                // look for a -> mid with a not adjacent to tail
                bool fire = false;
                for_each_member(adj[mid] & ~single(tail), [&](int a) {
                    if (fire) return;
                    auto k2 = std::make_pair(std::min(a, mid), std::max(a, mid));
                    auto it = orient.find(k2);
                    if (it == orient.end() || it->second == -1) return;
                    bool a_to_mid = (a < mid) == (it->second == 0);
                    if (!a_to_mid) return;
                    if (contains(adj[a], tail)) return;
                    fire = true;
                });
                if (fire) {
                    dir = mid == b ? 0 : 1;  // orient mid -> tail
                    changed = true;
                    break;
                }
            }
        }
    }

    for (auto& [key, dir] : orient) {
        auto [a, b] = key;
        if (dir == -1)
            res.graph.undirected.push_back(Edge{a, b});
        else if (dir == 0)
            res.graph.directed.push_back(Edge{a, b});
        else
            res.graph.directed.push_back(Edge{b, a});
    }
    res.fully_directed = res.graph.undirected.empty();

    // Markov check against the conducted dependences, when the output is a
    // full DAG
    if (res.fully_directed) {
        try {
            Dag d(u, res.graph.directed);
            for (const auto& st : res.conducted) {
                if (st.verdict != Verdict::Dependent) continue;
                if (separated(d, st.triple.x, st.triple.y, st.triple.z)) {
                    res.non_markovian = true;
                    break;
                }
            }
        } catch (const Error&) {
            // orientation produced a cycle; leave the flag unset
        }
    }
    return res;
}

}  // namespace redci
