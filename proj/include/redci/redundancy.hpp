#pragma once

#include <optional>
#include <string>
#include <vector>

#include "redci/enumerate.hpp"
#include "redci/graphoid.hpp"
#include "redci/paths.hpp"

namespace redci {

template <typename GraphT>
inline bool matches_statements(const GraphT& g, const std::vector<CiStatement>& l) {
    for (const auto& st : l) {
        bool sep = separated(g, st.triple.x, st.triple.y, st.triple.z);
        if (sep != (st.verdict == Verdict::Independent)) return false;
    }
    return true;
}

inline bool matches_statements(const AnyGraph& g, const std::vector<CiStatement>& l) {
    return std::visit([&](const auto& gg) { return matches_statements(gg, l); }, g);
}

enum class GraphicalRedundancy { Redundant, NotRedundant, Vacuous };

struct GraphicalRedundancyResult {
    GraphicalRedundancy value = GraphicalRedundancy::Vacuous;
    long consistent_graphs = 0;
    // a consistent graph that disagrees with s, when one exists
    std::optional<AnyGraph> counterexample;
};

// Enumeration oracle: s is graphically redundant w.r.t. l and the class iff
// every class member consistent with l also matches s. An empty consistent
// set is reported as Vacuous rather than true, so callers can detect that
// their statements already contradict the graphical assumption.
inline GraphicalRedundancyResult is_graphically_redundant(const VariableUniverse& u,
                                                          const std::vector<CiStatement>& l,
                                                          const CiStatement& s, GraphClass cls) {
    GraphicalRedundancyResult res;
    for_each_graph(u, cls, [&](const AnyGraph& g) {
        if (!matches_statements(g, l)) return;
        ++res.consistent_graphs;
        bool sep = separated(g, s.triple.x, s.triple.y, s.triple.z);
        if (sep != (s.verdict == Verdict::Independent) && !res.counterexample)
            res.counterexample = g;
    });
    if (res.consistent_graphs == 0)
        res.value = GraphicalRedundancy::Vacuous;
    else
        res.value = res.counterexample ? GraphicalRedundancy::NotRedundant
                                       : GraphicalRedundancy::Redundant;
    return res;
}

// Precomputed implied models of an entire graph class over the singleton
// triple pool, stored as bit signatures. Makes repeated redundancy and
// distance queries against the same class cheap.
class GraphCatalog {
public:
    GraphCatalog(const VariableUniverse& u, GraphClass cls)
        : u_(u), cls_(cls), triples_(all_triples(u)) {
        words_ = (triples_.size() + 63) / 64;
        for_each_graph(u, cls, [&](const AnyGraph& g) {
            keys_.push_back(pack(g));
            std::size_t base = sig_.size();
            sig_.resize(base + words_, 0);
            for (std::size_t i = 0; i < triples_.size(); ++i) {
                const auto& t = triples_[i];
                if (separated(g, t.x, t.y, t.z)) sig_[base + i / 64] |= std::uint64_t{1} << (i % 64);
            }
        });
    }

    const VariableUniverse& universe() const { return u_; }
    const TripleSet& triples() const { return triples_; }
    long graph_count() const { return static_cast<long>(keys_.size()); }

    int triple_index(const CiTriple& t) const {
        auto c = canonicalize(t);
        auto it = std::lower_bound(triples_.begin(), triples_.end(), c);
        if (it == triples_.end() || !(*it == c)) return -1;
        return static_cast<int>(it - triples_.begin());
    }

    bool implies_independent(long id, int triple_idx) const {
        return (sig_[id * words_ + triple_idx / 64] >> (triple_idx % 64)) & 1;
    }

    AnyGraph graph(long id) const { return unpack(keys_[id]); }

    std::vector<long> consistent_with(const std::vector<CiStatement>& l) const {
        std::vector<std::pair<int, bool>> reqs;
        for (const auto& st : l) {
            int idx = triple_index(st.triple);
            if (idx < 0) throw PreconditionError("statement outside the catalog triple pool");
            reqs.push_back({idx, st.verdict == Verdict::Independent});
        }
        std::vector<long> out;
        for (long id = 0; id < graph_count(); ++id) {
            bool ok = true;
            for (auto [idx, want] : reqs)
                if (implies_independent(id, idx) != want) {
                    ok = false;
                    break;
                }
            if (ok) out.push_back(id);
        }
        return out;
    }

    // Signature of a model that is determined on the whole pool.
    std::vector<std::uint64_t> model_signature(const IndependenceModel& m) const {
        std::vector<std::uint64_t> sig(words_, 0);
        for (std::size_t i = 0; i < triples_.size(); ++i) {
            Status s = m.status(triples_[i]);
            if (s == Status::Unknown)
                throw UnknownStatusError("model not determined on " +
                                         to_string(triples_[i], u_));
            if (s == Status::Independent) sig[i / 64] |= std::uint64_t{1} << (i % 64);
        }
        return sig;
    }

    int distance(long id, const std::vector<std::uint64_t>& model_sig) const {
        int d = 0;
        for (std::size_t w = 0; w < words_; ++w)
            d += std::popcount(sig_[id * words_ + w] ^ model_sig[w]);
        return d;
    }

private:
    std::uint64_t pack(const AnyGraph& g) const {
        const int n = u_.size();
        std::uint64_t key = 0;
        if (const Dag* d = std::get_if<Dag>(&g)) {
            for (const auto& e : d->edges()) key |= std::uint64_t{1} << (e.a * n + e.b);
        } else {
            for (const auto& e : std::get<UndirectedGraph>(g).edges())
                key |= std::uint64_t{1} << (e.a * n + e.b);
        }
        return key;
    }

    AnyGraph unpack(std::uint64_t key) const {
        const int n = u_.size();
        std::vector<Edge> edges;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if ((key >> (a * n + b)) & 1) edges.push_back(Edge{a, b});
        if (cls_ == GraphClass::Dags) return AnyGraph{Dag(u_, edges)};
        return AnyGraph{UndirectedGraph(u_, edges)};
    }

    VariableUniverse u_;
    GraphClass cls_;
    TripleSet triples_;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> keys_;
    std::vector<std::uint64_t> sig_;
};

// --- the path-based certificate ---------------------------------------------

// Graph with duplicated nodes and set-resolution semantics: a base node that
// has been split is queried as the set of its copies.
class SurgeryGraph {
public:
    explicit SurgeryGraph(AnyGraph g) : base_(universe_of(g)), g_(std::move(g)) {
        resolution_.resize(base_.size());
        for (int i = 0; i < base_.size(); ++i) resolution_[i] = single(i);
    }

    const VariableUniverse& base_universe() const { return base_; }
    const VariableUniverse& expanded_universe() const { return universe_of(g_); }
    const AnyGraph& graph() const { return g_; }
    bool is_dag() const { return std::holds_alternative<Dag>(g_); }

    VarSet resolve(VarSet base_set) const {
        VarSet out = 0;
        for_each_member(base_set, [&](int i) { out |= resolution_[i]; });
        return out;
    }

    bool separated(VarSet bx, VarSet by, VarSet bz) const {
        return redci::separated(g_, resolve(bx), resolve(by), resolve(bz));
    }

    bool coupled_over(VarSet a, VarSet b, VarSet c, const CiTriple& s) const {
        VarSet ra = resolve(a), rb = resolve(b), rc = resolve(c);
        VarSet sx = resolve(s.x), sy = resolve(s.y), sz = resolve(s.z);
        return std::visit(
            [&](const auto& gg) { return redci::coupled_over(gg, ra, rb, rc, sx, sy, sz); }, g_);
    }

    IndependenceModel implied_base_model(const TripleSet& ts) const {
        IndependenceModel m(base_);
        for (const auto& t : ts)
            m.set(t, separated(t.x, t.y, t.z) ? Status::Independent : Status::Dependent);
        return m;
    }

    // Separating surgery for the base triple s = (x, y | z): drops a direct
    // x-y edge and splits every node on a remaining active x..y path given z
    // into an x-side and a y-side copy, rewiring so that x reaches only the
    // former and y only the latter. Afterwards x and y are separated given z
    // under the resolution semantics.
    SurgeryGraph surgered(const CiTriple& s) const {
        if (separated(s.x, s.y, s.z))
            throw PreconditionError("surgery requires the pair to be connected");
        const VarSet rx = resolve(s.x), ry = resolve(s.y), rz = resolve(s.z);
        return is_dag() ? rebuild(std::get<Dag>(g_), rx, ry, rz)
                        : rebuild(std::get<UndirectedGraph>(g_), rx, ry, rz);
    }

private:
    template <typename GraphT>
    SurgeryGraph rebuild(const GraphT& g, VarSet rx, VarSet ry, VarSet rz) const {
        const VariableUniverse& eu = g.universe();
        VarSet split = active_channel_nodes(g, rx, ry, rz);

        // new universe: untouched nodes keep their names, split nodes get two
        // copies
        std::vector<std::string> names;
        std::vector<int> plain(eu.size(), -1), copy1(eu.size(), -1), copy2(eu.size(), -1);
        for (int v = 0; v < eu.size(); ++v) {
            if (contains(split, v)) {
                copy1[v] = static_cast<int>(names.size());
                names.push_back(eu.name(v) + "#1");
                copy2[v] = static_cast<int>(names.size());
                names.push_back(eu.name(v) + "#2");
            } else {
                plain[v] = static_cast<int>(names.size());
                names.push_back(eu.name(v));
            }
        }
        VariableUniverse nu(names);

        // Edge directions are preserved throughout; for undirected graphs the
        // pair order is irrelevant.
        std::vector<Edge> edges;
        auto add = [&](int a, int b) { edges.push_back(Edge{a, b}); };
        for (const auto& e : g.edges()) {
            bool sa = contains(split, e.a), sb = contains(split, e.b);
            bool xa = contains(rx, e.a), xb = contains(rx, e.b);
            bool ya = contains(ry, e.a), yb = contains(ry, e.b);
            if (sa && sb) {
                add(copy1[e.a], copy1[e.b]);
                add(copy2[e.a], copy2[e.b]);
            } else if (sa && !sb) {
                if (xb) {
                    add(copy1[e.a], plain[e.b]);  // x touches only first copies
                } else if (yb) {
                    add(copy2[e.a], plain[e.b]);  // y touches only second copies
                } else {
                    add(copy1[e.a], plain[e.b]);
                    add(copy2[e.a], plain[e.b]);
                }
            } else if (!sa && sb) {
                if (xa) {
                    add(plain[e.a], copy1[e.b]);
                } else if (ya) {
                    add(plain[e.a], copy2[e.b]);
                } else {
                    add(plain[e.a], copy1[e.b]);
                    add(plain[e.a], copy2[e.b]);
                }
            } else {
                // a direct x-y channel is dropped, everything else survives
                bool direct_xy = (xa && yb) || (ya && xb);
                if (!direct_xy) add(plain[e.a], plain[e.b]);
            }
        }

        SurgeryGraph out(*this, nu, edges);
        // update the base resolution through the node mapping
        for (int b = 0; b < base_.size(); ++b) {
            VarSet r = 0;
            for_each_member(resolution_[b], [&](int v) {
                if (plain[v] >= 0)
                    r |= single(plain[v]);
                else
                    r |= single(copy1[v]) | single(copy2[v]);
            });
            out.resolution_[b] = r;
        }
        return out;
    }

    SurgeryGraph(const SurgeryGraph& prev, const VariableUniverse& nu,
                 const std::vector<Edge>& edges)
        : base_(prev.base_),
          g_(prev.is_dag() ? AnyGraph{Dag(nu, edges)} : AnyGraph{UndirectedGraph(nu, edges)}) {
        resolution_.resize(base_.size());
    }

    VariableUniverse base_;
    AnyGraph g_;
    std::vector<VarSet> resolution_;
};

inline SurgeryGraph graph_surgery(const AnyGraph& g, const CiTriple& s) {
    return SurgeryGraph(g).surgered(s);
}

// True iff no dependence statement of l couples its pair over s given its
// conditioning set; the certified dependence for s is then purely graphical
// with respect to l. Preconditions: every independence of l must be
// separated, and s itself connected.
inline bool sufficient_criterion(const SurgeryGraph& g, const std::vector<CiStatement>& l,
                                 const CiTriple& s) {
    if (set_size(s.x) != 1 || set_size(s.y) != 1)
        throw PreconditionError("criterion requires singleton endpoints");
    for (const auto& st : l) {
        if (st.verdict != Verdict::Independent) continue;
        if (!g.separated(st.triple.x, st.triple.y, st.triple.z))
            throw PreconditionError("graph is not Markovian to the statement list");
    }
    if (g.separated(s.x, s.y, s.z))
        throw PreconditionError("criterion requires the target pair to be connected");
    for (const auto& st : l) {
        if (st.verdict != Verdict::Dependent) continue;
        if (g.coupled_over(st.triple.x, st.triple.y, st.triple.z, s)) return false;
    }
    return true;
}

template <typename GraphT>
inline bool sufficient_criterion(const GraphT& g, const std::vector<CiStatement>& l,
                                 const CiTriple& s) {
    return sufficient_criterion(SurgeryGraph(AnyGraph{g}), l, s);
}

inline bool sufficient_criterion(const AnyGraph& g, const std::vector<CiStatement>& l,
                                 const CiTriple& s) {
    return sufficient_criterion(SurgeryGraph(g), l, s);
}

// All pool dependences whose endpoints are coupled in g given the
// conditioning set; such dependences follow from the construction statements
// through the axioms alone.
template <typename GraphT>
inline std::vector<CiStatement> graphoid_redundant_dependences(const GraphT& g,
                                                               const TripleSet& pool) {
    std::vector<CiStatement> out;
    for (const auto& t : pool) {
        if (set_size(t.x) != 1 || set_size(t.y) != 1) continue;
        if (coupled(g, lowest_bit(t.x), lowest_bit(t.y), t.z))
            out.push_back(CiStatement{t, Verdict::Dependent});
    }
    return out;
}

// Stateful candidate stream: emits dependence statements certified purely
// graphical against the current graph and statement list. Observed verdicts
// are appended to the list; an observed independence cuts the graph before
// the stream continues, so later candidates never follow from what has
// already been seen.
class IteratedCandidateStream {
public:
    IteratedCandidateStream(AnyGraph g, std::vector<CiStatement> l, TripleSet pool)
        : g_(std::move(g)), l_(std::move(l)), pool_(std::move(pool)) {}

    IteratedCandidateStream(SurgeryGraph g, std::vector<CiStatement> l, TripleSet pool)
        : g_(std::move(g)), l_(std::move(l)), pool_(std::move(pool)) {}

    std::optional<CiStatement> next() {
        if (pending_)
            throw PreconditionError("report the previous candidate before requesting another");
        while (cursor_ < pool_.size()) {
            const CiTriple& t = pool_[cursor_++];
            if (set_size(t.x) != 1 || set_size(t.y) != 1) continue;
            if (in_list(t)) continue;
            // Once a pair has been observed dependent under one conditioning
            // set, the certificate is unreliable for the same pair under
            // another one: cutting it could sever the observed dependence.
            // The criterion is only sufficient, so these are skipped.
            if (pair_conducted_dependent(t)) continue;
            if (g_.separated(t.x, t.y, t.z)) continue;
            if (!sufficient_criterion(g_, l_, t)) continue;
            pending_ = t;
            return CiStatement{t, Verdict::Dependent};
        }
        return std::nullopt;
    }

    void report(Verdict observed) {
        if (!pending_) throw PreconditionError("no candidate pending");
        CiTriple t = *pending_;
        pending_.reset();
        l_.push_back(CiStatement{t, observed});
        if (observed == Verdict::Independent) g_ = g_.surgered(t);
    }

    const SurgeryGraph& current_graph() const { return g_; }
    const std::vector<CiStatement>& statements() const { return l_; }

private:
    bool in_list(const CiTriple& t) const {
        for (const auto& st : l_)
            if (st.triple == t) return true;
        return false;
    }

    bool pair_conducted_dependent(const CiTriple& t) const {
        for (const auto& st : l_)
            if (st.verdict == Verdict::Dependent && st.triple.x == t.x && st.triple.y == t.y &&
                !(st.triple == t))
                return true;
        return false;
    }

    SurgeryGraph g_;
    std::vector<CiStatement> l_;
    TripleSet pool_;
    std::size_t cursor_ = 0;
    std::optional<CiTriple> pending_;
};

// --- combined classification -------------------------------------------------

enum class RedundancyClass {
    GraphoidRedundant,
    PurelyGraphical,
    NotGraphicallyRedundant,
    Undetermined,
};

inline const char* to_string(RedundancyClass c) {
    switch (c) {
        case RedundancyClass::GraphoidRedundant: return "graphoid-redundant";
        case RedundancyClass::PurelyGraphical: return "purely-graphical";
        case RedundancyClass::NotGraphicallyRedundant: return "not-graphically-redundant";
        case RedundancyClass::Undetermined: return "undetermined";
    }
    return "?";
}

struct ClassifyResult {
    RedundancyClass value = RedundancyClass::Undetermined;
    GraphoidRedundancy graphoid = GraphoidRedundancy::Undetermined;
    std::optional<GraphicalRedundancy> graphical;
    std::optional<bool> criterion;
    std::optional<AnyGraph> counterexample;
    std::vector<DerivationStep> derivation;
};

// Hierarchy cell of s relative to l. When a graph is supplied and s is a
// dependence over singletons, the path criterion replaces enumeration; a
// negative criterion alone cannot rule redundancy out, so that case stays
// Undetermined.
inline ClassifyResult classify(const VariableUniverse& u, const std::vector<CiStatement>& l,
                               const CiStatement& s, GraphClass cls,
                               const std::optional<AnyGraph>& g = std::nullopt,
                               const ClosureOptions& opts = {}) {
    ClassifyResult res;
    ClosureResult cl = closure(u, l, opts);
    Status st = cl.status(s.triple);
    if (st != Status::Unknown) {
        res.graphoid = st == to_status(s.verdict) ? GraphoidRedundancy::Matching
                                                  : GraphoidRedundancy::Contradicting;
        if (res.graphoid == GraphoidRedundancy::Matching) {
            res.value = RedundancyClass::GraphoidRedundant;
            res.derivation = cl.derivation(s.triple);
        } else {
            res.value = RedundancyClass::NotGraphicallyRedundant;
        }
        return res;
    }
    res.graphoid = GraphoidRedundancy::Undetermined;
    if (g && s.verdict == Verdict::Dependent && set_size(s.triple.x) == 1 &&
        set_size(s.triple.y) == 1) {
        bool crit = sufficient_criterion(*g, l, s.triple);
        res.criterion = crit;
        res.value = crit ? RedundancyClass::PurelyGraphical : RedundancyClass::Undetermined;
        return res;
    }
    auto gr = is_graphically_redundant(u, l, s, cls);
    res.graphical = gr.value;
    res.counterexample = gr.counterexample;
    switch (gr.value) {
        case GraphicalRedundancy::Redundant: res.value = RedundancyClass::PurelyGraphical; break;
        case GraphicalRedundancy::NotRedundant:
            res.value = RedundancyClass::NotGraphicallyRedundant;
            break;
        case GraphicalRedundancy::Vacuous: res.value = RedundancyClass::Undetermined; break;
    }
    return res;
}

}  // namespace redci
