#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "redci/model.hpp"

namespace redci {

// Symmetry never appears in traces: it is quotiented away by canonical
// triples. The contrapositive rules propagate dependences.
enum class RuleId : std::uint8_t {
    Given,
    Symmetry,
    Decomposition,
    WeakUnion,
    Contraction,
    Intersection,
    DecompositionContra,
    WeakUnionContra,
    ContractionContra,
    IntersectionContra,
};

inline const char* rule_name(RuleId r) {
    switch (r) {
        case RuleId::Given: return "given";
        case RuleId::Symmetry: return "symmetry";
        case RuleId::Decomposition: return "decomposition";
        case RuleId::WeakUnion: return "weak-union";
        case RuleId::Contraction: return "contraction";
        case RuleId::Intersection: return "intersection";
        case RuleId::DecompositionContra: return "decomposition-contrapositive";
        case RuleId::WeakUnionContra: return "weak-union-contrapositive";
        case RuleId::ContractionContra: return "contraction-contrapositive";
        case RuleId::IntersectionContra: return "intersection-contrapositive";
    }
    return "?";
}

// One ground rule application: premises were already determined when the
// conclusion was drawn.
struct DerivationStep {
    RuleId rule = RuleId::Given;
    CiStatement conclusion;
    std::vector<CiStatement> premises;
};

struct ClosureOptions {
    bool use_intersection = true;
};

struct ClosureResult {
    IndependenceModel model;
    std::map<CiTriple, DerivationStep> traces;
    // Set iff some triple was derived with both verdicts; `conflict` is the
    // derivation that clashed with the recorded trace for that triple.
    std::optional<CiTriple> contradiction;
    std::optional<DerivationStep> conflict;

    bool consistent() const { return !contradiction.has_value(); }

    Status status(const CiTriple& t) const { return model.status(t); }

    // Expands the stored single-step traces into a full derivation tree
    // rooted at t (inputs are the leaves).
    std::vector<DerivationStep> derivation(const CiTriple& t) const {
        std::vector<DerivationStep> out;
        std::vector<CiTriple> stack{canonicalize(t)};
        std::unordered_map<CiTriple, bool, TripleHash> seen;
        while (!stack.empty()) {
            CiTriple cur = stack.back();
            stack.pop_back();
            if (seen[cur]) continue;
            seen[cur] = true;
            auto it = traces.find(cur);
            if (it == traces.end()) continue;
            out.push_back(it->second);
            for (const auto& p : it->second.premises) stack.push_back(p.triple);
        }
        return out;
    }
};

namespace detail {

class ClosureEngine {
public:
    ClosureEngine(const VariableUniverse& u, ClosureOptions opts) : u_(u), opts_(opts) {
        if (u.size() > kSetValuedCap)
            throw CapExceededError("closure requires a universe of at most 8 variables");
        all_ = u.all();
    }

    ClosureResult run(const std::vector<CiStatement>& inputs) {
        for (const auto& st : inputs) {
            if ((st.triple.x | st.triple.y | st.triple.z) & ~all_)
                throw UnknownVariableError("statement outside the universe");
            conclude(st.triple.x, st.triple.y, st.triple.z, st.verdict, RuleId::Given, {});
            if (halted_) break;
        }
        while (!halted_ && !work_.empty()) {
            CiTriple t = work_.front();
            work_.pop_front();
            fire(t);
        }
        ClosureResult res;
        res.model = IndependenceModel(u_);
        for (const auto& [key, v] : status_) res.model.set(key, to_status(v));
        res.traces = std::move(traces_);
        res.contradiction = contradiction_;
        res.conflict = conflict_;
        return res;
    }

private:
    Status lookup(VarSet x, VarSet s, VarSet z) const {
        auto it = status_.find(canonicalize(x, s, z));
        return it == status_.end() ? Status::Unknown : to_status(it->second);
    }

    bool is_indep(VarSet x, VarSet s, VarSet z) const {
        return lookup(x, s, z) == Status::Independent;
    }
    bool is_dep(VarSet x, VarSet s, VarSet z) const {
        return lookup(x, s, z) == Status::Dependent;
    }

    void conclude(VarSet x, VarSet s, VarSet z, Verdict v, RuleId rule,
                  std::vector<CiStatement> premises) {
        if (halted_) return;
        CiTriple t = canonicalize(x, s, z);
        auto it = status_.find(t);
        if (it != status_.end()) {
            if (it->second == v) return;
            contradiction_ = t;
            conflict_ = DerivationStep{rule, CiStatement{t, v}, std::move(premises)};
            halted_ = true;
            return;
        }
        status_.emplace(t, v);
        traces_.emplace(t, DerivationStep{rule, CiStatement{t, v}, std::move(premises)});
        work_.push_back(t);
    }

    CiStatement fact(VarSet x, VarSet s, VarSet z, Verdict v) const {
        return CiStatement{canonicalize(x, s, z), v};
    }

    // Applies every ground rule instance in which the popped fact can occur
    // as a premise, pairing it against already-determined partners.
    void fire(const CiTriple& t) {
        const Verdict v = status_.at(t);
        const VarSet views[2][2] = {{t.x, t.y}, {t.y, t.x}};
        for (const auto& view : views) {
            const VarSet x = view[0];
            const VarSet s = view[1];
            const VarSet z = t.z;
            const VarSet out = all_ & ~(x | s | z);
            const CiStatement self = CiStatement{t, v};
            if (v == Verdict::Independent) {
                fire_independent(x, s, z, out, self);
                if (halted_) return;
            } else {
                fire_dependent(x, s, z, out, self);
                if (halted_) return;
            }
        }
    }

    void fire_independent(VarSet x, VarSet s, VarSet z, VarSet out, const CiStatement& self) {
        // Decomposition and weak union on a composite side.
        if (set_size(s) >= 2) {
            for_each_subset(s, [&](VarSet sy) {
                if (halted_ || !sy || sy == s) return;
                VarSet sw = s & ~sy;
                conclude(x, sy, z, Verdict::Independent, RuleId::Decomposition, {self});
                conclude(x, sy, z | sw, Verdict::Independent, RuleId::WeakUnion, {self});
            });
        }
        if (halted_) return;

        // Contraction, this fact as I(X,Y|Z).
        for_each_subset(out, [&](VarSet w) {
            if (halted_ || !w) return;
            if (is_indep(x, w, z | s))
                conclude(x, s | w, z, Verdict::Independent, RuleId::Contraction,
                         {self, fact(x, w, z | s, Verdict::Independent)});
            // Contraction contrapositive, this fact as the independence
            // premise I(X,Y|Z) against a dependent composite.
            if (is_dep(x, s | w, z))
                conclude(x, w, z | s, Verdict::Dependent, RuleId::ContractionContra,
                         {self, fact(x, s | w, z, Verdict::Dependent)});
        });
        if (halted_) return;

        // Splits of the conditioning set: this fact as the second premise of
        // contraction, as either premise of intersection, and as the
        // independence premise of the remaining contrapositives.
        for_each_subset(z, [&](VarSet part) {
            if (halted_ || !part) return;
            VarSet zc = z & ~part;
            // contraction: I(X,Yc|Zc) && I(X,S|Zc u Yc) => I(X,Yc u S|Zc)
            if (is_indep(x, part, zc))
                conclude(x, part | s, zc, Verdict::Independent, RuleId::Contraction,
                         {fact(x, part, zc, Verdict::Independent), self});
            // contraction contrapositive: I(X,S|Zc u Yc) && D(X,Yc u S|Zc) => D(X,Yc|Zc)
            if (is_dep(x, part | s, zc))
                conclude(x, part, zc, Verdict::Dependent, RuleId::ContractionContra,
                         {self, fact(x, part | s, zc, Verdict::Dependent)});
            if (opts_.use_intersection) {
                // intersection: I(X,S|Zc u Wc) && I(X,Wc|Zc u S) => I(X,S u Wc|Zc)
                if (is_indep(x, part, zc | s))
                    conclude(x, s | part, zc, Verdict::Independent, RuleId::Intersection,
                             {self, fact(x, part, zc | s, Verdict::Independent)});
                // intersection contrapositive:
                // I(X,S|Zc u Wc) && D(X,S u Wc|Zc) => D(X,Wc|Zc u S)
                if (is_dep(x, s | part, zc))
                    conclude(x, part, zc | s, Verdict::Dependent, RuleId::IntersectionContra,
                             {self, fact(x, s | part, zc, Verdict::Dependent)});
            }
        });
    }

    void fire_dependent(VarSet x, VarSet s, VarSet z, VarSet out, const CiStatement& self) {
        // Dependences propagate to supersets of the dependent side.
        for_each_subset(out, [&](VarSet w) {
            if (halted_ || !w) return;
            conclude(x, s | w, z, Verdict::Dependent, RuleId::DecompositionContra, {self});
        });
        if (halted_) return;

        // D(X,S|Zc u Wc) => D(X,S u Wc|Zc)
        for_each_subset(z, [&](VarSet wc) {
            if (halted_ || !wc) return;
            VarSet zc = z & ~wc;
            conclude(x, s | wc, zc, Verdict::Dependent, RuleId::WeakUnionContra, {self});
        });
        if (halted_) return;

        // This fact as the dependent composite D(X, Sy u Sw | Z).
        if (set_size(s) >= 2) {
            for_each_subset(s, [&](VarSet sy) {
                if (halted_ || !sy || sy == s) return;
                VarSet sw = s & ~sy;
                if (is_indep(x, sy, z))
                    conclude(x, sw, z | sy, Verdict::Dependent, RuleId::ContractionContra,
                             {fact(x, sy, z, Verdict::Independent), self});
                if (is_indep(x, sw, z | sy))
                    conclude(x, sy, z, Verdict::Dependent, RuleId::ContractionContra,
                             {fact(x, sw, z | sy, Verdict::Independent), self});
                if (opts_.use_intersection && is_indep(x, sy, z | sw))
                    conclude(x, sw, z | sy, Verdict::Dependent, RuleId::IntersectionContra,
                             {fact(x, sy, z | sw, Verdict::Independent), self});
            });
        }
    }

    const VariableUniverse& u_;
    ClosureOptions opts_;
    VarSet all_ = 0;
    std::unordered_map<CiTriple, Verdict, TripleHash> status_;
    std::map<CiTriple, DerivationStep> traces_;
    std::deque<CiTriple> work_;
    std::optional<CiTriple> contradiction_;
    std::optional<DerivationStep> conflict_;
    bool halted_ = false;
};

}  // namespace detail

// Least fixed point of the ground Graphoid rules (forward rules on
// independences, contrapositives on dependences) over all set-valued triples
// of the universe. Symmetry is built into triple canonicalization.
inline ClosureResult closure(const VariableUniverse& u, const std::vector<CiStatement>& inputs,
                             const ClosureOptions& opts = {}) {
    return detail::ClosureEngine(u, opts).run(inputs);
}

enum class GraphoidRedundancy { Matching, Contradicting, Undetermined };

// Decidable test: does the closure of l force (or refute) s?
inline GraphoidRedundancy is_graphoid_redundant(const VariableUniverse& u,
                                                const std::vector<CiStatement>& l,
                                                const CiStatement& s,
                                                const ClosureOptions& opts = {}) {
    ClosureResult res = closure(u, l, opts);
    Status st = res.status(s.triple);
    if (st == Status::Unknown) return GraphoidRedundancy::Undetermined;
    return st == to_status(s.verdict) ? GraphoidRedundancy::Matching
                                      : GraphoidRedundancy::Contradicting;
}

struct ConsistencyReport {
    bool ok = true;
    std::optional<CiTriple> triple;
    std::vector<DerivationStep> first_derivation;
    std::optional<DerivationStep> second_derivation;
};

inline ConsistencyReport check_consistency(const VariableUniverse& u,
                                           const std::vector<CiStatement>& l,
                                           const ClosureOptions& opts = {}) {
    ClosureResult res = closure(u, l, opts);
    ConsistencyReport rep;
    if (res.consistent()) return rep;
    rep.ok = false;
    rep.triple = res.contradiction;
    rep.first_derivation = res.derivation(*res.contradiction);
    rep.second_derivation = res.conflict;
    return rep;
}

}  // namespace redci
