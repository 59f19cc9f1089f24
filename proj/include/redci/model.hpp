#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "redci/error.hpp"

namespace redci {

// A set of variables, stored as a bitmask over universe indices.
// Supports universes of up to 64 variables, far above any enumeration cap.
using VarSet = std::uint64_t;

inline constexpr VarSet kEmptySet = 0;

inline VarSet single(int i) { return VarSet{1} << i; }
inline bool contains(VarSet s, int i) { return (s >> i) & 1; }
inline int set_size(VarSet s) { return std::popcount(s); }
inline bool subset_of(VarSet a, VarSet b) { return (a & ~b) == 0; }
inline bool disjoint(VarSet a, VarSet b) { return (a & b) == 0; }
inline int lowest_bit(VarSet s) { return std::countr_zero(s); }

// Calls fn(i) for every index in the set, in ascending order.
template <typename Fn>
inline void for_each_member(VarSet s, Fn&& fn) {
    while (s) {
        int i = std::countr_zero(s);
        fn(i);
        s &= s - 1;
    }
}

inline std::vector<int> members(VarSet s) {
    std::vector<int> out;
    for_each_member(s, [&](int i) { out.push_back(i); });
    return out;
}

// Lexicographic order on the ascending index sequences of two sets.
// E.g. {0,2} < {1} and {0} < {0,1}.
inline bool set_lex_less(VarSet a, VarSet b) {
    while (a && b) {
        int ia = std::countr_zero(a);
        int ib = std::countr_zero(b);
        if (ia != ib) return ia < ib;
        a &= a - 1;
        b &= b - 1;
    }
    return !a && b;
}

// Enumerates all subsets of `mask`, including the empty set, in ascending
// numeric order, and calls fn(subset) for each.
template <typename Fn>
inline void for_each_subset(VarSet mask, Fn&& fn) {
    VarSet sub = 0;
    while (true) {
        fn(sub);
        if (sub == mask) break;
        sub = (sub - mask) & mask;
    }
}

// Ordered collection of distinct variable names; fixes index assignment.
class VariableUniverse {
public:
    VariableUniverse() = default;

    explicit VariableUniverse(std::vector<std::string> names) : names_(std::move(names)) {
        if (names_.empty()) throw Error("universe must not be empty");
        for (int i = 0; i < static_cast<int>(names_.size()); ++i) {
            auto [it, inserted] = index_.emplace(names_[i], i);
            if (!inserted) throw Error("duplicate variable name: " + names_[i]);
        }
        if (names_.size() > 64) throw CapExceededError("universe larger than 64 variables");
    }

    int size() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(int i) const { return names_.at(i); }

    int index(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw UnknownVariableError("unknown variable: " + name);
        return it->second;
    }

    bool has(const std::string& name) const { return index_.count(name) != 0; }

    VarSet all() const {
        return names_.size() == 64 ? ~VarSet{0} : (VarSet{1} << names_.size()) - 1;
    }

    VarSet set_of(const std::vector<std::string>& xs) const {
        VarSet s = 0;
        for (const auto& x : xs) s |= single(index(x));
        return s;
    }

    std::vector<std::string> names_of(VarSet s) const {
        std::vector<std::string> out;
        for_each_member(s, [&](int i) { out.push_back(name(i)); });
        return out;
    }

    bool operator==(const VariableUniverse& o) const { return names_ == o.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
};

// Canonical triple (x, y | z): x, y nonempty, pairwise disjoint, x lex <= y.
struct CiTriple {
    VarSet x = 0;
    VarSet y = 0;
    VarSet z = 0;

    bool operator==(const CiTriple& o) const { return x == o.x && y == o.y && z == o.z; }
    bool operator<(const CiTriple& o) const {
        if (x != o.x) return set_lex_less(x, o.x);
        if (y != o.y) return set_lex_less(y, o.y);
        return set_lex_less(z, o.z);
    }
};

struct TripleHash {
    std::size_t operator()(const CiTriple& t) const {
        std::uint64_t h = t.x * 0x9e3779b97f4a7c15ull;
        h ^= t.y + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h ^= t.z + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

// Returns the canonical representative of (x, y | z). Symmetry in x and y is
// quotiented away here; the other axioms live in the closure engine.
inline CiTriple canonicalize(VarSet x, VarSet y, VarSet z) {
    if (!x || !y) throw EmptySideError("triple sides must be nonempty");
    if (!disjoint(x, y) || !disjoint(x, z) || !disjoint(y, z))
        throw OverlapError("triple sets must be pairwise disjoint");
    if (set_lex_less(y, x)) std::swap(x, y);
    return CiTriple{x, y, z};
}

inline CiTriple canonicalize(const CiTriple& t) { return canonicalize(t.x, t.y, t.z); }

// Validates membership of a triple in a universe.
inline CiTriple canonicalize(const CiTriple& t, const VariableUniverse& u) {
    if ((t.x | t.y | t.z) & ~u.all())
        throw UnknownVariableError("triple references variables outside the universe");
    return canonicalize(t);
}

enum class Verdict : std::uint8_t { Independent, Dependent };

inline Verdict opposite(Verdict v) {
    return v == Verdict::Independent ? Verdict::Dependent : Verdict::Independent;
}

struct CiStatement {
    CiTriple triple;
    Verdict verdict = Verdict::Independent;

    bool operator==(const CiStatement& o) const {
        return triple == o.triple && verdict == o.verdict;
    }
    bool operator<(const CiStatement& o) const {
        if (!(triple == o.triple)) return triple < o.triple;
        return verdict < o.verdict;
    }
};

inline CiStatement indep(VarSet x, VarSet y, VarSet z = 0) {
    return CiStatement{canonicalize(x, y, z), Verdict::Independent};
}
inline CiStatement dep(VarSet x, VarSet y, VarSet z = 0) {
    return CiStatement{canonicalize(x, y, z), Verdict::Dependent};
}

enum class Status : std::uint8_t { Independent, Dependent, Unknown };

inline Status to_status(Verdict v) {
    return v == Verdict::Independent ? Status::Independent : Status::Dependent;
}

inline std::string to_string(const CiTriple& t, const VariableUniverse& u) {
    auto side = [&](VarSet s) {
        std::string out = "{";
        bool first = true;
        for_each_member(s, [&](int i) {
            if (!first) out += ",";
            out += u.name(i);
            first = false;
        });
        return out + "}";
    };
    return "(" + side(t.x) + "," + side(t.y) + "|" + side(t.z) + ")";
}

inline std::string to_string(const CiStatement& s, const VariableUniverse& u) {
    return to_string(s.triple, u) + (s.verdict == Verdict::Independent ? " indep" : " dep");
}

// Deduplicated, sorted set of canonical triples.
using TripleSet = std::vector<CiTriple>;

inline void sort_unique(TripleSet& s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
}

// Three-valued map from canonical triples to verdicts. Absent means Unknown.
class IndependenceModel {
public:
    IndependenceModel() = default;
    explicit IndependenceModel(VariableUniverse u) : universe_(std::move(u)) {}

    const VariableUniverse& universe() const { return universe_; }

    void set(const CiTriple& t, Status s) {
        CiTriple c = canonicalize(t, universe_);
        if (s == Status::Unknown)
            status_.erase(c);
        else
            status_[c] = s;
    }

    void set(const CiStatement& st) { set(st.triple, to_status(st.verdict)); }

    Status status(const CiTriple& t) const {
        CiTriple c = canonicalize(t, universe_);
        auto it = status_.find(c);
        return it == status_.end() ? Status::Unknown : it->second;
    }

    std::vector<CiStatement> statements() const {
        std::vector<CiStatement> out;
        out.reserve(status_.size());
        for (const auto& [t, s] : status_) {
            out.push_back(CiStatement{
                t, s == Status::Independent ? Verdict::Independent : Verdict::Dependent});
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::size_t determined_count() const { return status_.size(); }

private:
    VariableUniverse universe_;
    std::unordered_map<CiTriple, Status, TripleHash> status_;
};

// Set-valued enumeration is capped: the lattice has ~4^n / 2 triples.
inline constexpr int kSetValuedCap = 8;

struct TripleOptions {
    bool singleton_only = true;
    std::optional<int> max_cond;
    // construction-time bound for the set-valued mode
    int set_valued_cap = kSetValuedCap;
};

// All canonical triples over the universe. Singleton mode yields every pair
// {X},{Y} with each conditioning subset of the remaining nodes; set-valued
// mode additionally yields all disjoint set triples (used by the closure).
inline TripleSet all_triples(const VariableUniverse& u, const TripleOptions& opt = {}) {
    const int n = u.size();
    if (opt.max_cond && *opt.max_cond > n - 2)
        throw PreconditionError("max_cond exceeds |V|-2");
    TripleSet out;
    if (opt.singleton_only) {
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                VarSet rest = u.all() & ~(single(i) | single(j));
                for_each_subset(rest, [&](VarSet z) {
                    if (opt.max_cond && set_size(z) > *opt.max_cond) return;
                    out.push_back(CiTriple{single(i), single(j), z});
                });
            }
        }
    } else {
        if (n > opt.set_valued_cap)
            throw CapExceededError("set-valued triple enumeration capped at " +
                                   std::to_string(opt.set_valued_cap) + " variables");
        // Assign each node a role: X side, Y side, conditioning, or out.
        VarSet full = u.all();
        std::vector<VarSet> stack;
        // Iterative role assignment over 4^n combinations, kept canonical by
        // requiring x lex <= y at the end.
        std::function<void(int, VarSet, VarSet, VarSet)> rec = [&](int i, VarSet x, VarSet y,
                                                                   VarSet z) {
            if (i == n) {
                if (!x || !y) return;
                if (set_lex_less(y, x)) return;  // keep only canonical orientation
                if (opt.max_cond && set_size(z) > *opt.max_cond) return;
                out.push_back(CiTriple{x, y, z});
                return;
            }
            rec(i + 1, x | single(i), y, z);
            rec(i + 1, x, y | single(i), z);
            rec(i + 1, x, y, z | single(i));
            rec(i + 1, x, y, z);
        };
        rec(0, 0, 0, 0);
        (void)full;
    }
    sort_unique(out);
    return out;
}

// Singleton triples with exactly one conditioning node; the statement pool
// used by the spanning-tree distance decoder.
inline TripleSet single_conditioner_triples(const VariableUniverse& u) {
    TripleSet out;
    const int n = u.size();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (k != i && k != j) out.push_back(CiTriple{single(i), single(j), single(k)});
    sort_unique(out);
    return out;
}

// Number of triples in s on which the two models disagree; both models must
// be determined on every triple of s.
inline int markov_distance(const IndependenceModel& a, const IndependenceModel& b,
                           const TripleSet& s) {
    int d = 0;
    for (const auto& t : s) {
        Status sa = a.status(t);
        Status sb = b.status(t);
        if (sa == Status::Unknown || sb == Status::Unknown)
            throw UnknownStatusError("markov_distance: status unknown for " +
                                     to_string(t, a.universe()));
        if (sa != sb) ++d;
    }
    return d;
}

}  // namespace redci
