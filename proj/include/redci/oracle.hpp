#pragma once

#include <memory>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "redci/graph.hpp"
#include "redci/stats.hpp"

namespace redci {

struct QueryRecord {
    CiTriple triple;
    Verdict verdict;
    std::optional<double> p_value;
};

// Verdict source for triples. Every query is appended to the log, which makes
// an oracle single-consumer; the underlying data is immutable.
class CiOracle {
public:
    virtual ~CiOracle() = default;

    CiStatement query(const CiTriple& t) {
        CiTriple c = canonicalize(t, universe());
        auto [v, p] = evaluate(c);
        log_.push_back(QueryRecord{c, v, p});
        return CiStatement{c, v};
    }

    const std::vector<QueryRecord>& log() const { return log_; }
    virtual const VariableUniverse& universe() const = 0;

protected:
    virtual std::pair<Verdict, std::optional<double>> evaluate(const CiTriple& t) = 0;

private:
    std::vector<QueryRecord> log_;
};

// Graph-backed oracle with an optional set of flipped triples: the verdict is
// the graph's separation verdict, inverted on the listed triples.
class GraphOracle : public CiOracle {
public:
    explicit GraphOracle(AnyGraph g, TripleSet flips = {}) : g_(std::move(g)) {
        for (const auto& t : flips) flips_.insert(canonicalize(t, universe_of(g_)));
    }

    const VariableUniverse& universe() const override { return universe_of(g_); }
    const AnyGraph& graph() const { return g_; }

protected:
    std::pair<Verdict, std::optional<double>> evaluate(const CiTriple& t) override {
        bool indep = separated(g_, t.x, t.y, t.z);
        if (flips_.count(t)) indep = !indep;
        return {indep ? Verdict::Independent : Verdict::Dependent, std::nullopt};
    }

private:
    AnyGraph g_;
    std::set<CiTriple> flips_;
};

namespace detail {

inline void require_singleton_pair(const CiTriple& t) {
    if (set_size(t.x) != 1 || set_size(t.y) != 1)
        throw PreconditionError("statistical oracles answer singleton-pair triples only");
}

}  // namespace detail

// Exact-correlation oracle: Fisher z on analytic partial correlations with a
// pseudo sample count.
class CovarianceOracle : public CiOracle {
public:
    CovarianceOracle(VariableUniverse u, Matrix cov, long n, double alpha)
        : u_(std::move(u)), cov_(std::move(cov)), n_(n), alpha_(alpha) {}

    const VariableUniverse& universe() const override { return u_; }

protected:
    std::pair<Verdict, std::optional<double>> evaluate(const CiTriple& t) override {
        detail::require_singleton_pair(t);
        auto r = fisher_z(cov_, n_, lowest_bit(t.x), lowest_bit(t.y), t.z, alpha_);
        return {r.verdict, r.p_value};
    }

private:
    VariableUniverse u_;
    Matrix cov_;
    long n_;
    double alpha_;
};

enum class TestKind { FisherZ, ChiSquare };

class DataOracle : public CiOracle {
public:
    DataOracle(Dataset d, TestKind kind, double alpha)
        : d_(std::move(d)), u_(d_.universe()), kind_(kind), alpha_(alpha) {
        if (kind_ == TestKind::FisherZ) cov_ = sample_covariance(d_);
    }

    const VariableUniverse& universe() const override { return u_; }
    double alpha() const { return alpha_; }

protected:
    std::pair<Verdict, std::optional<double>> evaluate(const CiTriple& t) override {
        detail::require_singleton_pair(t);
        TestResult r = kind_ == TestKind::FisherZ
                           ? fisher_z(cov_, d_.sample_count(), lowest_bit(t.x),
                                      lowest_bit(t.y), t.z, alpha_)
                           : chi_square(d_, lowest_bit(t.x), lowest_bit(t.y), t.z, alpha_);
        return {r.verdict, r.p_value};
    }

private:
    Dataset d_;
    VariableUniverse u_;
    TestKind kind_;
    double alpha_;
    Matrix cov_;
};

// Queries every triple of s and assembles the three-valued map; no Unknowns.
inline IndependenceModel empirical_model(CiOracle& oracle, const TripleSet& s) {
    IndependenceModel m(oracle.universe());
    for (const auto& t : s) m.set(oracle.query(t));
    return m;
}

}  // namespace redci
