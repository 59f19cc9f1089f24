#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "redci/discovery.hpp"
#include "redci/redundancy.hpp"
#include "redci/synth.hpp"

namespace redci {

struct ExperimentConfig {
    std::string id;
    int trials = 200;
    int repeats = 16;        // aggregation rounds where the protocol uses them
    int n = 5;               // nodes
    long samples = 300;      // dataset rows per trial
    long samples_large = 2000;
    double alpha = 0.01;
    double edge_probability = 0.3;
    std::uint64_t seed = 7;
    bool use_intersection = true;

    std::string describe() const {
        std::string s;
        s += "id=" + id;
        s += ";trials=" + std::to_string(trials);
        s += ";repeats=" + std::to_string(repeats);
        s += ";n=" + std::to_string(n);
        s += ";samples=" + std::to_string(samples);
        s += ";samples_large=" + std::to_string(samples_large);
        s += ";alpha=" + std::to_string(alpha);
        s += ";p=" + std::to_string(edge_probability);
        s += ";seed=" + std::to_string(seed);
        s += ";intersection=" + std::to_string(use_intersection ? 1 : 0);
        return s;
    }
};

// FNV-1a over the canonical config text; echoed into every result header so
// outputs are traceable to their exact inputs.
inline std::uint64_t content_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// --- axiom-implied p-values -----------------------------------------------------

struct GraphoidPvaluesResult {
    std::vector<double> implied_independent_p;
    std::vector<double> implied_dependent_p;
    long tests_conducted = 0;
};

// Gaussian data over a random DAG; before each test the closure of the
// previous verdicts is consulted, and when it already determines the triple
// the test's p-value is recorded under the implied verdict.
inline GraphoidPvaluesResult exp_graphoid_pvalues(const ExperimentConfig& cfg) {
    GraphoidPvaluesResult res;
    Rng master(cfg.seed);
    auto u = default_universe(4);
    auto ts = all_triples(u);
    ClosureOptions copts;
    copts.use_intersection = cfg.use_intersection;
    for (int rep = 0; rep < cfg.repeats; ++rep) {
        Rng rng = master.child(rep);
        Dag g = er_dag(u, 0.5, rng);
        auto scm = linear_gaussian(g, rng);
        auto data = sample(scm, cfg.samples, rng);
        Matrix cov = sample_covariance(data);

        TripleSet order = ts;
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.below(i)]);

        std::vector<CiStatement> conducted;
        for (const auto& t : order) {
            auto cl = closure(u, conducted, copts);
            Status implied = cl.consistent() ? cl.status(t) : Status::Unknown;
            TestResult r = fisher_z(cov, data.sample_count(), lowest_bit(t.x), lowest_bit(t.y),
                                    t.z, cfg.alpha);
            ++res.tests_conducted;
            if (implied == Status::Independent) res.implied_independent_p.push_back(r.p_value);
            if (implied == Status::Dependent) res.implied_dependent_p.push_back(r.p_value);
            conducted.push_back(CiStatement{t, r.verdict});
        }
    }
    return res;
}

// --- model evaluation on matched and mismatched data -----------------------------

struct TwoDatasetsResult {
    // disagreement fraction of the certified tests, one entry per usable trial
    std::vector<double> dag_model_on_bn_data;      // matched
    std::vector<double> dag_model_on_factor_data;  // mismatched
    std::vector<double> ug_model_on_factor_data;   // matched
    std::vector<double> ug_model_on_bn_data;       // mismatched
    // matched-vs-mismatched comparison per dataset kind, as in the protocol
    double bn_data_p = 1.0;
    double factor_data_p = 1.0;
    // Bonferroni-combined minimum of the two per-dataset tests
    double combined_p = 1.0;
    double bn_matched_mean = 0.0;
    double bn_mismatched_mean = 0.0;
    double factor_matched_mean = 0.0;
    double factor_mismatched_mean = 0.0;
};

inline double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double d : v) s += d;
    return s / static_cast<double>(v.size());
}

namespace detail {

// Runs the certified-candidate loop: emits purely graphical dependences, tests
// them against the oracle, feeds the verdicts back, and returns the fraction
// of disagreements (an observed independence contradicts the implied
// dependence). Nullopt when no candidate was certified.
inline std::optional<double> certified_error_fraction(AnyGraph learned,
                                                      std::vector<CiStatement> conducted,
                                                      CiOracle& oracle) {
    IteratedCandidateStream stream(std::move(learned), std::move(conducted),
                                   all_triples(oracle.universe()));
    long tested = 0, wrong = 0;
    while (auto cand = stream.next()) {
        CiStatement observed = oracle.query(cand->triple);
        ++tested;
        if (observed.verdict == Verdict::Independent) ++wrong;
        stream.report(observed.verdict);
    }
    if (tested == 0) return std::nullopt;
    return static_cast<double>(wrong) / static_cast<double>(tested);
}

}  // namespace detail

// Two synthetic datasets over the same skeleton (one directed, one undirected
// generator), both model kinds learned on each, certified tests checked
// empirically.
inline TwoDatasetsResult exp_two_datasets(const ExperimentConfig& cfg) {
    TwoDatasetsResult res;
    Rng master(cfg.seed);
    for (int trial = 0; trial < cfg.trials; ++trial) {
        Rng rng = master.child(trial);
        auto bn = binary_bn_wxyz(rng);
        Dataset bn_data = sample(bn, cfg.samples, rng);

        VariableUniverse u = bn.dag.universe();
        UndirectedGraph skeleton = bn.dag.skeleton();
        auto factor = pairwise_factor_model(skeleton, rng);
        Dataset factor_data = factor_gibbs_sample(factor, cfg.samples, rng);

        std::vector<int> order = bn.dag.topological_order();
        for (int which = 0; which < 2; ++which) {
            const Dataset& data = which == 0 ? bn_data : factor_data;
            // ordering-based DAG
            {
                DataOracle oracle(data, TestKind::ChiSquare, cfg.alpha);
                auto learned = dag_from_order(oracle, order);
                auto frac = detail::certified_error_fraction(AnyGraph{learned.dag},
                                                             learned.conducted, oracle);
                if (frac) {
                    if (which == 0)
                        res.dag_model_on_bn_data.push_back(*frac);
                    else
                        res.dag_model_on_factor_data.push_back(*frac);
                }
            }
            // full-conditional undirected model
            {
                DataOracle oracle(data, TestKind::ChiSquare, cfg.alpha);
                auto learned = undirected_full_conditional(oracle);
                auto frac = detail::certified_error_fraction(AnyGraph{learned.graph},
                                                             learned.conducted, oracle);
                if (frac) {
                    if (which == 0)
                        res.ug_model_on_bn_data.push_back(*frac);
                    else
                        res.ug_model_on_factor_data.push_back(*frac);
                }
            }
        }
    }
    if (!res.dag_model_on_bn_data.empty() && !res.ug_model_on_bn_data.empty())
        res.bn_data_p = mann_whitney_u(res.dag_model_on_bn_data, res.ug_model_on_bn_data);
    if (!res.ug_model_on_factor_data.empty() && !res.dag_model_on_factor_data.empty())
        res.factor_data_p =
            mann_whitney_u(res.ug_model_on_factor_data, res.dag_model_on_factor_data);
    res.combined_p = std::min(1.0, 2.0 * std::min(res.bn_data_p, res.factor_data_p));
    res.bn_matched_mean = mean(res.dag_model_on_bn_data);
    res.bn_mismatched_mean = mean(res.ug_model_on_bn_data);
    res.factor_matched_mean = mean(res.ug_model_on_factor_data);
    res.factor_mismatched_mean = mean(res.dag_model_on_factor_data);
    return res;
}

// --- purely graphical vs coupling-implied tests -----------------------------------

struct RedundancyArmsResult {
    std::vector<double> purely_graphical_errors;
    std::vector<double> coupled_errors;
    double mann_whitney_p = 1.0;
    double purely_graphical_median = 0.0;
    double coupled_median = 0.0;
    double recovery_rate = 0.0;  // learned graph equals the ground truth
};

struct GraphoidVsGraphicalResult {
    RedundancyArmsResult small;  // cfg.samples rows
    RedundancyArmsResult large;  // cfg.samples_large rows
};

namespace detail {

inline RedundancyArmsResult redundancy_arms(const ExperimentConfig& cfg, long sample_count,
                                            std::uint64_t salt) {
    RedundancyArmsResult res;
    Rng master(cfg.seed ^ salt);
    auto u = default_universe(cfg.n);
    auto pool = all_triples(u);
    long recovered = 0;
    for (int trial = 0; trial < cfg.trials; ++trial) {
        Rng rng = master.child(trial);
        Dag truth = er_dag(u, cfg.edge_probability, rng);
        auto scm = linear_gaussian(truth, rng);
        Dataset data = sample(scm, sample_count, rng);
        DataOracle oracle(data, TestKind::FisherZ, cfg.alpha);
        auto learned = dag_from_order(oracle, truth.topological_order());
        if (learned.dag == truth) ++recovered;

        // certified purely graphical candidates, tested sequentially
        auto pg = certified_error_fraction(AnyGraph{learned.dag}, learned.conducted, oracle);
        if (pg) res.purely_graphical_errors.push_back(*pg);

        // coupling-implied dependences outside the conducted list
        long tested = 0, wrong = 0;
        for (const auto& st : graphoid_redundant_dependences(learned.dag, pool)) {
            bool conducted = false;
            for (const auto& li : learned.conducted) conducted |= li.triple == st.triple;
            if (conducted) continue;
            ++tested;
            if (oracle.query(st.triple).verdict == Verdict::Independent) ++wrong;
        }
        if (tested > 0)
            res.coupled_errors.push_back(static_cast<double>(wrong) /
                                         static_cast<double>(tested));
    }
    if (!res.purely_graphical_errors.empty() && !res.coupled_errors.empty())
        res.mann_whitney_p = mann_whitney_u(res.purely_graphical_errors, res.coupled_errors);
    res.purely_graphical_median = median(res.purely_graphical_errors);
    res.coupled_median = median(res.coupled_errors);
    res.recovery_rate = static_cast<double>(recovered) / cfg.trials;
    return res;
}

}  // namespace detail

inline GraphoidVsGraphicalResult exp_graphoid_vs_graphical(const ExperimentConfig& cfg) {
    GraphoidVsGraphicalResult res;
    res.small = detail::redundancy_arms(cfg, cfg.samples, 0x5bd1e995u);
    res.large = detail::redundancy_arms(cfg, cfg.samples_large, 0xc2b2ae35u);
    return res;
}

// --- tree decoding against the simplified recovery --------------------------------

struct TreeCorrectionResult {
    // SHD of the decoder's deterministic representative per trial, plus two
    // alternative readings of tied minimizer sets
    std::vector<double> mmd_shd;           // representative tree
    std::vector<double> mmd_expected_shd;  // uniform pick among the minimizers
    std::vector<double> mmd_best_shd;      // closest minimizer to the truth
    std::vector<double> tree_pc_shd;
    std::vector<double> a1_shd;  // decoder restricted to the recovery tests
    std::vector<double> a2_shd;  // plus the intersection-derived marginals
    std::vector<double> a3_shd;  // the full single-conditioner pool
    double mmd_vs_pc_p = 1.0;
    double mmd_best_vs_pc_p = 1.0;
    double a3_vs_a1_p = 1.0;
};

inline TreeCorrectionResult exp_tree_correction(const ExperimentConfig& cfg) {
    TreeCorrectionResult res;
    Rng master(cfg.seed);
    auto u = default_universe(cfg.n);
    auto pool = single_conditioner_triples(u);
    for (int trial = 0; trial < cfg.trials; ++trial) {
        Rng rng = master.child(trial);
        UndirectedGraph truth = random_spanning_tree(u, rng);
        Dag oriented = orient_away_from_root(truth, rng);
        auto scm = linear_gaussian(oriented, rng);
        Dataset data = sample(scm, 1000, rng);

        // full pool decoder
        DataOracle mmd_oracle(data, TestKind::FisherZ, cfg.alpha);
        auto model = empirical_model(mmd_oracle, pool);
        auto decoded = mmd_tree(model);
        res.mmd_shd.push_back(structural_hamming_distance(decoded.representative, truth));
        res.a3_shd.push_back(res.mmd_shd.back());
        double expected = 0.0;
        int best = truth.node_count() * truth.node_count();
        for (const auto& t : decoded.minimizers) {
            int shd = structural_hamming_distance(t, truth);
            expected += shd;
            best = std::min(best, shd);
        }
        res.mmd_expected_shd.push_back(expected / decoded.minimizers.size());
        res.mmd_best_shd.push_back(best);

        // simplified recovery on the same data
        DataOracle pc_oracle(data, TestKind::FisherZ, cfg.alpha);
        auto pc = tree_pc(pc_oracle);
        res.tree_pc_shd.push_back(structural_hamming_distance(pc.graph, truth));

        // restricted decoders: the recovery's conducted tests, the premises
        // of every intersection pair, and optionally the derived marginals
        std::vector<CiStatement> base;
        auto add_unique = [&](const CiStatement& st) {
            for (const auto& b : base)
                if (b.triple == st.triple) return;
            base.push_back(st);
        };
        for (const auto& st : pc.conducted) add_unique(st);

        std::vector<CiStatement> derived_marginals;
        auto add_marginal = [&](int a, int b) {
            CiStatement st = indep(single(a), single(b));
            for (const auto& d : derived_marginals)
                if (d.triple == st.triple) return;
            derived_marginals.push_back(st);
        };
        for (const auto& t : pool) {
            // pattern I(x,y|{w}) with partner I(x,w|{y})
            Status s1 = model.status(t);
            if (s1 != Status::Independent) continue;
            int x = lowest_bit(t.x), y = lowest_bit(t.y), w = lowest_bit(t.z);
            CiTriple partner = canonicalize(single(x), single(w), single(y));
            if (model.status(partner) != Status::Independent) continue;
            // both premises join W, the implied marginals join U
            add_unique(CiStatement{t, Verdict::Independent});
            add_unique(CiStatement{partner, Verdict::Independent});
            add_marginal(x, y);
            add_marginal(x, w);
        }

        auto a1 = mmd_tree(u, base);
        res.a1_shd.push_back(structural_hamming_distance(a1.representative, truth));
        std::vector<CiStatement> with_marginals = base;
        with_marginals.insert(with_marginals.end(), derived_marginals.begin(),
                              derived_marginals.end());
        auto a2 = mmd_tree(u, with_marginals);
        res.a2_shd.push_back(structural_hamming_distance(a2.representative, truth));
    }
    res.mmd_vs_pc_p = mann_whitney_u(res.mmd_shd, res.tree_pc_shd);
    res.mmd_best_vs_pc_p = mann_whitney_u(res.mmd_best_shd, res.tree_pc_shd);
    res.a3_vs_a1_p = mann_whitney_u(res.a3_shd, res.a1_shd);
    return res;
}

// --- exact flip sweeps --------------------------------------------------------------

struct FlipInjectionResult {
    std::vector<int> flip_counts;
    std::vector<double> recovery_rate;         // truth among the minimizers
    std::vector<double> unique_recovery_rate;  // truth is the single minimizer
};

inline FlipInjectionResult exp_flip_injection(const ExperimentConfig& cfg) {
    FlipInjectionResult res;
    Rng master(cfg.seed);
    auto u = default_universe(cfg.n);
    auto pool = single_conditioner_triples(u);
    for (int k = 0; k < cfg.n; ++k) {
        long member = 0, unique = 0;
        for (int trial = 0; trial < cfg.trials; ++trial) {
            Rng rng = master.child(static_cast<std::uint64_t>(k) * cfg.trials + trial);
            UndirectedGraph truth = random_spanning_tree(u, rng);
            // uniform flip set of the requested size
            TripleSet flips;
            std::vector<std::size_t> idx(pool.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            for (int f = 0; f < k; ++f) {
                std::size_t pick = f + rng.below(idx.size() - f);
                std::swap(idx[f], idx[pick]);
                flips.push_back(pool[idx[f]]);
            }
            GraphOracle oracle(AnyGraph{truth}, flips);
            auto model = empirical_model(oracle, pool);
            auto decoded = mmd_tree(model);
            bool truth_among = false;
            for (const auto& t : decoded.minimizers) truth_among |= t == truth;
            if (truth_among) ++member;
            if (truth_among && !decoded.tie) ++unique;
        }
        res.flip_counts.push_back(k);
        res.recovery_rate.push_back(static_cast<double>(member) / cfg.trials);
        res.unique_recovery_rate.push_back(static_cast<double>(unique) / cfg.trials);
    }
    return res;
}

}  // namespace redci
