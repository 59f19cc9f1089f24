// Command-line front end: closure queries, redundancy classification,
// structure discovery, synthetic data generation, CI test streams, and the
// packaged experiments.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "redci/experiments.hpp"
#include "redci/io.hpp"

using namespace redci;

namespace {

json derivation_to_json(const std::vector<DerivationStep>& steps, const VariableUniverse& u) {
    json arr = json::array();
    for (const auto& st : steps) {
        json premises = json::array();
        for (const auto& p : st.premises) premises.push_back(to_json(p, u));
        arr.push_back(json{{"rule", rule_name(st.rule)},
                           {"conclusion", to_json(st.conclusion, u)},
                           {"premises", premises}});
    }
    return arr;
}

std::vector<CiStatement> load_statements(const std::string& path, VariableUniverse& u,
                                         bool have_universe) {
    std::string text = read_file(path);
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") {
        if (!have_universe) u = universe_from_statements_csv(text);
        return statements_from_csv(text, u);
    }
    json arr = json::parse(text);
    if (!have_universe) u = universe_from_statements_json(arr);
    std::vector<CiStatement> out;
    for (const auto& j : arr) out.push_back(statement_from_json(j, u));
    return out;
}

GraphClass parse_class(const std::string& s) {
    if (s == "dags") return GraphClass::Dags;
    if (s == "undirected") return GraphClass::UndirectedGraphs;
    if (s == "trees") return GraphClass::SpanningTrees;
    throw ParseError("unknown graph class: " + s);
}

std::unique_ptr<CiOracle> make_oracle(const std::string& oracle_spec, const std::string& data_path,
                                      const std::string& kind, double alpha) {
    if (!oracle_spec.empty()) {
        auto parts = split(oracle_spec, ',');
        AnyGraph g = graph_from_json(json::parse(read_file(parts[0])));
        TripleSet flips;
        if (parts.size() > 1) {
            const VariableUniverse& u = universe_of(g);
            for (const auto& j : json::parse(read_file(parts[1])))
                flips.push_back(triple_from_json(j, u));
        }
        return std::make_unique<GraphOracle>(std::move(g), std::move(flips));
    }
    if (!data_path.empty()) {
        DataKind dk = kind == "discrete" ? DataKind::Discrete : DataKind::Continuous;
        Dataset d = dataset_from_csv(read_file(data_path), dk);
        TestKind tk = dk == DataKind::Discrete ? TestKind::ChiSquare : TestKind::FisherZ;
        return std::make_unique<DataOracle>(std::move(d), tk, alpha);
    }
    throw ParseError("either --oracle or --data is required");
}

json graph_report(const AnyGraph& g) { return to_json(g); }

json pdag_to_json(const Pdag& p) {
    json directed = json::array(), undirected = json::array();
    for (const auto& e : p.directed)
        directed.push_back({p.universe.name(e.a), p.universe.name(e.b)});
    for (const auto& e : p.undirected)
        undirected.push_back({p.universe.name(e.a), p.universe.name(e.b)});
    return json{{"nodes", p.universe.names()},
                {"directed", directed},
                {"undirected", undirected}};
}

json conducted_to_json(const std::vector<CiStatement>& l, const VariableUniverse& u) {
    json arr = json::array();
    for (const auto& st : l) arr.push_back(to_json(st, u));
    return arr;
}

// --- experiment output -------------------------------------------------------------

struct CheckOutcome {
    bool enabled = false;
    bool passed = true;
    json details;

    void record(const std::string& name, bool ok) {
        details[name] = ok;
        passed = passed && ok;
    }
};

void write_experiment_files(const std::string& out_dir, const ExperimentConfig& cfg,
                            const std::string& csv_body, const json& summary) {
    std::filesystem::create_directories(out_dir);
    std::string header = "# " + cfg.describe() + ";hash=" +
                         std::to_string(content_hash(cfg.describe())) + "\n";
    write_file(out_dir + "/results.csv", header + csv_body);
    write_file(out_dir + "/summary.json", summary.dump(2) + "\n");
}

json config_json(const ExperimentConfig& cfg) {
    return json{{"id", cfg.id},
                {"trials", cfg.trials},
                {"repeats", cfg.repeats},
                {"n", cfg.n},
                {"samples", cfg.samples},
                {"samples_large", cfg.samples_large},
                {"alpha", cfg.alpha},
                {"edge_probability", cfg.edge_probability},
                {"seed", cfg.seed},
                {"use_intersection", cfg.use_intersection},
                {"hash", std::to_string(content_hash(cfg.describe()))}};
}

int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, bool check) {
    CheckOutcome outcome;
    outcome.enabled = check;
    std::string csv;
    json summary;
    summary["config"] = config_json(cfg);

    if (cfg.id == "graphoid-pvalues") {
        auto res = exp_graphoid_pvalues(cfg);
        csv += "implied,p\n";
        for (double p : res.implied_independent_p) csv += "indep," + format_double(p) + "\n";
        for (double p : res.implied_dependent_p) csv += "dep," + format_double(p) + "\n";
        long above = 0;
        for (double p : res.implied_independent_p)
            if (p > cfg.alpha) ++above;
        double frac_above = res.implied_independent_p.empty()
                                ? 0.0
                                : static_cast<double>(above) / res.implied_independent_p.size();
        summary["tests_conducted"] = res.tests_conducted;
        summary["implied_independent"] = res.implied_independent_p.size();
        summary["implied_dependent"] = res.implied_dependent_p.size();
        summary["independent_fraction_above_alpha"] = frac_above;
        if (check) outcome.record("implied_independent_mostly_accepted", frac_above >= 0.8);
    } else if (cfg.id == "two-datasets") {
        auto res = exp_two_datasets(cfg);
        csv += "cell,error_fraction\n";
        auto dump = [&](const char* cell, const std::vector<double>& v) {
            for (double d : v) csv += std::string(cell) + "," + format_double(d) + "\n";
        };
        dump("dag_on_bn", res.dag_model_on_bn_data);
        dump("ug_on_bn", res.ug_model_on_bn_data);
        dump("ug_on_factor", res.ug_model_on_factor_data);
        dump("dag_on_factor", res.dag_model_on_factor_data);
        summary["bn_data_p"] = res.bn_data_p;
        summary["factor_data_p"] = res.factor_data_p;
        summary["combined_p"] = res.combined_p;
        summary["bn_matched_mean"] = res.bn_matched_mean;
        summary["bn_mismatched_mean"] = res.bn_mismatched_mean;
        summary["factor_matched_mean"] = res.factor_matched_mean;
        summary["factor_mismatched_mean"] = res.factor_mismatched_mean;
        if (check) {
            outcome.record("matched_direction",
                           res.bn_matched_mean <= res.bn_mismatched_mean &&
                               res.factor_matched_mean <= res.factor_mismatched_mean);
            outcome.record("significant", res.combined_p < 0.01);
        }
    } else if (cfg.id == "graphoid-vs-graphical") {
        auto res = exp_graphoid_vs_graphical(cfg);
        csv += "regime,arm,error_fraction\n";
        auto dump = [&](const char* regime, const char* arm, const std::vector<double>& v) {
            for (double d : v)
                csv += std::string(regime) + "," + arm + "," + format_double(d) + "\n";
        };
        dump("small", "purely_graphical", res.small.purely_graphical_errors);
        dump("small", "coupled", res.small.coupled_errors);
        dump("large", "purely_graphical", res.large.purely_graphical_errors);
        dump("large", "coupled", res.large.coupled_errors);
        for (auto [name, arm] : {std::pair{"small", &res.small}, std::pair{"large", &res.large}}) {
            summary[name] = json{{"mann_whitney_p", arm->mann_whitney_p},
                                 {"purely_graphical_median", arm->purely_graphical_median},
                                 {"coupled_median", arm->coupled_median},
                                 {"recovery_rate", arm->recovery_rate}};
        }
        if (check) {
            outcome.record("small_sample_significant", res.small.mann_whitney_p < 0.05);
            double gap_small =
                std::fabs(res.small.purely_graphical_median - res.small.coupled_median);
            double gap_large =
                std::fabs(res.large.purely_graphical_median - res.large.coupled_median);
            outcome.record("large_gap_smaller", gap_large <= gap_small);
            outcome.record("large_recovery", res.large.recovery_rate >= 0.9);
        }
    } else if (cfg.id == "tree-correction") {
        auto res = exp_tree_correction(cfg);
        csv += "trial,mmd_shd,mmd_expected_shd,mmd_best_shd,tree_pc_shd,a1_shd,a2_shd,a3_shd\n";
        for (std::size_t i = 0; i < res.mmd_shd.size(); ++i) {
            csv += std::to_string(i) + "," + format_double(res.mmd_shd[i]) + "," +
                   format_double(res.mmd_expected_shd[i]) + "," +
                   format_double(res.mmd_best_shd[i]) + "," +
                   format_double(res.tree_pc_shd[i]) + "," + format_double(res.a1_shd[i]) + "," +
                   format_double(res.a2_shd[i]) + "," + format_double(res.a3_shd[i]) + "\n";
        }
        summary["mmd_median"] = median(res.mmd_shd);
        summary["tree_pc_median"] = median(res.tree_pc_shd);
        summary["mmd_mean"] = mean(res.mmd_shd);
        summary["mmd_best_mean"] = mean(res.mmd_best_shd);
        summary["tree_pc_mean"] = mean(res.tree_pc_shd);
        summary["mmd_vs_pc_p"] = res.mmd_vs_pc_p;
        summary["mmd_best_vs_pc_p"] = res.mmd_best_vs_pc_p;
        summary["a1_equals_a2"] = res.a1_shd == res.a2_shd;
        summary["a3_vs_a1_p"] = res.a3_vs_a1_p;
        summary["a1_mean"] = mean(res.a1_shd);
        summary["a3_mean"] = mean(res.a3_shd);
        if (check) {
            outcome.record("mmd_median_not_worse",
                           median(res.mmd_shd) <= median(res.tree_pc_shd));
            outcome.record("mmd_vs_pc_significant", res.mmd_vs_pc_p < 0.01);
            outcome.record("a1_equals_a2", res.a1_shd == res.a2_shd);
            outcome.record("a3_beats_a1",
                           res.a3_vs_a1_p < 0.05 && mean(res.a3_shd) <= mean(res.a1_shd));
        }
    } else if (cfg.id == "flip-injection") {
        auto res = exp_flip_injection(cfg);
        csv += "flips,recovery_rate,unique_recovery_rate\n";
        for (std::size_t i = 0; i < res.flip_counts.size(); ++i)
            csv += std::to_string(res.flip_counts[i]) + "," +
                   format_double(res.recovery_rate[i]) + "," +
                   format_double(res.unique_recovery_rate[i]) + "\n";
        summary["flip_counts"] = res.flip_counts;
        summary["recovery_rate"] = res.recovery_rate;
        summary["unique_recovery_rate"] = res.unique_recovery_rate;
        if (check) {
            int radius = (cfg.n - 1) / 2;
            bool ok = true;
            for (int k = 0; k <= radius; ++k) ok = ok && res.recovery_rate[k] == 1.0;
            outcome.record("recovery_up_to_radius", ok);
        }
    } else {
        std::cerr << "unknown experiment id: " << cfg.id << "\n";
        return 1;
    }

    if (check) summary["checks"] = outcome.details;
    write_experiment_files(out_dir, cfg, csv, summary);
    std::cout << summary.dump(2) << "\n";
    return (check && !outcome.passed) ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conditional-independence redundancy toolkit"};
    app.require_subcommand(1);

    // closure ----------------------------------------------------------------
    auto* closure_cmd = app.add_subcommand("closure", "fixed-point closure of a statement set");
    std::string cl_in, cl_query;
    bool cl_no_intersection = false;
    closure_cmd->add_option("--in", cl_in, "statements JSON file")->required();
    closure_cmd->add_flag("--no-intersection", cl_no_intersection,
                          "drop the intersection axiom");
    closure_cmd->add_option("--query", cl_query, "triple x;y;z to report");

    // classify ---------------------------------------------------------------
    auto* classify_cmd = app.add_subcommand("classify", "redundancy class of a statement");
    std::string cf_graph, cf_statements, cf_target, cf_class = "dags";
    bool cf_no_intersection = false;
    classify_cmd->add_option("--graph", cf_graph,
                             "graph JSON (optional, enables the path criterion)");
    classify_cmd->add_option("--statements", cf_statements, "statements JSON")->required();
    classify_cmd
        ->add_option("--target", cf_target, "triple x;y;z[;verdict], verdict defaults to dep")
        ->required();
    classify_cmd->add_option("--class", cf_class, "dags|undirected|trees");
    classify_cmd->add_flag("--no-intersection", cf_no_intersection, "drop the intersection axiom");

    // discover ----------------------------------------------------------------
    auto* discover_cmd = app.add_subcommand("discover", "run a discovery algorithm");
    std::string d_algo, d_oracle, d_data, d_kind = "continuous", d_order, d_out;
    double d_alpha = 0.01;
    discover_cmd->add_option("--algo", d_algo, "order|fullcond|sp|mmd-tree|mmd-dag|tree-pc|pc-lite")
        ->required();
    discover_cmd->add_option("--oracle", d_oracle, "graph.json[,flips.json]");
    discover_cmd->add_option("--data", d_data, "dataset CSV");
    discover_cmd->add_option("--kind", d_kind, "continuous|discrete");
    discover_cmd->add_option("--order", d_order, "comma-separated node order (for --algo order)");
    discover_cmd->add_option("--alpha", d_alpha, "test level");
    discover_cmd->add_option("--out", d_out, "report JSON path (stdout when omitted)");

    // synth ---------------------------------------------------------------------
    auto* synth_cmd = app.add_subcommand("synth", "generate ground truth and data");
    std::string s_kind = "tree", s_out;
    int s_n = 5;
    long s_samples = 1000;
    std::uint64_t s_seed = 7;
    double s_p = 0.3;
    synth_cmd->add_option("--kind", s_kind, "tree|er-dag|lingauss|binary-bn|factor");
    synth_cmd->add_option("--n", s_n, "node count");
    synth_cmd->add_option("--samples", s_samples, "sample count");
    synth_cmd->add_option("--seed", s_seed, "seed");
    synth_cmd->add_option("--p", s_p, "edge probability for er-dag");
    synth_cmd->add_option("--out", s_out, "data.csv,graph.json output pair")->required();

    // citest ----------------------------------------------------------------------
    auto* citest_cmd = app.add_subcommand("citest", "stream CI test results as JSON lines");
    std::string t_data, t_kind = "continuous";
    double t_alpha = 0.01;
    int t_max_cond = -1;
    citest_cmd->add_option("--data", t_data, "dataset CSV")->required();
    citest_cmd->add_option("--kind", t_kind, "continuous|discrete");
    citest_cmd->add_option("--alpha", t_alpha, "test level");
    citest_cmd->add_option("--max-cond", t_max_cond, "conditioning set cap");

    // experiment ---------------------------------------------------------------------
    auto* exp_cmd = app.add_subcommand("experiment", "run a packaged experiment");
    ExperimentConfig cfg;
    std::string e_out = "out";
    bool e_check = false;
    exp_cmd->add_option("id", cfg.id,
                        "graphoid-pvalues|two-datasets|graphoid-vs-graphical|"
                        "tree-correction|flip-injection")
        ->required();
    exp_cmd->add_option("--trials", cfg.trials, "trial count");
    exp_cmd->add_option("--repeats", cfg.repeats, "aggregation rounds");
    exp_cmd->add_option("--n", cfg.n, "node count");
    exp_cmd->add_option("--samples", cfg.samples, "rows per dataset");
    exp_cmd->add_option("--samples-large", cfg.samples_large, "rows for the large regime");
    exp_cmd->add_option("--alpha", cfg.alpha, "test level");
    exp_cmd->add_option("--p", cfg.edge_probability, "edge probability");
    exp_cmd->add_option("--seed", cfg.seed, "master seed");
    exp_cmd->add_option("--out", e_out, "output directory");
    exp_cmd->add_flag("--check", e_check, "evaluate acceptance thresholds, exit 2 on failure");

    CLI11_PARSE(app, argc, argv);

    try {
        if (closure_cmd->parsed()) {
            VariableUniverse u;
            auto statements = load_statements(cl_in, u, false);
            ClosureOptions opts;
            opts.use_intersection = !cl_no_intersection;
            auto res = closure(u, statements, opts);
            json out;
            out["consistent"] = res.consistent();
            if (!res.consistent()) {
                out["contradiction"] = to_json(*res.contradiction, u);
                out["first_derivation"] =
                    derivation_to_json(res.derivation(*res.contradiction), u);
                if (res.conflict)
                    out["second_derivation"] = derivation_to_json({*res.conflict}, u);
            }
            if (!cl_query.empty()) {
                CiTriple t = parse_triple(cl_query, u);
                Status st = res.status(t);
                out["query"] = to_json(t, u);
                out["status"] = st == Status::Independent ? "indep"
                                : st == Status::Dependent ? "dep"
                                                          : "unknown";
                if (st != Status::Unknown) out["trace"] = derivation_to_json(res.derivation(t), u);
            } else {
                out["determined"] = conducted_to_json(res.model.statements(), u);
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (classify_cmd->parsed()) {
            std::optional<AnyGraph> g;
            VariableUniverse u;
            bool have_universe = false;
            if (!cf_graph.empty()) {
                g = graph_from_json(json::parse(read_file(cf_graph)));
                u = universe_of(*g);
                have_universe = true;
            }
            auto statements = load_statements(cf_statements, u, have_universe);
            auto parts = split(cf_target, ';');
            Verdict v = parts.size() >= 4 && !parts[3].empty() ? verdict_from_string(parts[3])
                                                               : Verdict::Dependent;
            CiStatement target{parse_triple(cf_target, u), v};
            ClosureOptions opts;
            opts.use_intersection = !cf_no_intersection;
            auto res = classify(u, statements, target, parse_class(cf_class), g, opts);
            json out;
            out["target"] = to_json(target, u);
            out["class"] = to_string(res.value);
            out["graphoid"] = res.graphoid == GraphoidRedundancy::Matching        ? "matching"
                              : res.graphoid == GraphoidRedundancy::Contradicting ? "contradicting"
                                                                                  : "undetermined";
            if (res.criterion) out["criterion"] = *res.criterion;
            if (res.graphical)
                out["enumeration"] = *res.graphical == GraphicalRedundancy::Redundant
                                         ? "redundant"
                                     : *res.graphical == GraphicalRedundancy::NotRedundant
                                         ? "not-redundant"
                                         : "vacuous";
            if (!res.derivation.empty()) out["derivation"] = derivation_to_json(res.derivation, u);
            if (res.counterexample) out["counterexample"] = graph_report(*res.counterexample);
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (discover_cmd->parsed()) {
            auto oracle = make_oracle(d_oracle, d_data, d_kind, d_alpha);
            const VariableUniverse& u = oracle->universe();
            json out;
            if (d_algo == "order") {
                std::vector<int> order;
                if (d_order.empty()) {
                    for (int i = 0; i < u.size(); ++i) order.push_back(i);
                } else {
                    for (const auto& name : split(d_order, ',')) order.push_back(u.index(name));
                }
                auto res = dag_from_order(*oracle, order);
                out["graph"] = graph_report(AnyGraph{res.dag});
                out["conducted"] = conducted_to_json(res.conducted, u);
            } else if (d_algo == "fullcond") {
                auto res = undirected_full_conditional(*oracle);
                out["graph"] = graph_report(AnyGraph{res.graph});
                out["conducted"] = conducted_to_json(res.conducted, u);
            } else if (d_algo == "sp") {
                auto res = sp(*oracle);
                json graphs = json::array();
                for (const auto& g : res.sparsest) graphs.push_back(graph_report(AnyGraph{g}));
                out["sparsest"] = graphs;
                out["min_edges"] = res.min_edges;
                out["equivalence_classes"] = res.equivalence_classes;
                out["per_permutation_edges"] = res.per_permutation_edges;
            } else if (d_algo == "mmd-tree") {
                auto model = empirical_model(*oracle, single_conditioner_triples(u));
                auto res = mmd_tree(model);
                json mins = json::array();
                for (const auto& t : res.minimizers) mins.push_back(graph_report(AnyGraph{t}));
                out["minimizers"] = mins;
                out["representative"] = graph_report(AnyGraph{res.representative});
                out["distance"] = res.distance;
                out["tie"] = res.tie;
            } else if (d_algo == "mmd-dag") {
                auto model = empirical_model(*oracle, all_triples(u));
                auto res = mmd_dag(model);
                json reps = json::array();
                for (const auto& g : res.representatives)
                    reps.push_back(graph_report(AnyGraph{g}));
                out["representatives"] = reps;
                out["distance"] = res.distance;
                out["minimizer_count"] = res.minimizer_count;
            } else if (d_algo == "tree-pc") {
                auto res = tree_pc(*oracle);
                out["graph"] = graph_report(AnyGraph{res.graph});
                out["conducted"] = conducted_to_json(res.conducted, u);
                out["tie"] = res.tie;
            } else if (d_algo == "pc-lite") {
                auto res = pc_lite(*oracle);
                out["graph"] = pdag_to_json(res.graph);
                out["conducted"] = conducted_to_json(res.conducted, u);
                out["non_markovian"] = res.non_markovian;
                out["fully_directed"] = res.fully_directed;
            } else {
                std::cerr << "unknown algorithm: " << d_algo << "\n";
                return 1;
            }
            if (d_out.empty())
                std::cout << out.dump(2) << "\n";
            else
                write_file(d_out, out.dump(2) + "\n");
            return 0;
        }
        if (synth_cmd->parsed()) {
            auto outs = split(s_out, ',');
            if (outs.size() != 2) throw ParseError("--out needs data.csv,graph.json");
            Rng rng(s_seed);
            auto u = default_universe(s_n);
            Dataset data;
            AnyGraph graph{UndirectedGraph(u)};
            if (s_kind == "tree") {
                auto tree = random_spanning_tree(u, rng);
                auto dag = orient_away_from_root(tree, rng);
                auto scm = linear_gaussian(dag, rng);
                data = sample(scm, s_samples, rng);
                graph = AnyGraph{dag};
            } else if (s_kind == "er-dag" || s_kind == "lingauss") {
                auto dag = er_dag(u, s_p, rng);
                auto scm = linear_gaussian(dag, rng);
                data = sample(scm, s_samples, rng);
                graph = AnyGraph{dag};
            } else if (s_kind == "binary-bn") {
                auto bn = binary_bn_wxyz(rng);
                data = sample(bn, s_samples, rng);
                graph = AnyGraph{bn.dag};
            } else if (s_kind == "factor") {
                // pairwise binary factors on a random connected skeleton
                UndirectedGraph skeleton = random_spanning_tree(u, rng);
                auto model = pairwise_factor_model(skeleton, rng);
                data = factor_gibbs_sample(model, s_samples, rng);
                graph = AnyGraph{skeleton};
            } else {
                throw ParseError("unknown synth kind: " + s_kind);
            }
            write_file(outs[0], dataset_to_csv(data));
            write_file(outs[1], to_json(graph).dump(2) + "\n");
            return 0;
        }
        if (citest_cmd->parsed()) {
            DataKind dk = t_kind == "discrete" ? DataKind::Discrete : DataKind::Continuous;
            Dataset d = dataset_from_csv(read_file(t_data), dk);
            VariableUniverse u = d.universe();
            TripleOptions opt;
            if (t_max_cond >= 0) opt.max_cond = t_max_cond;
            Matrix cov;
            if (dk == DataKind::Continuous) cov = sample_covariance(d);
            for (const auto& t : all_triples(u, opt)) {
                TestResult r = dk == DataKind::Continuous
                                   ? fisher_z(cov, d.sample_count(), lowest_bit(t.x),
                                              lowest_bit(t.y), t.z, t_alpha)
                                   : chi_square(d, lowest_bit(t.x), lowest_bit(t.y), t.z,
                                                t_alpha);
                std::cout << to_json(r, u).dump() << "\n";
            }
            return 0;
        }
        if (exp_cmd->parsed()) return run_experiment(cfg, e_out, e_check);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "json error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
