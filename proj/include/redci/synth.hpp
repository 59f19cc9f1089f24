#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "redci/graph.hpp"
#include "redci/rng.hpp"
#include "redci/stats.hpp"

namespace redci {

inline VariableUniverse default_universe(int n, const std::string& prefix = "X") {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i + 1));
    return VariableUniverse(names);
}

// Uniform random weight matrix, maximum-weight spanning tree by Kruskal.
inline UndirectedGraph random_spanning_tree(const VariableUniverse& u, Rng& rng) {
    const int n = u.size();
    if (n < 2) throw PreconditionError("spanning trees need at least two nodes");
    struct W {
        double w;
        int a, b;
    };
    std::vector<W> weights;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) weights.push_back({rng.uniform(), i, j});
    std::sort(weights.begin(), weights.end(), [](const W& l, const W& r) {
        if (l.w != r.w) return l.w > r.w;
        if (l.a != r.a) return l.a < r.a;
        return l.b < r.b;
    });
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    UndirectedGraph tree(u);
    int added = 0;
    for (const auto& w : weights) {
        int ra = find(w.a), rb = find(w.b);
        if (ra == rb) continue;
        parent[ra] = rb;
        tree.add_edge(w.a, w.b);
        if (++added == n - 1) break;
    }
    return tree;
}

// Uniform root, edges oriented away from it by depth-first traversal. The
// result has no colliders, hence is Markov-equivalent to the tree.
inline Dag orient_away_from_root(const UndirectedGraph& tree, Rng& rng) {
    const int n = tree.node_count();
    int root = static_cast<int>(rng.below(n));
    std::vector<Edge> edges;
    VarSet visited = single(root);
    std::vector<int> stack{root};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for_each_member(tree.adjacent(v) & ~visited, [&](int c) {
            edges.push_back(Edge{v, c});
            visited |= single(c);
            stack.push_back(c);
        });
    }
    return Dag(tree.universe(), edges);
}

inline Dag random_oriented_tree(const VariableUniverse& u, Rng& rng) {
    return orient_away_from_root(random_spanning_tree(u, rng), rng);
}

// Each forward edge (w.r.t. the universe order) independently with
// probability p.
inline Dag er_dag(const VariableUniverse& u, double p, Rng& rng) {
    if (p < 0.0 || p > 1.0) throw PreconditionError("edge probability outside [0,1]");
    std::vector<Edge> edges;
    for (int i = 0; i < u.size(); ++i)
        for (int j = i + 1; j < u.size(); ++j)
            if (rng.uniform() < p) edges.push_back(Edge{i, j});
    return Dag(u, edges);
}

// --- linear-Gaussian structural models ----------------------------------------

struct LinearGaussianScm {
    Dag dag;
    // coefficient of edge parent -> child, keyed by (parent, child)
    std::map<std::pair<int, int>, double> coeff;
};

// Coefficients uniform on (-1, -0.1] u [0.1, 1), unit noise variances.
inline LinearGaussianScm linear_gaussian(const Dag& dag, Rng& rng) {
    LinearGaussianScm scm;
    scm.dag = dag;
    for (const auto& e : dag.edges()) {
        double mag = 0.1 + 0.9 * rng.uniform();
        scm.coeff[{e.a, e.b}] = rng.coin() ? mag : -mag;
    }
    return scm;
}

inline Dataset sample(const LinearGaussianScm& scm, long m, Rng& rng) {
    const auto order = scm.dag.topological_order();
    const int n = scm.dag.node_count();
    Dataset d;
    d.columns = scm.dag.universe().names();
    d.kind = DataKind::Continuous;
    d.rows.assign(m, std::vector<double>(n, 0.0));
    for (long r = 0; r < m; ++r) {
        auto& row = d.rows[r];
        for (int v : order) {
            double val = rng.normal();
            for_each_member(scm.dag.parents(v), [&](int p) {
                val += scm.coeff.at({p, v}) * row[p];
            });
            row[v] = val;
        }
    }
    return d;
}

// Sigma = M M^T with M = (I - A)^{-1} computed by forward substitution along
// a topological order; A holds the edge coefficients.
inline Matrix exact_covariance(const LinearGaussianScm& scm) {
    const int n = scm.dag.node_count();
    Matrix m(n);  // m[v][k]: weight of noise_k in node v
    for (int v : scm.dag.topological_order()) {
        m.at(v, v) = 1.0;
        for_each_member(scm.dag.parents(v), [&](int p) {
            double c = scm.coeff.at({p, v});
            for (int k = 0; k < n; ++k) m.at(v, k) += c * m.at(p, k);
        });
    }
    Matrix cov(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += m.at(i, k) * m.at(j, k);
            cov.at(i, j) = s;
        }
    return cov;
}

// --- binary Bayes nets ---------------------------------------------------------

struct BinaryBayesNet {
    Dag dag;
    // p_one[v] maps a parent configuration (bits in parent index order) to
    // P(v = 1 | configuration)
    std::vector<std::vector<double>> p_one;
};

inline BinaryBayesNet make_binary_bn(const Dag& dag,
                                     const std::vector<std::vector<double>>& tables) {
    BinaryBayesNet bn;
    bn.dag = dag;
    bn.p_one = tables;
    if (static_cast<int>(tables.size()) != dag.node_count())
        throw TableShapeError("one table per node required");
    for (int v = 0; v < dag.node_count(); ++v) {
        std::size_t want = std::size_t{1} << set_size(dag.parents(v));
        if (tables[v].size() != want)
            throw TableShapeError("table size must be 2^(parent count) for " +
                                  dag.universe().name(v));
    }
    return bn;
}

// The four-node ground-truth net W -> X, W -> Y, X -> Z <- Y with the
// complement symmetries: P(X=1|W=1) = 1 - P(X=1|W=0) and so on, entries
// drawn uniformly from [0.3, 0.7). The root is a fair coin.
inline BinaryBayesNet binary_bn_wxyz(Rng& rng) {
    VariableUniverse u({"W", "X", "Y", "Z"});
    Dag dag(u, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
    double px = rng.uniform(0.3, 0.7);
    double py = rng.uniform(0.3, 0.7);
    double pz00 = rng.uniform(0.3, 0.7);
    double pz11 = rng.uniform(0.3, 0.7);
    std::vector<std::vector<double>> tables(4);
    tables[0] = {0.5};
    tables[1] = {px, 1.0 - px};        // parent W
    tables[2] = {py, 1.0 - py};        // parent W
    // parents of Z are (X, Y) with X the lower index bit
    tables[3] = {pz00, 1.0 - pz11, 1.0 - pz00, pz11};
    return make_binary_bn(dag, tables);
}

inline Dataset sample(const BinaryBayesNet& bn, long m, Rng& rng) {
    const auto order = bn.dag.topological_order();
    const int n = bn.dag.node_count();
    Dataset d;
    d.columns = bn.dag.universe().names();
    d.kind = DataKind::Discrete;
    d.rows.assign(m, std::vector<double>(n, 0.0));
    for (long r = 0; r < m; ++r) {
        auto& row = d.rows[r];
        for (int v : order) {
            std::size_t config = 0;
            int bit = 0;
            for_each_member(bn.dag.parents(v), [&](int p) {
                if (row[p] > 0.5) config |= std::size_t{1} << bit;
                ++bit;
            });
            row[v] = rng.coin(bn.p_one[v][config]) ? 1.0 : 0.0;
        }
    }
    return d;
}

// --- pairwise binary factor models ---------------------------------------------

struct PairwiseFactorModel {
    UndirectedGraph graph;
    // factor per edge (a < b): value(xa, xb) with phi01 = 1 - phi00 and
    // phi10 = 1 - phi11
    std::map<std::pair<int, int>, std::pair<double, double>> factors;  // (phi00, phi11)

    double factor(int a, int b, int xa, int xb) const {
        if (a > b) {
            std::swap(a, b);
            std::swap(xa, xb);
        }
        auto [f00, f11] = factors.at({a, b});
        if (xa == 0) return xb == 0 ? f00 : 1.0 - f00;
        return xb == 1 ? f11 : 1.0 - f11;
    }
};

// Diagonal factor entries uniform on [0.1, 0.3) with the complement rule.
inline PairwiseFactorModel pairwise_factor_model(const UndirectedGraph& g, Rng& rng) {
    PairwiseFactorModel m;
    m.graph = g;
    for (const auto& e : g.edges())
        m.factors[{e.a, e.b}] = {rng.uniform(0.1, 0.3), rng.uniform(0.1, 0.3)};
    return m;
}

struct GibbsOptions {
    long burn_in = 1000;  // sweeps discarded up front
    long thinning = 2;    // keep every k-th sweep
};

// Single-site Gibbs sampler over the binary factor model.
inline Dataset factor_gibbs_sample(const PairwiseFactorModel& model, long m, Rng& rng,
                                   const GibbsOptions& opts = {}) {
    const int n = model.graph.node_count();
    Dataset d;
    d.columns = model.graph.universe().names();
    d.kind = DataKind::Discrete;
    std::vector<int> state(n);
    for (int v = 0; v < n; ++v) state[v] = rng.coin() ? 1 : 0;
    auto sweep = [&]() {
        for (int v = 0; v < n; ++v) {
            double w1 = 1.0, w0 = 1.0;
            for_each_member(model.graph.adjacent(v), [&](int u) {
                w1 *= model.factor(v, u, 1, state[u]);
                w0 *= model.factor(v, u, 0, state[u]);
            });
            double p1 = (w0 + w1) > 0.0 ? w1 / (w0 + w1) : 0.5;
            state[v] = rng.coin(p1) ? 1 : 0;
        }
    };
    for (long i = 0; i < opts.burn_in; ++i) sweep();
    d.rows.reserve(m);
    while (static_cast<long>(d.rows.size()) < m) {
        for (long t = 0; t < opts.thinning; ++t) sweep();
        std::vector<double> row(n);
        for (int v = 0; v < n; ++v) row[v] = state[v];
        d.rows.push_back(std::move(row));
    }
    return d;
}

}  // namespace redci
