#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "redci/error.hpp"
#include "redci/model.hpp"

namespace redci {

// --- special functions -------------------------------------------------------

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double two_sided_normal_p(double stat) {
    double p = 2.0 * (1.0 - normal_cdf(std::fabs(stat)));
    return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

namespace detail {

// Regularized lower incomplete gamma P(a, x): series for x < a+1,
// continued fraction (modified Lentz) otherwise.
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw Error("gamma_p domain");
    if (x == 0.0) return 0.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    double q = std::exp(-x + a * std::log(x) - gln) * h;
    return 1.0 - q;
}

}  // namespace detail

// Survival function of the chi-square distribution with k degrees of freedom.
inline double chi_square_sf(double x, double k) {
    if (x <= 0.0) return 1.0;
    return 1.0 - detail::gamma_p(k / 2.0, x / 2.0);
}

// --- small dense matrices ----------------------------------------------------

// Row-major square matrix, just large enough for covariance work.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}

    int size() const { return n_; }
    double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    static Matrix identity(int n) {
        Matrix m(n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }

    // Gauss-Jordan with partial pivoting.
    Matrix inverse() const {
        const int n = n_;
        Matrix a = *this;
        Matrix inv = identity(n);
        for (int col = 0; col < n; ++col) {
            int pivot = col;
            for (int r = col + 1; r < n; ++r)
                if (std::fabs(a.at(r, col)) > std::fabs(a.at(pivot, col))) pivot = r;
            if (std::fabs(a.at(pivot, col)) < 1e-12)
                throw SingularityError("matrix is numerically singular");
            if (pivot != col) {
                for (int j = 0; j < n; ++j) {
                    std::swap(a.at(pivot, j), a.at(col, j));
                    std::swap(inv.at(pivot, j), inv.at(col, j));
                }
            }
            double d = a.at(col, col);
            for (int j = 0; j < n; ++j) {
                a.at(col, j) /= d;
                inv.at(col, j) /= d;
            }
            for (int r = 0; r < n; ++r) {
                if (r == col) continue;
                double f = a.at(r, col);
                if (f == 0.0) continue;
                for (int j = 0; j < n; ++j) {
                    a.at(r, j) -= f * a.at(col, j);
                    inv.at(r, j) -= f * inv.at(col, j);
                }
            }
        }
        return inv;
    }

private:
    int n_ = 0;
    std::vector<double> a_;
};

// --- partial correlations ----------------------------------------------------

// Precision-matrix route: invert the covariance restricted to {x, y} u z.
inline double partial_correlation(const Matrix& cov, int x, int y, VarSet z) {
    if (x == y) throw OverlapError("partial correlation needs distinct variables");
    if (contains(z, x) || contains(z, y))
        throw OverlapError("conditioning set must exclude the pair");
    std::vector<int> idx{x, y};
    for_each_member(z, [&](int v) { idx.push_back(v); });
    const int m = static_cast<int>(idx.size());
    Matrix sub(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) sub.at(i, j) = cov.at(idx[i], idx[j]);
    Matrix prec = sub.inverse();
    double den = prec.at(0, 0) * prec.at(1, 1);
    if (den <= 0.0) throw SingularityError("ill-conditioned covariance");
    return -prec.at(0, 1) / std::sqrt(den);
}

// Recursive route, one conditioning variable removed at a time. Kept as an
// independent second path for the property suite.
inline double partial_correlation_recursive(const Matrix& cov, int x, int y, VarSet z) {
    if (x == y) throw OverlapError("partial correlation needs distinct variables");
    std::map<std::uint64_t, double> memo;
    std::function<double(int, int, VarSet)> rec = [&](int i, int j, VarSet zz) -> double {
        if (i > j) std::swap(i, j);
        std::uint64_t key = (static_cast<std::uint64_t>(i) << 56) |
                            (static_cast<std::uint64_t>(j) << 48) | zz;
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        double r;
        if (zz == 0) {
            double d = cov.at(i, i) * cov.at(j, j);
            if (d <= 0.0) throw SingularityError("nonpositive variance");
            r = cov.at(i, j) / std::sqrt(d);
        } else {
            int k = 63 - std::countl_zero(zz);  // highest conditioning index
            VarSet rest = zz & ~single(k);
            double rxy = rec(i, j, rest);
            double rxk = rec(i, k, rest);
            double ryk = rec(j, k, rest);
            double den = (1.0 - rxk * rxk) * (1.0 - ryk * ryk);
            if (den <= 1e-24)
                throw SingularityError("recursion denominator vanished (|rho| = 1)");
            r = (rxy - rxk * ryk) / std::sqrt(den);
        }
        memo[key] = r;
        return r;
    };
    return rec(x, y, z);
}

// --- tests --------------------------------------------------------------------

struct TestResult {
    CiTriple triple;
    double statistic = 0.0;
    double p_value = 1.0;
    Verdict verdict = Verdict::Independent;
    double alpha = 0.0;
};

inline TestResult make_test_result(const CiTriple& t, double stat, double p, double alpha) {
    TestResult r;
    r.triple = t;
    r.statistic = stat;
    r.p_value = p;
    r.alpha = alpha;
    r.verdict = p > alpha ? Verdict::Independent : Verdict::Dependent;
    return r;
}

// Fisher z-test from a correlation value: z = atanh(rho),
// stat = sqrt(n - |z| - 3) * |z|, two-sided normal p.
inline TestResult fisher_z_from_rho(double rho, long n, const CiTriple& t, double alpha) {
    int zsize = set_size(t.z);
    if (n <= zsize + 3) throw SampleSizeError("fisher z needs n > |z| + 3");
    if (rho >= 1.0) rho = 1.0 - 1e-12;
    if (rho <= -1.0) rho = -1.0 + 1e-12;
    double zval = 0.5 * std::log((1.0 + rho) / (1.0 - rho));
    double stat = std::sqrt(static_cast<double>(n - zsize - 3)) * std::fabs(zval);
    return make_test_result(t, stat, two_sided_normal_p(stat), alpha);
}

inline TestResult fisher_z(const Matrix& cov, long n, int x, int y, VarSet z, double alpha) {
    CiTriple t = canonicalize(single(x), single(y), z);
    return fisher_z_from_rho(partial_correlation(cov, x, y, z), n, t, alpha);
}

// --- datasets -----------------------------------------------------------------

enum class DataKind { Continuous, Discrete };

struct Dataset {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;  // rectangular
    DataKind kind = DataKind::Continuous;

    long sample_count() const { return static_cast<long>(rows.size()); }
    int column_count() const { return static_cast<int>(columns.size()); }

    VariableUniverse universe() const { return VariableUniverse(columns); }
};

// Sample covariance with the 1/(m-1) normalization.
inline Matrix sample_covariance(const Dataset& d) {
    const int p = d.column_count();
    const long m = d.sample_count();
    if (m < 2) throw SampleSizeError("covariance needs at least two rows");
    std::vector<double> mean(p, 0.0);
    for (const auto& row : d.rows)
        for (int j = 0; j < p; ++j) mean[j] += row[j];
    for (int j = 0; j < p; ++j) mean[j] /= static_cast<double>(m);
    Matrix cov(p);
    for (const auto& row : d.rows)
        for (int i = 0; i < p; ++i)
            for (int j = i; j < p; ++j) {
                double v = (row[i] - mean[i]) * (row[j] - mean[j]);
                cov.at(i, j) += v;
            }
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) {
            cov.at(i, j) /= static_cast<double>(m - 1);
            cov.at(j, i) = cov.at(i, j);
        }
    return cov;
}

inline TestResult fisher_z(const Dataset& d, int x, int y, VarSet z, double alpha) {
    return fisher_z(sample_covariance(d), d.sample_count(), x, y, z, alpha);
}

// Stratified chi-square test of independence: one contingency table per
// configuration of the conditioning columns, statistics and degrees of
// freedom summed over strata. Strata with fewer than two rows or with a
// constant margin contribute nothing; if all strata degenerate the test is
// refused.
inline TestResult chi_square(const Dataset& d, int x, int y, VarSet z, double alpha) {
    if (d.kind != DataKind::Discrete) throw TableShapeError("chi-square needs discrete data");
    CiTriple t = canonicalize(single(x), single(y), z);

    std::vector<int> zidx;
    for_each_member(z, [&](int v) { zidx.push_back(v); });

    std::map<std::vector<double>, std::vector<long>> strata;
    for (long r = 0; r < d.sample_count(); ++r) {
        std::vector<double> key;
        for (int v : zidx) key.push_back(d.rows[r][v]);
        strata[key].push_back(r);
    }

    double stat = 0.0;
    long dof = 0;
    for (const auto& [key, rows] : strata) {
        if (rows.size() < 2) continue;
        std::map<double, int> xlv, ylv;
        for (long r : rows) {
            xlv.emplace(d.rows[r][x], static_cast<int>(xlv.size()));
            ylv.emplace(d.rows[r][y], static_cast<int>(ylv.size()));
        }
        const int nx = static_cast<int>(xlv.size());
        const int ny = static_cast<int>(ylv.size());
        if (nx < 2 || ny < 2) continue;
        std::vector<double> counts(static_cast<std::size_t>(nx) * ny, 0.0);
        std::vector<double> rx(nx, 0.0), ry(ny, 0.0);
        for (long r : rows) {
            int i = xlv[d.rows[r][x]];
            int j = ylv[d.rows[r][y]];
            counts[static_cast<std::size_t>(i) * ny + j] += 1.0;
            rx[i] += 1.0;
            ry[j] += 1.0;
        }
        const double total = static_cast<double>(rows.size());
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j) {
                double expected = rx[i] * ry[j] / total;
                if (expected <= 0.0) continue;
                double diff = counts[static_cast<std::size_t>(i) * ny + j] - expected;
                stat += diff * diff / expected;
            }
        dof += static_cast<long>(nx - 1) * (ny - 1);
    }
    if (dof == 0) throw DegenerateStratumError("all strata degenerate");
    return make_test_result(t, stat, chi_square_sf(stat, static_cast<double>(dof)), alpha);
}

// Two-sided Mann-Whitney U via the normal approximation with tie correction.
// Fully tied pooled samples yield p = 1.
inline double mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw EmptySampleError("mann-whitney needs nonempty samples");
    const long m = static_cast<long>(a.size());
    const long n = static_cast<long>(b.size());
    std::vector<std::pair<double, int>> pooled;
    pooled.reserve(m + n);
    for (double v : a) pooled.push_back({v, 0});
    for (double v : b) pooled.push_back({v, 1});
    std::sort(pooled.begin(), pooled.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });

    const long total = m + n;
    double rank_sum_a = 0.0;
    double tie_term = 0.0;
    long i = 0;
    while (i < total) {
        long j = i;
        while (j < total && pooled[j].first == pooled[i].first) ++j;
        double avg_rank = 0.5 * (i + 1 + j);  // ranks are 1-based
        long ties = j - i;
        if (ties > 1) tie_term += static_cast<double>(ties) * ties * ties - ties;
        for (long k = i; k < j; ++k)
            if (pooled[k].second == 0) rank_sum_a += avg_rank;
        i = j;
    }
    double u = rank_sum_a - 0.5 * static_cast<double>(m) * (m + 1);
    double mu = 0.5 * static_cast<double>(m) * n;
    double var = (static_cast<double>(m) * n / 12.0) *
                 (static_cast<double>(total + 1) -
                  tie_term / (static_cast<double>(total) * (total - 1)));
    if (var <= 0.0) return 1.0;  // complete overlap
    double zstat = (u - mu) / std::sqrt(var);
    return two_sided_normal_p(zstat);
}

}  // namespace redci
