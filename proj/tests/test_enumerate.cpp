#include "doctest.h"

#include <cstdint>

#include "redci/enumerate.hpp"

using namespace redci;

namespace {

VariableUniverse u(int n) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
    return VariableUniverse(names);
}

// Independent oracle: labelled-DAG counting recurrence
// a(n) = sum_{k=1..n} (-1)^(k+1) C(n,k) 2^(k(n-k)) a(n-k), a(0)=1.
std::uint64_t dag_count(int n) {
    std::vector<std::uint64_t> a(n + 1, 0);
    std::vector<std::vector<std::uint64_t>> choose(n + 1, std::vector<std::uint64_t>(n + 1, 0));
    for (int i = 0; i <= n; ++i) {
        choose[i][0] = 1;
        for (int j = 1; j <= i; ++j)
            choose[i][j] = choose[i - 1][j - 1] + (j <= i - 1 ? choose[i - 1][j] : 0);
    }
    a[0] = 1;
    for (int m = 1; m <= n; ++m) {
        std::int64_t total = 0;
        for (int k = 1; k <= m; ++k) {
            std::int64_t term = static_cast<std::int64_t>(choose[m][k]) *
                                (std::int64_t{1} << (k * (m - k))) *
                                static_cast<std::int64_t>(a[m - k]);
            total += (k % 2 == 1) ? term : -term;
        }
        a[m] = static_cast<std::uint64_t>(total);
    }
    return a[n];
}

std::uint64_t cayley(int n) {
    if (n <= 2) return 1;
    std::uint64_t c = 1;
    for (int i = 0; i < n - 2; ++i) c *= n;
    return c;
}

}  // namespace

TEST_CASE("DAG enumeration matches the counting recurrence") {
    CHECK(dag_count(0) == 1);
    CHECK(dag_count(1) == 1);
    CHECK(dag_count(2) == 3);
    CHECK(dag_count(3) == 25);
    CHECK(dag_count(4) == 543);
    CHECK(dag_count(5) == 29281);
    for (int n = 1; n <= 5; ++n) {
        std::uint64_t count = 0;
        for_each_dag(u(n), [&](const Dag&) { ++count; });
        CHECK(count == dag_count(n));
    }
}

TEST_CASE("spanning tree enumeration matches Cayley's formula") {
    for (int n = 2; n <= 7; ++n) {
        std::uint64_t count = 0;
        for_each_spanning_tree(u(n), [&](const UndirectedGraph& t) {
            REQUIRE(is_spanning_tree(t));
            ++count;
        });
        CHECK(count == cayley(n));
    }
}

TEST_CASE("spanning trees are pairwise distinct") {
    std::vector<UndirectedGraph> trees = all_spanning_trees(u(5));
    CHECK(trees.size() == 125);
    for (std::size_t i = 0; i < trees.size(); ++i)
        for (std::size_t j = i + 1; j < trees.size(); ++j)
            REQUIRE(structural_hamming_distance(trees[i], trees[j]) > 0);
}

TEST_CASE("undirected enumeration is all edge subsets") {
    std::uint64_t count = 0;
    for_each_undirected(u(3), [&](const UndirectedGraph&) { ++count; });
    CHECK(count == 8);
}

TEST_CASE("enumeration caps") {
    CHECK_THROWS_AS(for_each_dag(u(6), [](const Dag&) {}), CapExceededError);
    CHECK_THROWS_AS(for_each_undirected(u(7), [](const UndirectedGraph&) {}), CapExceededError);
    std::vector<std::string> names;
    for (int i = 0; i < 10; ++i) names.push_back("n" + std::to_string(i));
    CHECK_THROWS_AS(for_each_spanning_tree(VariableUniverse(names), [](const UndirectedGraph&) {}),
                    CapExceededError);
}
