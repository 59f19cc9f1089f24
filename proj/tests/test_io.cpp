#include "doctest.h"

#include "redci/io.hpp"
#include "redci/synth.hpp"

using namespace redci;

TEST_CASE("statement json round trip") {
    VariableUniverse u({"A", "B", "C", "D"});
    Rng rng(5);
    auto ts = all_triples(u);
    json arr = json::array();
    std::vector<CiStatement> original;
    for (const auto& t : ts) {
        CiStatement st{t, rng.coin() ? Verdict::Independent : Verdict::Dependent};
        original.push_back(st);
        arr.push_back(to_json(st, u));
    }
    auto u2 = universe_from_statements_json(arr);
    for (std::size_t i = 0; i < original.size(); ++i) {
        auto st = statement_from_json(arr[i], u2);
        // names may map to different indices, so compare by name sets
        CHECK(u2.names_of(st.triple.x) == u.names_of(original[i].triple.x));
        CHECK(u2.names_of(st.triple.z) == u.names_of(original[i].triple.z));
        CHECK(st.verdict == original[i].verdict);
    }
}

TEST_CASE("statement csv round trip") {
    VariableUniverse u({"A", "B", "C"});
    std::vector<CiStatement> l = {indep(single(0), single(1), single(2)),
                                  dep(single(0), single(2))};
    std::string csv = statements_to_csv(l, u);
    CHECK(csv == "A;B;C;indep\nA;C;;dep\n");
    auto back = statements_from_csv(csv, u);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == l[0]);
    CHECK(back[1] == l[1]);
}

TEST_CASE("graph json round trip") {
    VariableUniverse u({"A", "B", "C"});
    Dag g(u, {{0, 1}, {2, 1}});
    auto j = to_json(AnyGraph{g});
    auto back = graph_from_json(j);
    REQUIRE(std::holds_alternative<Dag>(back));
    CHECK(std::get<Dag>(back) == g);

    UndirectedGraph ug(u, {{0, 1}, {1, 2}});
    auto j2 = to_json(AnyGraph{ug});
    auto back2 = graph_from_json(j2);
    REQUIRE(std::holds_alternative<UndirectedGraph>(back2));
    CHECK(std::get<UndirectedGraph>(back2) == ug);
}

TEST_CASE("dataset csv round trip and validation") {
    Dataset d;
    d.columns = {"x", "y"};
    d.kind = DataKind::Continuous;
    d.rows = {{1.25, -3.5}, {0.0, 42.0}};
    auto text = dataset_to_csv(d);
    auto back = dataset_from_csv(text, DataKind::Continuous);
    CHECK(back.columns == d.columns);
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[0][0] == doctest::Approx(1.25));
    CHECK(back.rows[1][1] == doctest::Approx(42.0));

    CHECK_THROWS_AS(dataset_from_csv("x,y\n1.0\n", DataKind::Continuous), ParseError);
    CHECK_THROWS_AS(dataset_from_csv("x,y\n1.0,\n", DataKind::Continuous), ParseError);
    CHECK_THROWS_AS(dataset_from_csv("x,y\n1.0,abc\n", DataKind::Continuous), ParseError);
}

TEST_CASE("triple text form") {
    VariableUniverse u({"A", "B", "C", "D"});
    CiTriple t = parse_triple("A|B;C;D", u);
    CHECK(t.x == (single(0) | single(1)));
    CHECK(t.y == single(2));
    CHECK(t.z == single(3));
    CiTriple m = parse_triple("A;B;", u);
    CHECK(m.z == kEmptySet);
    CHECK_THROWS_AS(parse_triple("A;B", u), ParseError);
    CHECK_THROWS_AS(parse_triple("A;E;", u), UnknownVariableError);
}
