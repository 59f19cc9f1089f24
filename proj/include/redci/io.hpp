#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "redci/discovery.hpp"
#include "redci/graph.hpp"
#include "redci/stats.hpp"

namespace redci {

using nlohmann::json;

// --- statements ---------------------------------------------------------------

inline json to_json(const CiTriple& t, const VariableUniverse& u) {
    return json{{"x", u.names_of(t.x)}, {"y", u.names_of(t.y)}, {"z", u.names_of(t.z)}};
}

inline json to_json(const CiStatement& s, const VariableUniverse& u) {
    json j = to_json(s.triple, u);
    j["verdict"] = s.verdict == Verdict::Independent ? "indep" : "dep";
    return j;
}

inline CiTriple triple_from_json(const json& j, const VariableUniverse& u) {
    auto side = [&](const char* key) {
        VarSet s = 0;
        for (const auto& name : j.at(key)) s |= single(u.index(name.get<std::string>()));
        return s;
    };
    return canonicalize(side("x"), side("y"), side("z"));
}

inline Verdict verdict_from_string(const std::string& v) {
    if (v == "indep" || v == "independent") return Verdict::Independent;
    if (v == "dep" || v == "dependent") return Verdict::Dependent;
    throw ParseError("unknown verdict: " + v);
}

inline CiStatement statement_from_json(const json& j, const VariableUniverse& u) {
    return CiStatement{triple_from_json(j, u), verdict_from_string(j.at("verdict"))};
}

// Universe inferred from the variables mentioned, in order of appearance.
inline VariableUniverse universe_from_statements_json(const json& arr) {
    std::vector<std::string> names;
    auto note = [&](const std::string& n) {
        if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    };
    for (const auto& j : arr)
        for (const char* key : {"x", "y", "z"})
            for (const auto& n : j.at(key)) note(n.get<std::string>());
    return VariableUniverse(names);
}

inline std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == delim) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// "a|b;c;d|e" -> ({a,b},{c}|{d,e}); empty field means the empty set
inline CiTriple parse_triple(const std::string& text, const VariableUniverse& u) {
    auto parts = split(text, ';');
    if (parts.size() < 3) throw ParseError("triple needs x;y;z fields: " + text);
    auto side = [&](const std::string& p) {
        VarSet s = 0;
        if (p.empty()) return s;
        for (const auto& name : split(p, '|'))
            if (!name.empty()) s |= single(u.index(name));
        return s;
    };
    return canonicalize(side(parts[0]), side(parts[1]), side(parts[2]));
}

// Universe of a statements CSV, names in order of appearance.
inline VariableUniverse universe_from_statements_csv(const std::string& text) {
    std::vector<std::string> names;
    auto note = [&](const std::string& n) {
        if (!n.empty() && std::find(names.begin(), names.end(), n) == names.end())
            names.push_back(n);
    };
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto parts = split(line, ';');
        for (std::size_t i = 0; i + 1 < parts.size() && i < 3; ++i)
            for (const auto& n : split(parts[i], '|')) note(n);
    }
    return VariableUniverse(names);
}

// CSV form: x;y;z;verdict per line
inline std::vector<CiStatement> statements_from_csv(const std::string& text,
                                                    const VariableUniverse& u) {
    std::vector<CiStatement> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto parts = split(line, ';');
        if (parts.size() != 4) throw ParseError("statement line needs x;y;z;verdict: " + line);
        out.push_back(CiStatement{parse_triple(line.substr(0, line.rfind(';')), u),
                                  verdict_from_string(parts[3])});
    }
    return out;
}

inline std::string statements_to_csv(const std::vector<CiStatement>& l,
                                     const VariableUniverse& u) {
    std::string out;
    auto side = [&](VarSet s) {
        std::string t;
        bool first = true;
        for_each_member(s, [&](int i) {
            if (!first) t += "|";
            t += u.name(i);
            first = false;
        });
        return t;
    };
    for (const auto& st : l) {
        out += side(st.triple.x) + ";" + side(st.triple.y) + ";" + side(st.triple.z) + ";" +
               (st.verdict == Verdict::Independent ? "indep" : "dep") + "\n";
    }
    return out;
}

// --- graphs ---------------------------------------------------------------------

inline json to_json(const AnyGraph& g) {
    const VariableUniverse& u = universe_of(g);
    json edges = json::array();
    bool directed = std::holds_alternative<Dag>(g);
    auto edge_list =
        directed ? std::get<Dag>(g).edges() : std::get<UndirectedGraph>(g).edges();
    for (const auto& e : edge_list) edges.push_back({u.name(e.a), u.name(e.b)});
    return json{{"nodes", u.names()}, {"edges", edges}, {"directed", directed}};
}

inline AnyGraph graph_from_json(const json& j) {
    std::vector<std::string> names;
    for (const auto& n : j.at("nodes")) names.push_back(n.get<std::string>());
    VariableUniverse u(names);
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
        if (e.size() != 2) throw ParseError("edge entries must be pairs");
        edges.push_back(Edge{u.index(e[0].get<std::string>()), u.index(e[1].get<std::string>())});
    }
    if (j.at("directed").get<bool>()) return AnyGraph{Dag(u, edges)};
    return AnyGraph{UndirectedGraph(u, edges)};
}

// --- datasets --------------------------------------------------------------------

inline Dataset dataset_from_csv(const std::string& text, DataKind kind) {
    Dataset d;
    d.kind = kind;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty dataset");
    for (auto& name : split(line, ','))
        d.columns.push_back(name);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto parts = split(line, ',');
        if (parts.size() != d.columns.size())
            throw ParseError("ragged dataset row: " + line);
        std::vector<double> row;
        for (const auto& p : parts) {
            if (p.empty()) throw ParseError("missing value in dataset row: " + line);
            try {
                row.push_back(std::stod(p));
            } catch (const std::exception&) {
                throw ParseError("non-numeric value: " + p);
            }
        }
        d.rows.push_back(std::move(row));
    }
    return d;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string dataset_to_csv(const Dataset& d) {
    std::string out;
    for (std::size_t i = 0; i < d.columns.size(); ++i) {
        if (i) out += ",";
        out += d.columns[i];
    }
    out += "\n";
    for (const auto& row : d.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            out += d.kind == DataKind::Discrete ? std::to_string(static_cast<long>(row[i]))
                                                : format_double(row[i]);
        }
        out += "\n";
    }
    return out;
}

// --- test results -----------------------------------------------------------------

inline json to_json(const TestResult& r, const VariableUniverse& u) {
    return json{{"triple", to_json(r.triple, u)},
                {"stat", r.statistic},
                {"p", r.p_value},
                {"verdict", r.verdict == Verdict::Independent ? "indep" : "dep"}};
}

// --- files --------------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

}  // namespace redci
