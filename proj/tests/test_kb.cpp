#include "sempar/kb.hpp"
#include "sempar/query_text.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <sstream>

using namespace sempar;
using testutil::id;
using testutil::var;

namespace {

TripleStore store_from(const std::string& turtle) {
    std::istringstream in(turtle);
    TripleStore s = load_turtle(in);
    s.freeze();
    return s;
}

const char* kPrefixes =
    "@prefix dbr: <http://dbpedia.org/resource/> .\n"
    "@prefix dbo: <http://dbpedia.org/ontology/> .\n";

TripleStore toy_kb() {
    static TripleStore s = [] {
        TripleStore kb = load_turtle_file(testutil::data_path("toy_kb.ttl"));
        kb.freeze();
        return kb;
    }();
    return s;
}

}  // namespace

TEST_CASE("turtle: single triple document") {
    auto s = store_from(std::string(kPrefixes) +
                        "dbr:Wikipedia dbo:author dbr:Jimmy_Wales .\n");
    CHECK(s.size() == 1);
    CHECK(s.contains(Triple{id("dbr", "Wikipedia"), id("dbo", "author"),
                            Term{id("dbr", "Jimmy_Wales")}}));
}

TEST_CASE("turtle: empty document yields empty store") {
    auto s = store_from("");
    CHECK(s.size() == 0);
}

TEST_CASE("turtle: `a` shorthand, semicolon and comma continuation") {
    auto s = store_from(std::string(kPrefixes) +
                        "dbr:X a dbo:Work ;\n"
                        "  dbo:author dbr:A , dbr:B .\n");
    CHECK(s.size() == 3);
    CHECK(s.contains(Triple{id("dbr", "X"), id("rdf", "type"), Term{id("dbo", "Work")}}));
    CHECK(s.contains(Triple{id("dbr", "X"), id("dbo", "author"), Term{id("dbr", "A")}}));
    CHECK(s.contains(Triple{id("dbr", "X"), id("dbo", "author"), Term{id("dbr", "B")}}));
}

TEST_CASE("turtle: string and integer literals") {
    auto s = store_from(std::string(kPrefixes) +
                        "dbr:P dbo:populationTotal 38382576 .\n"
                        "dbr:P dbo:name \"Poland\" .\n");
    CHECK(s.contains(Triple{id("dbr", "P"), id("dbo", "populationTotal"),
                            Term{Literal::integer(38382576)}}));
    CHECK(s.contains(Triple{id("dbr", "P"), id("dbo", "name"),
                            Term{Literal::str("Poland")}}));
}

TEST_CASE("turtle: syntax error reports line number") {
    std::istringstream in(std::string(kPrefixes) + "dbr:X dbo:author .\n");
    try {
        load_turtle(in);
        FAIL("expected TurtleError");
    } catch (const TurtleError& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("turtle: conflicting prefix redefinition is an error") {
    std::istringstream in(
        "@prefix dbr: <http://dbpedia.org/resource/> .\n"
        "@prefix dbr: <http://example.org/other/> .\n");
    CHECK_THROWS_AS(load_turtle(in), TurtleError);
}

TEST_CASE("turtle: redeclaring the same prefix binding is allowed") {
    auto s = store_from(
        "@prefix dbr: <http://dbpedia.org/resource/> .\n"
        "@prefix dbr: <http://dbpedia.org/resource/> .\n");
    CHECK(s.size() == 0);
}

TEST_CASE("toy KB: section-1 query returns both founders") {
    auto kb = toy_kb();
    ConjunctiveQuery q;
    q.form = ConjunctiveQuery::Form::Select;
    q.projection = {"uri"};
    q.patterns = {{id("dbr", "Wikipedia"), id("dbo", "author"), var("uri")}};
    auto rs = kb.execute(q);
    // Oracle: hand enumeration of the fixture's dbo:author triples.
    std::set<std::vector<Term>> expected = {{Term{id("dbr", "Jimmy_Wales")}},
                                            {Term{id("dbr", "Larry_Sanger")}}};
    CHECK(rs.rows == expected);
}

TEST_CASE("execute: ASK with no reflexive author triple is false") {
    auto kb = toy_kb();
    ConjunctiveQuery q;
    q.form = ConjunctiveQuery::Form::Ask;
    q.patterns = {{id("dbr", "Wikipedia"), id("dbo", "author"), id("dbr", "Wikipedia")}};
    CHECK_FALSE(kb.execute(q).ask_answer);
}

TEST_CASE("execute: zero matches is an empty set, not an error") {
    auto kb = toy_kb();
    ConjunctiveQuery q;
    q.form = ConjunctiveQuery::Form::Select;
    q.projection = {"y"};
    q.patterns = {{var("y"), id("rdf", "type"), id("dbo", "Person")},
                  {var("y"), id("dbo", "author"), id("dbr", "Wikipedia")}};
    CHECK(kb.execute(q).rows.empty());
}

TEST_CASE("execute: multi-pattern join binds across patterns") {
    auto kb = toy_kb();
    ConjunctiveQuery q;
    q.form = ConjunctiveQuery::Form::Select;
    q.projection = {"w"};
    q.patterns = {{var("w"), id("dbo", "author"), var("p")},
                  {var("p"), id("rdf", "type"), id("dbo", "Person")}};
    auto rs = kb.execute(q);
    std::set<std::vector<Term>> expected = {{Term{id("dbr", "Wikipedia")}},
                                            {Term{id("dbr", "The_Hunger_Games")}}};
    CHECK(rs.rows == expected);
}

TEST_CASE("execute: projection variable not in any pattern is rejected") {
    auto kb = toy_kb();
    ConjunctiveQuery q;
    q.form = ConjunctiveQuery::Form::Select;
    q.projection = {"missing"};
    q.patterns = {{id("dbr", "Wikipedia"), id("dbo", "author"), var("y")}};
    CHECK_THROWS_AS(kb.execute(q), QueryError);
}

TEST_CASE("query validate: structural invariants") {
    ConjunctiveQuery q;
    q.patterns = {};
    CHECK_THROWS_AS(q.validate(), QueryError);  // no patterns

    q.patterns = {{id("dbr", "X"), id("dbo", "p"), var("y")}};
    q.projection = {};
    CHECK_THROWS_AS(q.validate(), QueryError);  // Select with empty projection

    q.form = ConjunctiveQuery::Form::Ask;
    q.projection = {"y"};
    CHECK_THROWS_AS(q.validate(), QueryError);  // Ask with projection
}

TEST_CASE("is_satisfiable: paper's accepted vs pruned pattern") {
    auto kb = toy_kb();
    CHECK(kb.is_satisfiable({{id("dbr", "Wikipedia"), id("dbo", "author"), var("y")}}));
    CHECK_FALSE(kb.is_satisfiable({{var("y"), id("dbo", "author"), id("dbr", "Wikipedia")}}));
    CHECK(kb.is_satisfiable({{var("x"), var("p"), var("o")}}));
    CHECK_THROWS_AS(kb.is_satisfiable({}), QueryError);
}

TEST_CASE("domain_range: declared, undeclared, and literal-range properties") {
    auto kb = toy_kb();
    CHECK(kb.domain_of(id("dbo", "author")) == id("dbo", "Work"));
    CHECK(kb.range_of(id("dbo", "author")) == id("dbo", "Person"));
    CHECK_FALSE(kb.domain_of(id("dbo", "nosuch")).has_value());
    CHECK_FALSE(kb.range_of(id("dbo", "nosuch")).has_value());
    CHECK(kb.domain_of(id("dbo", "populationTotal")) == id("dbo", "PopulatedPlace"));
    CHECK(kb.range_of(id("dbo", "populationTotal")) == id("xsd", "integer"));
}

TEST_CASE("kind inference from usage") {
    auto kb = toy_kb();
    CHECK(kb.kind_of(id("dbo", "author")) == IdKind::ObjectProperty);
    CHECK(kb.kind_of(id("dbo", "populationTotal")) == IdKind::DatatypeProperty);
    CHECK(kb.kind_of(id("dbo", "totalPopulation")) == IdKind::ObjectProperty);
    CHECK(kb.kind_of(id("dbo", "Person")) == IdKind::Class);
    CHECK(kb.kind_of(id("dbr", "Wikipedia")) == IdKind::Resource);
}

TEST_CASE("labels index") {
    auto kb = toy_kb();
    CHECK(kb.labels().at(id("dbo", "populationTotal")) == "population total");
    CHECK(kb.labels().at(id("dbr", "Wikipedia")) == "Wikipedia");
}

TEST_CASE("is_instance_of uses rdf:type triples only") {
    auto kb = toy_kb();
    CHECK(kb.is_instance_of(id("dbr", "Wikipedia"), id("dbo", "Work")));
    CHECK_FALSE(kb.is_instance_of(id("dbr", "Wikipedia"), id("dbo", "Person")));
}

TEST_CASE("property: Ask true iff Select non-empty, randomized") {
    Rng rng(derive_seed(2024, "kb/ask-select"));
    std::vector<KbId> subjects = {id("e", "a"), id("e", "b"), id("e", "c")};
    std::vector<KbId> preds = {id("p", "p"), id("p", "q")};
    for (int trial = 0; trial < 200; ++trial) {
        TripleStore s;
        int n = 1 + int(rng.below(12));
        for (int i = 0; i < n; ++i)
            s.add(Triple{subjects[rng.below(3)], preds[rng.below(2)],
                         Term{subjects[rng.below(3)]}});
        s.freeze();

        auto random_term = [&](bool allow_var) -> PatternTerm {
            if (allow_var && rng.below(2) == 0)
                return var("v" + std::to_string(rng.below(3)));
            return subjects[rng.below(3)];
        };
        ConjunctiveQuery q;
        q.form = ConjunctiveQuery::Form::Select;
        int p = 1 + int(rng.below(3));
        std::set<std::string> vars_used;
        for (int i = 0; i < p; ++i) {
            TriplePattern pat{random_term(true),
                              rng.below(2) ? PatternTerm{preds[rng.below(2)]}
                                           : PatternTerm{var("p" + std::to_string(rng.below(2)))},
                              random_term(true)};
            for (const auto* t : {&pat.subject, &pat.predicate, &pat.object})
                if (const auto* v = std::get_if<Variable>(t)) vars_used.insert(v->name);
            q.patterns.push_back(pat);
        }
        if (vars_used.empty()) continue;
        q.projection = {*vars_used.begin()};

        ConjunctiveQuery ask;
        ask.form = ConjunctiveQuery::Form::Ask;
        ask.patterns = q.patterns;

        CHECK(s.execute(ask).ask_answer == !s.execute(q).rows.empty());
        CHECK(s.is_satisfiable(q.patterns) ==
              testutil::BruteForceOracle(s.triples()).satisfiable(q.patterns));
    }
}

TEST_CASE("execute matches the brute-force oracle on the toy KB") {
    auto kb = toy_kb();
    testutil::BruteForceOracle oracle(kb.triples());
    ConjunctiveQuery q;
    q.form = ConjunctiveQuery::Form::Select;
    q.projection = {"w", "p"};
    q.patterns = {{var("w"), id("dbo", "writer"), var("p")}};
    CHECK(kb.execute(q).rows == oracle.select(q.patterns, q.projection));
}

TEST_CASE("round trip: load, serialize, reload is triple-set equal") {
    auto kb = toy_kb();
    std::string text = kb.serialize();
    std::istringstream in(text);
    // The serialized form is one `ns:local ns:local term .` line per triple,
    // which the loader accepts once the namespaces are declared.
    std::string with_prefixes =
        "@prefix dbr: <http://dbpedia.org/resource/> .\n"
        "@prefix dbo: <http://dbpedia.org/ontology/> .\n"
        "@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .\n"
        "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
        "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n" + text;
    auto again = store_from(with_prefixes);
    CHECK(again.size() == kb.size());
    CHECK(again.serialize() == text);
}

TEST_CASE("execute is deterministic across repeated calls") {
    auto kb = toy_kb();
    ConjunctiveQuery q;
    q.form = ConjunctiveQuery::Form::Select;
    q.projection = {"y"};
    q.patterns = {{var("y"), id("rdf", "type"), id("dbo", "Person")}};
    auto a = kb.execute(q);
    auto b = kb.execute(q);
    CHECK(a.rows == b.rows);
}

TEST_CASE("query text: parse and write round trip") {
    std::string select = "SELECT DISTINCT ?v WHERE { dbr:Wikipedia dbo:author ?v . }";
    auto q = parse_query(select);
    CHECK(q.form == ConjunctiveQuery::Form::Select);
    CHECK(q.projection == std::vector<std::string>{"v"});
    CHECK(write_query(q) == select);

    std::string ask = "ASK WHERE { dbr:Wikipedia dbo:author dbr:Jimmy_Wales . }";
    auto a = parse_query(ask);
    CHECK(a.form == ConjunctiveQuery::Form::Ask);
    CHECK(write_query(a) == ask);
}

TEST_CASE("query text: literals and multiple patterns") {
    std::string text =
        "SELECT DISTINCT ?x ?y WHERE { ?x dbo:populationTotal 42 . ?x dbo:name \"Z\" . "
        "?x dbo:author ?y . }";
    auto q = parse_query(text);
    CHECK(q.patterns.size() == 3);
    CHECK(write_query(q) == text);
    CHECK_THROWS_AS(parse_query("SELECT WHERE { }"), QueryError);
}
