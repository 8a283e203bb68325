#include "sempar/dudes.hpp"
#include "sempar/query_text.hpp"

#include "test_util.hpp"

#include <doctest.h>

using namespace sempar;
using testutil::id;

namespace {

KbId author() { return id("dbo", "author", IdKind::ObjectProperty); }
KbId wikipedia() { return id("dbr", "Wikipedia"); }

}  // namespace

TEST_CASE("make_dude: Resource binds its main variable, no slots") {
    VarGen vars;
    Dude d = make_dude(DudeKind::Resource, wikipedia(), vars);
    CHECK(d.kind == DudeKind::Resource);
    CHECK(d.saturated());
    CHECK(d.binding == Term{wikipedia()});
    CHECK(d.conditions.empty());
}

TEST_CASE("make_dude: Property carries one condition and two slots") {
    VarGen vars;
    Dude d = make_dude(DudeKind::Property, author(), vars);
    REQUIRE(d.conditions.size() == 1);
    REQUIRE(d.slots.size() == 2);
    CHECK(d.slots[0].arg_index == 1);
    CHECK(d.slots[1].arg_index == 2);
    CHECK(as_ground(d.conditions[0].predicate) == Term{author()});
    CHECK(is_variable(d.conditions[0].subject));
    CHECK(is_variable(d.conditions[0].object));
}

TEST_CASE("make_dude: Class emits an rdf:type condition") {
    VarGen vars;
    Dude d = make_dude(DudeKind::Class, id("dbo", "Person", IdKind::Class), vars);
    REQUIRE(d.conditions.size() == 1);
    CHECK(as_ground(d.conditions[0].predicate) == Term{rdf_type()});
    CHECK(d.saturated());
}

TEST_CASE("make_dude: QueryVar projects its own variable, empty content") {
    VarGen vars;
    Dude d = make_dude(DudeKind::QueryVar, std::nullopt, vars);
    CHECK(d.projection.size() == 1);
    CHECK(d.projection[0] == *d.main_variable);
    CHECK(d.conditions.empty());
    CHECK(d.saturated());
}

TEST_CASE("make_dude: RestrictionClass is a one-slot property-value pattern") {
    VarGen vars;
    Dude d = make_dude(DudeKind::RestrictionClass, id("dbo", "country", IdKind::ObjectProperty),
                       vars, Term{id("dbr", "Sweden")});
    REQUIRE(d.slots.size() == 1);
    CHECK(d.slots[0].arg_index == 1);
    REQUIRE(d.conditions.size() == 1);
    CHECK(as_ground(d.conditions[0].object) == Term{id("dbr", "Sweden")});
}

TEST_CASE("make_dude: kind/id mismatches are rejected") {
    VarGen vars;
    CHECK_THROWS_AS(make_dude(DudeKind::Resource, author(), vars), DudesError);
    CHECK_THROWS_AS(make_dude(DudeKind::Property, wikipedia(), vars), DudesError);
    CHECK_THROWS_AS(make_dude(DudeKind::QueryVar, wikipedia(), vars), DudesError);
    CHECK_THROWS_AS(make_dude(DudeKind::Property, std::nullopt, vars), DudesError);
    CHECK_THROWS_AS(
        make_dude(DudeKind::RestrictionClass, author(), vars, std::nullopt), DudesError);
}

TEST_CASE("apply golden: property applied to a resource at argument 1") {
    VarGen vars;
    Dude prop = make_dude(DudeKind::Property, author(), vars);
    Dude res = make_dude(DudeKind::Resource, wikipedia(), vars);
    Dude applied = apply(prop, res, 1, vars);
    CHECK(render(applied) ==
          "kind: Property\n"
          "v: -\n"
          "vs: {}\n"
          "l: 1\n"
          "drs: [dbo:author(dbr:Wikipedia, v1)]\n"
          "slots: {(v1, a2, 2)}\n");
}

TEST_CASE("apply golden: the unsatisfiable argument-2 variant") {
    VarGen vars;
    Dude prop = make_dude(DudeKind::Property, author(), vars);
    Dude res = make_dude(DudeKind::Resource, wikipedia(), vars);
    Dude applied = apply(prop, res, 2, vars);
    CHECK(render(applied) ==
          "kind: Property\n"
          "v: -\n"
          "vs: {}\n"
          "l: 1\n"
          "drs: [dbo:author(v1, dbr:Wikipedia)]\n"
          "slots: {(v1, a1, 1)}\n");
}

TEST_CASE("apply golden: QueryVar saturates the remaining slot") {
    VarGen vars;
    Dude prop = make_dude(DudeKind::Property, author(), vars);
    Dude res = make_dude(DudeKind::Resource, wikipedia(), vars);
    Dude partial = apply(prop, res, 1, vars);
    Dude qv = make_dude(DudeKind::QueryVar, std::nullopt, vars);
    Dude full = apply(partial, qv, 2, vars);
    CHECK(render(full) ==
          "kind: Property\n"
          "v: -\n"
          "vs: {v1}\n"
          "l: 1\n"
          "drs: [dbo:author(dbr:Wikipedia, v1)]\n"
          "slots: {}\n");

    auto q = to_query(full);
    CHECK(q.form == ConjunctiveQuery::Form::Select);
    CHECK(q.projection.size() == 1);
    CHECK(q.patterns.size() == 1);
}

TEST_CASE("to_query: empty projection yields Ask") {
    VarGen vars;
    Dude prop = make_dude(DudeKind::Property, author(), vars);
    Dude res1 = make_dude(DudeKind::Resource, wikipedia(), vars);
    Dude res2 = make_dude(DudeKind::Resource, id("dbr", "Jimmy_Wales"), vars);
    Dude full = apply(apply(prop, res1, 1, vars), res2, 2, vars);
    auto q = to_query(full);
    CHECK(q.form == ConjunctiveQuery::Form::Ask);
    CHECK(q.projection.empty());
}

TEST_CASE("to_query: unsaturated DUDES error names the open slot") {
    VarGen vars;
    Dude prop = make_dude(DudeKind::Property, author(), vars);
    Dude partial = apply(prop, make_dude(DudeKind::Resource, wikipedia(), vars), 1, vars);
    try {
        to_query(partial);
        FAIL("expected DudesError");
    } catch (const DudesError& e) {
        // The remaining slot is (v2, a2, 2) in the session's raw names.
        std::string msg = e.what();
        CHECK(msg.find("a2, 2)") != std::string::npos);
    }
}

TEST_CASE("apply: missing slot and bad index are errors") {
    VarGen vars;
    Dude res = make_dude(DudeKind::Resource, wikipedia(), vars);
    Dude qv = make_dude(DudeKind::QueryVar, std::nullopt, vars);
    CHECK_THROWS_AS(apply(res, qv, 1, vars), DudesError);
    Dude prop = make_dude(DudeKind::Property, author(), vars);
    CHECK_THROWS_AS(apply(prop, qv, 3, vars), DudesError);
}

TEST_CASE("rename_apart: disjointness and no-op cases") {
    VarGen vars;
    Dude prop = make_dude(DudeKind::Property, author(), vars);  // uses v1, v2
    auto reserved = prop.variables();

    Dude renamed = rename_apart(prop, reserved, vars);
    for (const auto& v : renamed.variables()) CHECK(reserved.count(v) == 0);
    CHECK(render(renamed) == render(prop));  // alpha-equivalent

    Dude untouched = rename_apart(prop, {"zz"}, vars);
    CHECK(untouched.variables() == prop.variables());

    // Chained renames with growing reserved sets never reuse a reserved name.
    std::set<std::string> grow = reserved;
    Dude cur = prop;
    for (int i = 0; i < 4; ++i) {
        cur = rename_apart(cur, grow, vars);
        auto cur_vars = cur.variables();
        for (const auto& v : cur_vars) CHECK(grow.count(v) == 0);
        grow.insert(cur_vars.begin(), cur_vars.end());
    }
}

TEST_CASE("property: apply unions pattern sets and drops exactly one slot") {
    Rng rng(derive_seed(11, "dudes/apply-union"));
    std::vector<KbId> props = {id("dbo", "author", IdKind::ObjectProperty),
                               id("dbo", "writer", IdKind::ObjectProperty)};
    std::vector<KbId> resources = {id("dbr", "A"), id("dbr", "B"), id("dbr", "C")};
    for (int trial = 0; trial < 100; ++trial) {
        VarGen vars;
        Dude functor = make_dude(DudeKind::Property, props[rng.below(props.size())], vars);
        Dude argument;
        switch (rng.below(3)) {
            case 0:
                argument = make_dude(DudeKind::Resource, resources[rng.below(3)], vars);
                break;
            case 1:
                argument = make_dude(DudeKind::Class, id("dbo", "Work", IdKind::Class), vars);
                break;
            default:
                argument = make_dude(DudeKind::QueryVar, std::nullopt, vars);
                break;
        }
        int arg_index = 1 + int(rng.below(2));
        Dude out = apply(functor, argument, arg_index, vars);

        CHECK(out.kind == functor.kind);  // kind preservation
        CHECK(out.slots.size() == functor.slots.size() - 1);
        CHECK(out.conditions.size() == functor.conditions.size() + argument.conditions.size());

        // Saturate the rest and check the pattern count carries through.
        Dude full = apply(out, make_dude(DudeKind::QueryVar, std::nullopt, vars),
                          out.slots[0].arg_index, vars);
        auto q = to_query(full);
        CHECK(q.patterns.size() == full.conditions.size());
    }
}

TEST_CASE("property: render is alpha-invariant") {
    VarGen a_vars;
    Dude a = apply(make_dude(DudeKind::Property, author(), a_vars),
                   make_dude(DudeKind::Resource, wikipedia(), a_vars), 1, a_vars);
    VarGen b_vars;
    // Burn variable names so the second build uses different raw names.
    for (int i = 0; i < 7; ++i) b_vars.fresh();
    Dude b = apply(make_dude(DudeKind::Property, author(), b_vars),
                   make_dude(DudeKind::Resource, wikipedia(), b_vars), 1, b_vars);
    CHECK(render(a) == render(b));
    // The queries agree after the same canonical alpha-renaming.
    Dude fa = apply(a, make_dude(DudeKind::QueryVar, std::nullopt, a_vars), 2, a_vars);
    Dude fb = apply(b, make_dude(DudeKind::QueryVar, std::nullopt, b_vars), 2, b_vars);
    CHECK(render(fa) == render(fb));
    CHECK(to_query(fa).patterns.size() == to_query(fb).patterns.size());
}
