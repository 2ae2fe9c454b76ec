#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cqlab/cq.hpp>
#include <cqlab/io.hpp>

#include "support/fixtures.hpp"
#include "support/gen.hpp"
#include "support/naive.hpp"

using namespace cqlab;
using namespace cqlab_test;

TEST_CASE("query codec")
{
    auto t = query_t();
    CHECK(t.k() == 0);
    CHECK(t.atoms().size() == 4);

    auto q = parse_cq("schema: P/1\nq(x) :- P(x)\n");
    CHECK(encode_cq(parse_cq(encode_cq(q))) == encode_cq(q));

    CHECK_THROWS_WITH_AS(parse_cq("schema: R/2\nq(x) :- R(y,z)\n"),
                         doctest::Contains("unsafe head variable"), parse_error);
    CHECK_NOTHROW(parse_cq("schema: R/2\nq(x) :- R(y,z)\n", true));
    CHECK_THROWS_AS(parse_cq("schema: R/2\nq(x) :- S(x,x)\n"), parse_error);
    CHECK_THROWS_AS(parse_cq("schema: R/2\nq(x) :- R(x)\n"), parse_error);
}

TEST_CASE("canonical structure and canonical query")
{
    auto q = parse_cq("schema: P/1, Q/1\nq(x) :- P(x), Q(x)\n");
    auto hat = canonical_structure(q);
    CHECK(is_isomorphic(hat, a_pq()));
    CHECK(hat.flags().safe);

    auto t_hat = canonical_structure(query_t());
    CHECK(t_hat.domain().size() == 5);
    CHECK(t_hat.k() == 0);

    auto back = canonical_query(hat);
    CHECK(equivalent(back, q));
    CHECK(is_isomorphic(canonical_structure(back), hat));

    auto unsafe = parse_structure("schema: P/1\nelements: b, c\ndistinguished: b\nP(c)\n");
    CHECK_THROWS_AS(canonical_query(unsafe), precondition_error);

    // unsafe head variables become isolated distinguished elements
    auto loose = parse_cq("schema: P/1\nq(x) :- P(y)\n", true);
    auto loose_hat = canonical_structure(loose);
    CHECK(loose_hat.domain().size() == 2);
    CHECK(! loose_hat.flags().safe);
}

TEST_CASE("evaluation")
{
    auto q = parse_cq("schema: P/1, Q/1\nq(x) :- P(x)\n");
    auto a = parse_structure("schema: P/1, Q/1\nelements: a, b\nP(a)\nQ(b)\n");
    auto result = evaluate(q, a);
    CHECK(result == std::set<std::vector<std::string>>{{"a"}});

    // the braided structure makes the 4-path query false
    auto r_hat = canonical_structure(query_r());
    PointedStructure r0(r_hat.schema(), r_hat.domain(), r_hat.facts(), {});
    CHECK(evaluate(query_t(), r0).empty());

    std::mt19937 rng(41);
    auto schema = Schema::parse("P/1, Q/1, R/2");
    for (int trial = 0; trial < 60; ++trial) {
        auto goal = random_c_acyclic_cq(schema, 3, trial % 3, rng);
        auto target = random_structure(schema, 3, 4, 0, rng);
        CHECK(evaluate(goal, target) == naive_evaluate(goal, target));
    }

    // monotonicity: adding facts never loses answers
    for (int trial = 0; trial < 40; ++trial) {
        auto goal = random_c_acyclic_cq(schema, 3, 1, rng);
        auto small = random_structure(schema, 3, 3, 0, rng);
        auto extra = random_structure(schema, 3, 3, 0, rng);
        std::vector<std::string> domain = small.domain();
        for (const auto & e : extra.domain())
            domain.push_back(e + "+");
        std::vector<Fact> facts = small.facts();
        for (auto f : extra.facts()) {
            for (auto & arg : f.args)
                arg += "+";
            facts.push_back(std::move(f));
        }
        PointedStructure big(schema, domain, facts, {});
        auto small_result = evaluate(goal, small);
        auto big_result = evaluate(goal, big);
        for (const auto & tuple : small_result)
            CHECK(big_result.count(tuple));
    }
}

TEST_CASE("containment and equivalence")
{
    auto t = query_t();
    auto r = query_r();
    CHECK(contains(t, r));       // T is contained in R
    CHECK(! contains(r, t));
    CHECK(equivalent(t, t));
    CHECK(! equivalent(t, r));

    std::mt19937 rng(43);
    auto schema = Schema::parse("P/1, R/2");
    for (int trial = 0; trial < 40; ++trial) {
        auto q1 = random_c_acyclic_cq(schema, 3, 1, rng);
        auto q2 = random_c_acyclic_cq(schema, 3, 1, rng);
        CHECK(equivalent(q1, q2)
              == hom_equivalent(canonical_structure(q1), canonical_structure(q2)));
    }
}
