#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cqlab/hom.hpp>
#include <cqlab/io.hpp>
#include <cqlab/structure.hpp>

#include "support/fixtures.hpp"
#include "support/gen.hpp"
#include "support/naive.hpp"

using namespace cqlab;
using namespace cqlab_test;

TEST_CASE("structure codec round trips")
{
    auto a = a_pq();
    CHECK(a.domain() == std::vector<std::string>{"a"});
    CHECK(a.facts().size() == 2);
    CHECK(a.dist() == std::vector<std::string>{"a"});

    auto text = encode_structure(a);
    CHECK(encode_structure(parse_structure(text)) == text);

    auto b = parse_structure(
        "# a comment\n"
        "schema: R/2, P/1\n"
        "elements: b, a\n"
        "P(a)  # trailing comment\n"
        "R(a,b)\n");
    CHECK(b.k() == 0);
    CHECK(b.domain() == std::vector<std::string>{"a", "b"});
    CHECK(encode_structure(parse_structure(encode_structure(b))) == encode_structure(b));
}

TEST_CASE("structure codec diagnostics carry line numbers")
{
    CHECK_THROWS_WITH_AS(parse_structure("schema: R/1\nelements: a, b\nR(a,b)\n"),
                         doctest::Contains("arity mismatch"), parse_error);
    CHECK_THROWS_WITH_AS(parse_structure("schema: R/1\nelements: a\nS(a)\n"),
                         doctest::Contains("undeclared relation"), parse_error);
    CHECK_THROWS_WITH_AS(parse_structure("schema: R/1\nelements: a\ndistinguished: c\n"),
                         doctest::Contains("distinguished element"), parse_error);
    try {
        parse_structure("schema: R/2\nelements: a\nR(a,a)\nR(a)\n");
        CHECK(false);
    }
    catch (const parse_error & e) {
        CHECK(e.line == 4);
    }
}

TEST_CASE("direct product")
{
    auto a = a_pq();
    auto p = direct_product(a, a);
    CHECK(p.domain().size() == 1);
    CHECK(p.facts().size() == 2);
    CHECK(is_isomorphic(p, a));

    // ({P(a)},(a)) x ({Q(a),P(b),Q(b)},(a)): one P fact on a non-dist pair
    auto left = parse_structure("schema: P/1, Q/1\nelements: a\ndistinguished: a\nP(a)\n");
    auto right = parse_structure(
        "schema: P/1, Q/1\nelements: a, b\ndistinguished: a\nQ(a)\nP(b)\nQ(b)\n");
    auto prod = direct_product(left, right);
    CHECK(prod.domain().size() == 2);
    REQUIRE(prod.facts().size() == 1);
    CHECK(prod.facts()[0].rel == "P");
    CHECK(prod.facts()[0].args[0] != prod.dist()[0]);

    // product with a fact-free structure has no facts
    auto empty = parse_structure("schema: P/1, Q/1\nelements: e\ndistinguished: e\n");
    CHECK(direct_product(a, empty).facts().empty());

    // projections are homomorphisms, and C -> A x B iff C -> A and C -> B
    auto b = right;
    auto ab = direct_product(a, b);
    CHECK(find_homomorphism(ab, a));
    CHECK(find_homomorphism(ab, b));

    std::mt19937 rng(7);
    auto schema = Schema::parse("P/1, Q/1");
    for (int trial = 0; trial < 40; ++trial) {
        auto c = random_structure(schema, 3, 4, 1, rng);
        bool direct = naive_hom_exists(c, ab);
        bool split = naive_hom_exists(c, a) && naive_hom_exists(c, b);
        CHECK(direct == split);
    }
}

TEST_CASE("fg-disjoint union")
{
    auto p = parse_structure("schema: P/1, Q/1\nelements: a\ndistinguished: a\nP(a)\n");
    auto q = parse_structure("schema: P/1, Q/1\nelements: a\ndistinguished: a\nQ(a)\n");
    CHECK(is_isomorphic(fg_disjoint_union(p, q), a_pq()));

    // gluing two copies of a structure with non-dist elements keeps them apart
    auto x = parse_structure("schema: R/2\nelements: a, u\ndistinguished: a\nR(a,u)\n");
    auto xx = fg_disjoint_union(x, x);
    CHECK(xx.domain().size() == 3);
    CHECK(xx.facts().size() == 2);

    // identity types must match
    auto same = parse_structure("schema: R/2\nelements: a\ndistinguished: a, a\nR(a,a)\n");
    auto diff = parse_structure("schema: R/2\nelements: a, b\ndistinguished: a, b\nR(a,b)\n");
    CHECK_THROWS_AS(fg_disjoint_union(same, diff), precondition_error);
}

TEST_CASE("fg components and recomposition")
{
    auto a = a_pq();
    auto comps = fg_components(a);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].facts().size() == 1);
    CHECK(comps[1].facts().size() == 1);

    auto chain = parse_structure(
        "schema: R/2\nelements: a, u, v, w\ndistinguished: a\nR(a,u)\nR(u,v)\nR(v,w)\n");
    CHECK(fg_components(chain).size() == 1);

    // facts sharing only designated elements stay in separate components
    auto c_conn = parse_structure(
        "schema: R/2, S/2\nelements: a, b\ndistinguished: a, b\nR(a,b)\nS(b,a)\n");
    CHECK(fg_components(c_conn).size() == 2);
    CHECK(c_conn.flags().c_connected);

    std::mt19937 rng(11);
    auto schema = Schema::parse("P/1, R/2");
    for (int trial = 0; trial < 50; ++trial) {
        auto s = random_structure(schema, 4, 5, 1, rng);
        auto parts = fg_components(s);
        if (parts.empty())
            continue;
        auto rebuilt = fg_disjoint_union(s.schema(), s.dist(), parts);
        CHECK(hom_equivalent(rebuilt, drop_isolated(s)));
    }
}

TEST_CASE("classify")
{
    auto loop = parse_structure("schema: R/2\nelements: x\nR(x,x)\n");
    CHECK(! loop.flags().c_acyclic);
    CHECK(! loop.flags().acyclic);

    // a cycle through the designated element is c-acyclic but not acyclic
    auto cyc = parse_structure(
        "schema: R/2\nelements: a, y, z\ndistinguished: a\nR(a,y)\nR(y,z)\nR(z,a)\n");
    CHECK(cyc.flags().c_acyclic);
    CHECK(! cyc.flags().acyclic);

    auto path = parse_structure("schema: R/2\nelements: x, y, z\nR(x,y)\nR(y,z)\n");
    CHECK(path.flags().acyclic);

    auto unsafe = parse_structure("schema: P/1\nelements: a, b\ndistinguished: a\nP(b)\n");
    CHECK(! unsafe.flags().safe);
    CHECK(unsafe.flags().c_acyclic);

    auto repeated = parse_structure("schema: P/1\nelements: a\ndistinguished: a, a\nP(a)\n");
    CHECK(! repeated.flags().unp);

    std::mt19937 rng(13);
    auto schema = Schema::parse("P/1, R/2");
    for (int trial = 0; trial < 300; ++trial) {
        auto s = random_structure(schema, 4, 6, trial % 3, rng);
        auto expect = naive_classify(s);
        auto got = s.flags();
        CHECK(got.acyclic == expect.acyclic);
        CHECK(got.c_acyclic == expect.c_acyclic);
        CHECK(got.c_connected == expect.c_connected);
        CHECK(got.safe == expect.safe);
        CHECK(got.unp == expect.unp);
        if (got.acyclic)
            CHECK(got.c_acyclic);
    }
}

TEST_CASE("reach")
{
    auto a = a_pq();
    CHECK(reach(a) == a);

    auto junky = parse_structure(
        "schema: P/1, Q/1\nelements: a, z\ndistinguished: a\nP(a)\nQ(a)\nP(z)\n");
    CHECK(is_isomorphic(reach(junky), a));

    CHECK_THROWS_AS(reach(parse_structure("schema: P/1\nelements: a\nP(a)\n")), precondition_error);

    std::mt19937 rng(17);
    auto schema = Schema::parse("P/1, R/2");
    for (int trial = 0; trial < 80; ++trial) {
        auto target = random_structure(schema, 4, 5, 1, rng);
        auto x = random_structure(schema, 3, 4, 1, rng);
        if (! x.flags().c_connected)
            continue;
        CHECK(naive_hom_exists(x, target) == naive_hom_exists(x, reach(target)));
    }
}

TEST_CASE("exponentiation")
{
    auto schema = Schema::parse("R/2");
    auto b = parse_structure("schema: R/2\nelements: p, q\nR(p,q)\n");
    auto single = parse_structure("schema: R/2\nelements: c\nR(c,c)\n");
    CHECK(exponentiate(b, single).domain().size() == b.domain().size());

    // no facts in the base, at least one fact per relation in the exponent
    auto no_facts = parse_structure("schema: R/2\nelements: p, q\n");
    CHECK(exponentiate(no_facts, single).facts().empty());

    // adjunction: D -> B^C iff D x C -> B
    std::mt19937 rng(19);
    for (int trial = 0; trial < 60; ++trial) {
        auto bb = random_structure(schema, 2, 3, 0, rng);
        auto cc = random_structure(schema, 2, 3, 0, rng);
        auto dd = random_structure(schema, 3, 4, 0, rng);
        auto power = exponentiate(bb, cc);
        CHECK(naive_hom_exists(dd, power) == naive_hom_exists(direct_product(dd, cc), bb));
    }

    Limits tiny;
    tiny.max_exponential_domain = 4;
    auto big = parse_structure("schema: R/2\nelements: p, q, r\n");
    CHECK_THROWS_AS(exponentiate(big, big, tiny), size_limit_error);
}

TEST_CASE("binary encoding")
{
    auto a = parse_structure("schema: T/3\nelements: a, b, c\nT(a,b,c)\n");
    auto star = binary_encode(a);
    CHECK(star.domain().size() == 4);
    CHECK(star.facts().size() == 3);
    CHECK(star.schema().all_binary());

    std::mt19937 rng(23);
    auto schema = Schema::parse("P/1, R/2");
    for (int trial = 0; trial < 120; ++trial) {
        auto x = random_structure(schema, 4, 5, 1, rng);
        auto y = random_structure(schema, 4, 5, 1, rng);
        // items 3, 2 and 1 of the reduction lemma
        CHECK(naive_hom_exists(x, y) == naive_hom_exists(binary_encode(x), binary_encode(y)));
        auto ystar = binary_encode(y);
        CHECK(naive_hom_exists(x, binary_decode(ystar, schema))
              == naive_hom_exists(binary_encode(x), ystar));
        auto any = random_structure(binary_schema(schema), 4, 5, 1, rng);
        if (naive_hom_exists(any, binary_encode(y)))
            CHECK(naive_hom_exists(binary_decode(any, schema), y));
        if (any.flags().acyclic)
            CHECK(binary_decode(any, schema).flags().acyclic);
    }

    // encode of a c-acyclic core stays c-acyclic and core
    auto chain = parse_structure(
        "schema: R/2\nelements: a, u, v\ndistinguished: a\nR(a,u)\nR(u,v)\n");
    auto encoded = binary_encode(chain);
    CHECK(encoded.flags().c_acyclic);
    CHECK(compute_core(encoded).core.domain().size() == encoded.domain().size());

    // decode(encode(A)) keeps A's facts and is hom-equivalent after cleanup
    auto back = binary_decode(binary_encode(chain), chain.schema());
    for (const auto & f : chain.facts())
        CHECK(back.has_fact(f));
    CHECK(hom_equivalent(reach(back), chain));
}

TEST_CASE("unsafe dual family")
{
    auto schema = Schema::parse("P/1, Q/1");
    auto family = unsafe_dual_family(schema, 1);
    REQUIRE(family.size() == 1);
    CHECK(family[0].facts().size() == 2);
    CHECK(family[0].dist() == std::vector<std::string>{"b"});

    CHECK(unsafe_dual_family(schema, 3).size() == 7);
    CHECK_THROWS_AS(unsafe_dual_family(schema, 0), precondition_error);

    // a structure is unsafe iff it maps into the family
    std::mt19937 rng(29);
    auto s2 = Schema::parse("P/1, R/2");
    auto fam2 = unsafe_dual_family(s2, 2);
    for (int trial = 0; trial < 120; ++trial) {
        auto s = random_structure(s2, 3, 4, 2, rng);
        bool maps = std::any_of(fam2.begin(), fam2.end(), [&](const PointedStructure & u) {
            return naive_hom_exists(s, u);
        });
        CHECK(maps == ! s.flags().safe);
    }
}
