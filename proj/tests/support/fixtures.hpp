#pragma once

#include <cqlab/io.hpp>

namespace cqlab_test
{
    // P(a) and Q(a) on a single distinguished element
    inline cqlab::PointedStructure a_pq()
    {
        return cqlab::parse_structure(
            "schema: P/1, Q/1\n"
            "elements: a\n"
            "distinguished: a\n"
            "P(a)\n"
            "Q(a)\n");
    }

    // Boolean 4-edge path query
    inline cqlab::ConjunctiveQuery query_t()
    {
        return cqlab::parse_cq(
            "schema: R/2\n"
            "q() :- R(y1,y2), R(y2,y3), R(y3,y4), R(y4,y5)\n");
    }

    // unary disconnected variant
    inline cqlab::ConjunctiveQuery query_t_prime()
    {
        return cqlab::parse_cq(
            "schema: P/1, R/2\n"
            "q(x) :- P(x), R(y1,y2), R(y2,y3), R(y3,y4), R(y4,y5)\n");
    }

    // unary c-acyclic c-connected variant with an apex
    inline cqlab::ConjunctiveQuery query_t_double_prime()
    {
        return cqlab::parse_cq(
            "schema: R/2\n"
            "q(x) :- R(y1,y2), R(y2,y3), R(y3,y4), R(y4,y5), "
            "R(x,y1), R(x,y2), R(x,y3), R(x,y4), R(x,y5)\n");
    }

    // the braided structure with no directed path of length 4 (n = 4 columns)
    inline cqlab::ConjunctiveQuery query_r()
    {
        std::string atoms;
        auto z = [](int i, int j) { return "z" + std::to_string(i) + "_" + std::to_string(j); };
        auto edge = [&](const std::string & a, const std::string & b) {
            if (! atoms.empty())
                atoms += ", ";
            atoms += "R(" + a + "," + b + ")";
        };
        int n = 4;
        for (int i = 1; i <= n; i += 2)
            for (int j = 1; j <= 3; ++j)
                edge(z(i, j), z(i, j + 1));
        for (int i = 2; i <= n; i += 2)
            for (int j = 2; j <= 4; ++j)
                edge(z(i, j), z(i, j + 1));
        for (int i = 2; i <= n; i += 2) {
            edge(z(i, 3), z(i - 1, 4));
            if (i + 1 <= n)
                edge(z(i, 2), z(i + 1, 3));
        }
        return cqlab::parse_cq("schema: R/2\nq() :- " + atoms + "\n");
    }

    inline cqlab::PointedStructure path2()
    {
        return cqlab::parse_structure(
            "schema: R/2\n"
            "elements: a, u, v\n"
            "distinguished: a\n"
            "R(a,u)\n"
            "R(u,v)\n");
    }
}
