#pragma once

// Brute-force reference implementations, kept independent of the library's
// solver paths: plain enumeration over all maps and explicit graph searches.

#include <cqlab/cq.hpp>
#include <cqlab/structure.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

namespace cqlab_test
{
    inline bool naive_is_hom(const cqlab::PointedStructure & a, const cqlab::PointedStructure & b,
                             const std::vector<int> & map)
    {
        const auto & ia = a.indexed();
        const auto & ib = b.indexed();
        for (int i = 0; i < a.k(); ++i)
            if (map[ia.dist[i]] != ib.dist[i])
                return false;
        for (const auto & f : ia.facts) {
            bool found = false;
            for (const auto & g : ib.facts) {
                if (g.rel != f.rel)
                    continue;
                bool same = true;
                for (std::size_t p = 0; p < f.args.size(); ++p)
                    if (g.args[p] != map[f.args[p]]) {
                        same = false;
                        break;
                    }
                if (same) {
                    found = true;
                    break;
                }
            }
            if (! found)
                return false;
        }
        return true;
    }

    inline long naive_hom_count(const cqlab::PointedStructure & a, const cqlab::PointedStructure & b)
    {
        int na = a.indexed().n, nb = b.indexed().n;
        if (na == 0)
            return 1;
        if (nb == 0)
            return 0;
        long count = 0;
        std::vector<int> map(na, 0);
        for (;;) {
            if (naive_is_hom(a, b, map))
                ++count;
            int i = 0;
            for (; i < na; ++i) {
                if (++map[i] < nb)
                    break;
                map[i] = 0;
            }
            if (i == na)
                break;
        }
        return count;
    }

    inline bool naive_hom_exists(const cqlab::PointedStructure & a, const cqlab::PointedStructure & b)
    {
        int na = a.indexed().n, nb = b.indexed().n;
        if (na == 0)
            return true;
        if (nb == 0)
            return false;
        std::vector<int> map(na, 0);
        for (;;) {
            if (naive_is_hom(a, b, map))
                return true;
            int i = 0;
            for (; i < na; ++i) {
                if (++map[i] < nb)
                    break;
                map[i] = 0;
            }
            if (i == na)
                break;
        }
        return false;
    }

    // direct satisfaction check: try every assignment of the query variables
    inline std::set<std::vector<std::string>> naive_evaluate(const cqlab::ConjunctiveQuery & q,
                                                             const cqlab::PointedStructure & a)
    {
        std::set<std::string> var_set(q.head_vars().begin(), q.head_vars().end());
        for (const auto & atom : q.atoms())
            var_set.insert(atom.args.begin(), atom.args.end());
        std::vector<std::string> vars(var_set.begin(), var_set.end());

        std::set<std::vector<std::string>> out;
        int n = int(a.domain().size());
        if (n == 0)
            return out;
        std::vector<int> assign(vars.size(), 0);
        for (;;) {
            std::map<std::string, std::string> env;
            for (std::size_t i = 0; i < vars.size(); ++i)
                env[vars[i]] = a.domain()[assign[i]];
            bool sat = true;
            for (const auto & atom : q.atoms()) {
                cqlab::Fact grounded;
                grounded.rel = atom.rel;
                for (const auto & v : atom.args)
                    grounded.args.push_back(env.at(v));
                if (! a.has_fact(grounded)) {
                    sat = false;
                    break;
                }
            }
            if (sat) {
                std::vector<std::string> tuple;
                for (const auto & v : q.head_vars())
                    tuple.push_back(env.at(v));
                out.insert(std::move(tuple));
            }
            std::size_t i = 0;
            for (; i < vars.size(); ++i) {
                if (++assign[i] < n)
                    break;
                assign[i] = 0;
            }
            if (i == vars.size())
                break;
        }
        return out;
    }

    // explicit incidence multigraph with edge identities
    struct NaiveIncidence
    {
        int vertices = 0;  // elements then facts
        std::vector<std::pair<int, int>> edges;

        explicit NaiveIncidence(const cqlab::PointedStructure & a)
        {
            const auto & idx = a.indexed();
            vertices = idx.n + int(idx.facts.size());
            for (std::size_t fi = 0; fi < idx.facts.size(); ++fi)
                for (int x : idx.facts[fi].args)
                    edges.emplace_back(x, idx.n + int(fi));
        }
    };

    inline bool naive_multigraph_acyclic(int vertices, const std::vector<std::pair<int, int>> & edges)
    {
        // DFS over edge ids so parallel edges register as cycles
        std::vector<std::vector<std::pair<int, int>>> adj(vertices);  // (neighbour, edge id)
        for (std::size_t e = 0; e < edges.size(); ++e) {
            adj[edges[e].first].emplace_back(edges[e].second, int(e));
            adj[edges[e].second].emplace_back(edges[e].first, int(e));
        }
        std::vector<int> state(vertices, 0);
        for (int start = 0; start < vertices; ++start) {
            if (state[start])
                continue;
            std::vector<std::tuple<int, int>> stack{{start, -1}};
            while (! stack.empty()) {
                auto [v, via] = stack.back();
                stack.pop_back();
                if (state[v]) {
                    return false;
                }
                state[v] = 1;
                for (auto [w, eid] : adj[v]) {
                    if (eid == via)
                        continue;
                    if (state[w])
                        return false;
                    stack.emplace_back(w, eid);
                }
            }
        }
        return true;
    }

    inline cqlab::StructureFlags naive_classify(const cqlab::PointedStructure & a)
    {
        const auto & idx = a.indexed();
        NaiveIncidence inc(a);

        cqlab::StructureFlags flags;
        flags.acyclic = naive_multigraph_acyclic(inc.vertices, inc.edges);

        // delete designated-element vertices
        std::vector<std::pair<int, int>> pruned;
        for (auto [u, v] : inc.edges)
            if (! idx.is_dist[u])
                pruned.emplace_back(u, v);
        flags.c_acyclic = naive_multigraph_acyclic(inc.vertices, pruned);

        // connectivity
        std::vector<std::vector<int>> adj(inc.vertices);
        for (auto [u, v] : inc.edges) {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        std::vector<int> comp(inc.vertices, -1);
        int ncomp = 0;
        for (int s = 0; s < inc.vertices; ++s) {
            if (comp[s] != -1)
                continue;
            comp[s] = ncomp;
            std::vector<int> q{s};
            while (! q.empty()) {
                int v = q.back();
                q.pop_back();
                for (int w : adj[v])
                    if (comp[w] == -1) {
                        comp[w] = ncomp;
                        q.push_back(w);
                    }
            }
            ++ncomp;
        }
        std::vector<char> has_dist(ncomp, 0);
        for (int d : idx.dist)
            has_dist[comp[d]] = 1;
        flags.c_connected = true;
        for (int v = 0; v < inc.vertices; ++v)
            if (! has_dist[comp[v]])
                flags.c_connected = false;

        flags.safe = true;
        for (int d : idx.dist)
            if (idx.element_facts[d].empty())
                flags.safe = false;

        flags.unp = true;
        for (std::size_t i = 0; i < idx.dist.size(); ++i)
            for (std::size_t j = i + 1; j < idx.dist.size(); ++j)
                if (idx.dist[i] == idx.dist[j])
                    flags.unp = false;

        return flags;
    }
}
