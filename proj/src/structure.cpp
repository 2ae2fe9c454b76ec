#include <cqlab/structure.hpp>

#include <algorithm>
#include <numeric>

namespace cqlab
{
    namespace
    {
        struct UnionFind
        {
            std::vector<int> parent;

            explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

            int find(int x)
            {
                while (parent[x] != x)
                    x = parent[x] = parent[parent[x]];
                return x;
            }

            // returns false if x and y were already connected
            bool unite(int x, int y)
            {
                x = find(x);
                y = find(y);
                if (x == y)
                    return false;
                parent[x] = y;
                return true;
            }
        };
    }

    PointedStructure::PointedStructure(Schema schema,
                                       std::vector<std::string> domain,
                                       std::vector<Fact> facts,
                                       std::vector<std::string> dist) :
        schema_(std::move(schema)),
        domain_(std::move(domain)),
        facts_(std::move(facts)),
        dist_(std::move(dist))
    {
        std::sort(domain_.begin(), domain_.end());
        domain_.erase(std::unique(domain_.begin(), domain_.end()), domain_.end());
        std::sort(facts_.begin(), facts_.end());
        facts_.erase(std::unique(facts_.begin(), facts_.end()), facts_.end());

        for (const auto & e : domain_)
            if (! valid_token(e))
                throw error{"bad element name '" + e + "'"};

        auto id_of = [&](const std::string & name) -> int {
            auto it = std::lower_bound(domain_.begin(), domain_.end(), name);
            if (it == domain_.end() || *it != name)
                return -1;
            return int(it - domain_.begin());
        };

        idx_.n = int(domain_.size());
        idx_.element_facts.assign(idx_.n, {});
        idx_.is_dist.assign(idx_.n, 0);

        for (const auto & f : facts_) {
            const auto * rel = schema_.find(f.rel);
            if (! rel)
                throw error{"fact uses undeclared relation " + f.rel};
            if (int(f.args.size()) != rel->arity)
                throw error{"arity mismatch in " + f.to_string() + " (expected " + std::to_string(rel->arity) + ")"};
            detail::IFact g;
            g.rel = schema_.index_of(f.rel);
            for (const auto & a : f.args) {
                int id = id_of(a);
                if (id < 0)
                    throw error{"fact argument '" + a + "' not in domain"};
                g.args.push_back(id);
            }
            int fact_id = int(idx_.facts.size());
            for (int a : g.args)
                idx_.element_facts[a].push_back(fact_id);
            idx_.facts.push_back(std::move(g));
        }

        for (const auto & d : dist_) {
            int id = id_of(d);
            if (id < 0)
                throw error{"distinguished element '" + d + "' not in domain"};
            idx_.dist.push_back(id);
            idx_.is_dist[id] = 1;
        }

        // incidence multigraph: vertices 0..n-1 elements, n..n+m-1 facts
        int n = idx_.n, m = int(idx_.facts.size());
        UnionFind full(n + m), pruned(n + m);
        bool acyclic = true, c_acyclic = true;
        for (int fi = 0; fi < m; ++fi)
            for (int a : idx_.facts[fi].args) {
                if (! full.unite(a, n + fi))
                    acyclic = false;
                if (! idx_.is_dist[a] && ! pruned.unite(a, n + fi))
                    c_acyclic = false;
            }

        std::vector<char> component_has_dist(n + m, 0);
        for (int d : idx_.dist)
            component_has_dist[full.find(d)] = 1;
        bool c_connected = true;
        for (int v = 0; v < n + m; ++v)
            if (! component_has_dist[full.find(v)])
                c_connected = false;

        bool safe = true;
        for (int d : idx_.dist)
            if (idx_.element_facts[d].empty())
                safe = false;

        auto sorted_dist = idx_.dist;
        std::sort(sorted_dist.begin(), sorted_dist.end());
        bool unp = std::adjacent_find(sorted_dist.begin(), sorted_dist.end()) == sorted_dist.end();

        flags_ = StructureFlags{c_acyclic, c_connected, acyclic, safe, unp};
    }

    int PointedStructure::element_id(std::string_view name) const
    {
        auto it = std::lower_bound(domain_.begin(), domain_.end(), name);
        if (it == domain_.end() || *it != name)
            return -1;
        return int(it - domain_.begin());
    }

    bool PointedStructure::has_fact(const Fact & f) const
    {
        return std::binary_search(facts_.begin(), facts_.end(), f);
    }

    bool PointedStructure::operator==(const PointedStructure & other) const
    {
        return schema_ == other.schema_ && domain_ == other.domain_
            && facts_ == other.facts_ && dist_ == other.dist_;
    }
}
