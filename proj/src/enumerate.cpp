#include <cqlab/enumerate.hpp>

#include <algorithm>
#include <map>
#include <mutex>
#include <set>

namespace cqlab
{
    namespace detail
    {
        FactTable::FactTable(const Schema & s, int n_) :
            schema(s), n(n_)
        {
            for (std::size_t ri = 0; ri < s.relations().size(); ++ri) {
                const auto & rel = s.relations()[ri];
                std::vector<int> args(rel.arity, 0);
                if (n == 0)
                    continue;
                for (;;) {
                    IFact f;
                    f.rel = int(ri);
                    f.args = args;
                    facts.push_back(std::move(f));
                    int i = rel.arity - 1;
                    for (; i >= 0; --i) {
                        if (++args[i] < n)
                            break;
                        args[i] = 0;
                    }
                    if (i < 0)
                        break;
                }
            }
            if (facts.size() > 64)
                throw size_limit_error{"too many possible facts for mask enumeration ("
                                       + std::to_string(facts.size()) + " > 64)"};
        }

        namespace
        {
            int fact_bit(const FactTable & table, int rel, const std::vector<int> & args)
            {
                for (std::size_t b = 0; b < table.facts.size(); ++b)
                    if (table.facts[b].rel == rel && table.facts[b].args == args)
                        return int(b);
                return -1;
            }

            // bit -> bit map for one permutation of the elements
            std::vector<int> permuted_bits(const FactTable & table, const std::vector<int> & perm)
            {
                std::vector<int> out(table.facts.size());
                for (std::size_t b = 0; b < table.facts.size(); ++b) {
                    auto args = table.facts[b].args;
                    for (auto & a : args)
                        a = perm[a];
                    out[b] = fact_bit(table, table.facts[b].rel, args);
                }
                return out;
            }

            struct PermTable
            {
                std::vector<std::vector<int>> perms;      // element permutations
                std::vector<std::vector<int>> bit_maps;   // matching fact-bit permutations
            };

            PermTable make_perm_table(const FactTable & table)
            {
                PermTable out;
                std::vector<int> perm(table.n);
                for (int i = 0; i < table.n; ++i)
                    perm[i] = i;
                do {
                    out.perms.push_back(perm);
                    out.bit_maps.push_back(permuted_bits(table, perm));
                } while (std::next_permutation(perm.begin(), perm.end()));
                return out;
            }

            std::uint64_t apply_bits(std::uint64_t mask, const std::vector<int> & bit_map)
            {
                std::uint64_t out = 0;
                while (mask) {
                    int b = __builtin_ctzll(mask);
                    mask &= mask - 1;
                    out |= std::uint64_t(1) << bit_map[b];
                }
                return out;
            }

            bool canonical(const FactTable & table, const PermTable & perms,
                           const std::vector<int> & dist, std::uint64_t mask)
            {
                for (std::size_t p = 0; p < perms.perms.size(); ++p) {
                    const auto & perm = perms.perms[p];
                    std::vector<int> d2(dist.size());
                    for (std::size_t i = 0; i < dist.size(); ++i)
                        d2[i] = perm[dist[i]];
                    if (d2 < dist)
                        return false;
                    if (d2 == dist && apply_bits(mask, perms.bit_maps[p]) < mask)
                        return false;
                }
                return true;
            }

            std::uint64_t used_elements(const FactTable & table, std::uint64_t mask)
            {
                std::uint64_t used = 0;
                while (mask) {
                    int b = __builtin_ctzll(mask);
                    mask &= mask - 1;
                    for (int a : table.facts[b].args)
                        used |= std::uint64_t(1) << a;
                }
                return used;
            }

            struct PoolKey
            {
                std::string schema;
                int k;
                int max_elems;

                auto operator<=>(const PoolKey &) const = default;
            };

            std::map<PoolKey, std::vector<Candidate>> pool_cache;
            std::mutex pool_mutex;

            std::vector<Candidate> build_pool(const Schema & schema, int k, int max_elems)
            {
                if (k > 2)
                    throw size_limit_error{"candidate enumeration supports k <= 2"};
                std::vector<Candidate> pool;

                for (int n_used = 0; n_used <= max_elems; ++n_used) {
                    FactTable table(schema, n_used);
                    auto perms = make_perm_table(table);
                    std::uint64_t all_used = n_used == 64 ? ~0ull : (1ull << n_used) - 1;

                    std::vector<std::vector<int>> dists;
                    if (k == 0)
                        dists.push_back({});
                    else {
                        std::vector<int> d(k, 0);
                        if (n_used == 0)
                            d.clear();
                        else
                            for (;;) {
                                dists.push_back(d);
                                int i = k - 1;
                                for (; i >= 0; --i) {
                                    if (++d[i] < n_used)
                                        break;
                                    d[i] = 0;
                                }
                                if (i < 0)
                                    break;
                            }
                        if (n_used == 0)
                            continue;  // k >= 1 needs a nonempty domain
                    }

                    std::uint64_t top_mask = table.facts.empty() ? 0 : (~0ull >> (64 - table.facts.size()));
                    for (const auto & dist : dists) {
                        std::uint64_t dist_used = 0;
                        for (int d : dist)
                            dist_used |= std::uint64_t(1) << d;
                        for (std::uint64_t mask = 0;; ++mask) {
                            if ((used_elements(table, mask) | dist_used) == all_used
                                && canonical(table, perms, dist, mask)) {
                                Candidate c;
                                c.n = std::uint8_t(n_used);
                                c.nu = std::uint8_t(n_used);
                                c.dist[0] = dist.size() > 0 ? std::int8_t(dist[0]) : -1;
                                c.dist[1] = dist.size() > 1 ? std::int8_t(dist[1]) : -1;
                                c.mask = mask;
                                for (std::uint64_t rest = mask; rest;) {
                                    int b = __builtin_ctzll(rest);
                                    rest &= rest - 1;
                                    c.rels |= std::uint8_t(1u << table.facts[b].rel);
                                }
                                pool.push_back(c);
                                if (n_used + 1 <= max_elems) {
                                    // same structure plus one fact-free element
                                    Candidate j = c;
                                    j.n = std::uint8_t(n_used + 1);
                                    pool.push_back(j);
                                }
                            }
                            if (mask == top_mask)
                                break;
                        }
                    }
                }

                std::stable_sort(pool.begin(), pool.end(), [](const Candidate & a, const Candidate & b) {
                    if (a.n != b.n)
                        return a.n < b.n;
                    if (a.dist[0] != b.dist[0])
                        return a.dist[0] < b.dist[0];
                    if (a.dist[1] != b.dist[1])
                        return a.dist[1] < b.dist[1];
                    return a.mask < b.mask;
                });
                return pool;
            }
        }

        const std::vector<Candidate> & candidate_pool(const Schema & schema, int k, int max_elems)
        {
            PoolKey key{schema.to_string(), k, max_elems};
            std::lock_guard<std::mutex> lock(pool_mutex);
            auto it = pool_cache.find(key);
            if (it == pool_cache.end())
                it = pool_cache.emplace(key, build_pool(schema, k, max_elems)).first;
            return it->second;
        }

        PointedStructure materialize(const Schema & schema, const Candidate & c)
        {
            FactTable table(schema, c.nu);
            std::vector<std::string> domain;
            for (int i = 0; i < c.n; ++i)
                domain.push_back("e" + std::to_string(i));
            std::vector<Fact> facts;
            std::uint64_t mask = c.mask;
            while (mask) {
                int b = __builtin_ctzll(mask);
                mask &= mask - 1;
                const auto & f = table.facts[b];
                Fact g;
                g.rel = schema.relations()[f.rel].name;
                for (int a : f.args)
                    g.args.push_back(domain[a]);
                facts.push_back(std::move(g));
            }
            std::vector<std::string> dist;
            if (c.dist[0] >= 0)
                dist.push_back(domain[c.dist[0]]);
            if (c.dist[1] >= 0)
                dist.push_back(domain[c.dist[1]]);
            return PointedStructure(schema, std::move(domain), std::move(facts), std::move(dist));
        }

        bool candidate_in_class(const Schema & schema, const Candidate & c, CandidateClass cls)
        {
            if (cls == CandidateClass::all)
                return true;
            auto s = materialize(schema, c);
            if (cls == CandidateClass::safe)
                return s.flags().safe;
            return s.k() == 1 && s.flags().c_connected && s.flags().acyclic;
        }
    }

    namespace
    {
        // connected acyclic k=1 structures over an all-binary schema are exactly
        // trees with one oriented labelled fact per edge; enumerate those directly
        void enumerate_trees(const EnumSpec & spec,
                             const std::function<bool(const PointedStructure &)> & visit)
        {
            int rel_count = int(spec.schema.relations().size());
            for (int n = 1; n <= spec.max_elems; ++n) {
                std::vector<std::string> domain;
                for (int i = 0; i < n; ++i)
                    domain.push_back("e" + std::to_string(i));

                // all trees on n labelled nodes via parent arrays with parent < child
                // (counts each unordered tree once per labelling; dedup by encoding)
                std::set<std::string> seen;
                std::vector<int> parent(n, -1);
                std::function<bool(int)> rec = [&](int v) -> bool {
                    if (v == n) {
                        // edges: (parent[v], v) for v >= 1; choose labels and orientations
                        int edges = n - 1;
                        std::vector<int> choice(edges, 0);  // rel * 2 + direction
                        for (;;) {
                            std::vector<Fact> facts;
                            for (int e = 1; e <= edges; ++e) {
                                int ch = choice[e - 1];
                                int rel = ch / 2;
                                bool fwd = ch % 2 == 0;
                                const auto & rname = spec.schema.relations()[rel].name;
                                int u = parent[e], w = e;
                                facts.push_back(Fact{rname, fwd
                                        ? std::vector<std::string>{domain[u], domain[w]}
                                        : std::vector<std::string>{domain[w], domain[u]}});
                            }
                            PointedStructure s(spec.schema, domain, facts, {domain[0]});
                            auto canon = rename_canonical(s);
                            // cheap iso dedup: minimum encoding over all relabelings
                            // that keep the distinguished element first
                            std::string key;
                            {
                                std::vector<int> perm(n);
                                for (int i = 0; i < n; ++i)
                                    perm[i] = i;
                                std::string best;
                                do {
                                    if (perm[0] != 0)
                                        continue;
                                    std::vector<Fact> pf;
                                    for (const auto & f : facts) {
                                        Fact g;
                                        g.rel = f.rel;
                                        for (const auto & a : f.args) {
                                            int id = int(a[1] - '0');
                                            g.args.push_back(domain[perm[id]]);
                                        }
                                        pf.push_back(std::move(g));
                                    }
                                    std::sort(pf.begin(), pf.end());
                                    std::string enc;
                                    for (const auto & f : pf)
                                        enc += f.to_string() + ";";
                                    if (best.empty() || enc < best)
                                        best = enc;
                                } while (std::next_permutation(perm.begin(), perm.end()));
                                key = best;
                            }
                            if (seen.insert(key).second)
                                if (! visit(canon))
                                    return false;
                            int i = edges - 1;
                            for (; i >= 0; --i) {
                                if (++choice[i] < rel_count * 2)
                                    break;
                                choice[i] = 0;
                            }
                            if (i < 0 || edges == 0)
                                break;
                        }
                        return true;
                    }
                    for (int p = 0; p < v; ++p) {
                        parent[v] = p;
                        if (! rec(v + 1))
                            return false;
                        parent[v] = -1;
                    }
                    return true;
                };
                if (! rec(1))
                    return;
            }
        }
    }

    void enumerate_structures(const EnumSpec & spec,
                              const std::function<bool(const PointedStructure &)> & visit)
    {
        if (spec.cls == CandidateClass::connected_acyclic_k1 && spec.schema.all_binary()
            && spec.k == 1) {
            enumerate_trees(spec, visit);
            return;
        }
        const auto & pool = detail::candidate_pool(spec.schema, spec.k, spec.max_elems);
        for (const auto & c : pool) {
            if (! detail::candidate_in_class(spec.schema, c, spec.cls))
                continue;
            if (! visit(detail::materialize(spec.schema, c)))
                return;
        }
    }
}
