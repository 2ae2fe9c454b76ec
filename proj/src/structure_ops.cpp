#include <cqlab/structure.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

namespace cqlab
{
    namespace
    {
        void require_same_schema(const PointedStructure & a, const PointedStructure & b)
        {
            if (! (a.schema() == b.schema()))
                throw precondition_error{"schema mismatch"};
        }

        void require_same_k(const PointedStructure & a, const PointedStructure & b)
        {
            if (a.k() != b.k())
                throw precondition_error{"distinguished tuple length mismatch"};
        }

        std::string fresh_name(std::string base, const std::set<std::string> & taken)
        {
            while (taken.count(base))
                base += "'";
            return base;
        }

        struct FactUF
        {
            std::vector<int> parent;

            explicit FactUF(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

            int find(int x)
            {
                while (parent[x] != x)
                    x = parent[x] = parent[parent[x]];
                return x;
            }

            void unite(int x, int y) { parent[find(x)] = find(y); }
        };
    }

    PointedStructure direct_product(const PointedStructure & a, const PointedStructure & b)
    {
        require_same_schema(a, b);
        require_same_k(a, b);

        auto pair_name = [](const std::string & x, const std::string & y) {
            return "<" + x + "|" + y + ">";
        };

        std::vector<std::string> domain;
        for (const auto & x : a.domain())
            for (const auto & y : b.domain())
                domain.push_back(pair_name(x, y));

        std::vector<Fact> facts;
        for (const auto & fa : a.facts())
            for (const auto & fb : b.facts()) {
                if (fa.rel != fb.rel)
                    continue;
                Fact f;
                f.rel = fa.rel;
                for (std::size_t i = 0; i < fa.args.size(); ++i)
                    f.args.push_back(pair_name(fa.args[i], fb.args[i]));
                facts.push_back(std::move(f));
            }

        std::vector<std::string> dist;
        for (int i = 0; i < a.k(); ++i)
            dist.push_back(pair_name(a.dist()[i], b.dist()[i]));

        return PointedStructure(a.schema(), std::move(domain), std::move(facts), std::move(dist));
    }

    PointedStructure fg_disjoint_union(const PointedStructure & a, const PointedStructure & b)
    {
        return fg_disjoint_union(a.schema(), a.dist(), {a, b});
    }

    PointedStructure fg_disjoint_union(const Schema & schema,
                                       const std::vector<std::string> & dist,
                                       const std::vector<PointedStructure> & parts)
    {
        int k = int(dist.size());
        std::set<std::string> taken(dist.begin(), dist.end());
        std::vector<std::string> domain(dist.begin(), dist.end());
        std::vector<Fact> facts;

        for (const auto & p : parts) {
            if (! (p.schema() == schema))
                throw precondition_error{"schema mismatch"};
            if (p.k() != k)
                throw precondition_error{"distinguished tuple length mismatch"};
            for (int i = 0; i < k; ++i)
                for (int j = i + 1; j < k; ++j)
                    if ((p.dist()[i] == p.dist()[j]) != (dist[i] == dist[j]))
                        throw precondition_error{"distinguished tuples have different identity types"};

            std::map<std::string, std::string> rename;
            for (int i = 0; i < k; ++i)
                rename[p.dist()[i]] = dist[i];
            for (const auto & x : p.domain()) {
                if (rename.count(x))
                    continue;
                auto nm = fresh_name(x, taken);
                taken.insert(nm);
                rename[x] = nm;
                domain.push_back(nm);
            }
            for (const auto & f : p.facts()) {
                Fact g;
                g.rel = f.rel;
                for (const auto & x : f.args)
                    g.args.push_back(rename.at(x));
                facts.push_back(std::move(g));
            }
        }

        return PointedStructure(schema, std::move(domain), std::move(facts), dist);
    }

    std::vector<PointedStructure> fg_components(const PointedStructure & a)
    {
        const auto & idx = a.indexed();
        int m = int(idx.facts.size());
        FactUF uf(m);
        for (int e = 0; e < idx.n; ++e) {
            if (idx.is_dist[e])
                continue;
            const auto & fs = idx.element_facts[e];
            for (std::size_t i = 1; i < fs.size(); ++i)
                uf.unite(fs[0], fs[i]);
        }

        std::map<int, std::vector<int>> groups;  // root -> fact ids, ordered
        for (int f = 0; f < m; ++f)
            groups[uf.find(f)].push_back(f);

        std::vector<std::vector<int>> ordered;
        for (auto & [root, fs] : groups)
            ordered.push_back(std::move(fs));
        std::sort(ordered.begin(), ordered.end(),
                  [](const auto & x, const auto & y) { return x.front() < y.front(); });

        std::vector<PointedStructure> out;
        for (const auto & fs : ordered) {
            std::set<std::string> elems(a.dist().begin(), a.dist().end());
            std::vector<Fact> facts;
            for (int f : fs) {
                facts.push_back(a.facts()[f]);
                for (const auto & x : facts.back().args)
                    elems.insert(x);
            }
            out.emplace_back(a.schema(),
                             std::vector<std::string>(elems.begin(), elems.end()),
                             std::move(facts), a.dist());
        }
        return out;
    }

    PointedStructure reach(const PointedStructure & a)
    {
        if (a.k() < 1)
            throw precondition_error{"reach requires at least one distinguished element"};

        const auto & idx = a.indexed();
        std::vector<char> elem_seen(idx.n, 0), fact_seen(idx.facts.size(), 0);
        std::vector<int> queue;
        for (int d : idx.dist)
            if (! elem_seen[d]) {
                elem_seen[d] = 1;
                queue.push_back(d);
            }
        while (! queue.empty()) {
            int e = queue.back();
            queue.pop_back();
            for (int f : idx.element_facts[e]) {
                if (fact_seen[f])
                    continue;
                fact_seen[f] = 1;
                for (int x : idx.facts[f].args)
                    if (! elem_seen[x]) {
                        elem_seen[x] = 1;
                        queue.push_back(x);
                    }
            }
        }

        std::vector<std::string> domain;
        for (int e = 0; e < idx.n; ++e)
            if (elem_seen[e])
                domain.push_back(a.domain()[e]);
        std::vector<Fact> facts;
        for (std::size_t f = 0; f < idx.facts.size(); ++f)
            if (fact_seen[f])
                facts.push_back(a.facts()[f]);

        return PointedStructure(a.schema(), std::move(domain), std::move(facts), a.dist());
    }

    PointedStructure exponentiate(const PointedStructure & b, const PointedStructure & c,
                                  const Limits & limits)
    {
        return detail::exponentiate_table(b, c, limits).power;
    }

    detail::PowerResult detail::exponentiate_table(const PointedStructure & b, const PointedStructure & c,
                                                   const Limits & limits)
    {
        require_same_schema(b, c);
        if (b.k() != 0 || c.k() != 0)
            throw precondition_error{"exponentiation is defined on structures without distinguished elements"};

        std::size_t nb = b.domain().size(), nc = c.domain().size();
        double count = nc == 0 ? 1.0 : std::pow(double(nb), double(nc));
        if (count > double(limits.max_exponential_domain))
            throw size_limit_error{"exponential domain would have ~" + std::to_string(count) +
                                   " elements (cap " + std::to_string(limits.max_exponential_domain) + ")"};

        // functions dom(C) -> dom(B), as vectors of b-indices following sorted dom(C)
        std::size_t total = std::size_t(count);
        auto function_name = [&](const std::vector<int> & f) {
            std::string nm = "{";
            for (std::size_t i = 0; i < nc; ++i) {
                if (i)
                    nm += ";";
                nm += c.domain()[i] + "=" + b.domain()[f[i]];
            }
            return nm + "}";
        };

        std::vector<std::vector<int>> funcs;
        funcs.reserve(total);
        std::vector<int> cur(nc, 0);
        if (nb == 0 && nc > 0) {
            // no functions
        }
        else {
            for (;;) {
                funcs.push_back(cur);
                std::size_t i = 0;
                for (; i < nc; ++i) {
                    if (++cur[i] < int(nb))
                        break;
                    cur[i] = 0;
                }
                if (i == nc)
                    break;
                if (funcs.size() > total)
                    break;
            }
        }

        std::vector<std::string> domain;
        domain.reserve(funcs.size());
        for (const auto & f : funcs)
            domain.push_back(function_name(f));

        // fact lookup on b, packed for speed (domain and arity are small here)
        auto pack = [](int rel, const int * args, int arity) {
            std::uint64_t key = std::uint64_t(rel);
            for (int i = 0; i < arity; ++i)
                key = key * 1000003u + std::uint64_t(args[i]) + 1;
            return key;
        };
        std::unordered_set<std::uint64_t> b_facts;
        for (const auto & f : b.indexed().facts)
            b_facts.insert(pack(f.rel, f.args.data(), int(f.args.size())));

        // group c facts per relation index
        std::map<int, std::vector<const detail::IFact *>> c_by_rel;
        for (const auto & f : c.indexed().facts)
            c_by_rel[f.rel].push_back(&f);

        double work = 0;
        for (const auto & rel : b.schema().relations()) {
            int ri = b.schema().index_of(rel.name);
            double tuples = std::pow(double(funcs.size()), double(rel.arity));
            work += tuples * double(c_by_rel.count(ri) ? c_by_rel[ri].size() : 1);
        }
        if (work > double(limits.max_exponential_work))
            throw size_limit_error{"exponential fact enumeration too large"};

        std::vector<Fact> facts;
        for (const auto & rel : b.schema().relations()) {
            int ri = b.schema().index_of(rel.name);
            int r = rel.arity;
            const auto & cfacts = c_by_rel[ri];
            std::vector<std::size_t> tup(r, 0);
            if (funcs.empty())
                continue;
            std::vector<int> image(r);
            for (;;) {
                bool ok = true;
                for (const auto * cf : cfacts) {
                    for (int i = 0; i < r; ++i)
                        image[i] = funcs[tup[i]][cf->args[i]];
                    if (! b_facts.count(pack(ri, image.data(), r))) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    Fact f;
                    f.rel = rel.name;
                    for (int i = 0; i < r; ++i)
                        f.args.push_back(domain[tup[i]]);
                    facts.push_back(std::move(f));
                }
                int i = 0;
                for (; i < r; ++i) {
                    if (++tup[i] < funcs.size())
                        break;
                    tup[i] = 0;
                }
                if (i == r)
                    break;
            }
        }

        auto names = domain;
        return detail::PowerResult{
            PointedStructure(b.schema(), std::move(domain), std::move(facts), {}),
            std::move(funcs), std::move(names)};
    }

    Schema binary_schema(const Schema & schema)
    {
        std::vector<Relation> rels;
        for (const auto & r : schema.relations())
            for (int i = 1; i <= r.arity; ++i)
                rels.push_back(Relation{r.name + "@" + std::to_string(i), 2});
        return Schema(std::move(rels));
    }

    PointedStructure binary_encode(const PointedStructure & a)
    {
        auto star = binary_schema(a.schema());
        std::set<std::string> taken(a.domain().begin(), a.domain().end());
        std::vector<std::string> domain = a.domain();
        std::vector<Fact> facts;
        for (const auto & f : a.facts()) {
            auto nm = fresh_name(mangle_token(f.to_string()), taken);
            taken.insert(nm);
            domain.push_back(nm);
            for (std::size_t i = 0; i < f.args.size(); ++i)
                facts.push_back(Fact{f.rel + "@" + std::to_string(i + 1), {f.args[i], nm}});
        }
        return PointedStructure(std::move(star), std::move(domain), std::move(facts), a.dist());
    }

    PointedStructure binary_decode(const PointedStructure & b, const Schema & original)
    {
        auto star = binary_schema(original);
        if (! (b.schema() == star))
            throw precondition_error{"structure is not over the binary encoding of the given schema"};

        std::vector<Fact> facts;
        for (const auto & rel : original.relations()) {
            // per witness y, the candidate sets X_i(y) = { x : R@i(x,y) }
            std::map<std::string, std::vector<std::set<std::string>>> witness;
            for (const auto & f : b.facts()) {
                auto at = f.rel.rfind('@');
                if (f.rel.substr(0, at) != rel.name)
                    continue;
                int pos = std::stoi(f.rel.substr(at + 1));
                auto & xs = witness[f.args[1]];
                xs.resize(rel.arity);
                xs[pos - 1].insert(f.args[0]);
            }
            for (const auto & [y, xs] : witness) {
                if (int(xs.size()) != rel.arity)
                    continue;
                bool any_empty = std::any_of(xs.begin(), xs.end(),
                                             [](const auto & s) { return s.empty(); });
                if (any_empty)
                    continue;
                double tuples = 1;
                for (const auto & s : xs)
                    tuples *= double(s.size());
                if (tuples > 10'000'000.0)
                    throw size_limit_error{"binary decode would enumerate too many tuples"};
                std::vector<std::vector<std::string>> pools;
                for (const auto & s : xs)
                    pools.emplace_back(s.begin(), s.end());
                std::vector<std::size_t> tup(pools.size(), 0);
                for (;;) {
                    Fact f;
                    f.rel = rel.name;
                    for (std::size_t i = 0; i < pools.size(); ++i)
                        f.args.push_back(pools[i][tup[i]]);
                    facts.push_back(std::move(f));
                    std::size_t i = 0;
                    for (; i < pools.size(); ++i) {
                        if (++tup[i] < pools[i].size())
                            break;
                        tup[i] = 0;
                    }
                    if (i == pools.size())
                        break;
                }
            }
        }

        return PointedStructure(original, b.domain(), std::move(facts), b.dist());
    }

    std::vector<PointedStructure> unsafe_dual_family(const Schema & schema, int k)
    {
        if (k < 1)
            throw precondition_error{"unsafe dual family requires k >= 1"};

        std::vector<Fact> all_on_c;
        for (const auto & r : schema.relations())
            all_on_c.push_back(Fact{r.name, std::vector<std::string>(r.arity, "c")});

        std::vector<PointedStructure> family;
        for (unsigned mask = 1; mask < (1u << k); ++mask) {
            std::vector<std::string> dist;
            for (int i = 0; i < k; ++i)
                dist.push_back((mask >> i) & 1 ? "b" : "c");
            family.emplace_back(schema, std::vector<std::string>{"b", "c"}, all_on_c, dist);
        }
        return family;
    }

    PointedStructure drop_isolated(const PointedStructure & a)
    {
        const auto & idx = a.indexed();
        std::vector<std::string> domain;
        for (int e = 0; e < idx.n; ++e)
            if (idx.is_dist[e] || ! idx.element_facts[e].empty())
                domain.push_back(a.domain()[e]);
        if (domain.empty() && ! a.domain().empty())
            domain.push_back(a.domain().front());
        return PointedStructure(a.schema(), std::move(domain), a.facts(), a.dist());
    }

    PointedStructure rename_canonical(const PointedStructure & a, const std::string & prefix)
    {
        std::map<std::string, std::string> rename;
        for (std::size_t i = 0; i < a.domain().size(); ++i)
            rename[a.domain()[i]] = prefix + std::to_string(i);
        std::vector<std::string> domain, dist;
        for (const auto & x : a.domain())
            domain.push_back(rename.at(x));
        for (const auto & x : a.dist())
            dist.push_back(rename.at(x));
        std::vector<Fact> facts;
        for (const auto & f : a.facts()) {
            Fact g;
            g.rel = f.rel;
            for (const auto & x : f.args)
                g.args.push_back(rename.at(x));
            facts.push_back(std::move(g));
        }
        return PointedStructure(a.schema(), std::move(domain), std::move(facts), std::move(dist));
    }

    bool is_isomorphic(const PointedStructure & a, const PointedStructure & b)
    {
        if (! (a.schema() == b.schema()) || a.k() != b.k()
            || a.domain().size() != b.domain().size() || a.facts().size() != b.facts().size())
            return false;

        std::vector<int> image(a.domain().size(), -1);
        std::vector<char> used(b.domain().size(), 0);
        for (int i = 0; i < a.k(); ++i) {
            int x = a.indexed().dist[i], y = b.indexed().dist[i];
            if (image[x] == -1 && ! used[y]) {
                image[x] = y;
                used[y] = 1;
            }
            else if (image[x] != y)
                return false;
        }
        std::vector<int> pre = image;
        std::function<bool(std::size_t)> go = [&](std::size_t next) -> bool {
            while (next < image.size() && pre[int(next)] != -1)
                ++next;
            if (next == image.size()) {
                for (const auto & f : a.indexed().facts) {
                    Fact g;
                    g.rel = a.schema().relations()[f.rel].name;
                    for (int x : f.args)
                        g.args.push_back(b.domain()[image[x]]);
                    if (! b.has_fact(g))
                        return false;
                }
                return true;
            }
            for (int cand = 0; cand < int(b.domain().size()); ++cand) {
                if (used[cand])
                    continue;
                if (b.indexed().element_facts[cand].size() != a.indexed().element_facts[int(next)].size())
                    continue;
                image[next] = cand;
                used[cand] = 1;
                if (go(next + 1))
                    return true;
                used[cand] = 0;
                image[next] = -1;
            }
            return false;
        };
        return go(0);
    }
}
