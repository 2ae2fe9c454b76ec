#include <cqlab/hom.hpp>

#include <algorithm>
#include <climits>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

namespace cqlab
{
    namespace
    {
        struct Bits
        {
            std::vector<std::uint64_t> w;

            void init_full(int n)
            {
                w.assign((n + 63) / 64, ~std::uint64_t(0));
                if (n % 64)
                    w.back() = (std::uint64_t(1) << (n % 64)) - 1;
            }

            void init_empty(int n) { w.assign((n + 63) / 64, 0); }
            bool test(int i) const { return (w[i / 64] >> (i % 64)) & 1; }
            void set(int i) { w[i / 64] |= std::uint64_t(1) << (i % 64); }
            void reset(int i) { w[i / 64] &= ~(std::uint64_t(1) << (i % 64)); }

            void and_with(const Bits & o)
            {
                for (std::size_t i = 0; i < w.size(); ++i)
                    w[i] &= o.w[i];
            }

            int count() const
            {
                int c = 0;
                for (auto x : w)
                    c += __builtin_popcountll(x);
                return c;
            }

            int first() const
            {
                for (std::size_t i = 0; i < w.size(); ++i)
                    if (w[i])
                        return int(i * 64 + __builtin_ctzll(w[i]));
                return -1;
            }

            bool empty() const
            {
                return std::all_of(w.begin(), w.end(), [](auto x) { return x == 0; });
            }
        };

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

        struct Solver
        {
            const PointedStructure & a;
            const PointedStructure & b;
            const HomOptions & options;

            int na, nb;
            std::vector<int> pin;                       // a-element -> b-element or -1
            std::vector<std::vector<const detail::IFact *>> b_facts_by_rel;
            std::size_t nodes = 0;

            Solver(const PointedStructure & a_, const PointedStructure & b_, const HomOptions & o) :
                a(a_), b(b_), options(o), na(a.indexed().n), nb(b.indexed().n), pin(na, -1)
            {
                b_facts_by_rel.resize(a.schema().relations().size());
                for (const auto & f : b.indexed().facts)
                    b_facts_by_rel[f.rel].push_back(&f);
            }

            void tick()
            {
                if (options.cancel && options.cancel->load())
                    throw cancelled_error{"search cancelled"};
                if (++nodes > options.node_budget)
                    throw cancelled_error{"node budget exhausted"};
            }

            bool add_pin(int x, int v)
            {
                if (pin[x] == v)
                    return true;
                if (pin[x] != -1)
                    return false;
                pin[x] = v;
                return true;
            }

            // facts of a whose arguments are fully pinned must hold in b
            bool pinned_facts_ok() const
            {
                for (const auto & f : a.indexed().facts) {
                    bool all = true;
                    for (int x : f.args)
                        if (pin[x] == -1) {
                            all = false;
                            break;
                        }
                    if (! all)
                        continue;
                    bool found = false;
                    for (const auto * bf : b_facts_by_rel[f.rel]) {
                        bool match = true;
                        for (std::size_t i = 0; i < f.args.size(); ++i)
                            if (bf->args[i] != pin[f.args[i]]) {
                                match = false;
                                break;
                            }
                        if (match) {
                            found = true;
                            break;
                        }
                    }
                    if (! found)
                        return false;
                }
                return true;
            }

            bool forest_given_pins() const
            {
                UnionFind uf(na + int(a.indexed().facts.size()));
                auto copy = uf;
                for (std::size_t fi = 0; fi < a.indexed().facts.size(); ++fi)
                    for (int x : a.indexed().facts[fi].args)
                        if (pin[x] == -1 && ! copy.unite(x, na + int(fi)))
                            return false;
                return true;
            }

            std::optional<std::vector<int>> solve_dp();
            std::optional<std::vector<int>> solve_backtrack();
            void enumerate(std::vector<std::vector<int>> & out, std::size_t max_solutions);
        };

        std::optional<std::vector<int>> Solver::solve_dp()
        {
            const auto & ia = a.indexed();
            int m = int(ia.facts.size());

            // only facts with at least one free argument take part in the forest
            std::vector<std::vector<std::pair<int, int>>> fact_free;  // fact -> (free element, position)
            fact_free.resize(m);
            for (int fi = 0; fi < m; ++fi)
                for (std::size_t p = 0; p < ia.facts[fi].args.size(); ++p)
                    if (pin[ia.facts[fi].args[p]] == -1)
                        fact_free[fi].emplace_back(ia.facts[fi].args[p], int(p));

            std::vector<Bits> cand(na);
            for (int x = 0; x < na; ++x)
                if (pin[x] == -1)
                    cand[x].init_full(nb);

            std::vector<int> assign(na, -1);
            for (int x = 0; x < na; ++x)
                assign[x] = pin[x];

            std::vector<char> elem_done(na, 0), fact_done(m, 0);

            // supp(f -> target element at position tp), assuming all other free
            // elements of f already have final candidate sets
            auto fact_support = [&](int fi, int target, int tp) {
                Bits supp;
                supp.init_empty(nb);
                for (const auto * bf : b_facts_by_rel[ia.facts[fi].rel]) {
                    bool ok = true;
                    for (std::size_t p = 0; p < ia.facts[fi].args.size(); ++p) {
                        int x = ia.facts[fi].args[p];
                        if (pin[x] != -1) {
                            if (bf->args[p] != pin[x]) {
                                ok = false;
                                break;
                            }
                        }
                        else if (x != target && ! cand[x].test(bf->args[p])) {
                            ok = false;
                            break;
                        }
                    }
                    if (ok)
                        supp.set(bf->args[tp]);
                }
                return supp;
            };

            // bottom-up over each tree; iterative post-order
            std::vector<int> order;  // element ids in finish order
            std::vector<int> parent_fact(na, -1), parent_elem_of_fact(m, -1);

            for (int root = 0; root < na; ++root) {
                if (pin[root] != -1 || elem_done[root])
                    continue;
                // DFS from root over elements and facts
                std::vector<std::pair<int, bool>> stack{{root, false}};  // (element, expanded)
                elem_done[root] = 1;
                std::vector<int> local;
                while (! stack.empty()) {
                    auto [e, expanded] = stack.back();
                    stack.pop_back();
                    if (expanded) {
                        local.push_back(e);
                        continue;
                    }
                    stack.emplace_back(e, true);
                    for (int fi : ia.element_facts[e]) {
                        if (fact_done[fi] || fact_free[fi].empty())
                            continue;
                        fact_done[fi] = 1;
                        parent_elem_of_fact[fi] = e;
                        for (auto [y, p] : fact_free[fi])
                            if (y != e && ! elem_done[y]) {
                                elem_done[y] = 1;
                                parent_fact[y] = fi;
                                stack.emplace_back(y, false);
                            }
                    }
                }
                // local is post-order: children before parents
                for (int e : local) {
                    tick();
                    for (int fi : ia.element_facts[e]) {
                        if (fact_free[fi].empty())
                            continue;
                        if (parent_elem_of_fact[fi] != e)
                            continue;
                        int tp = -1;
                        for (auto [y, p] : fact_free[fi])
                            if (y == e)
                                tp = p;
                        auto supp = fact_support(fi, e, tp);
                        cand[e].and_with(supp);
                    }
                    if (cand[e].empty())
                        return std::nullopt;
                }
                order.insert(order.end(), local.begin(), local.end());
            }

            // assign top-down: reverse finish order gives parents before children
            for (auto it = order.rbegin(); it != order.rend(); ++it) {
                int e = *it;
                if (assign[e] != -1)
                    continue;
                assign[e] = cand[e].first();
                // push the choice through child facts
                std::vector<int> todo{e};
                while (! todo.empty()) {
                    int x = todo.back();
                    todo.pop_back();
                    for (int fi : ia.element_facts[x]) {
                        if (fact_free[fi].empty() || parent_elem_of_fact[fi] != x)
                            continue;
                        bool has_unassigned_child = false;
                        for (auto [y, p] : fact_free[fi])
                            if (assign[y] == -1)
                                has_unassigned_child = true;
                        if (! has_unassigned_child)
                            continue;
                        for (const auto * bf : b_facts_by_rel[ia.facts[fi].rel]) {
                            bool ok = true;
                            for (std::size_t p = 0; p < ia.facts[fi].args.size(); ++p) {
                                int y = ia.facts[fi].args[p];
                                int v = assign[y] != -1 ? assign[y] : -1;
                                if (v != -1) {
                                    if (bf->args[p] != v) {
                                        ok = false;
                                        break;
                                    }
                                }
                                else if (! cand[y].test(bf->args[p])) {
                                    ok = false;
                                    break;
                                }
                            }
                            if (ok) {
                                for (auto [y, p] : fact_free[fi])
                                    if (assign[y] == -1) {
                                        assign[y] = bf->args[p];
                                        todo.push_back(y);
                                    }
                                break;
                            }
                        }
                    }
                }
            }

            // unconstrained elements
            for (int x = 0; x < na; ++x)
                if (assign[x] == -1) {
                    if (nb == 0)
                        return std::nullopt;
                    assign[x] = 0;
                }
            return assign;
        }

        std::optional<std::vector<int>> Solver::solve_backtrack()
        {
            const auto & ia = a.indexed();
            if (nb == 0) {
                if (na == 0)
                    return std::vector<int>{};
                bool all_pinned = std::all_of(pin.begin(), pin.end(), [](int v) { return v != -1; });
                if (all_pinned)
                    return pin;
                return std::nullopt;
            }

            std::vector<Bits> cand(na);
            for (int x = 0; x < na; ++x) {
                cand[x].init_full(nb);
                if (pin[x] != -1) {
                    Bits only;
                    only.init_empty(nb);
                    only.set(pin[x]);
                    cand[x] = only;
                }
            }

            // initial per-fact pruning: a value survives for x only if some b-fact
            // of the right relation carries it at x's position
            for (const auto & f : ia.facts) {
                for (std::size_t p = 0; p < f.args.size(); ++p) {
                    int x = f.args[p];
                    if (pin[x] != -1)
                        continue;
                    Bits possible;
                    possible.init_empty(nb);
                    for (const auto * bf : b_facts_by_rel[f.rel])
                        possible.set(bf->args[p]);
                    cand[x].and_with(possible);
                }
            }
            for (int x = 0; x < na; ++x)
                if (cand[x].empty())
                    return std::nullopt;

            std::vector<int> assign(na, -1);
            for (int x = 0; x < na; ++x)
                if (pin[x] != -1)
                    assign[x] = pin[x];

            // propagate: for facts with exactly the assigned prefix, narrow the others
            auto consistent = [&](int just) {
                for (int fi : ia.element_facts[just]) {
                    const auto & f = ia.facts[fi];
                    bool all = true;
                    for (int y : f.args)
                        if (assign[y] == -1) {
                            all = false;
                            break;
                        }
                    if (! all)
                        continue;
                    bool found = false;
                    for (const auto * bf : b_facts_by_rel[f.rel]) {
                        bool match = true;
                        for (std::size_t p = 0; p < f.args.size(); ++p)
                            if (bf->args[p] != assign[f.args[p]]) {
                                match = false;
                                break;
                            }
                        if (match) {
                            found = true;
                            break;
                        }
                    }
                    if (! found)
                        return false;
                }
                return true;
            };

            std::function<bool()> go = [&]() -> bool {
                tick();
                int best = -1, best_count = INT_MAX;
                for (int x = 0; x < na; ++x)
                    if (assign[x] == -1) {
                        int c = cand[x].count();
                        if (c < best_count) {
                            best_count = c;
                            best = x;
                        }
                    }
                if (best == -1)
                    return true;
                for (int v = 0; v < nb; ++v) {
                    if (! cand[best].test(v))
                        continue;
                    assign[best] = v;
                    if (consistent(best)) {
                        // forward check neighbours through shared facts
                        std::vector<std::pair<int, Bits>> saved;
                        bool dead = false;
                        for (int fi : ia.element_facts[best]) {
                            const auto & f = ia.facts[fi];
                            for (std::size_t p = 0; p < f.args.size() && ! dead; ++p) {
                                int y = f.args[p];
                                if (assign[y] != -1)
                                    continue;
                                Bits possible;
                                possible.init_empty(nb);
                                for (const auto * bf : b_facts_by_rel[f.rel]) {
                                    bool match = true;
                                    for (std::size_t q = 0; q < f.args.size(); ++q) {
                                        int z = f.args[q];
                                        if (assign[z] != -1 && bf->args[q] != assign[z]) {
                                            match = false;
                                            break;
                                        }
                                    }
                                    if (match)
                                        possible.set(bf->args[p]);
                                }
                                saved.emplace_back(y, cand[y]);
                                cand[y].and_with(possible);
                                if (cand[y].empty())
                                    dead = true;
                            }
                            if (dead)
                                break;
                        }
                        if (! dead && go())
                            return true;
                        for (auto it = saved.rbegin(); it != saved.rend(); ++it)
                            cand[it->first] = std::move(it->second);
                    }
                    assign[best] = -1;
                }
                return false;
            };

            if (go())
                return assign;
            return std::nullopt;
        }

        void Solver::enumerate(std::vector<std::vector<int>> & out, std::size_t max_solutions)
        {
            const auto & ia = a.indexed();
            std::vector<int> assign(na, -1);
            for (int x = 0; x < na; ++x)
                if (pin[x] != -1)
                    assign[x] = pin[x];

            auto consistent = [&](int just) {
                for (int fi : ia.element_facts[just]) {
                    const auto & f = ia.facts[fi];
                    bool all = true;
                    for (int y : f.args)
                        if (assign[y] == -1) {
                            all = false;
                            break;
                        }
                    if (! all)
                        continue;
                    bool found = false;
                    for (const auto * bf : b_facts_by_rel[f.rel]) {
                        bool match = true;
                        for (std::size_t p = 0; p < f.args.size(); ++p)
                            if (bf->args[p] != assign[f.args[p]]) {
                                match = false;
                                break;
                            }
                        if (match) {
                            found = true;
                            break;
                        }
                    }
                    if (! found)
                        return false;
                }
                return true;
            };

            std::function<void(int)> go = [&](int x) {
                if (out.size() >= max_solutions)
                    return;
                while (x < na && pin[x] != -1)
                    ++x;
                if (x == na) {
                    out.push_back(assign);
                    return;
                }
                tick();
                for (int v = 0; v < nb; ++v) {
                    assign[x] = v;
                    if (consistent(x))
                        go(x + 1);
                    assign[x] = -1;
                    if (out.size() >= max_solutions)
                        return;
                }
            };
            if (nb == 0 && na > 0) {
                bool all_pinned = std::all_of(pin.begin(), pin.end(), [](int v) { return v != -1; });
                if (all_pinned && pinned_facts_ok())
                    out.push_back(pin);
                return;
            }
            go(0);
        }

        Homomorphism to_hom(const PointedStructure & a, const PointedStructure & b,
                            const std::vector<int> & assign)
        {
            Homomorphism h;
            for (std::size_t x = 0; x < assign.size(); ++x)
                h.assignment.emplace_back(a.domain()[x], b.domain()[assign[x]]);
            return h;
        }
    }

    const std::string & Homomorphism::image(std::string_view x) const
    {
        for (const auto & [from, to] : assignment)
            if (from == x)
                return to;
        throw error{"element '" + std::string(x) + "' not in homomorphism domain"};
    }

    std::optional<Homomorphism> find_homomorphism_pinned(
        const PointedStructure & a, const PointedStructure & b,
        const std::vector<std::pair<std::string, std::string>> & pins,
        const HomOptions & options)
    {
        if (! (a.schema() == b.schema()))
            throw precondition_error{"schema mismatch"};
        if (a.k() != b.k())
            throw precondition_error{"distinguished tuple length mismatch"};

        Solver solver(a, b, options);
        for (int i = 0; i < a.k(); ++i)
            if (! solver.add_pin(a.indexed().dist[i], b.indexed().dist[i]))
                return std::nullopt;
        for (const auto & [x, v] : pins) {
            int xi = a.element_id(x), vi = b.element_id(v);
            if (xi < 0 || vi < 0)
                throw precondition_error{"pin uses unknown element"};
            if (! solver.add_pin(xi, vi))
                return std::nullopt;
        }

        if (! solver.pinned_facts_ok())
            return std::nullopt;

        std::optional<std::vector<int>> result;
        if (solver.forest_given_pins())
            result = solver.solve_dp();
        else
            result = solver.solve_backtrack();

        if (! result)
            return std::nullopt;
        return to_hom(a, b, *result);
    }

    std::optional<Homomorphism> find_homomorphism(const PointedStructure & a,
                                                  const PointedStructure & b,
                                                  const HomOptions & options)
    {
        return find_homomorphism_pinned(a, b, {}, options);
    }

    std::vector<Homomorphism> all_homomorphisms(const PointedStructure & a,
                                                const PointedStructure & b,
                                                std::size_t cap,
                                                const HomOptions & options)
    {
        if (! (a.schema() == b.schema()))
            throw precondition_error{"schema mismatch"};
        if (a.k() != b.k())
            throw precondition_error{"distinguished tuple length mismatch"};

        double total = std::pow(double(std::max<std::size_t>(b.domain().size(), 1)),
                                double(a.domain().size()));
        if (total > double(cap))
            throw size_limit_error{"homomorphism enumeration too large"};

        Solver solver(a, b, options);
        for (int i = 0; i < a.k(); ++i)
            if (! solver.add_pin(a.indexed().dist[i], b.indexed().dist[i]))
                return {};
        if (! solver.pinned_facts_ok())
            return {};

        std::vector<std::vector<int>> raw;
        solver.enumerate(raw, options.max_solutions);

        std::vector<Homomorphism> out;
        out.reserve(raw.size());
        for (const auto & assign : raw)
            out.push_back(to_hom(a, b, assign));
        return out;
    }

    bool hom_equivalent(const PointedStructure & a, const PointedStructure & b)
    {
        return find_homomorphism(a, b).has_value() && find_homomorphism(b, a).has_value();
    }
}
