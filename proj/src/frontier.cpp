#include <cqlab/frontier.hpp>
#include <cqlab/io.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace cqlab
{
    std::string to_string(FrontierMethod m)
    {
        switch (m) {
        case FrontierMethod::marked_pairs: return "marked-pairs";
        case FrontierMethod::duality_product: return "duality-product";
        case FrontierMethod::paper_poly: return "paper-poly";
        case FrontierMethod::tree: return "tree";
        }
        return "?";
    }

    std::optional<FrontierMethod> frontier_method_from_string(std::string_view s)
    {
        if (s == "marked-pairs")
            return FrontierMethod::marked_pairs;
        if (s == "duality-product")
            return FrontierMethod::duality_product;
        if (s == "paper-poly")
            return FrontierMethod::paper_poly;
        if (s == "tree")
            return FrontierMethod::tree;
        return std::nullopt;
    }

    std::string to_string(FrontierScope s)
    {
        switch (s) {
        case FrontierScope::all_structures: return "all-structures";
        case FrontierScope::safe_structures: return "safe-structures";
        case FrontierScope::connected_acyclic_k1: return "connected-acyclic-k1";
        }
        return "?";
    }

    namespace
    {
        PointedStructure strip_dist(const PointedStructure & a)
        {
            return PointedStructure(a.schema(), a.domain(), a.facts(), {});
        }

        std::string fresh_against(std::string base, const std::set<std::string> & taken)
        {
            while (taken.count(base))
                base += "*";
            return base;
        }

        std::vector<PointedStructure> cleanup_members(std::vector<PointedStructure> members,
                                                      const FrontierOptions & options)
        {
            for (auto & m : members) {
                m = drop_isolated(m);
                if (m.domain().size() <= options.reduce_max_elements)
                    m = reduce_greedy(m, options.reduce_budget);
            }

            // drop duplicates up to hom-equivalence, then strictly dominated members
            std::sort(members.begin(), members.end(),
                      [](const PointedStructure & a, const PointedStructure & b) {
                          return encode_structure(a) < encode_structure(b);
                      });
            std::vector<PointedStructure> kept;
            for (const auto & m : members) {
                bool dup = std::any_of(kept.begin(), kept.end(), [&](const PointedStructure & k) {
                    return hom_equivalent(k, m);
                });
                if (! dup)
                    kept.push_back(m);
            }
            if (! options.prune_dominated)
                return kept;
            std::vector<PointedStructure> out;
            for (std::size_t i = 0; i < kept.size(); ++i) {
                bool dominated = false;
                for (std::size_t j = 0; j < kept.size() && ! dominated; ++j)
                    if (i != j && find_homomorphism(kept[i], kept[j]))
                        dominated = true;
                if (! dominated)
                    out.push_back(kept[i]);
            }
            return out;
        }

        // ---- corrected per-component construction ----------------------------
        //
        // Member for "component i fails": pair elements (x, f) for non-designated
        // x in fact f, plus (a, id) and a wildcard companion (a, *) for each
        // designated a. Facts of other components appear for every marker
        // combination; facts of component i require a marker that is a wildcard
        // or a fact different from the fact itself.

        struct MarkerSpace
        {
            // per element id: list of marker labels; ~0u = id, ~1u = wildcard,
            // otherwise a fact index
            std::vector<std::vector<unsigned>> markers;
            std::vector<std::vector<std::string>> names;
        };

        constexpr unsigned marker_id = ~0u;
        constexpr unsigned marker_star = ~1u;

        MarkerSpace make_marker_space(const PointedStructure & a)
        {
            const auto & idx = a.indexed();
            MarkerSpace ms;
            ms.markers.resize(idx.n);
            ms.names.resize(idx.n);
            std::set<std::string> taken(a.domain().begin(), a.domain().end());
            for (int e = 0; e < idx.n; ++e) {
                if (idx.is_dist[e]) {
                    ms.markers[e] = {marker_id, marker_star};
                    auto star = fresh_against(a.domain()[e] + "*", taken);
                    taken.insert(star);
                    ms.names[e] = {a.domain()[e], star};
                }
                else {
                    std::vector<int> fs = idx.element_facts[e];
                    std::sort(fs.begin(), fs.end());
                    fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
                    for (int f : fs) {
                        ms.markers[e].push_back(unsigned(f));
                        ms.names[e].push_back("<" + a.domain()[e] + "|"
                                              + mangle_token(a.facts()[f].to_string()) + ">");
                    }
                }
            }
            return ms;
        }

        PointedStructure marked_member(const PointedStructure & a,
                                       const std::vector<int> & component_of_fact,
                                       int failing_component)
        {
            const auto & idx = a.indexed();
            auto ms = make_marker_space(a);

            std::set<std::string> domain;
            for (int e = 0; e < idx.n; ++e)
                for (const auto & nm : ms.names[e])
                    domain.insert(nm);

            std::vector<Fact> facts;
            for (std::size_t fi = 0; fi < idx.facts.size(); ++fi) {
                const auto & f = idx.facts[fi];
                bool constrained = component_of_fact[fi] == failing_component;
                int arity = int(f.args.size());
                std::vector<std::size_t> pick(arity, 0);
                for (;;) {
                    bool witness = false;
                    if (constrained)
                        for (int p = 0; p < arity && ! witness; ++p) {
                            unsigned m = ms.markers[f.args[p]][pick[p]];
                            if (m == marker_star || (m != marker_id && m != unsigned(fi)))
                                witness = true;
                        }
                    if (! constrained || witness) {
                        Fact g;
                        g.rel = a.facts()[fi].rel;
                        for (int p = 0; p < arity; ++p)
                            g.args.push_back(ms.names[f.args[p]][pick[p]]);
                        facts.push_back(std::move(g));
                    }
                    int p = 0;
                    for (; p < arity; ++p) {
                        if (++pick[p] < ms.markers[f.args[p]].size())
                            break;
                        pick[p] = 0;
                    }
                    if (p == arity)
                        break;
                }
            }

            // distinguished tuple keeps its original names ((a, id) is named a)
            return PointedStructure(a.schema(),
                                    std::vector<std::string>(domain.begin(), domain.end()),
                                    std::move(facts), a.dist());
        }

        std::vector<int> fact_components(const PointedStructure & a)
        {
            auto comps = fg_components(a);
            std::vector<int> component_of_fact(a.facts().size(), -1);
            for (std::size_t ci = 0; ci < comps.size(); ++ci)
                for (const auto & f : comps[ci].facts()) {
                    auto it = std::lower_bound(a.facts().begin(), a.facts().end(), f);
                    component_of_fact[it - a.facts().begin()] = int(ci);
                }
            return component_of_fact;
        }

        bool is_single_designated_fact(const PointedStructure & comp)
        {
            if (comp.facts().size() != 1)
                return false;
            const auto & f = comp.indexed().facts[0];
            return std::all_of(f.args.begin(), f.args.end(),
                               [&](int x) { return comp.indexed().is_dist[x]; });
        }

        PointedStructure case1_dual(const PointedStructure & comp)
        {
            std::set<std::string> dom(comp.dist().begin(), comp.dist().end());
            auto b = fresh_against("b", dom);
            dom.insert(b);
            std::vector<std::string> domain(dom.begin(), dom.end());
            const auto & skip = comp.facts()[0];
            std::vector<Fact> facts;
            for (const auto & rel : comp.schema().relations()) {
                std::vector<std::size_t> pick(rel.arity, 0);
                for (;;) {
                    Fact f;
                    f.rel = rel.name;
                    for (int p = 0; p < rel.arity; ++p)
                        f.args.push_back(domain[pick[p]]);
                    if (! (f == skip))
                        facts.push_back(std::move(f));
                    int p = 0;
                    for (; p < rel.arity; ++p) {
                        if (++pick[p] < domain.size())
                            break;
                        pick[p] = 0;
                    }
                    if (p == rel.arity)
                        break;
                }
            }
            return PointedStructure(comp.schema(), std::move(domain), std::move(facts), comp.dist());
        }

        // literal Case 2 member: no wildcard companions, id never a witness
        PointedStructure literal_case2_member(const PointedStructure & a)
        {
            const auto & idx = a.indexed();
            std::set<std::string> taken(a.domain().begin(), a.domain().end());
            std::vector<std::vector<unsigned>> markers(idx.n);
            std::vector<std::vector<std::string>> names(idx.n);
            for (int e = 0; e < idx.n; ++e) {
                if (idx.is_dist[e]) {
                    markers[e] = {marker_id};
                    names[e] = {a.domain()[e]};
                }
                else {
                    std::vector<int> fs = idx.element_facts[e];
                    std::sort(fs.begin(), fs.end());
                    fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
                    for (int f : fs) {
                        markers[e].push_back(unsigned(f));
                        names[e].push_back("<" + a.domain()[e] + "|"
                                           + mangle_token(a.facts()[f].to_string()) + ">");
                    }
                }
            }

            std::set<std::string> domain;
            for (int e = 0; e < idx.n; ++e)
                domain.insert(names[e].begin(), names[e].end());

            std::vector<Fact> facts;
            for (std::size_t fi = 0; fi < idx.facts.size(); ++fi) {
                const auto & f = idx.facts[fi];
                int arity = int(f.args.size());
                std::vector<std::size_t> pick(arity, 0);
                for (;;) {
                    bool witness = false;
                    for (int p = 0; p < arity && ! witness; ++p) {
                        unsigned m = markers[f.args[p]][pick[p]];
                        if (m != marker_id && m != unsigned(fi))
                            witness = true;
                    }
                    if (witness) {
                        Fact g;
                        g.rel = a.facts()[fi].rel;
                        for (int p = 0; p < arity; ++p)
                            g.args.push_back(names[f.args[p]][pick[p]]);
                        facts.push_back(std::move(g));
                    }
                    int p = 0;
                    for (; p < arity; ++p) {
                        if (++pick[p] < markers[f.args[p]].size())
                            break;
                        pick[p] = 0;
                    }
                    if (p == arity)
                        break;
                }
            }

            return PointedStructure(a.schema(),
                                    std::vector<std::string>(domain.begin(), domain.end()),
                                    std::move(facts), a.dist());
        }

        void require_component_preconditions(const PointedStructure & a)
        {
            if (! a.flags().c_acyclic)
                throw precondition_error{"component is not c-acyclic"};
            if (! a.flags().unp)
                throw precondition_error{"component does not have the unique names property"};
            if (fg_components(a).size() > 1)
                throw precondition_error{"structure is not fg-connected"};
        }

        std::vector<PointedStructure> exponential_duals(const PointedStructure & target,
                                                        const PointedStructure & member,
                                                        const FrontierOptions & options)
        {
            auto power = detail::exponentiate_table(strip_dist(member), strip_dist(target),
                                                    options.limits);
            int k = target.k();
            std::vector<PointedStructure> duals;
            if (k == 0) {
                duals.push_back(power.power);
            }
            else {
                // per position, the functions h with h(a_i) = b_i
                std::vector<std::vector<std::string>> choices(k);
                for (int i = 0; i < k; ++i) {
                    int ai = target.element_id(target.dist()[i]);
                    int bi = member.element_id(member.dist()[i]);
                    for (std::size_t fi = 0; fi < power.funcs.size(); ++fi)
                        if (power.funcs[fi][ai] == bi)
                            choices[i].push_back(power.names[fi]);
                }
                double combos = 1;
                for (const auto & c : choices)
                    combos *= double(c.size());
                if (combos > 100'000.0)
                    throw size_limit_error{"too many distinguished tuples for the dual set"};
                std::vector<std::size_t> pick(k, 0);
                if (std::all_of(choices.begin(), choices.end(),
                                [](const auto & c) { return ! c.empty(); }))
                    for (;;) {
                        std::vector<std::string> dist;
                        for (int i = 0; i < k; ++i)
                            dist.push_back(choices[i][pick[i]]);
                        duals.emplace_back(power.power.schema(), power.power.domain(),
                                           power.power.facts(), std::move(dist));
                        int i = 0;
                        for (; i < k; ++i) {
                            if (++pick[i] < choices[i].size())
                                break;
                            pick[i] = 0;
                        }
                        if (i == k)
                            break;
                    }
            }

            for (auto & d : duals) {
                d = drop_isolated(d);
                if (d.domain().size() <= options.reduce_max_elements)
                    d = reduce_greedy(d, options.reduce_budget);
            }
            std::sort(duals.begin(), duals.end(),
                      [](const PointedStructure & a, const PointedStructure & b) {
                          return encode_structure(a) < encode_structure(b);
                      });
            std::vector<PointedStructure> out;
            for (const auto & d : duals) {
                bool dup = std::any_of(out.begin(), out.end(), [&](const PointedStructure & e) {
                    return hom_equivalent(e, d);
                });
                if (! dup)
                    out.push_back(d);
            }
            return out;
        }
    }

    Case1Result frontier_single_fact_component(const PointedStructure & a)
    {
        require_component_preconditions(a);
        if (! is_single_designated_fact(a))
            throw precondition_error{"not a single fact on designated elements"};

        auto dual = case1_dual(a);
        Frontier frontier;
        frontier.target = a;
        frontier.members = {direct_product(a, dual)};
        frontier.scope = FrontierScope::all_structures;
        frontier.method = FrontierMethod::paper_poly;
        DualitySet duals{a, {dual}};
        return Case1Result{std::move(frontier), std::move(duals)};
    }

    Frontier frontier_connected_component(const PointedStructure & a)
    {
        require_component_preconditions(a);
        const auto & idx = a.indexed();
        for (const auto & f : idx.facts)
            if (std::all_of(f.args.begin(), f.args.end(),
                            [&](int x) { return idx.is_dist[x]; }))
                throw precondition_error{"every fact must contain a non-designated element"};

        Frontier frontier;
        frontier.target = a;
        frontier.members = {literal_case2_member(a)};
        frontier.scope = FrontierScope::safe_structures;
        frontier.method = FrontierMethod::paper_poly;
        return frontier;
    }

    DualitySet component_dual_set(const PointedStructure & a, const FrontierOptions & options)
    {
        require_component_preconditions(a);
        if (is_single_designated_fact(a))
            return DualitySet{a, {case1_dual(a)}};

        std::vector<int> comp_of(a.facts().size(), 0);
        auto member = drop_isolated(marked_member(a, comp_of, 0));
        if (member.domain().size() <= options.reduce_max_elements)
            member = reduce_greedy(member, options.reduce_budget);
        return DualitySet{a, exponential_duals(a, member, options)};
    }

    namespace
    {
        // partitions of {0..k-1} as restricted growth strings
        std::vector<std::vector<int>> all_partitions(int k)
        {
            std::vector<std::vector<int>> out;
            std::vector<int> s(k, 0);
            std::function<void(int, int)> rec = [&](int i, int max_used) {
                if (i == k) {
                    out.push_back(s);
                    return;
                }
                for (int v = 0; v <= max_used + 1; ++v) {
                    s[i] = v;
                    rec(i + 1, std::max(max_used, v));
                }
            };
            if (k == 0)
                out.push_back({});
            else
                rec(0, -1);
            return out;
        }

        bool strictly_refines(const std::vector<int> & fine, const std::vector<int> & coarse)
        {
            // fine refines coarse: equal fine-blocks must lie in equal coarse-blocks
            for (std::size_t i = 0; i < fine.size(); ++i)
                for (std::size_t j = i + 1; j < fine.size(); ++j) {
                    if (fine[i] == fine[j] && coarse[i] != coarse[j])
                        return false;
                }
            return fine != coarse;
        }

        PointedStructure complete_structure(const Schema & schema, const std::vector<int> & partition)
        {
            int blocks = partition.empty() ? 0 : *std::max_element(partition.begin(), partition.end()) + 1;
            std::vector<std::string> domain;
            for (int b = 0; b < blocks; ++b)
                domain.push_back("p" + std::to_string(b));
            std::vector<Fact> facts;
            for (const auto & rel : schema.relations()) {
                std::vector<std::size_t> pick(rel.arity, 0);
                if (blocks == 0)
                    break;
                for (;;) {
                    Fact f;
                    f.rel = rel.name;
                    for (int p = 0; p < rel.arity; ++p)
                        f.args.push_back(domain[pick[p]]);
                    facts.push_back(std::move(f));
                    int p = 0;
                    for (; p < rel.arity; ++p) {
                        if (++pick[p] < domain.size())
                            break;
                        pick[p] = 0;
                    }
                    if (p == rel.arity)
                        break;
                }
            }
            std::vector<std::string> dist;
            for (int block : partition)
                dist.push_back(domain[block]);
            return PointedStructure(schema, std::move(domain), std::move(facts), std::move(dist));
        }

        // frontier for a UNP c-acyclic core, by the chosen method
        std::vector<PointedStructure> frontier_unp(const PointedStructure & a,
                                                   FrontierMethod method,
                                                   const FrontierOptions & options)
        {
            auto comps = fg_components(a);
            if (comps.empty()) {
                if (a.k() == 0 && ! a.domain().empty())
                    return {PointedStructure(a.schema(), {}, {}, {})};
                return {};
            }

            std::vector<PointedStructure> members;
            switch (method) {
            case FrontierMethod::marked_pairs: {
                auto comp_of = fact_components(a);
                for (std::size_t i = 0; i < comps.size(); ++i)
                    members.push_back(marked_member(a, comp_of, int(i)));
                break;
            }
            case FrontierMethod::duality_product: {
                for (const auto & comp : comps)
                    for (const auto & dual : component_dual_set(comp, options).duals)
                        members.push_back(direct_product(a, dual));
                break;
            }
            case FrontierMethod::paper_poly: {
                std::vector<PointedStructure> singles;
                for (const auto & comp : comps) {
                    if (is_single_designated_fact(comp))
                        singles.push_back(frontier_single_fact_component(comp).frontier.members[0]);
                    else
                        singles.push_back(literal_case2_member(comp));
                }
                for (std::size_t i = 0; i < comps.size(); ++i) {
                    std::vector<PointedStructure> parts;
                    for (std::size_t j = 0; j < comps.size(); ++j)
                        if (j != i)
                            parts.push_back(comps[j]);
                    parts.push_back(singles[i]);
                    members.push_back(fg_disjoint_union(a.schema(), a.dist(), parts));
                }
                if (options.augment_unsafe && a.k() >= 1)
                    for (const auto & u : unsafe_dual_family(a.schema(), a.k()))
                        members.push_back(direct_product(a, u));
                break;
            }
            case FrontierMethod::tree:
                throw precondition_error{"tree method is handled by frontier_tree"};
            }
            return members;
        }
    }

    Frontier frontier_c_acyclic(const PointedStructure & a, FrontierMethod method,
                                const FrontierOptions & options)
    {
        if (method == FrontierMethod::tree)
            return frontier_tree(a, options);

        auto core = compute_core(a).core;
        if (! core.flags().c_acyclic)
            throw precondition_error{"core is not c-acyclic: the structure has no finite frontier"};

        std::vector<PointedStructure> members;
        if (core.flags().unp) {
            members = frontier_unp(core, method, options);
        }
        else {
            // deduplicate the distinguished tuple, build the UNP frontier,
            // restore the repeated tuple, then add identity-type completions
            std::vector<std::string> unique_dist;
            for (const auto & d : core.dist())
                if (std::find(unique_dist.begin(), unique_dist.end(), d) == unique_dist.end())
                    unique_dist.push_back(d);
            PointedStructure deduped(core.schema(), core.domain(), core.facts(), unique_dist);
            for (const auto & b : frontier_unp(deduped, method, options)) {
                std::vector<std::string> restored;
                for (const auto & d : core.dist()) {
                    auto pos = std::find(unique_dist.begin(), unique_dist.end(), d) - unique_dist.begin();
                    restored.push_back(b.dist()[pos]);
                }
                members.emplace_back(b.schema(), b.domain(), b.facts(), std::move(restored));
            }

            int k = core.k();
            std::vector<int> pattern(k);
            std::map<std::string, int> block_of;
            for (int i = 0; i < k; ++i) {
                auto [it, fresh] = block_of.emplace(core.dist()[i], int(block_of.size()));
                pattern[i] = it->second;
            }
            for (const auto & partition : all_partitions(k))
                if (strictly_refines(partition, pattern))
                    members.push_back(direct_product(complete_structure(core.schema(), partition), core));
        }

        Frontier frontier;
        frontier.target = a;
        frontier.members = cleanup_members(std::move(members), options);
        frontier.method = method;
        frontier.scope = method == FrontierMethod::paper_poly && ! options.augment_unsafe
            ? FrontierScope::safe_structures
            : FrontierScope::all_structures;
        return frontier;
    }

    std::size_t totalsize(const std::vector<PointedStructure> & structures)
    {
        std::size_t total = 0;
        for (const auto & s : structures)
            total += s.facts().size() + 1;
        return total;
    }

    namespace
    {
        struct TreeMember
        {
            std::vector<std::string> domain;
            std::vector<Fact> facts;
            std::map<std::string, std::string> proj;  // into A's elements
            std::string root;
        };

        struct TreeBuilder
        {
            const PointedStructure & a;
            std::vector<int> parent;                   // element -> parent element
            std::vector<std::vector<int>> children;    // oriented tree
            std::vector<std::pair<int, bool>> up_edge; // element -> (rel, forward) of edge from parent
            std::map<int, std::vector<TreeMember>> memo;
            long counter = 0;

            explicit TreeBuilder(const PointedStructure & a_) : a(a_)
            {
                const auto & idx = a.indexed();
                parent.assign(idx.n, -1);
                children.assign(idx.n, {});
                up_edge.assign(idx.n, {-1, true});
                int root = idx.dist.at(0);
                std::vector<char> seen(idx.n, 0);
                seen[root] = 1;
                std::vector<int> queue{root};
                while (! queue.empty()) {
                    int e = queue.back();
                    queue.pop_back();
                    for (int fi : idx.element_facts[e]) {
                        const auto & f = idx.facts[fi];
                        int other = f.args[0] == e ? f.args[1] : f.args[0];
                        if (seen[other])
                            continue;
                        seen[other] = 1;
                        parent[other] = e;
                        children[e].push_back(other);
                        up_edge[other] = {f.rel, f.args[0] == e};
                        queue.push_back(other);
                    }
                }
                for (auto & ch : children)
                    std::sort(ch.begin(), ch.end());
            }

            std::string fresh(const std::string & base)
            {
                return base + "~" + std::to_string(counter++);
            }

            Fact edge_fact(int rel, bool forward, const std::string & from_parent,
                           const std::string & to_child) const
            {
                const auto & rname = a.schema().relations()[rel].name;
                return forward ? Fact{rname, {from_parent, to_child}}
                               : Fact{rname, {to_child, from_parent}};
            }

            std::vector<int> subtree(int e) const
            {
                std::vector<int> out{e};
                for (std::size_t i = 0; i < out.size(); ++i)
                    for (int c : children[out[i]])
                        out.push_back(c);
                std::sort(out.begin(), out.end());
                return out;
            }

            TreeMember copy_renamed(const TreeMember & m)
            {
                std::map<std::string, std::string> rename;
                for (const auto & x : m.domain)
                    rename[x] = fresh(x.substr(0, x.find('~')));
                TreeMember out;
                for (const auto & x : m.domain)
                    out.domain.push_back(rename.at(x));
                for (const auto & f : m.facts) {
                    Fact g;
                    g.rel = f.rel;
                    for (const auto & x : f.args)
                        g.args.push_back(rename.at(x));
                    out.facts.push_back(std::move(g));
                }
                for (const auto & [x, target] : m.proj)
                    out.proj[rename.at(x)] = target;
                out.root = rename.at(m.root);
                return out;
            }

            const std::vector<TreeMember> & members_for(int e)
            {
                auto it = memo.find(e);
                if (it != memo.end())
                    return it->second;

                std::vector<TreeMember> out;
                for (int removed : children[e]) {
                    TreeMember h;
                    h.root = a.domain()[e];
                    auto keep = subtree(e);
                    auto cut = subtree(removed);
                    std::vector<int> kept;
                    std::set_difference(keep.begin(), keep.end(), cut.begin(), cut.end(),
                                        std::back_inserter(kept));
                    for (int x : kept) {
                        h.domain.push_back(a.domain()[x]);
                        h.proj[a.domain()[x]] = a.domain()[x];
                        if (x != e && parent[x] != -1
                            && std::binary_search(kept.begin(), kept.end(), parent[x]))
                            h.facts.push_back(edge_fact(up_edge[x].first, up_edge[x].second,
                                                        a.domain()[parent[x]], a.domain()[x]));
                    }
                    for (const auto & f : members_for(removed)) {
                        auto copy = copy_renamed(f);
                        h.domain.insert(h.domain.end(), copy.domain.begin(), copy.domain.end());
                        h.facts.insert(h.facts.end(), copy.facts.begin(), copy.facts.end());
                        for (const auto & [x, target] : copy.proj)
                            h.proj[x] = target;
                        h.facts.push_back(edge_fact(up_edge[removed].first, up_edge[removed].second,
                                                    a.domain()[e], copy.root));
                    }
                    out.push_back(std::move(h));
                }
                return memo.emplace(e, std::move(out)).first->second;
            }

            // graft a full copy of A feeding each element whose projection is not the root
            PointedStructure star_member(const TreeMember & f)
            {
                TreeMember m = f;
                int root = a.indexed().dist.at(0);
                auto elements = m.domain;  // snapshot: grafts add elements
                for (const auto & b : elements) {
                    int hb = a.element_id(m.proj.at(b));
                    if (hb == root)
                        continue;
                    int p = parent[hb];
                    std::map<std::string, std::string> rename;
                    for (const auto & x : a.domain())
                        rename[x] = fresh(x);
                    for (const auto & x : a.domain())
                        m.domain.push_back(rename.at(x));
                    for (int x = 0; x < a.indexed().n; ++x)
                        if (parent[x] != -1)
                            m.facts.push_back(edge_fact(up_edge[x].first, up_edge[x].second,
                                                        rename.at(a.domain()[parent[x]]),
                                                        rename.at(a.domain()[x])));
                    m.facts.push_back(edge_fact(up_edge[hb].first, up_edge[hb].second,
                                                rename.at(a.domain()[p]), b));
                }
                return PointedStructure(a.schema(), m.domain, m.facts, {m.root});
            }
        };
    }

    Frontier frontier_tree(const PointedStructure & a, const FrontierOptions & options)
    {
        if (a.k() != 1)
            throw precondition_error{"tree frontier requires exactly one distinguished element"};
        if (! a.flags().c_connected || ! a.flags().acyclic)
            throw precondition_error{"tree frontier requires a c-connected acyclic structure"};

        auto core = compute_core(a).core;

        std::vector<PointedStructure> members;
        if (! core.schema().all_binary()) {
            auto encoded = binary_encode(core);
            auto inner = frontier_tree(encoded, options);
            for (const auto & b : inner.members)
                members.push_back(reach(binary_decode(b, core.schema())));
        }
        else {
            TreeBuilder builder(core);
            int root = core.indexed().dist.at(0);
            const auto & base = builder.members_for(root);

            std::vector<PointedStructure> plain;
            for (const auto & f : base)
                plain.emplace_back(core.schema(), f.domain, f.facts,
                                   std::vector<std::string>{f.root});
            std::size_t bound = core.facts().size() * core.facts().size() * core.facts().size();
            if (totalsize(plain) > std::max<std::size_t>(bound, 1))
                throw error{"tree frontier size bound violated"};

            for (const auto & f : base)
                members.push_back(builder.star_member(f));
        }

        Frontier frontier;
        frontier.target = a;
        frontier.members = cleanup_members(std::move(members), options);
        frontier.method = FrontierMethod::tree;
        frontier.scope = FrontierScope::connected_acyclic_k1;

        for (const auto & m : frontier.members)
            if (! (m.k() == 1 && m.flags().c_connected && m.flags().acyclic))
                throw error{"tree frontier member left the class"};
        return frontier;
    }

    DualitySet duality_from_frontier(const PointedStructure & a,
                                     const std::vector<PointedStructure> & members,
                                     const FrontierOptions & options)
    {
        std::vector<PointedStructure> duals;
        for (const auto & m : members)
            for (const auto & d : exponential_duals(a, m, options))
                duals.push_back(d);

        std::sort(duals.begin(), duals.end(),
                  [](const PointedStructure & x, const PointedStructure & y) {
                      return encode_structure(x) < encode_structure(y);
                  });
        std::vector<PointedStructure> out;
        for (const auto & d : duals) {
            bool dup = std::any_of(out.begin(), out.end(), [&](const PointedStructure & e) {
                return hom_equivalent(e, d);
            });
            if (! dup)
                out.push_back(d);
        }
        return DualitySet{a, std::move(out)};
    }

    Frontier frontier_from_duality(const PointedStructure & a, const DualitySet & duals)
    {
        std::vector<PointedStructure> members;
        for (const auto & d : duals.duals) {
            if (! (d.schema() == a.schema()) || d.k() != a.k())
                throw precondition_error{"dual has mismatched schema or arity"};
            members.push_back(direct_product(a, d));
        }
        Frontier frontier;
        frontier.target = a;
        frontier.members = cleanup_members(std::move(members), FrontierOptions{});
        frontier.method = FrontierMethod::duality_product;
        frontier.scope = FrontierScope::all_structures;
        return frontier;
    }
}
