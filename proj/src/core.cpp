#include <cqlab/hom.hpp>

#include <algorithm>
#include <map>
#include <unordered_set>

namespace cqlab
{
    namespace
    {
        // retracts away elements u that some v can impersonate directly: every
        // fact stays a fact when u is replaced by v. Cheap preprocessing that
        // collapses the bulk of generated structures before any search runs.
        std::pair<PointedStructure, std::map<std::string, std::string>>
        collapse_dominated(const PointedStructure & a)
        {
            const auto & idx = a.indexed();
            int n = idx.n, m = int(idx.facts.size());
            std::vector<char> elem_alive(n, 1), fact_alive(m, 1);
            std::vector<int> image(n);
            for (int i = 0; i < n; ++i)
                image[i] = i;

            auto pack = [&](const detail::IFact & f, int from, int to) -> std::uint64_t {
                std::uint64_t key = std::uint64_t(f.rel);
                for (int x : f.args) {
                    int v = x == from ? to : x;
                    key = key * 1000003u + std::uint64_t(v) + 1;
                }
                return key;
            };

            std::unordered_set<std::uint64_t> live_facts;
            for (int fi = 0; fi < m; ++fi)
                live_facts.insert(pack(idx.facts[fi], -1, -1));

            bool changed = true;
            while (changed) {
                changed = false;
                for (int u = 0; u < n; ++u) {
                    if (! elem_alive[u] || idx.is_dist[u])
                        continue;
                    for (int v = 0; v < n; ++v) {
                        if (v == u || ! elem_alive[v])
                            continue;
                        bool ok = true;
                        for (int fi : idx.element_facts[u]) {
                            if (! fact_alive[fi])
                                continue;
                            if (! live_facts.count(pack(idx.facts[fi], u, v))) {
                                ok = false;
                                break;
                            }
                        }
                        if (! ok)
                            continue;
                        elem_alive[u] = 0;
                        image[u] = v;
                        for (int fi : idx.element_facts[u])
                            if (fact_alive[fi]) {
                                fact_alive[fi] = 0;
                                live_facts.erase(pack(idx.facts[fi], -1, -1));
                            }
                        changed = true;
                        break;
                    }
                }
            }

            std::vector<std::string> keep;
            for (int i = 0; i < n; ++i)
                if (elem_alive[i])
                    keep.push_back(a.domain()[i]);
            std::vector<Fact> facts;
            for (int fi = 0; fi < m; ++fi)
                if (fact_alive[fi])
                    facts.push_back(a.facts()[fi]);

            std::map<std::string, std::string> map;
            for (int i = 0; i < n; ++i) {
                int target = i;
                while (! elem_alive[target])
                    target = image[target];
                map[a.domain()[i]] = a.domain()[target];
            }
            return {PointedStructure(a.schema(), std::move(keep), std::move(facts), a.dist()),
                    std::move(map)};
        }

        PointedStructure induced(const PointedStructure & a, const std::vector<std::string> & keep)
        {
            std::vector<std::string> domain = keep;
            std::sort(domain.begin(), domain.end());
            std::vector<Fact> facts;
            for (const auto & f : a.facts()) {
                bool ok = std::all_of(f.args.begin(), f.args.end(), [&](const std::string & x) {
                    return std::binary_search(domain.begin(), domain.end(), x);
                });
                if (ok)
                    facts.push_back(f);
            }
            return PointedStructure(a.schema(), std::move(domain), std::move(facts), a.dist());
        }

        // one pass: try to retract away a single element; returns the shrunk
        // structure and the retraction map, or nullopt at the fixpoint
        std::optional<std::pair<PointedStructure, std::map<std::string, std::string>>>
        retract_once(const PointedStructure & a, const HomOptions & options, bool budgeted)
        {
            std::vector<std::string> order = a.domain();
            std::stable_sort(order.begin(), order.end(), [&](const auto & x, const auto & y) {
                return a.indexed().element_facts[a.element_id(x)].size()
                    < a.indexed().element_facts[a.element_id(y)].size();
            });

            std::vector<char> is_dist(a.domain().size(), 0);
            for (int d : a.indexed().dist)
                is_dist[d] = 1;

            for (const auto & x : order) {
                if (is_dist[a.element_id(x)])
                    continue;
                std::vector<std::string> keep;
                for (const auto & y : a.domain())
                    if (y != x)
                        keep.push_back(y);
                auto sub = induced(a, keep);
                std::optional<Homomorphism> h;
                try {
                    h = find_homomorphism(a, sub, options);
                }
                catch (const cancelled_error &) {
                    if (! budgeted)
                        throw;
                    continue;
                }
                if (! h)
                    continue;
                std::map<std::string, std::string> map;
                std::vector<std::string> image;
                for (const auto & [from, to] : h->assignment) {
                    map[from] = to;
                    image.push_back(to);
                }
                std::sort(image.begin(), image.end());
                image.erase(std::unique(image.begin(), image.end()), image.end());
                return std::make_pair(induced(a, image), std::move(map));
            }
            return std::nullopt;
        }

        CoreResult compute_core_impl(const PointedStructure & a, HomOptions options, bool budgeted)
        {
            auto [current, total] = collapse_dominated(a);

            for (;;) {
                auto step = retract_once(current, options, budgeted);
                if (! step)
                    break;
                auto collapsed = collapse_dominated(step->first);
                current = std::move(collapsed.first);
                for (auto & [from, to] : total)
                    to = collapsed.second.at(step->second.at(to));
            }

            Homomorphism retraction;
            for (const auto & [from, to] : total)
                retraction.assignment.emplace_back(from, to);
            return CoreResult{std::move(current), std::move(retraction)};
        }
    }

    CoreResult compute_core(const PointedStructure & a, const HomOptions & options)
    {
        return compute_core_impl(a, options, false);
    }

    PointedStructure reduce_greedy(const PointedStructure & a, std::size_t node_budget)
    {
        HomOptions options;
        options.node_budget = node_budget;
        return compute_core_impl(a, options, true).core;
    }
}
