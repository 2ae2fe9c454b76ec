#include <cqlab/learn.hpp>
#include <cqlab/io.hpp>

#include <algorithm>
#include <memory>
#include <set>

namespace cqlab
{
    MembershipOracle make_membership_oracle(const ConjunctiveQuery & goal)
    {
        auto hat = canonical_structure(goal);
        auto schema = goal.schema();
        int k = goal.k();
        return MembershipOracle([hat, schema, k](const PointedStructure & example) {
            if (! (example.schema() == schema) || example.k() != k)
                throw protocol_error{"membership query has mismatched schema or arity"};
            return find_homomorphism(hat, example).has_value();
        });
    }

    EquivalenceOracle make_equivalence_oracle(const ConjunctiveQuery & goal, bool adversarial,
                                              unsigned seed)
    {
        auto hat = canonical_structure(goal);
        auto rng = std::make_shared<std::mt19937>(seed);
        return EquivalenceOracle([hat, goal, adversarial, rng](const ConjunctiveQuery & hypothesis) {
            if (! (hypothesis.schema() == goal.schema()) || hypothesis.k() != goal.k())
                throw protocol_error{"equivalence query has mismatched schema or arity"};
            auto hhat = canonical_structure(hypothesis);
            bool h_to_g = find_homomorphism(hhat, hat).has_value();
            bool g_to_h = find_homomorphism(hat, hhat).has_value();
            if (h_to_g && g_to_h)
                return EquivalenceAnswer{true, std::nullopt};
            if (! h_to_g) {
                // the goal's canonical structure is positive for the goal and
                // negative for the hypothesis
                auto ce = hat;
                if (adversarial) {
                    // pad with a hom-redundant renamed copy of a random sub-structure
                    std::uniform_int_distribution<std::size_t> pick(0, hat.facts().size());
                    std::size_t take = pick(*rng);
                    std::vector<Fact> extra(hat.facts().begin(),
                                            hat.facts().begin() + std::min(take, hat.facts().size()));
                    std::set<std::string> dist_set(hat.dist().begin(), hat.dist().end());
                    std::vector<Fact> renamed;
                    std::set<std::string> vars;
                    for (auto f : extra) {
                        for (auto & v : f.args)
                            if (! dist_set.count(v))
                                v = v + "~pad";
                        renamed.push_back(f);
                        vars.insert(f.args.begin(), f.args.end());
                    }
                    if (! renamed.empty()) {
                        vars.insert(hat.domain().begin(), hat.domain().end());
                        auto facts = hat.facts();
                        facts.insert(facts.end(), renamed.begin(), renamed.end());
                        ce = PointedStructure(hat.schema(),
                                              std::vector<std::string>(vars.begin(), vars.end()),
                                              std::move(facts), hat.dist());
                    }
                }
                return EquivalenceAnswer{false, ce};
            }
            // hypothesis is strictly more general: its own canonical structure
            // is positive for it and negative for the goal
            return EquivalenceAnswer{false, hhat};
        });
    }

    PointedStructure minimize_positive(const PointedStructure & a, MembershipOracle & oracle)
    {
        PointedStructure current = a;
        for (const auto & f : a.facts()) {
            if (! current.has_fact(f))
                continue;
            std::vector<Fact> smaller;
            for (const auto & g : current.facts())
                if (! (g == f))
                    smaller.push_back(g);
            PointedStructure candidate(current.schema(), current.domain(), smaller, current.dist());
            if (oracle(candidate))
                current = std::move(candidate);
        }
        return drop_isolated(current);
    }

    namespace
    {
        // shortest designated-free path between two elements in the incidence
        // graph, avoiding one fact; length counted in facts
        int fact_distance_avoiding(const PointedStructure & a, int from, int to, int avoid_fact)
        {
            const auto & idx = a.indexed();
            if (idx.is_dist[from] || idx.is_dist[to])
                return -1;
            if (from == to)
                return 0;
            std::vector<int> dist_of(idx.n, -1);
            dist_of[from] = 0;
            std::vector<int> queue{from};
            for (std::size_t qi = 0; qi < queue.size(); ++qi) {
                int e = queue[qi];
                for (int fi : idx.element_facts[e]) {
                    if (fi == avoid_fact)
                        continue;
                    for (int x : idx.facts[fi].args) {
                        if (idx.is_dist[x] || dist_of[x] != -1)
                            continue;
                        dist_of[x] = dist_of[e] + 1;
                        if (x == to)
                            return dist_of[x];
                        queue.push_back(x);
                    }
                }
            }
            return dist_of[to];
        }

        // a fact is bad at level m if it closes a designated-free cycle of
        // length at most m+1
        int find_bad_fact(const PointedStructure & a, int m)
        {
            const auto & idx = a.indexed();
            for (std::size_t fi = 0; fi < idx.facts.size(); ++fi) {
                const auto & f = idx.facts[fi];
                if (f.args.size() != 2)
                    continue;
                int c = f.args[0], d = f.args[1];
                if (idx.is_dist[c] || idx.is_dist[d])
                    continue;
                if (c == d)
                    return int(fi);  // a loop is a cycle of length 1
                int dist = fact_distance_avoiding(a, c, d, int(fi));
                if (dist >= 0 && dist <= m)
                    return int(fi);
            }
            return -1;
        }

        PointedStructure double_at_fact(const PointedStructure & a, int bad)
        {
            const auto & idx = a.indexed();
            const auto & e = a.facts()[bad];

            auto copy_name = [&](const std::string & x, int side) {
                return x + "@" + std::to_string(side);
            };

            std::vector<std::string> domain;
            std::vector<Fact> facts;
            for (int side = 1; side <= 2; ++side) {
                for (int x = 0; x < idx.n; ++x)
                    if (! idx.is_dist[x])
                        domain.push_back(copy_name(a.domain()[x], side));
                for (std::size_t fi = 0; fi < a.facts().size(); ++fi) {
                    if (int(fi) == bad)
                        continue;
                    Fact g;
                    g.rel = a.facts()[fi].rel;
                    for (const auto & arg : a.facts()[fi].args) {
                        int id = a.element_id(arg);
                        g.args.push_back(idx.is_dist[id] ? arg : copy_name(arg, side));
                    }
                    facts.push_back(std::move(g));
                }
            }
            for (const auto & d : a.dist())
                domain.push_back(d);
            for (int x = 0; x < idx.n; ++x)
                if (idx.is_dist[x])
                    domain.push_back(a.domain()[x]);

            // special edges across the two copies
            facts.push_back(Fact{e.rel, {copy_name(e.args[0], 1), copy_name(e.args[1], 2)}});
            facts.push_back(Fact{e.rel, {copy_name(e.args[0], 2), copy_name(e.args[1], 1)}});

            return PointedStructure(a.schema(), std::move(domain), std::move(facts), a.dist());
        }
    }

    PointedStructure cc_transform(const PointedStructure & a, MembershipOracle & oracle,
                                  const LearnOptions & options)
    {
        if (! a.schema().all_binary())
            throw precondition_error{"the c-acyclicization transform requires a binary schema"};
        if (! oracle(a))
            throw precondition_error{"oracle answers false on the input"};

        auto current = rename_canonical(minimize_positive(a, oracle));
        int m = 0;
        long steps = 0;
        while (! current.flags().c_acyclic) {
            if (++steps > options.max_iterations)
                throw error{"c-acyclicization did not converge within the iteration cap"};
            int bad = find_bad_fact(current, m);
            if (bad < 0) {
                ++m;
                continue;
            }
            auto doubled = double_at_fact(current, bad);
            current = rename_canonical(minimize_positive(doubled, oracle));
        }
        return current;
    }

    namespace
    {
        PointedStructure full_one_element(const Schema & schema, int k)
        {
            std::vector<Fact> facts;
            for (const auto & rel : schema.relations())
                facts.push_back(Fact{rel.name, std::vector<std::string>(rel.arity, "h")});
            return PointedStructure(schema, {"h"}, std::move(facts),
                                    std::vector<std::string>(k, "h"));
        }

        void check_strict_growth(const std::vector<int> & sizes)
        {
            for (std::size_t i = 1; i < sizes.size(); ++i)
                if (sizes[i] <= sizes[i - 1])
                    throw protocol_error{"hypothesis domain size did not strictly increase; "
                                         "the oracle answered inconsistently"};
        }
    }

    LearnReport learn_membership(MembershipOracle & oracle, const Schema & schema, int k,
                                 const LearnOptions & options)
    {
        auto star = binary_schema(schema);
        MembershipOracle wrapped([&](const PointedStructure & b) {
            return oracle(binary_decode(b, schema));
        });

        auto h = cc_transform(full_one_element(star, k), wrapped, options);

        std::vector<int> sizes;
        long iterations = 0;
        for (;;) {
            if (++iterations > options.max_iterations)
                throw error{"learner did not converge within the iteration cap; "
                            "is the goal equivalent to a c-acyclic query?"};
            sizes.push_back(int(h.domain().size()));
            check_strict_growth(sizes);

            auto frontier = frontier_c_acyclic(h, options.method, options.frontier);
            const PointedStructure * advance = nullptr;
            for (const auto & member : frontier.members)
                if (wrapped(member)) {
                    advance = &member;
                    break;
                }
            if (! advance)
                break;
            h = cc_transform(*advance, wrapped, options);
        }

        LearnReport report{
            canonical_query(drop_isolated(binary_decode(h, schema))),
            oracle.calls(), 0, iterations, std::move(sizes)};
        return report;
    }

    LearnReport learn_membership_equivalence(MembershipOracle & membership,
                                             EquivalenceOracle & equivalence,
                                             const Schema & schema, int k,
                                             const LearnOptions & options)
    {
        auto full = full_one_element(schema, k);
        if (! membership(full))
            throw protocol_error{"oracle answers false on the all-facts structure"};
        auto h = minimize_positive(full, membership);

        std::vector<int> sizes;
        long iterations = 0;
        for (;;) {
            if (++iterations > options.max_iterations)
                throw error{"learner did not converge within the iteration cap"};
            sizes.push_back(int(h.domain().size()));
            check_strict_growth(sizes);

            auto hypothesis = canonical_query(h);
            auto answer = equivalence(hypothesis);
            if (answer.yes) {
                LearnReport report{hypothesis, membership.calls(), equivalence.calls(),
                                   iterations, std::move(sizes)};
                return report;
            }
            if (! answer.counterexample)
                throw protocol_error{"equivalence oracle returned neither yes nor a counterexample"};
            const auto & ce = *answer.counterexample;
            if (! (ce.schema() == schema) || ce.k() != k)
                throw protocol_error{"counterexample has mismatched schema or arity"};
            if (find_homomorphism(h, ce))
                throw protocol_error{"counterexample is positive for the hypothesis; "
                                     "the oracle violated the protocol"};
            h = rename_canonical(minimize_positive(direct_product(ce, h), membership));
        }
    }

    LearnReport learn_by_enumeration(MembershipOracle & oracle, const Schema & schema, int k,
                                     int size_cap, const LearnOptions & options)
    {
        std::optional<ConjunctiveQuery> learned;
        long iterations = 0;

        detail_cq_enum::enumerate_cqs(
            schema, k, size_cap,
            [](const PointedStructure &) { return true; },
            [&](const ConjunctiveQuery & q) {
                auto hat = canonical_structure(q);
                if (! compute_core(hat).core.flags().c_acyclic)
                    return true;
                ++iterations;
                CharacterizeOptions copts;
                copts.frontier = options.frontier;
                copts.method = options.method;
                auto examples = characterizing_examples(q, copts);
                for (const auto & p : examples.positives)
                    if (! oracle(p))
                        return true;
                for (const auto & n : examples.negatives)
                    if (oracle(n))
                        return true;
                learned = q;
                return false;
            });

        if (! learned)
            throw size_limit_error{"no equivalent query found within the size cap"};
        return LearnReport{*learned, oracle.calls(), 0, iterations, {}};
    }
}
