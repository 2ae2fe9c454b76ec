#include <cqlab/characterize.hpp>
#include <cqlab/io.hpp>

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace cqlab
{
    ExampleSet characterizing_examples(const ConjunctiveQuery & q, const CharacterizeOptions & options)
    {
        auto hat = canonical_structure(q);
        auto core = compute_core(hat).core;
        if (! core.flags().c_acyclic)
            throw precondition_error{"query core is not c-acyclic: no finite characterization exists"};

        auto frontier = frontier_c_acyclic(hat, options.method, options.frontier);

        ExampleSet out{q, {hat}, {}};
        for (const auto & m : frontier.members) {
            auto negative = compute_core(m).core;
            if (options.prune_unsafe_negatives && ! negative.flags().safe)
                continue;
            out.negatives.push_back(std::move(negative));
        }
        return out;
    }

    bool fits(const ConjunctiveQuery & q,
              const std::vector<PointedStructure> & positives,
              const std::vector<PointedStructure> & negatives)
    {
        auto hat = canonical_structure(q);
        for (const auto & p : positives) {
            if (! (p.schema() == q.schema()) || p.k() != q.k())
                throw precondition_error{"example has mismatched schema or arity"};
            if (! find_homomorphism(hat, p))
                return false;
        }
        for (const auto & n : negatives) {
            if (! (n.schema() == q.schema()) || n.k() != q.k())
                throw precondition_error{"example has mismatched schema or arity"};
            if (find_homomorphism(hat, n))
                return false;
        }
        return true;
    }

    Frontier frontier_from_examples(const ConjunctiveQuery & q,
                                    const std::vector<PointedStructure> & positives,
                                    const std::vector<PointedStructure> & negatives)
    {
        if (! fits(q, positives, negatives))
            throw precondition_error{"query does not fit the example set"};
        auto hat = canonical_structure(q);
        std::vector<PointedStructure> members;
        for (const auto & n : negatives)
            members.push_back(direct_product(hat, n));

        Frontier frontier;
        frontier.target = hat;
        frontier.members = members;
        frontier.scope = FrontierScope::safe_structures;
        frontier.method = FrontierMethod::duality_product;
        return frontier;
    }

    namespace
    {
        struct CqNode
        {
            std::vector<Fact> atoms;
            int fresh_used = 0;
        };

        std::vector<std::string> node_vars(const std::vector<std::string> & head, const CqNode & node)
        {
            std::set<std::string> vars(head.begin(), head.end());
            for (const auto & a : node.atoms)
                vars.insert(a.args.begin(), a.args.end());
            return {vars.begin(), vars.end()};
        }

        PointedStructure node_structure(const Schema & schema, const std::vector<std::string> & head,
                                        const CqNode & node)
        {
            return PointedStructure(schema, node_vars(head, node), node.atoms, head);
        }

        std::string invariant_key(const PointedStructure & s)
        {
            std::map<std::string, int> rel_count;
            for (const auto & f : s.facts())
                ++rel_count[f.rel];
            std::vector<int> degrees;
            for (const auto & fs : s.indexed().element_facts)
                degrees.push_back(int(fs.size()));
            std::sort(degrees.begin(), degrees.end());
            std::string key = std::to_string(s.domain().size()) + "|";
            for (const auto & [r, c] : rel_count)
                key += r + ":" + std::to_string(c) + ",";
            key += "|";
            for (int d : degrees)
                key += std::to_string(d) + ".";
            return key;
        }
    }

    namespace detail_cq_enum
    {
        // breadth-first enumeration of conjunctive queries up to variable
        // renaming, pruned by keep() (monotone under atom addition), visiting
        // every safe query via visit(); visit returns false to stop
        void enumerate_cqs(const Schema & schema, int k, int max_atoms,
                           const std::function<bool(const PointedStructure &)> & keep,
                           const std::function<bool(const ConjunctiveQuery &)> & visit)
        {
            std::vector<std::string> head;
            for (int i = 1; i <= k; ++i)
                head.push_back("x" + std::to_string(i));

            std::deque<CqNode> queue;
            queue.push_back(CqNode{});
            std::map<std::string, std::vector<PointedStructure>> seen;

            auto try_insert = [&](const PointedStructure & s) {
                auto key = invariant_key(s);
                auto & bucket = seen[key];
                for (const auto & other : bucket)
                    if (is_isomorphic(s, other))
                        return false;
                bucket.push_back(s);
                return true;
            };

            while (! queue.empty()) {
                CqNode node = std::move(queue.front());
                queue.pop_front();

                if (int(node.atoms.size()) >= max_atoms)
                    continue;

                std::vector<std::string> existing = node_vars(head, node);
                for (const auto & rel : schema.relations()) {
                    // argument choices: existing variables or fresh ones (fresh
                    // variables are numbered consecutively left to right)
                    std::vector<std::size_t> pick(rel.arity, 0);
                    for (;;) {
                        CqNode child = node;
                        Fact atom;
                        atom.rel = rel.name;
                        int fresh = 0;
                        std::vector<std::string> local;  // fresh names created for this atom
                        bool ok = true;
                        for (int p = 0; p < rel.arity; ++p) {
                            std::size_t c = pick[p];
                            if (c < existing.size())
                                atom.args.push_back(existing[c]);
                            else {
                                std::size_t fresh_slot = c - existing.size();
                                if (fresh_slot > std::size_t(fresh)) {
                                    // skip non-canonical fresh orderings
                                    ok = false;
                                    break;
                                }
                                if (fresh_slot == std::size_t(fresh)) {
                                    local.push_back("y" + std::to_string(child.fresh_used + fresh + 1));
                                    ++fresh;
                                }
                                atom.args.push_back(local[fresh_slot]);
                            }
                        }
                        if (ok) {
                            bool duplicate_atom =
                                std::find(child.atoms.begin(), child.atoms.end(), atom) != child.atoms.end();
                            if (! duplicate_atom) {
                                child.atoms.push_back(atom);
                                child.fresh_used += fresh;
                                std::sort(child.atoms.begin(), child.atoms.end());
                                auto s = node_structure(schema, head, child);
                                if (keep(s) && try_insert(s)) {
                                    if (s.flags().safe) {
                                        ConjunctiveQuery q(schema, head, child.atoms);
                                        if (! visit(q))
                                            return;
                                    }
                                    queue.push_back(std::move(child));
                                }
                            }
                        }
                        int p = 0;
                        int limit = int(existing.size()) + rel.arity;  // at most arity fresh vars
                        for (; p < rel.arity; ++p) {
                            if (int(++pick[p]) < limit)
                                break;
                            pick[p] = 0;
                        }
                        if (p == rel.arity)
                            break;
                    }
                }
            }
        }
    }

    UniqueCharacterizationVerdict uniquely_characterizes_exhaustive(
        const ConjunctiveQuery & q,
        const std::vector<PointedStructure> & positives,
        const std::vector<PointedStructure> & negatives,
        int atom_budget)
    {
        auto hat = canonical_structure(q);
        UniqueCharacterizationVerdict verdict;
        verdict.accepted = true;

        auto keep = [&](const PointedStructure & s) {
            for (const auto & p : positives)
                if (! find_homomorphism(s, p))
                    return false;
            return true;
        };

        auto visit = [&](const ConjunctiveQuery & candidate) {
            ++verdict.queries_checked;
            auto chat = canonical_structure(candidate);
            for (const auto & n : negatives)
                if (find_homomorphism(chat, n))
                    return true;  // not fitting; keep searching
            if (! hom_equivalent(chat, hat)) {
                verdict.accepted = false;
                verdict.witness = candidate;
                return false;
            }
            return true;
        };

        detail_cq_enum::enumerate_cqs(q.schema(), q.k(), atom_budget, keep, visit);
        return verdict;
    }
}
