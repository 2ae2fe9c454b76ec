#pragma once

#include <cqlab/cq.hpp>
#include <cqlab/structure.hpp>

#include <random>
#include <set>
#include <string>
#include <vector>

namespace cqlab_test
{
    inline cqlab::PointedStructure random_structure(const cqlab::Schema & schema, int max_elems,
                                                    int max_facts, int k, std::mt19937 & rng)
    {
        std::uniform_int_distribution<int> nd(std::max(1, k > 0 ? 1 : 0), max_elems);
        int n = std::max(nd(rng), k > 0 ? 1 : 0);
        std::vector<std::string> domain;
        for (int i = 0; i < n; ++i)
            domain.push_back("v" + std::to_string(i));

        std::uniform_int_distribution<int> fd(0, max_facts);
        std::uniform_int_distribution<int> ed(0, n - 1);
        std::uniform_int_distribution<std::size_t> rd(0, schema.relations().size() - 1);
        int m = fd(rng);
        std::vector<cqlab::Fact> facts;
        for (int i = 0; i < m && n > 0; ++i) {
            const auto & rel = schema.relations()[rd(rng)];
            cqlab::Fact f;
            f.rel = rel.name;
            for (int p = 0; p < rel.arity; ++p)
                f.args.push_back(domain[ed(rng)]);
            facts.push_back(std::move(f));
        }
        std::vector<std::string> dist;
        for (int i = 0; i < k; ++i)
            dist.push_back(domain[ed(rng)]);
        return cqlab::PointedStructure(schema, std::move(domain), std::move(facts), std::move(dist));
    }

    // grows a forest over fresh existential variables so every cycle passes
    // through a head variable
    inline cqlab::ConjunctiveQuery random_c_acyclic_cq(const cqlab::Schema & schema, int max_atoms,
                                                       int k, std::mt19937 & rng)
    {
        std::vector<std::string> head;
        for (int i = 1; i <= k; ++i)
            head.push_back("x" + std::to_string(i));

        std::vector<std::string> existentials;
        int fresh = 0;
        auto new_var = [&]() {
            existentials.push_back("y" + std::to_string(++fresh));
            return existentials.back();
        };

        std::uniform_int_distribution<int> atom_count(std::max(1, k), max_atoms);
        int m = atom_count(rng);
        std::vector<cqlab::Fact> atoms;
        std::set<std::string> covered;

        auto pick_rel = [&]() -> const cqlab::Relation & {
            std::uniform_int_distribution<std::size_t> rd(0, schema.relations().size() - 1);
            return schema.relations()[rd(rng)];
        };

        for (int i = 0; i < m; ++i) {
            const auto & rel = pick_rel();
            cqlab::Fact atom;
            atom.rel = rel.name;
            // at most one existing existential per atom keeps the query c-acyclic;
            // head variables may repeat freely
            bool used_existing_existential = false;
            for (int p = 0; p < rel.arity; ++p) {
                std::uniform_int_distribution<int> choice(0, 9);
                int c = choice(rng);
                if (c < 3 && k > 0) {
                    std::uniform_int_distribution<std::size_t> hd(0, head.size() - 1);
                    atom.args.push_back(head[hd(rng)]);
                }
                else if (c < 6 && ! existentials.empty() && ! used_existing_existential) {
                    std::uniform_int_distribution<std::size_t> ydist(0, existentials.size() - 1);
                    atom.args.push_back(existentials[ydist(rng)]);
                    used_existing_existential = true;
                }
                else
                    atom.args.push_back(new_var());
            }
            // avoid a repeated existential inside one atom (that is a cycle)
            std::set<std::string> seen;
            bool bad = false;
            for (const auto & v : atom.args) {
                bool is_head = std::find(head.begin(), head.end(), v) != head.end();
                if (! is_head && ! seen.insert(v).second)
                    bad = true;
            }
            if (bad) {
                --i;
                continue;
            }
            covered.insert(atom.args.begin(), atom.args.end());
            atoms.push_back(std::move(atom));
        }

        // safety: give uncovered head variables one atom each
        for (const auto & h : head) {
            if (covered.count(h))
                continue;
            const auto & rel = pick_rel();
            cqlab::Fact atom;
            atom.rel = rel.name;
            atom.args.push_back(h);
            for (int p = 1; p < rel.arity; ++p)
                atom.args.push_back(new_var());
            covered.insert(atom.args.begin(), atom.args.end());
            atoms.push_back(std::move(atom));
        }

        return cqlab::ConjunctiveQuery(schema, head, std::move(atoms));
    }

    // random oriented labelled tree with one distinguished root
    inline cqlab::PointedStructure random_tree(const cqlab::Schema & schema, int max_facts,
                                               std::mt19937 & rng)
    {
        std::uniform_int_distribution<int> size_dist(1, max_facts);
        int edges = size_dist(rng);
        int n = edges + 1;
        std::vector<std::string> domain;
        for (int i = 0; i < n; ++i)
            domain.push_back("t" + std::to_string(i));
        std::vector<cqlab::Fact> facts;
        std::uniform_int_distribution<std::size_t> rd(0, schema.relations().size() - 1);
        std::uniform_int_distribution<int> flip(0, 1);
        for (int v = 1; v < n; ++v) {
            std::uniform_int_distribution<int> pd(0, v - 1);
            int p = pd(rng);
            const auto & rel = schema.relations()[rd(rng)];
            if (flip(rng))
                facts.push_back(cqlab::Fact{rel.name, {domain[p], domain[v]}});
            else
                facts.push_back(cqlab::Fact{rel.name, {domain[v], domain[p]}});
        }
        return cqlab::PointedStructure(schema, std::move(domain), std::move(facts), {domain[0]});
    }
}
