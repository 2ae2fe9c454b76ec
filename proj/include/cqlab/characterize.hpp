#pragma once

#include <cqlab/cq.hpp>
#include <cqlab/frontier.hpp>

namespace cqlab
{
    struct ExampleSet
    {
        ConjunctiveQuery query;
        std::vector<PointedStructure> positives;
        std::vector<PointedStructure> negatives;
    };

    struct CharacterizeOptions
    {
        FrontierOptions frontier;
        FrontierMethod method = FrontierMethod::marked_pairs;
        bool prune_unsafe_negatives = true;  // sound w.r.t. the class of CQs
    };

    /// Positive example: the canonical structure. Negative examples: frontier
    /// members, emitted as cores. Requires the query's core to be c-acyclic.
    ExampleSet characterizing_examples(const ConjunctiveQuery & q,
                                       const CharacterizeOptions & options = {});

    /// Products of the canonical structure with each negative example.
    Frontier frontier_from_examples(const ConjunctiveQuery & q,
                                    const std::vector<PointedStructure> & positives,
                                    const std::vector<PointedStructure> & negatives);

    bool fits(const ConjunctiveQuery & q,
              const std::vector<PointedStructure> & positives,
              const std::vector<PointedStructure> & negatives);

    struct UniqueCharacterizationVerdict
    {
        bool accepted = false;
        std::optional<ConjunctiveQuery> witness;  // fitting but inequivalent
        std::size_t queries_checked = 0;

        explicit operator bool() const { return accepted; }
    };

    /// Independent oracle: enumerates every CQ with at most atom_budget atoms
    /// (up to variable renaming) and checks that each fitting one is logically
    /// equivalent to q.
    UniqueCharacterizationVerdict uniquely_characterizes_exhaustive(
        const ConjunctiveQuery & q,
        const std::vector<PointedStructure> & positives,
        const std::vector<PointedStructure> & negatives,
        int atom_budget);

    namespace detail_cq_enum
    {
        /// Queries in increasing atom count, up to variable renaming. keep()
        /// prunes generation (must be monotone under atom addition); visit()
        /// sees every safe query and returns false to stop.
        void enumerate_cqs(const Schema & schema, int k, int max_atoms,
                           const std::function<bool(const PointedStructure &)> & keep,
                           const std::function<bool(const ConjunctiveQuery &)> & visit);
    }
}
