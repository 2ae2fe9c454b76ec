#pragma once

#include <cqlab/structure.hpp>

#include <functional>

namespace cqlab
{
    enum class CandidateClass
    {
        all,
        safe,
        connected_acyclic_k1,
    };

    struct EnumSpec
    {
        Schema schema;
        int k = 0;
        int max_elems = 3;
        CandidateClass cls = CandidateClass::all;
    };

    /// Visits one representative per isomorphism class of structures with at
    /// most max_elems elements (at most one fact-free non-distinguished element
    /// each, which is enough to separate homomorphism behaviour). Enumeration
    /// order is deterministic: by element count, then distinguished pattern,
    /// then fact set. Return false from the visitor to stop early.
    void enumerate_structures(const EnumSpec & spec,
                              const std::function<bool(const PointedStructure &)> & visit);

    namespace detail
    {
        /// Compact candidate used by the exhaustive sweeps: at most 6 elements
        /// and 64 possible facts over the schema. The fact mask is relative to
        /// FactTable(schema, nu); elements nu..n-1 are fact-free.
        struct Candidate
        {
            std::uint8_t n = 0;
            std::uint8_t nu = 0;
            std::int8_t dist[2] = {-1, -1};
            std::uint8_t rels = 0;  // bitmask of relation indices in use
            std::uint64_t mask = 0;
        };

        struct FactTable
        {
            Schema schema;
            int n = 0;
            std::vector<IFact> facts;  // bit position -> fact

            FactTable(const Schema & s, int n);
        };

        /// Cached per (schema, k, max_elems): all canonical candidates.
        const std::vector<Candidate> & candidate_pool(const Schema & schema, int k, int max_elems);

        PointedStructure materialize(const Schema & schema, const Candidate & c);

        bool candidate_in_class(const Schema & schema, const Candidate & c, CandidateClass cls);
    }
}
