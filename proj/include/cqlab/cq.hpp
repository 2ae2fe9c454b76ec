#pragma once

#include <cqlab/hom.hpp>
#include <cqlab/structure.hpp>

#include <set>

namespace cqlab
{
    /// A k-ary conjunctive query. In strict mode every head variable must occur
    /// in at least one atom; the relaxed mode is kept for callers that need
    /// not-necessarily-safe queries.
    class ConjunctiveQuery
    {
    public:
        ConjunctiveQuery(Schema schema,
                         std::vector<std::string> head_vars,
                         std::vector<Fact> atoms,
                         bool allow_unsafe = false);

        const Schema & schema() const { return schema_; }
        const std::vector<std::string> & head_vars() const { return head_; }
        const std::vector<Fact> & atoms() const { return atoms_; }
        int k() const { return int(head_.size()); }
        bool safe() const;

        bool operator==(const ConjunctiveQuery &) const = default;

    private:
        Schema schema_;
        std::vector<std::string> head_;
        std::vector<Fact> atoms_;
    };

    /// Domain = variables, facts = atoms, dist = head variables.
    PointedStructure canonical_structure(const ConjunctiveQuery & q);

    /// Inverse direction; requires a safe structure. Elements occurring in no
    /// fact are dropped (they cannot be variables of a query).
    ConjunctiveQuery canonical_query(const PointedStructure & a);

    /// All k-tuples over dom(A) satisfying q; A must have k = 0.
    std::set<std::vector<std::string>> evaluate(const ConjunctiveQuery & q,
                                                const PointedStructure & a,
                                                std::size_t cap = 10'000'000);

    /// q subseteq q', decided on canonical structures.
    bool contains(const ConjunctiveQuery & q, const ConjunctiveQuery & q_prime);
    bool equivalent(const ConjunctiveQuery & q, const ConjunctiveQuery & q_prime);
}
