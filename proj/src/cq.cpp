#include <cqlab/cq.hpp>

#include <algorithm>
#include <set>

namespace cqlab
{
    ConjunctiveQuery::ConjunctiveQuery(Schema schema,
                                       std::vector<std::string> head_vars,
                                       std::vector<Fact> atoms,
                                       bool allow_unsafe) :
        schema_(std::move(schema)),
        head_(std::move(head_vars)),
        atoms_(std::move(atoms))
    {
        std::sort(atoms_.begin(), atoms_.end());
        atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
        if (atoms_.empty())
            throw error{"query needs at least one atom"};

        std::set<std::string> atom_vars;
        for (const auto & a : atoms_) {
            const auto * rel = schema_.find(a.rel);
            if (! rel)
                throw error{"undeclared relation " + a.rel};
            if (int(a.args.size()) != rel->arity)
                throw error{"arity mismatch in atom " + a.to_string()};
            for (const auto & v : a.args) {
                if (! valid_token(v))
                    throw error{"bad variable name '" + v + "'"};
                atom_vars.insert(v);
            }
        }
        for (const auto & v : head_) {
            if (! valid_token(v))
                throw error{"bad variable name '" + v + "'"};
            if (! allow_unsafe && ! atom_vars.count(v))
                throw error{"unsafe head variable " + v};
        }
    }

    bool ConjunctiveQuery::safe() const
    {
        std::set<std::string> atom_vars;
        for (const auto & a : atoms_)
            atom_vars.insert(a.args.begin(), a.args.end());
        return std::all_of(head_.begin(), head_.end(),
                           [&](const std::string & v) { return atom_vars.count(v) > 0; });
    }

    PointedStructure canonical_structure(const ConjunctiveQuery & q)
    {
        std::set<std::string> vars(q.head_vars().begin(), q.head_vars().end());
        for (const auto & a : q.atoms())
            vars.insert(a.args.begin(), a.args.end());
        return PointedStructure(q.schema(),
                                std::vector<std::string>(vars.begin(), vars.end()),
                                q.atoms(), q.head_vars());
    }

    ConjunctiveQuery canonical_query(const PointedStructure & a)
    {
        if (! a.flags().safe)
            throw precondition_error{"structure is unsafe: some distinguished element occurs in no fact"};
        return ConjunctiveQuery(a.schema(), a.dist(), a.facts());
    }

    std::set<std::vector<std::string>> evaluate(const ConjunctiveQuery & q,
                                                const PointedStructure & a,
                                                std::size_t cap)
    {
        if (! (q.schema() == a.schema()))
            throw precondition_error{"schema mismatch"};
        if (a.k() != 0)
            throw precondition_error{"evaluation target must have no distinguished elements"};

        auto hat = canonical_structure(q);
        PointedStructure hat0(hat.schema(), hat.domain(), hat.facts(), {});
        auto homs = all_homomorphisms(hat0, a, cap);

        std::set<std::vector<std::string>> out;
        for (const auto & h : homs) {
            std::vector<std::string> tuple;
            for (const auto & v : q.head_vars())
                tuple.push_back(h.image(v));
            out.insert(std::move(tuple));
        }
        return out;
    }

    bool contains(const ConjunctiveQuery & q, const ConjunctiveQuery & q_prime)
    {
        if (! (q.schema() == q_prime.schema()))
            throw precondition_error{"schema mismatch"};
        if (q.k() != q_prime.k())
            throw precondition_error{"arity mismatch"};
        return find_homomorphism(canonical_structure(q_prime), canonical_structure(q)).has_value();
    }

    bool equivalent(const ConjunctiveQuery & q, const ConjunctiveQuery & q_prime)
    {
        return contains(q, q_prime) && contains(q_prime, q);
    }
}
