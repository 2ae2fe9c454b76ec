#pragma once

#include <cqlab/schema.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace cqlab
{
    struct StructureFlags
    {
        bool c_acyclic = false;
        bool c_connected = false;
        bool acyclic = false;
        bool safe = false;
        bool unp = false;
    };

    namespace detail
    {
        struct IFact
        {
            int rel = 0;
            std::vector<int> args;
        };

        /// Integer-indexed view used by the solvers; built once per structure.
        struct Indexed
        {
            int n = 0;
            std::vector<IFact> facts;
            std::vector<int> dist;
            std::vector<std::vector<int>> element_facts;  // fact ids per element, with multiplicity
            std::vector<char> is_dist;
        };
    }

    /// A finite relational structure with an ordered tuple of distinguished elements.
    /// Immutable after construction; domain and facts are kept canonically sorted.
    class PointedStructure
    {
    public:
        PointedStructure() = default;  // the empty structure over the empty schema
        PointedStructure(Schema schema,
                         std::vector<std::string> domain,
                         std::vector<Fact> facts,
                         std::vector<std::string> dist);

        const Schema & schema() const { return schema_; }
        const std::vector<std::string> & domain() const { return domain_; }
        const std::vector<Fact> & facts() const { return facts_; }
        const std::vector<std::string> & dist() const { return dist_; }
        int k() const { return int(dist_.size()); }
        int size() const { return int(facts_.size()); }

        const StructureFlags & flags() const { return flags_; }
        const detail::Indexed & indexed() const { return idx_; }

        int element_id(std::string_view name) const;  // -1 if absent
        const std::string & element_name(int id) const { return domain_.at(id); }
        bool has_fact(const Fact & f) const;

        bool operator==(const PointedStructure & other) const;

    private:
        Schema schema_;
        std::vector<std::string> domain_;
        std::vector<Fact> facts_;
        std::vector<std::string> dist_;
        StructureFlags flags_;
        detail::Indexed idx_;
    };

    struct Limits
    {
        std::size_t max_exponential_domain = 1'000'000;
        std::size_t max_exponential_work = 200'000'000;
        std::size_t max_enumeration = 50'000'000;
    };

    PointedStructure direct_product(const PointedStructure & a, const PointedStructure & b);

    /// Renames non-distinguished elements apart, then glues the two structures at
    /// their distinguished tuples (which must have identical identity types).
    PointedStructure fg_disjoint_union(const PointedStructure & a, const PointedStructure & b);
    PointedStructure fg_disjoint_union(const Schema & schema,
                                       const std::vector<std::string> & dist,
                                       const std::vector<PointedStructure> & parts);

    /// Fact partition by connected components of the fact graph (facts adjacent
    /// iff they share a non-distinguished element). Every component keeps the
    /// full distinguished tuple; fact-free elements belong to no component.
    std::vector<PointedStructure> fg_components(const PointedStructure & a);

    /// Substructure induced by the elements reachable from the distinguished
    /// tuple in the incidence graph. Requires k >= 1.
    PointedStructure reach(const PointedStructure & a);

    /// B^C on structures without distinguished elements: the domain is the set of
    /// all functions dom(C) -> dom(B). Guarded by limits.max_exponential_domain.
    PointedStructure exponentiate(const PointedStructure & b, const PointedStructure & c,
                                  const Limits & limits = {});

    namespace detail
    {
        struct PowerResult
        {
            PointedStructure power;
            // funcs[i][c] = index into sorted dom(B) of the value at sorted dom(C)[c];
            // names[i] is the corresponding element name in power
            std::vector<std::vector<int>> funcs;
            std::vector<std::string> names;
        };

        PowerResult exponentiate_table(const PointedStructure & b, const PointedStructure & c,
                                       const Limits & limits);
    }

    /// The binary schema S* with relations R@1..R@n for each n-ary R of S.
    Schema binary_schema(const Schema & schema);

    /// Bipartite encoding over S*: one fresh element per fact, facts R@i(b, f).
    PointedStructure binary_encode(const PointedStructure & a);

    /// Inverse reading over the original schema: fact R(a1..an) iff some witness
    /// y has all R@i(ai, y).
    PointedStructure binary_decode(const PointedStructure & b, const Schema & original);

    /// For each nonempty S subseteq {1..k}: the two-element structure with every
    /// fact on c only, and b at the dist positions in S. A structure is unsafe
    /// iff it maps to some member of this family. Requires k >= 1.
    std::vector<PointedStructure> unsafe_dual_family(const Schema & schema, int k);

    /// Drops non-distinguished elements that occur in no fact (keeps at least
    /// one element when k = 0 and the structure had any, so homs stay possible).
    PointedStructure drop_isolated(const PointedStructure & a);

    /// Renames elements to e0, e1, ... following the canonical element order.
    PointedStructure rename_canonical(const PointedStructure & a, const std::string & prefix = "e");

    bool is_isomorphic(const PointedStructure & a, const PointedStructure & b);
}
