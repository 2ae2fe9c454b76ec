#pragma once

#include <cqlab/enumerate.hpp>
#include <cqlab/hom.hpp>
#include <cqlab/structure.hpp>

#include <optional>
#include <string>

namespace cqlab
{
    enum class FrontierMethod
    {
        marked_pairs,     // corrected polynomial construction (default)
        duality_product,  // exponential duals per component, then products
        paper_poly,       // literal per-component construction and composition
        tree,             // connected acyclic k=1 construction
    };

    std::string to_string(FrontierMethod m);
    std::optional<FrontierMethod> frontier_method_from_string(std::string_view s);

    enum class FrontierScope
    {
        all_structures,
        safe_structures,
        connected_acyclic_k1,
    };

    std::string to_string(FrontierScope s);

    struct Frontier
    {
        PointedStructure target;
        std::vector<PointedStructure> members;
        FrontierScope scope = FrontierScope::all_structures;
        FrontierMethod method = FrontierMethod::marked_pairs;
        std::string verification = "unchecked";
    };

    struct DualitySet
    {
        PointedStructure target;
        std::vector<PointedStructure> duals;
    };

    struct FrontierOptions
    {
        Limits limits;
        bool augment_unsafe = true;       // paper-poly only: add A x U products
        bool prune_dominated = true;      // drop members that map into другой member
        std::size_t reduce_budget = 200'000;
        std::size_t reduce_max_elements = 400;  // skip reduction of larger members
    };

    /// Case 1 of the per-component construction: a single fact on distinguished
    /// elements only. Returns the explicit two-element dual and the singleton
    /// frontier {A x dual}.
    struct Case1Result
    {
        Frontier frontier;
        DualitySet duals;
    };
    Case1Result frontier_single_fact_component(const PointedStructure & a);

    /// Case 2, literal reading: pair elements (x, f), designated elements carry
    /// an id marker that never witnesses the "different fact" requirement.
    /// Kept for the paper_poly method; its scope claim fails verification on
    /// some inputs (see verify_frontier tests).
    Frontier frontier_connected_component(const PointedStructure & a);

    /// Duals for one fg-connected component of a c-acyclic core with UNP,
    /// via exponentiation of the component's singleton frontier member.
    DualitySet component_dual_set(const PointedStructure & a, const FrontierOptions & options = {});

    /// Frontier w.r.t. all structures for any structure whose core is c-acyclic.
    Frontier frontier_c_acyclic(const PointedStructure & a,
                                FrontierMethod method = FrontierMethod::marked_pairs,
                                const FrontierOptions & options = {});

    /// Frontier for a c-connected acyclic structure with one distinguished
    /// element, w.r.t. that same class; members stay in the class.
    Frontier frontier_tree(const PointedStructure & a, const FrontierOptions & options = {});

    /// totalsize as used by the tree construction's size bound.
    std::size_t totalsize(const std::vector<PointedStructure> & structures);

    DualitySet duality_from_frontier(const PointedStructure & a,
                                     const std::vector<PointedStructure> & members,
                                     const FrontierOptions & options = {});

    Frontier frontier_from_duality(const PointedStructure & a, const DualitySet & duals);

    enum class VerifyMode
    {
        structural,
        exhaustive,
    };

    struct VerifyOptions
    {
        VerifyMode mode = VerifyMode::exhaustive;
        int max_elems = 3;
        CandidateClass cls = CandidateClass::all;
        int threads = 1;
        FrontierOptions frontier;  // for the structural reference frontier
    };

    struct VerifyVerdict
    {
        bool accepted = false;
        std::string reason;
        std::optional<PointedStructure> witness;
        std::string violated;  // "condition1" | "condition2" | "coverage" | ""

        explicit operator bool() const { return accepted; }
    };

    VerifyVerdict verify_frontier(const PointedStructure & a,
                                  const std::vector<PointedStructure> & members,
                                  const VerifyOptions & options = {});
}
