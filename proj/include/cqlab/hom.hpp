#pragma once

#include <cqlab/structure.hpp>

#include <atomic>
#include <optional>
#include <utility>

namespace cqlab
{
    /// A fact-preserving map sending dist_i of the source to dist_i of the target.
    struct Homomorphism
    {
        std::vector<std::pair<std::string, std::string>> assignment;  // sorted by source

        const std::string & image(std::string_view x) const;
    };

    struct HomOptions
    {
        const std::atomic<bool> * cancel = nullptr;
        std::size_t max_solutions = SIZE_MAX;
        std::size_t node_budget = SIZE_MAX;  // backtracking nodes; exceeded -> cancelled_error
    };

    struct cancelled_error : error
    {
        using error::error;
    };

    /// Existence plus witness. Uses the incidence-forest dynamic program when the
    /// left-hand structure is c-acyclic, backtracking with forward checking
    /// otherwise. Deterministic witness.
    std::optional<Homomorphism> find_homomorphism(const PointedStructure & a,
                                                  const PointedStructure & b,
                                                  const HomOptions & options = {});

    /// Same, with extra fixed images (used for retraction and marker searches).
    std::optional<Homomorphism> find_homomorphism_pinned(
        const PointedStructure & a, const PointedStructure & b,
        const std::vector<std::pair<std::string, std::string>> & pins,
        const HomOptions & options = {});

    /// Complete duplicate-free enumeration; refuses when |dom(B)|^|dom(A)| exceeds cap.
    std::vector<Homomorphism> all_homomorphisms(const PointedStructure & a,
                                                const PointedStructure & b,
                                                std::size_t cap = 10'000'000,
                                                const HomOptions & options = {});

    bool hom_equivalent(const PointedStructure & a, const PointedStructure & b);

    struct CoreResult
    {
        PointedStructure core;
        Homomorphism retraction;  // from the input onto the core
    };

    /// Iterated proper retractions to a fixpoint; unique up to isomorphism.
    CoreResult compute_core(const PointedStructure & a, const HomOptions & options = {});

    /// Core computation that gives up on elements whose retraction search blows
    /// the node budget; the result is hom-equivalent to the input but may not be
    /// fully reduced. Used to shrink generated structures for output.
    PointedStructure reduce_greedy(const PointedStructure & a, std::size_t node_budget = 200'000);
}
