#pragma once

#include <cqlab/characterize.hpp>
#include <cqlab/cq.hpp>

#include <functional>
#include <random>
#include <variant>

namespace cqlab
{
    class MembershipOracle
    {
    public:
        explicit MembershipOracle(std::function<bool(const PointedStructure &)> fn) :
            fn_(std::move(fn)) {}

        bool operator()(const PointedStructure & example)
        {
            ++calls_;
            return fn_(example);
        }

        long calls() const { return calls_; }

    private:
        std::function<bool(const PointedStructure &)> fn_;
        long calls_ = 0;
    };

    struct EquivalenceAnswer
    {
        bool yes = false;
        std::optional<PointedStructure> counterexample;
    };

    class EquivalenceOracle
    {
    public:
        explicit EquivalenceOracle(std::function<EquivalenceAnswer(const ConjunctiveQuery &)> fn) :
            fn_(std::move(fn)) {}

        EquivalenceAnswer operator()(const ConjunctiveQuery & hypothesis)
        {
            ++calls_;
            return fn_(hypothesis);
        }

        long calls() const { return calls_; }

    private:
        std::function<EquivalenceAnswer(const ConjunctiveQuery &)> fn_;
        long calls_ = 0;
    };

    /// Labels an example positive iff the distinguished tuple satisfies the goal.
    MembershipOracle make_membership_oracle(const ConjunctiveQuery & goal);

    /// Answers yes iff the hypothesis is equivalent to the goal; otherwise
    /// returns the goal's canonical structure as a counterexample, optionally
    /// padded with hom-redundant facts to stress minimization.
    EquivalenceOracle make_equivalence_oracle(const ConjunctiveQuery & goal,
                                              bool adversarial = false,
                                              unsigned seed = 0);

    struct LearnReport
    {
        ConjunctiveQuery learned;
        long membership_calls = 0;
        long equivalence_calls = 0;
        long iterations = 0;
        std::vector<int> hypothesis_domain_sizes;
    };

    struct LearnOptions
    {
        long max_iterations = 10'000;
        FrontierMethod method = FrontierMethod::marked_pairs;
        FrontierOptions frontier;
    };

    /// Removes facts one at a time, keeping the oracle answer positive; the
    /// result admits no single-fact removal. The oracle must answer true on the
    /// input (caller's contract).
    PointedStructure minimize_positive(const PointedStructure & a, MembershipOracle & oracle);

    /// Turns an oracle-positive structure over a binary schema into a
    /// c-acyclic, fact-minimal one that still maps to the input.
    PointedStructure cc_transform(const PointedStructure & a, MembershipOracle & oracle,
                                  const LearnOptions & options = {});

    /// Membership-only learner for goals equivalent to a c-acyclic CQ.
    LearnReport learn_membership(MembershipOracle & oracle, const Schema & schema, int k,
                                 const LearnOptions & options = {});

    /// Membership + equivalence learner for arbitrary goal CQs.
    LearnReport learn_membership_equivalence(MembershipOracle & membership,
                                             EquivalenceOracle & equivalence,
                                             const Schema & schema, int k,
                                             const LearnOptions & options = {});

    /// Enumerates c-acyclic CQs in increasing size and tests each one's
    /// characterizing examples through the membership oracle.
    LearnReport learn_by_enumeration(MembershipOracle & oracle, const Schema & schema, int k,
                                     int size_cap, const LearnOptions & options = {});
}
