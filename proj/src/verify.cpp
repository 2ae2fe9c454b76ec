#include <cqlab/frontier.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <functional>
#include <thread>

namespace cqlab
{
    namespace
    {
        struct SmallView
        {
            int n = 0;
            int nfacts = 0;
            std::array<std::int8_t, 2> dist{-1, -1};
            int k = 0;
            // facts flattened: rel, arity, args...
            std::array<std::int16_t, 512> data{};
            std::array<std::int16_t, 80> offsets{};
            std::uint8_t rels = 0;

            void clear()
            {
                n = 0;
                nfacts = 0;
                k = 0;
                rels = 0;
                dist = {-1, -1};
            }

            bool push_fact(int rel, const int * args, int arity)
            {
                if (nfacts >= int(offsets.size()) - 1)
                    return false;
                int off = nfacts == 0 ? 0 : offsets[nfacts];
                if (off + 2 + arity > int(data.size()))
                    return false;
                if (nfacts == 0)
                    offsets[0] = 0;
                data[off] = std::int16_t(rel);
                data[off + 1] = std::int16_t(arity);
                for (int i = 0; i < arity; ++i)
                    data[off + 2 + i] = std::int16_t(args[i]);
                offsets[++nfacts] = std::int16_t(off + 2 + arity);
                rels |= std::uint8_t(1u << rel);
                return true;
            }

            int fact_rel(int f) const { return data[offsets[f]]; }
            int fact_arity(int f) const { return data[offsets[f] + 1]; }
            const std::int16_t * fact_args(int f) const { return &data[offsets[f] + 2]; }
        };

        bool view_of(const PointedStructure & s, SmallView & out)
        {
            out.clear();
            const auto & idx = s.indexed();
            if (idx.n > 64 || idx.dist.size() > 2)
                return false;
            out.n = idx.n;
            out.k = int(idx.dist.size());
            for (std::size_t i = 0; i < idx.dist.size(); ++i)
                out.dist[i] = std::int8_t(idx.dist[i]);
            for (const auto & f : idx.facts)
                if (! out.push_fact(f.rel, f.args.data(), int(f.args.size())))
                    return false;
            return true;
        }

        void decode_candidate(const detail::FactTable & table, const detail::Candidate & c,
                              SmallView & out)
        {
            out.clear();
            out.n = c.n;
            out.k = (c.dist[0] >= 0 ? 1 : 0) + (c.dist[1] >= 0 ? 1 : 0);
            out.dist[0] = c.dist[0];
            out.dist[1] = c.dist[1];
            std::uint64_t mask = c.mask;
            while (mask) {
                int b = __builtin_ctzll(mask);
                mask &= mask - 1;
                const auto & f = table.facts[b];
                out.push_fact(f.rel, f.args.data(), int(f.args.size()));
            }
            out.rels = c.rels;
        }

        // pointed homomorphism, allocation free; left side at most 16 elements,
        // right side at most 64
        struct SmallSolver
        {
            const SmallView * a = nullptr;
            const SmallView * b = nullptr;
            std::array<std::uint64_t, 16> cand{};
            std::array<int, 16> assign{};

            bool consistent(int just)
            {
                for (int f = 0; f < a->nfacts; ++f) {
                    const auto * args = a->fact_args(f);
                    int arity = a->fact_arity(f);
                    bool involves = false, all = true;
                    for (int i = 0; i < arity; ++i) {
                        if (args[i] == just)
                            involves = true;
                        if (assign[args[i]] == -1)
                            all = false;
                    }
                    if (! involves || ! all)
                        continue;
                    bool found = false;
                    for (int g = 0; g < b->nfacts && ! found; ++g) {
                        if (b->fact_rel(g) != a->fact_rel(f))
                            continue;
                        const auto * gargs = b->fact_args(g);
                        bool match = true;
                        for (int i = 0; i < arity; ++i)
                            if (gargs[i] != assign[args[i]]) {
                                match = false;
                                break;
                            }
                        found = match;
                    }
                    if (! found)
                        return false;
                }
                return true;
            }

            bool go()
            {
                int best = -1, best_count = 65;
                for (int x = 0; x < a->n; ++x)
                    if (assign[x] == -1) {
                        int c = __builtin_popcountll(cand[x]);
                        if (c < best_count) {
                            best_count = c;
                            best = x;
                        }
                    }
                if (best == -1)
                    return true;
                std::uint64_t options = cand[best];
                while (options) {
                    int v = __builtin_ctzll(options);
                    options &= options - 1;
                    assign[best] = v;
                    if (consistent(best)) {
                        std::array<std::pair<std::int8_t, std::uint64_t>, 64> saved;
                        int nsaved = 0;
                        bool dead = false;
                        for (int f = 0; f < a->nfacts && ! dead; ++f) {
                            const auto * args = a->fact_args(f);
                            int arity = a->fact_arity(f);
                            bool involves = false;
                            for (int i = 0; i < arity; ++i)
                                if (args[i] == best)
                                    involves = true;
                            if (! involves)
                                continue;
                            for (int p = 0; p < arity && ! dead; ++p) {
                                int y = args[p];
                                if (assign[y] != -1)
                                    continue;
                                std::uint64_t allowed = 0;
                                for (int g = 0; g < b->nfacts; ++g) {
                                    if (b->fact_rel(g) != a->fact_rel(f))
                                        continue;
                                    const auto * gargs = b->fact_args(g);
                                    bool match = true;
                                    for (int q = 0; q < arity; ++q)
                                        if (assign[args[q]] != -1 && gargs[q] != assign[args[q]]) {
                                            match = false;
                                            break;
                                        }
                                    if (match)
                                        allowed |= 1ull << gargs[p];
                                }
                                if (nsaved < int(saved.size())) {
                                    saved[nsaved++] = {std::int8_t(y), cand[y]};
                                    cand[y] &= allowed;
                                    if (! cand[y])
                                        dead = true;
                                }
                            }
                        }
                        if (! dead && go())
                            return true;
                        for (int i = nsaved - 1; i >= 0; --i)
                            cand[saved[i].first] = saved[i].second;
                    }
                    assign[best] = -1;
                }
                return false;
            }
        };

        bool small_hom(const SmallView & a, const SmallView & b, SmallSolver & solver)
        {
            if ((a.rels & ~b.rels) != 0)
                return false;
            if (a.n == 0)
                return true;
            if (b.n == 0)
                return false;
            if (a.n > 16 || b.n > 64)
                throw size_limit_error{"small_hom out of range"};

            solver.a = &a;
            solver.b = &b;
            std::uint64_t full = b.n == 64 ? ~0ull : (1ull << b.n) - 1;
            for (int x = 0; x < a.n; ++x) {
                solver.cand[x] = full;
                solver.assign[x] = -1;
            }
            for (int i = 0; i < a.k; ++i) {
                std::uint64_t bit = 1ull << b.dist[i];
                if (! (solver.cand[a.dist[i]] & bit))
                    return false;
                solver.cand[a.dist[i]] = bit;
            }
            for (int f = 0; f < a.nfacts; ++f) {
                const auto * args = a.fact_args(f);
                int arity = a.fact_arity(f);
                for (int p = 0; p < arity; ++p) {
                    std::uint64_t allowed = 0;
                    for (int g = 0; g < b.nfacts; ++g)
                        if (b.fact_rel(g) == a.fact_rel(f))
                            allowed |= 1ull << b.fact_args(g)[p];
                    solver.cand[args[p]] &= allowed;
                    if (! solver.cand[args[p]])
                        return false;
                }
            }
            return solver.go();
        }

        bool candidate_safe(const SmallView & c)
        {
            for (int i = 0; i < c.k; ++i) {
                int d = c.dist[i];
                bool used = false;
                for (int f = 0; f < c.nfacts && ! used; ++f) {
                    const auto * args = c.fact_args(f);
                    for (int p = 0; p < c.fact_arity(f); ++p)
                        if (args[p] == d)
                            used = true;
                }
                if (! used)
                    return false;
            }
            return true;
        }

        bool candidate_connected_acyclic_k1(const SmallView & c)
        {
            if (c.k != 1)
                return false;
            int n = c.n, m = c.nfacts;
            std::array<int, 160> parent;
            for (int i = 0; i < n + m; ++i)
                parent[i] = i;
            std::function<int(int)> find = [&](int x) {
                while (parent[x] != x)
                    x = parent[x] = parent[parent[x]];
                return x;
            };
            for (int fi = 0; fi < m; ++fi) {
                const auto * args = c.fact_args(fi);
                for (int p = 0; p < c.fact_arity(fi); ++p) {
                    int rx = find(args[p]), rf = find(n + fi);
                    if (rx == rf)
                        return false;
                    parent[rx] = rf;
                }
            }
            int root = find(c.dist[0]);
            for (int v = 0; v < n + m; ++v)
                if (find(v) != root)
                    return false;
            return true;
        }

        struct SweepContext
        {
            const PointedStructure & a;
            const std::vector<PointedStructure> & members;
            const VerifyOptions & options;
            const std::vector<detail::Candidate> & pool;
            std::vector<detail::FactTable> tables;
            SmallView a_view;
            bool a_view_ok = false;
            std::vector<SmallView> member_views;
            std::vector<char> member_small;

            SweepContext(const PointedStructure & a_, const std::vector<PointedStructure> & members_,
                         const VerifyOptions & options_)
                : a(a_), members(members_), options(options_),
                  pool(detail::candidate_pool(a_.schema(), a_.k(), options_.max_elems))
            {
                for (int n = 0; n <= options.max_elems; ++n)
                    tables.emplace_back(a.schema(), n);
                a_view_ok = view_of(a, a_view);
                member_views.resize(members.size());
                member_small.resize(members.size());
                for (std::size_t i = 0; i < members.size(); ++i)
                    member_small[i] = view_of(members[i], member_views[i]);
            }

            // returns true when the candidate is strictly below the target and
            // not covered by any member
            bool violates(const detail::Candidate & cand, SmallView & c, SmallSolver & solver) const
            {
                if (a_view_ok && (cand.rels & ~a_view.rels) != 0)
                    return false;
                decode_candidate(tables[cand.nu], cand, c);
                if (options.cls == CandidateClass::safe && ! candidate_safe(c))
                    return false;
                if (options.cls == CandidateClass::connected_acyclic_k1
                    && ! candidate_connected_acyclic_k1(c))
                    return false;
                if (a_view_ok) {
                    if (! small_hom(c, a_view, solver))
                        return false;
                    if (small_hom(a_view, c, solver))
                        return false;
                }
                else {
                    auto cm = detail::materialize(a.schema(), cand);
                    if (! find_homomorphism(cm, a) || find_homomorphism(a, cm))
                        return false;
                }
                for (std::size_t mi = 0; mi < members.size(); ++mi) {
                    bool covered;
                    if (member_small[mi])
                        covered = small_hom(c, member_views[mi], solver);
                    else {
                        auto cm = detail::materialize(a.schema(), cand);
                        covered = find_homomorphism(cm, members[mi]).has_value();
                    }
                    if (covered)
                        return false;
                }
                return true;
            }
        };
    }

    VerifyVerdict verify_frontier(const PointedStructure & a,
                                  const std::vector<PointedStructure> & members,
                                  const VerifyOptions & options)
    {
        for (const auto & m : members) {
            if (! (m.schema() == a.schema()) || m.k() != a.k())
                return {false, "member has mismatched schema or arity", m, "condition1"};
            if (! find_homomorphism(m, a))
                return {false, "member does not map to the target", m, "condition1"};
        }
        for (const auto & m : members)
            if (find_homomorphism(a, m))
                return {false, "target maps to a member", m, "condition2"};

        if (options.mode == VerifyMode::structural) {
            auto core = compute_core(a).core;
            if (! core.flags().c_acyclic)
                return {false, "target core is not c-acyclic, so no finite frontier exists",
                        std::nullopt, "coverage"};
            auto reference = frontier_c_acyclic(core, FrontierMethod::marked_pairs,
                                                options.frontier);
            for (const auto & m : members) {
                bool ok = std::any_of(reference.members.begin(), reference.members.end(),
                                      [&](const PointedStructure & r) {
                                          return find_homomorphism(m, r).has_value();
                                      });
                if (! ok)
                    return {false, "member is not dominated by the reference frontier", m, "coverage"};
            }
            for (const auto & r : reference.members) {
                bool ok = std::any_of(members.begin(), members.end(),
                                      [&](const PointedStructure & m) {
                                          return find_homomorphism(r, m).has_value();
                                      });
                if (! ok)
                    return {false, "reference member not covered; frontier is incomplete", r, "coverage"};
            }
            return {true, "structurally equivalent to the reference frontier", std::nullopt, ""};
        }

        // exhaustive mode over the tree class uses the direct tree enumerator
        if (options.cls == CandidateClass::connected_acyclic_k1 && a.schema().all_binary()
            && a.k() == 1) {
            VerifyVerdict verdict{true, "exhaustive sweep passed", std::nullopt, ""};
            EnumSpec spec{a.schema(), a.k(), options.max_elems, options.cls};
            enumerate_structures(spec, [&](const PointedStructure & c) {
                if (! find_homomorphism(c, a) || find_homomorphism(a, c))
                    return true;
                bool covered = std::any_of(members.begin(), members.end(),
                                           [&](const PointedStructure & m) {
                                               return find_homomorphism(c, m).has_value();
                                           });
                if (! covered) {
                    verdict = {false, "uncovered structure strictly below the target", c, "coverage"};
                    return false;
                }
                return true;
            });
            return verdict;
        }

        SweepContext ctx(a, members, options);

        std::atomic<std::size_t> first_violation{ctx.pool.size()};
        int thread_count = std::max(1, options.threads);

        auto scan = [&](std::size_t begin, std::size_t end) {
            SmallView c;
            SmallSolver solver;
            for (std::size_t i = begin; i < end; ++i) {
                if (i >= first_violation.load(std::memory_order_relaxed))
                    return;
                if (ctx.violates(ctx.pool[i], c, solver)) {
                    std::size_t expected = first_violation.load();
                    while (i < expected && ! first_violation.compare_exchange_weak(expected, i))
                        ;
                    return;
                }
            }
        };

        if (thread_count == 1) {
            scan(0, ctx.pool.size());
        }
        else {
            std::vector<std::thread> workers;
            std::size_t chunk = (ctx.pool.size() + thread_count - 1) / thread_count;
            for (int t = 0; t < thread_count; ++t) {
                std::size_t begin = std::min(ctx.pool.size(), std::size_t(t) * chunk);
                std::size_t end = std::min(ctx.pool.size(), begin + chunk);
                workers.emplace_back(scan, begin, end);
            }
            for (auto & w : workers)
                w.join();
        }

        // the recorded violation may not be the first in enumeration order when
        // several threads race; rescan the prefix to keep the verdict deterministic
        std::size_t hit = first_violation.load();
        if (hit < ctx.pool.size()) {
            SmallView c;
            SmallSolver solver;
            for (std::size_t i = 0; i <= hit; ++i)
                if (ctx.violates(ctx.pool[i], c, solver))
                    return {false, "uncovered structure strictly below the target",
                            detail::materialize(a.schema(), ctx.pool[i]), "coverage"};
        }

        return {true, "exhaustive sweep passed", std::nullopt, ""};
    }
}
