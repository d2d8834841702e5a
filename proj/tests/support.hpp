#pragma once

// Test-only oracles. Everything here is written independently of the library
// paths it checks: the SI decision enumerates injections instead of
// backtracking, cardinalities are evaluated on the raw tree instead of the
// normal form, and so on.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "helab/common.hpp"
#include "helab/functor.hpp"
#include "helab/graph.hpp"
#include "helab/lang.hpp"

namespace testsupport {

/* ---------------------------------------------------------------- */
/* Graphs: catalog of non-isomorphic graphs, independent SI solver.  */

inline uint64_t permuted_mask(const helab::distinguish::Graph& g, const std::vector<uint32_t>& perm) {
    uint64_t m = 0;
    for (auto [u, v] : g.edges) {
        uint32_t a = perm[u], b = perm[v];
        if (a > b) std::swap(a, b);
        m |= 1ull << (a * g.n + b);
    }
    return m;
}

// All non-isomorphic graphs on exactly n vertices (n <= 6), in increasing
// edge-mask order. Deduplication walks the whole relabeling orbit of each
// newly seen graph.
inline std::vector<helab::distinguish::Graph> graph_catalog(uint32_t n) {
    std::vector<std::pair<uint32_t, uint32_t>> all_pairs;
    for (uint32_t u = 0; u < n; ++u)
        for (uint32_t v = u + 1; v < n; ++v) all_pairs.emplace_back(u, v);
    const uint32_t m = static_cast<uint32_t>(all_pairs.size());

    std::set<uint64_t> seen;
    std::vector<helab::distinguish::Graph> out;
    std::vector<uint32_t> perm(n);
    for (uint64_t mask = 0; mask < (1ull << m); ++mask) {
        std::vector<std::pair<uint32_t, uint32_t>> edges;
        uint64_t key = 0;  // matrix encoding, same as permuted_mask
        for (uint32_t i = 0; i < m; ++i)
            if (mask & (1ull << i)) {
                edges.push_back(all_pairs[i]);
                key |= 1ull << (all_pairs[i].first * n + all_pairs[i].second);
            }
        if (seen.count(key)) continue;
        auto g = helab::distinguish::make_graph(n, std::move(edges));
        std::iota(perm.begin(), perm.end(), 0);
        do {
            seen.insert(permuted_mask(g, perm));
        } while (std::next_permutation(perm.begin(), perm.end()));
        out.push_back(std::move(g));
    }
    return out;
}

inline std::vector<helab::distinguish::Graph> graph_catalog_upto(uint32_t max_n) {
    std::vector<helab::distinguish::Graph> out;
    for (uint32_t n = 1; n <= max_n; ++n) {
        auto part = graph_catalog(n);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

// All injective maps [0,k) -> [0,n) as explicit tuples, lexicographic.
inline std::vector<std::vector<uint32_t>> injective_maps(uint32_t k, uint32_t n) {
    std::vector<std::vector<uint32_t>> out;
    if (k > n) return out;
    std::vector<uint32_t> cur;
    std::vector<bool> used(n, false);
    auto rec = [&](auto&& self) -> void {
        if (cur.size() == k) {
            out.push_back(cur);
            return;
        }
        for (uint32_t v = 0; v < n; ++v) {
            if (used[v]) continue;
            used[v] = true;
            cur.push_back(v);
            self(self);
            cur.pop_back();
            used[v] = false;
        }
    };
    rec(rec);
    return out;
}

inline std::vector<std::vector<bool>> adjacency_matrix(const helab::distinguish::Graph& g) {
    std::vector<std::vector<bool>> adj(g.n, std::vector<bool>(g.n, false));
    for (auto [u, v] : g.edges) adj[u][v] = adj[v][u] = true;
    return adj;
}

inline bool map_preserves_edges(const helab::distinguish::Graph& p, const std::vector<uint32_t>& map,
                                const std::vector<std::vector<bool>>& host_adj) {
    for (auto [u, v] : p.edges)
        if (!host_adj[map[u]][map[v]]) return false;
    return true;
}

// Second subgraph-isomorphism decision: enumerate every injection outright.
inline bool si_oracle(const helab::distinguish::Graph& p, const helab::distinguish::Graph& h) {
    if (p.n > h.n) return false;
    const auto adj = adjacency_matrix(h);
    for (const auto& map : injective_maps(p.n, h.n))
        if (map_preserves_edges(p, map, adj)) return true;
    return false;
}

inline uint64_t count_embeddings_oracle(const helab::distinguish::Graph& p,
                                        const helab::distinguish::Graph& h) {
    if (p.n > h.n) return 0;
    const auto adj = adjacency_matrix(h);
    uint64_t count = 0;
    for (const auto& map : injective_maps(p.n, h.n))
        if (map_preserves_edges(p, map, adj)) ++count;
    return count;
}

/* ---------------------------------------------------------------- */
/* Statistics.                                                       */

// Pearson statistic of observed counts against the all-equal expectation.
inline double chi_square_uniform(const std::vector<uint64_t>& counts) {
    const uint64_t total = std::accumulate(counts.begin(), counts.end(), uint64_t{0});
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    double stat = 0.0;
    for (uint64_t c : counts) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

// 0.99 quantile of chi-square with `dof` degrees of freedom (Wilson-Hilferty);
// a statistic below this has p > 0.01.
inline double chi_square_crit_p01(uint32_t dof) {
    const double z99 = 2.3263478740;
    const double k = static_cast<double>(dof);
    const double t = 1.0 - 2.0 / (9.0 * k) + z99 * std::sqrt(2.0 / (9.0 * k));
    return k * t * t * t;
}

/* ---------------------------------------------------------------- */
/* Polynomial functors: tree-level oracles and a random generator.   */

// Cardinality evaluated directly on the unnormalized tree.
inline helab::functor::Nat tree_cardinality(const helab::functor::PolyFunctor& f, uint64_t n) {
    using helab::functor::Nat;
    using Kind = helab::functor::PolyFunctor::Kind;
    switch (f.kind) {
        case Kind::Const: return f.constant;
        case Kind::Var: return Nat(n);
        case Kind::Pow: {
            Nat r = 1;
            for (uint64_t i = 0; i < f.exponent; ++i) r *= n;
            return r;
        }
        case Kind::Sum: {
            Nat r = 0;
            for (const auto& c : f.children) r += tree_cardinality(c, n);
            return r;
        }
        case Kind::Prod: {
            Nat r = 1;
            for (const auto& c : f.children) r *= tree_cardinality(c, n);
            return r;
        }
    }
    return 0;
}

inline helab::functor::PolyFunctor random_functor(helab::Rng& rng, uint32_t depth) {
    using PF = helab::functor::PolyFunctor;
    const uint64_t leaf = helab::uniform_below(rng, 3);
    if (depth == 0 || helab::uniform_below(rng, 3) == 0) {
        if (leaf == 0) return PF::constant_of(helab::functor::Nat(helab::uniform_below(rng, 4)));
        if (leaf == 1) return PF::var();
        return PF::pow(1 + helab::uniform_below(rng, 4));
    }
    std::vector<PF> kids;
    const uint64_t arity = 2 + helab::uniform_below(rng, 2);
    kids.reserve(arity);
    for (uint64_t i = 0; i < arity; ++i) kids.push_back(random_functor(rng, depth - 1));
    if (helab::uniform_below(rng, 2) == 0) return PF::sum(std::move(kids));
    return PF::prod(std::move(kids));
}

/* ---------------------------------------------------------------- */
/* Proof terms: type-directed generator of well-typed closed terms.  */

class TermGen {
  public:
    explicit TermGen(uint64_t seed) : rng_(seed) {}

    // A closed, well-typed term of some small type, at most `depth` deep.
    helab::lang::TermPtr closed_term(uint32_t depth) {
        helab::lang::Context env;
        return gen(small_type(2), env, depth);
    }

  private:
    helab::Rng rng_;

    uint64_t roll(uint64_t below) { return helab::uniform_below(rng_, below); }

    // Types kept small so the finite-set semantics stays cheap: bases of
    // size 1..4, at most one arrow layer inside composites.
    helab::lang::TypePtr small_type(uint32_t depth) {
        using namespace helab::lang;
        if (depth == 0) {
            if (roll(4) == 0) return ty_unit();
            return ty_base(1 + roll(4));
        }
        switch (roll(6)) {
            case 0: return ty_unit();
            case 1:
            case 2: return ty_base(1 + roll(4));
            case 3: return ty_prod(small_type(depth - 1), small_type(depth - 1));
            case 4: return ty_sum(small_type(depth - 1), small_type(depth - 1));
            default: return ty_arrow(small_type(0), small_type(depth - 1));
        }
    }

    std::string fresh_name() { return "v" + std::to_string(counter_++); }

    helab::lang::TermPtr gen(const helab::lang::TypePtr& want, helab::lang::Context& env, uint32_t depth) {
        using namespace helab::lang;

        std::vector<std::string> hits;
        for (const auto& [name, ty] : env)
            if (type_equal(ty, want)) hits.push_back(name);
        if (!hits.empty() && roll(3) == 0) return t_var(hits[roll(hits.size())]);

        if (depth > 0) {
            switch (roll(6)) {
                case 0: {  // application
                    const TypePtr arg_ty = small_type(1);
                    const TermPtr f = gen(ty_arrow(arg_ty, want), env, depth - 1);
                    const TermPtr a = gen(arg_ty, env, depth - 1);
                    return t_app(f, a);
                }
                case 1: {  // first projection
                    const TypePtr other = small_type(1);
                    return t_fst(gen(ty_prod(want, other), env, depth - 1));
                }
                case 2: {  // second projection
                    const TypePtr other = small_type(1);
                    return t_snd(gen(ty_prod(other, want), env, depth - 1));
                }
                case 3: {  // case split
                    const TypePtr lt = small_type(1), rt = small_type(1);
                    const TermPtr scrut = gen(ty_sum(lt, rt), env, depth - 1);
                    const std::string xl = fresh_name(), xr = fresh_name();
                    env.emplace_back(xl, lt);
                    const TermPtr bl = gen(want, env, depth - 1);
                    env.pop_back();
                    env.emplace_back(xr, rt);
                    const TermPtr br = gen(want, env, depth - 1);
                    env.pop_back();
                    return t_case(scrut, xl, bl, xr, br);
                }
                case 4:
                    if (want->kind == Type::Kind::Base) {  // successor chain
                        const TermPtr inner = gen(want, env, depth - 1);
                        return t_app(t_succ(want->size), inner);
                    }
                    break;
                default: break;
            }
        }

        // Structure-directed fallback; always terminates at depth 0.
        const uint32_t down = depth > 0 ? depth - 1 : 0;
        switch (want->kind) {
            case Type::Kind::Unit: return t_unit();
            case Type::Kind::Base: return t_elem(roll(want->size), want->size);
            case Type::Kind::Prod:
                return t_pair(gen(want->l, env, down), gen(want->r, env, down));
            case Type::Kind::Sum:
                if (roll(2) == 0) return t_inl(want, gen(want->l, env, down));
                return t_inr(want, gen(want->r, env, down));
            case Type::Kind::Arrow: {
                if (type_equal(want->l, want->r) && want->l->kind == Type::Kind::Base && roll(4) == 0)
                    return t_succ(want->l->size);
                const std::string x = fresh_name();
                env.emplace_back(x, want->l);
                const TermPtr body = gen(want->r, env, down);
                env.pop_back();
                return t_lam(x, want->l, body);
            }
        }
        return t_unit();
    }

    uint64_t counter_ = 0;
};

}  // namespace testsupport
