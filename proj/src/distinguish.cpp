#include "helab/distinguish.hpp"

#include <algorithm>
#include <mutex>
#include <thread>

#include "json.hpp"

namespace helab::distinguish {

using nlohmann::json;

uint32_t HostEncoding::slot_of(uint32_t v, uint32_t w) const {
    for (uint32_t s = slot_start[v]; s < slot_start[v] + arity[v]; ++s)
        if (slot_neighbor[s] == w) return s;
    throw UsageError("vertex " + std::to_string(w) + " is not a neighbor of " + std::to_string(v));
}

HostEncoding encode_host(const Graph& h) {
    HostEncoding enc;
    enc.host = h;
    enc.arity.resize(h.n);
    enc.slot_start.resize(h.n);
    for (uint32_t v = 0; v < h.n; ++v) {
        enc.slot_start[v] = static_cast<uint32_t>(enc.slots.size());
        const auto nbrs = sorted_neighbors(h, v);
        enc.arity[v] = static_cast<uint32_t>(nbrs.size());
        for (uint32_t i = 0; i < nbrs.size(); ++i) {
            enc.slots.push_back(Slot{v, i});
            enc.slot_neighbor.push_back(nbrs[i]);
        }
    }
    return enc;
}

namespace {

// Backtracking over pattern vertices in order; host candidates ascending, so
// enumeration order is lexicographic in the assignment vector.
struct IsoSearch {
    const Graph& p;
    const Graph& h;
    const Limits& limits;
    std::vector<uint64_t> padj;
    std::vector<uint64_t> hadj;
    Embedding assign;
    uint64_t used = 0;  // bitmask over host vertices
    uint64_t nodes = 0;
    bool collect_all = false;
    std::vector<Embedding> found;

    IsoSearch(const Graph& p_, const Graph& h_, const Limits& limits_)
        : p(p_), h(h_), limits(limits_), padj(adjacency_bits(p_)), hadj(adjacency_bits(h_)) {
        if (p.n > limits.max_pattern_vertices)
            throw BudgetExceeded("pattern has more than " + std::to_string(limits.max_pattern_vertices) +
                                 " vertices");
        if (h.n > limits.max_host_vertices)
            throw BudgetExceeded("host has more than " + std::to_string(limits.max_host_vertices) + " vertices");
        assign.resize(p.n);
    }

    bool run(uint32_t v) {
        if (v == p.n) {
            if (collect_all) {
                found.push_back(assign);
                return false;
            }
            return true;
        }
        for (uint32_t cand = 0; cand < h.n; ++cand) {
            if (used & (uint64_t(1) << cand)) continue;
            if (++nodes > limits.max_search_nodes) throw BudgetExceeded("subgraph search budget exhausted");
            bool ok = true;
            for (uint32_t u = 0; u < v; ++u) {
                if ((padj[v] >> u) & 1) {
                    if (!((hadj[cand] >> assign[u]) & 1)) {
                        ok = false;
                        break;
                    }
                }
            }
            if (!ok) continue;
            assign[v] = cand;
            used |= uint64_t(1) << cand;
            if (run(v + 1)) return true;
            used &= ~(uint64_t(1) << cand);
        }
        return false;
    }
};

}  // namespace

std::optional<Embedding> subgraph_iso_bruteforce(const Graph& p, const Graph& h, const Limits& limits) {
    if (p.n > h.n) return std::nullopt;
    IsoSearch s(p, h, limits);
    if (s.run(0)) return s.assign;
    return std::nullopt;
}

std::vector<Embedding> enumerate_embeddings(const Graph& p, const Graph& h, const Limits& limits) {
    if (p.n > h.n) return {};
    IsoSearch s(p, h, limits);
    s.collect_all = true;
    s.run(0);
    return s.found;
}

namespace {

// The slot pairs an embedding identifies: one (both-direction) pair per
// pattern edge, canonically ordered.
std::vector<std::pair<uint32_t, uint32_t>> edge_slot_pairs(const HostEncoding& enc, const Graph& p,
                                                           const Embedding& pi) {
    std::vector<std::pair<uint32_t, uint32_t>> pairs;
    pairs.reserve(p.edges.size());
    for (auto [u, w] : p.edges) {
        uint32_t a = enc.slot_of(pi[u], pi[w]);
        uint32_t b = enc.slot_of(pi[w], pi[u]);
        if (a > b) std::swap(a, b);
        pairs.emplace_back(a, b);
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

std::vector<std::vector<uint32_t>> pairs_to_classes(std::vector<std::pair<uint32_t, uint32_t>> pairs) {
    std::vector<std::vector<uint32_t>> classes;
    classes.reserve(pairs.size());
    std::sort(pairs.begin(), pairs.end());
    for (auto [a, b] : pairs) classes.push_back({a, b});
    return classes;
}

}  // namespace

PatternQuotient build_pattern_quotient(const Graph& p, const Graph& h, Rng& rng, const Limits& limits) {
    const HostEncoding enc = encode_host(h);
    const std::vector<Embedding> embeddings = enumerate_embeddings(p, h, limits);
    PatternQuotient q;
    q.pattern = p;
    if (!embeddings.empty()) {
        const Embedding& pi = embeddings[uniform_below(rng, embeddings.size())];
        q.merged = pairs_to_classes(edge_slot_pairs(enc, p, pi));
        q.provenance = Provenance::FromEmbedding;
        return q;
    }
    // Absent case: fabricate |E_P| disjoint doubletons so the class-size
    // profile matches the present case (fewer when the host lacks slots).
    std::vector<uint32_t> order(enc.slots.size());
    for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle_in_place(rng, order);
    const size_t want = std::min(p.edges.size(), order.size() / 2);
    std::vector<std::pair<uint32_t, uint32_t>> pairs;
    pairs.reserve(want);
    for (size_t i = 0; i < want; ++i) {
        uint32_t a = order[2 * i], b = order[2 * i + 1];
        if (a > b) std::swap(a, b);
        pairs.emplace_back(a, b);
    }
    q.merged = pairs_to_classes(std::move(pairs));
    q.provenance = Provenance::Decoy;
    return q;
}

bool has_canonical_form(const PatternQuotient& q, const Graph& p, const Graph& h, const Limits& limits) {
    for (const auto& cls : q.merged)
        if (cls.size() != 2) return false;
    std::vector<std::pair<uint32_t, uint32_t>> target;
    target.reserve(q.merged.size());
    for (const auto& cls : q.merged) target.emplace_back(cls[0], cls[1]);
    std::sort(target.begin(), target.end());

    const HostEncoding enc = encode_host(h);
    for (const Embedding& pi : enumerate_embeddings(p, h, limits))
        if (edge_slot_pairs(enc, p, pi) == target) return true;
    return false;
}

Adversary make_coin_adversary() {
    return [](const AdversaryView&, Rng& rng) { return static_cast<int>(uniform_below(rng, 2)); };
}

Adversary make_profile_adversary() {
    return [](const AdversaryView& v, Rng& rng) {
        const size_t d = v.merged.size();
        const bool m0 = d == v.p0.edges.size();
        const bool m1 = d == v.p1.edges.size();
        if (m0 != m1) return m0 ? 0 : 1;
        return static_cast<int>(uniform_below(rng, 2));
    };
}

Adversary make_canonical_adversary(const Limits& limits) {
    return [limits](const AdversaryView& v, Rng& rng) {
        PatternQuotient q;
        q.merged = v.merged;
        q.pattern = v.p0;
        const bool r0 = has_canonical_form(q, v.p0, v.host, limits);
        q.pattern = v.p1;
        const bool r1 = has_canonical_form(q, v.p1, v.host, limits);
        if (r0 != r1) return r0 ? 0 : 1;
        return static_cast<int>(uniform_below(rng, 2));
    };
}

GameResult distinguish_game(const Graph& h, const Graph& p0, const Graph& p1, uint64_t trials,
                            const Adversary& adversary, Rng& rng, uint32_t jobs, const Limits& limits) {
    if (trials == 0) throw UsageError("at least one trial required");
    std::vector<uint64_t> seeds(trials);
    for (auto& s : seeds) s = rng();

    std::vector<uint8_t> outcome(trials, 0);
    std::exception_ptr first_error;
    uint64_t first_error_trial = 0;
    std::mutex error_mutex;

    auto run_range = [&](uint64_t lo, uint64_t hi) {
        for (uint64_t t = lo; t < hi; ++t) {
            try {
                Rng trng = substream(seeds[t], t);
                const int b = static_cast<int>(uniform_below(trng, 2));
                const PatternQuotient q = build_pattern_quotient(b ? p1 : p0, h, trng, limits);
                const AdversaryView view{h, q.merged, p0, p1};
                const int guess = adversary(view, trng);
                outcome[t] = guess == b ? 1 : 0;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error || t < first_error_trial) {
                    first_error = std::current_exception();
                    first_error_trial = t;
                }
                return;
            }
        }
    };

    const uint32_t workers = std::max<uint32_t>(1, std::min<uint64_t>(jobs, trials));
    if (workers == 1) {
        run_range(0, trials);
    } else {
        std::vector<std::thread> pool;
        const uint64_t chunk = (trials + workers - 1) / workers;
        for (uint32_t w = 0; w < workers; ++w) {
            const uint64_t lo = w * chunk;
            const uint64_t hi = std::min<uint64_t>(trials, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    if (first_error) {
        try {
            std::rethrow_exception(first_error);
        } catch (const Error& e) {
            throw Error(e.code(), "trial " + std::to_string(first_error_trial) + ": " + e.what());
        }
    }

    GameResult r;
    r.trials = trials;
    for (uint8_t o : outcome) r.correct += o;
    return r;
}

Recognizer make_oracle_recognizer(const Limits& limits) {
    return [limits](const Graph& h, const PatternQuotient& q, const Graph& p) {
        return has_canonical_form(q, p, h, limits);
    };
}

bool reduce_si_to_distinguishing(const Graph& p, const Graph& h, const Recognizer& recognizer, Rng& rng,
                                 const Limits& limits) {
    const PatternQuotient q = build_pattern_quotient(p, h, rng, limits);
    return recognizer(h, q, p);
}

std::string to_json(const GameResult& r) {
    json j;
    j["advantage"] = r.advantage();
    j["correct"] = r.correct;
    j["trials"] = r.trials;
    return j.dump();
}

}  // namespace helab::distinguish
