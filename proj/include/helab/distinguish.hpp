#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "helab/common.hpp"
#include "helab/graph.hpp"

namespace helab::distinguish {

// The distinguishing game: a host graph is encoded as one slot per
// (vertex, neighbor-position) coordinate, a hidden pattern quotient merges
// the slot pairs realizing the pattern's edges under a sampled embedding
// (or profile-matched decoy pairs when no embedding exists), and an
// adversary tries to tell which of two candidate patterns produced it.

struct Slot {
    uint32_t vertex = 0;
    uint32_t pos = 0;  // index into the vertex's sorted neighbor list

    bool operator==(const Slot&) const = default;
};

struct HostEncoding {
    Graph host;
    std::vector<uint32_t> arity;             // per-vertex factor arity = degree
    std::vector<Slot> slots;                 // all (v, i) in vertex-major order
    std::vector<uint32_t> slot_start;        // first slot index of each vertex
    std::vector<uint32_t> slot_neighbor;     // the neighbor each slot names

    // Index of slot (v, position-of-w among v's sorted neighbors).
    uint32_t slot_of(uint32_t v, uint32_t w) const;
};

HostEncoding encode_host(const Graph& h);

// Pattern vertex -> host vertex, injective and edge-preserving.
using Embedding = std::vector<uint32_t>;

std::optional<Embedding> subgraph_iso_bruteforce(const Graph& p, const Graph& h, const Limits& limits = {});
std::vector<Embedding> enumerate_embeddings(const Graph& p, const Graph& h, const Limits& limits = {});

enum class Provenance { FromEmbedding, Decoy };

// Partition of the host's slots; only non-singleton classes are stored,
// each sorted, classes ordered by first slot. Singletons are implicit.
struct PatternQuotient {
    Graph pattern;
    std::vector<std::vector<uint32_t>> merged;
    Provenance provenance = Provenance::Decoy;
};

PatternQuotient build_pattern_quotient(const Graph& p, const Graph& h, Rng& rng, const Limits& limits = {});

// True iff some single embedding of p into h induces exactly q's merged
// pairs as its edge-slot identifications.
bool has_canonical_form(const PatternQuotient& q, const Graph& p, const Graph& h, const Limits& limits = {});

// What the adversary sees: no provenance, no secret bit.
struct AdversaryView {
    const Graph& host;
    const std::vector<std::vector<uint32_t>>& merged;
    const Graph& p0;
    const Graph& p1;
};

using Adversary = std::function<int(const AdversaryView&, Rng&)>;

Adversary make_coin_adversary();
Adversary make_profile_adversary();   // counts merged classes vs candidate edge counts
Adversary make_canonical_adversary(const Limits& limits = {});  // realizability oracle

struct GameResult {
    uint64_t trials = 0;
    uint64_t correct = 0;

    double advantage() const { return trials ? static_cast<double>(correct) / trials - 0.5 : 0.0; }
};

// Per-trial generators are split deterministically from rng, so the result
// is identical for any jobs count; trials may run on up to `jobs` threads.
GameResult distinguish_game(const Graph& h, const Graph& p0, const Graph& p1, uint64_t trials,
                            const Adversary& adversary, Rng& rng, uint32_t jobs = 1, const Limits& limits = {});

// Decides subgraph isomorphism through the distinguishing machinery: build
// the quotient for (p, h), then ask the recognizer whether it carries the
// subgraph-present canonical form. With the oracle recognizer the verdict
// equals subgraph_iso_bruteforce presence.
using Recognizer = std::function<bool(const Graph& h, const PatternQuotient& q, const Graph& p)>;

Recognizer make_oracle_recognizer(const Limits& limits = {});
bool reduce_si_to_distinguishing(const Graph& p, const Graph& h, const Recognizer& recognizer, Rng& rng,
                                 const Limits& limits = {});

std::string to_json(const GameResult& r);

}  // namespace helab::distinguish
