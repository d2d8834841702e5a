#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "helab/common.hpp"

namespace helab::bench {

// Wall-time comparison of table precomputation (keygen) against per-call
// evaluation (eval_add lookups) across a grid of moduli.
struct BenchEntry {
    std::string op;          // "keygen" | "eval_add"
    uint32_t n = 0;
    uint64_t class_size = 0;
    std::string mode;        // "full" | "sampled"
    uint64_t ops = 0;        // work items per repetition (tables built / adds done)
    uint64_t reps = 0;
    double median_us = 0.0;  // per-repetition wall time
    double p95_us = 0.0;
};

struct BenchReport {
    uint64_t seed = 0;
    std::vector<BenchEntry> entries;
};

// Full-mode grid over n in [n_min, n_max] with class size n^(n-2), so the
// class count stays at n^2 while the table universe grows as n^n.
BenchReport bench_quotient(uint32_t n_min, uint32_t n_max, uint64_t reps, uint64_t seed,
                           const Limits& limits = {});

// Timing fields (median_us, p95_us) vary run to run; everything else in the
// report is deterministic for a fixed seed.
std::string to_json(const BenchReport& r);

}  // namespace helab::bench
