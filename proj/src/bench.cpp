#include "helab/bench.hpp"

#include <algorithm>
#include <chrono>

#include "helab/quotient.hpp"
#include "json.hpp"

namespace helab::bench {

using nlohmann::json;

namespace {

double percentile(std::vector<double> xs, double p) {
    std::sort(xs.begin(), xs.end());
    if (xs.empty()) return 0.0;
    const double rank = p * (xs.size() - 1);
    const size_t lo = static_cast<size_t>(rank);
    const size_t hi = std::min(lo + 1, xs.size() - 1);
    const double frac = rank - lo;
    return xs[lo] * (1.0 - frac) + xs[hi] * frac;
}

uint64_t pow_u64(uint64_t base, uint32_t exp) {
    uint64_t r = 1;
    for (uint32_t i = 0; i < exp; ++i) r *= base;
    return r;
}

}  // namespace

BenchReport bench_quotient(uint32_t n_min, uint32_t n_max, uint64_t reps, uint64_t seed, const Limits& limits) {
    if (n_min < 2 || n_max < n_min) throw ParamsError("need 2 <= n_min <= n_max");
    if (n_max > 6) throw ParamsError("full-mode grid tops out at n=6");
    if (reps < 3) throw ParamsError("at least 3 repetitions required");

    using clock = std::chrono::steady_clock;
    constexpr uint64_t kAddsPerRep = 2000;

    BenchReport report;
    report.seed = seed;
    for (uint32_t n = n_min; n <= n_max; ++n) {
        quotient::SchemeParams params;
        params.n = n;
        params.class_size = pow_u64(n, n - 2);
        params.mode = quotient::Mode::Full;
        params.seed = seed + n;

        std::vector<double> keygen_us, add_us;
        quotient::KeyPair kp;
        for (uint64_t r = 0; r < reps; ++r) {
            const auto t0 = clock::now();
            kp = quotient::keygen(params, limits);
            const auto t1 = clock::now();
            keygen_us.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
        }

        std::vector<quotient::Ciphertext> cts;
        cts.reserve(n);
        for (uint32_t m = 0; m < n; ++m) cts.push_back(quotient::encrypt(kp.sk, m));
        Rng rng(seed ^ (0x9e3779b97f4a7c15ULL + n));
        for (uint64_t r = 0; r < reps; ++r) {
            const auto t0 = clock::now();
            quotient::Ciphertext acc = cts[0];
            for (uint64_t i = 0; i < kAddsPerRep; ++i)
                acc = quotient::eval_add(kp.pk, acc, cts[uniform_below(rng, n)]);
            const auto t1 = clock::now();
            add_us.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
        }

        BenchEntry keygen_entry;
        keygen_entry.op = "keygen";
        keygen_entry.n = n;
        keygen_entry.class_size = params.class_size;
        keygen_entry.mode = "full";
        keygen_entry.ops = pow_u64(n, n);  // tables materialized per keygen
        keygen_entry.reps = reps;
        keygen_entry.median_us = percentile(keygen_us, 0.5);
        keygen_entry.p95_us = percentile(keygen_us, 0.95);
        report.entries.push_back(std::move(keygen_entry));

        BenchEntry add_entry;
        add_entry.op = "eval_add";
        add_entry.n = n;
        add_entry.class_size = params.class_size;
        add_entry.mode = "full";
        add_entry.ops = kAddsPerRep;
        add_entry.reps = reps;
        add_entry.median_us = percentile(add_us, 0.5);
        add_entry.p95_us = percentile(add_us, 0.95);
        report.entries.push_back(std::move(add_entry));
    }
    return report;
}

std::string to_json(const BenchReport& r) {
    json entries = json::array();
    for (const auto& e : r.entries) {
        json j;
        j["class_size"] = e.class_size;
        j["median_us"] = e.median_us;
        j["mode"] = e.mode;
        j["n"] = e.n;
        j["op"] = e.op;
        j["ops"] = e.ops;
        j["p95_us"] = e.p95_us;
        j["reps"] = e.reps;
        entries.push_back(std::move(j));
    }
    json doc;
    doc["entries"] = std::move(entries);
    doc["seed"] = r.seed;
    return doc.dump();
}

}  // namespace helab::bench
