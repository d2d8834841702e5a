#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace helab {

// Status codes shared by the C++ exceptions, the C API and the CLI exit codes.
enum class Status : int {
    Ok = 0,
    Usage = 1,
    Params = 2,
    Crypto = 3,
    Parse = 4,
    Budget = 5,
    Io = 6,
    Internal = 7,
};

class Error : public std::runtime_error {
public:
    Error(Status code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    Status code() const noexcept { return code_; }

private:
    Status code_;
};

struct UsageError : Error {
    explicit UsageError(const std::string& m) : Error(Status::Usage, m) {}
};
struct ParamsError : Error {
    explicit ParamsError(const std::string& m) : Error(Status::Params, m) {}
};
struct RangeError : Error {
    explicit RangeError(const std::string& m) : Error(Status::Crypto, m) {}
};
struct UndefinedComposition : Error {
    explicit UndefinedComposition(const std::string& m) : Error(Status::Crypto, m) {}
};
struct NotAShiftClass : Error {
    explicit NotAShiftClass(const std::string& m) : Error(Status::Crypto, m) {}
};
struct UnknownLabel : Error {
    explicit UnknownLabel(const std::string& m) : Error(Status::Crypto, m) {}
};
struct NotAShift : Error {
    explicit NotAShift(const std::string& m) : Error(Status::Crypto, m) {}
};
struct ArityError : Error {
    explicit ArityError(const std::string& m) : Error(Status::Usage, m) {}
};
struct BudgetExceeded : Error {
    explicit BudgetExceeded(const std::string& m) : Error(Status::Budget, m) {}
};
struct ParseError : Error {
    ParseError(const std::string& m, int line = 0, int col = 0)
        : Error(Status::Parse, col > 0 ? m + " at " + std::to_string(line) + ":" + std::to_string(col) : m),
          line(line),
          col(col) {}
    int line;
    int col;
};
struct TypecheckError : Error {
    explicit TypecheckError(const std::string& m) : Error(Status::Parse, m) {}
};
struct FuelExhausted : Error {
    explicit FuelExhausted(const std::string& m) : Error(Status::Budget, m) {}
};
struct IoError : Error {
    explicit IoError(const std::string& m) : Error(Status::Io, m) {}
};

// All randomness flows through explicitly seeded mt19937_64 engines.
using Rng = std::mt19937_64;

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic child stream: used to hand independent generators to
// parallel game trials without sharing engine state.
inline Rng substream(uint64_t master_seed, uint64_t index) {
    return Rng(splitmix64(master_seed ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

// Unbiased draw in [0, bound). std::uniform_int_distribution is not pinned
// down by the standard, so determinism across toolchains needs our own.
inline uint64_t uniform_below(Rng& rng, uint64_t bound) {
    if (bound == 0) throw UsageError("uniform_below: bound must be positive");
    const uint64_t buckets = UINT64_MAX / bound;
    const uint64_t limit = buckets * bound;
    uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

template <typename T>
void shuffle_in_place(Rng& rng, std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
        const size_t j = static_cast<size_t>(uniform_below(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

// Explicit work budgets. Defaults fit the desk-scale constructions; anything
// larger fails loudly instead of grinding or overflowing.
struct Limits {
    uint64_t max_tree_nodes = 100'000;       // functor expression size
    uint64_t max_tree_depth = 200;           // functor expression nesting
    uint64_t max_expand_ops = 1'000'000;     // normalization work budget
    uint64_t max_enumeration = 1'000'000;    // element / table enumeration cap
    uint64_t max_cardinality_bits = 1'000'000;
    uint64_t max_star_entries = 4'000'000;   // published composition table
    uint64_t max_search_nodes = 5'000'000;   // subgraph search budget
    uint32_t max_pattern_vertices = 6;
    uint32_t max_host_vertices = 10;
    uint64_t max_denotation = 1'000'000;     // semantic set size cap
};

}  // namespace helab
