#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "helab/common.hpp"

namespace helab::subgroup {

// Bit scheme over a simulated bilinear group of composite order N = p*q.
// Elements are exponents relative to fixed generators (g for the source
// group, g_T = e(g,g) for the target), so the pairing is exponent
// multiplication mod N. The simulation reproduces the subgroup mechanics
// exactly and the subgroup-decision assumption not at all: anyone can factor
// the exponent. This module demonstrates correctness, not security.

struct GroupParams {
    uint64_t p = 0;
    uint64_t q = 0;
    uint64_t N = 0;

    bool operator==(const GroupParams&) const = default;
};

// g^x in the source group G.
struct SourceElem {
    uint64_t x = 0;

    bool operator==(const SourceElem&) const = default;
};

// g_T^y in the target group G_T.
struct TargetElem {
    uint64_t y = 0;

    bool operator==(const TargetElem&) const = default;
};

// Monotone 2-DNF: disjunction of two-literal conjuncts over variables x0..x{k-1}.
struct DnfFormula {
    std::vector<std::pair<uint32_t, uint32_t>> conjuncts;
    uint32_t variable_count = 0;
};

bool is_prime(uint64_t n);

// Throws ParamsError unless p and q are distinct primes > 3.
GroupParams setup(uint64_t p, uint64_t q);

// bit 1 -> a uniform nonidentity member of the order-p subgroup (x = q*r,
// r in [1,p)); bit 0 -> one of the order-q subgroup (x = p*r, r in [1,q)).
SourceElem encrypt_bit(const GroupParams& g, int bit, Rng& rng);
// White-box variant pinning the blinding factor; used to enumerate all
// encryption randomness exhaustively.
SourceElem encrypt_bit_with_r(const GroupParams& g, int bit, uint64_t r);

// OR = multiplication in G: exponents add mod N.
SourceElem hom_or(const GroupParams& g, const SourceElem& a, const SourceElem& b);
// AND = the pairing e(a,b): exponents multiply mod N, landing in G_T.
TargetElem hom_and(const GroupParams& g, const SourceElem& a, const SourceElem& b);
// OR after AND = multiplication in G_T.
TargetElem hom_or_target(const GroupParams& g, const TargetElem& a, const TargetElem& b);

// 0 iff the element lies in the order-q subgroup (raising to the q-th power
// gives the identity), else 1. The identity itself decrypts to 0.
int decrypt_bit(const GroupParams& g, const SourceElem& c);
int decrypt_bit(const GroupParams& g, const TargetElem& c);

// AND each conjunct via the pairing, OR the results in the target group.
TargetElem eval_2dnf(const GroupParams& g, const DnfFormula& f, const std::vector<SourceElem>& cs);

// Plaintext truth-table semantics; the oracle eval_2dnf is measured against.
int eval_2dnf_plain(const DnfFormula& f, const std::vector<int>& bits);

// `(x0 & x1) | (x2 & x3)`; variable_count = highest index + 1.
DnfFormula parse_dnf(const std::string& text);
std::string to_string(const DnfFormula& f);

// JSON wire formats.
std::string to_json(const GroupParams& g);
std::string to_json(const SourceElem& c);
std::string to_json(const TargetElem& c);
GroupParams params_from_json(const std::string& text);
// Reads {"group":"source"|"target","x":"<dec>"}; the bool reports which.
bool elem_from_json(const std::string& text, SourceElem& s, TargetElem& t);

}  // namespace helab::subgroup
