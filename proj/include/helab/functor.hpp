#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "helab/common.hpp"

namespace helab::functor {

// Exact naturals; cardinalities grow as n^k and do not fit machine words.
using Nat = boost::multiprecision::cpp_int;

// Finitary polynomial functor expression: sums, products and powers of the
// single variable X, with natural-number constants.
struct PolyFunctor {
    enum class Kind { Const, Var, Sum, Prod, Pow };

    Kind kind = Kind::Const;
    Nat constant = 0;                    // Kind::Const
    uint64_t exponent = 0;               // Kind::Pow (base is always X)
    std::vector<PolyFunctor> children;   // Kind::Sum / Kind::Prod, nonempty

    static PolyFunctor constant_of(Nat c);
    static PolyFunctor var();
    static PolyFunctor pow(uint64_t e);
    static PolyFunctor sum(std::vector<PolyFunctor> parts);
    static PolyFunctor prod(std::vector<PolyFunctor> parts);

    bool operator==(const PolyFunctor& o) const;
};

// Canonical sum-of-powers form: exponent -> multiplicity, no zero
// multiplicities. The empty map is the zero polynomial.
struct NormalForm {
    std::map<uint64_t, Nat> terms;

    bool operator==(const NormalForm& o) const = default;
};

struct FiniteSet {
    uint64_t size = 0;
};

// One element of the polynomial applied to a finite set: which summand it
// came from (multiplicity copies count separately, ordered by descending
// exponent) and the tuple of indices filling the power.
struct Element {
    uint64_t summand = 0;
    std::vector<uint64_t> tuple;

    bool operator==(const Element& o) const = default;
    bool operator<(const Element& o) const {
        if (summand != o.summand) return summand < o.summand;
        return tuple < o.tuple;
    }
};

// Throws UsageError if the tree breaks structural invariants, BudgetExceeded
// if it is larger or deeper than the configured limits.
void validate(const PolyFunctor& f, const Limits& limits = {});

NormalForm normalize(const PolyFunctor& f, const Limits& limits = {});

// Renders a normal form back into an expression tree (descending exponents).
PolyFunctor to_poly(const NormalForm& nf);

Nat cardinality(const NormalForm& nf, uint64_t set_size, const Limits& limits = {});

std::vector<Element> enumerate(const NormalForm& nf, FiniteSet a, const Limits& limits = {});

// Textual syntax: `0`, `1`, `X`, `X^k`, `f + g`, `f * g`, parentheses.
PolyFunctor parse(const std::string& text);
std::string to_string(const PolyFunctor& f);

// {"terms": [{"exp": k, "mult": m}, ...]} sorted by descending exp; mult is a
// JSON number when it fits 64 bits, a decimal string otherwise.
std::string to_json(const NormalForm& nf);
NormalForm normal_form_from_json(const std::string& json);

}  // namespace helab::functor
