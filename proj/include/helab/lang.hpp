#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "helab/common.hpp"
#include "helab/quotient.hpp"

namespace helab::lang {

// Simply typed lambda calculus with unit, products, sums, and two built-in
// constant families over finite base types: eK_N (element K of an N-element
// base) and succN (the +1 mod N map). No recursion or fixpoints exist, so
// every well-typed term is strongly normalizing; the fuel parameter below is
// a tripwire for implementation bugs, not a semantic device.

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
    enum class Kind { Base, Unit, Prod, Sum, Arrow };

    Kind kind = Kind::Unit;
    uint64_t size = 0;  // Base carrier size, >= 1
    TypePtr l, r;       // Prod/Sum components, Arrow dom/cod
};

TypePtr ty_base(uint64_t n);
TypePtr ty_unit();
TypePtr ty_prod(TypePtr l, TypePtr r);
TypePtr ty_sum(TypePtr l, TypePtr r);
TypePtr ty_arrow(TypePtr dom, TypePtr cod);

bool type_equal(const TypePtr& a, const TypePtr& b);
std::string to_string(const TypePtr& t);

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    enum class Kind { Var, Lam, App, Pair, Fst, Snd, Inl, Inr, Case, Unit, ConstElem, ConstSucc };

    Kind kind = Kind::Unit;
    std::string name;           // Var name, Lam binder
    std::string lname, rname;   // Case branch binders
    TypePtr annot;              // Lam domain; Inl/Inr full sum type
    TermPtr a, b, c;            // children (App f/arg, Case scrut/branches, ...)
    uint64_t elem = 0;          // ConstElem index
    uint64_t base = 0;          // ConstElem / ConstSucc carrier size
};

TermPtr t_var(std::string name);
TermPtr t_lam(std::string name, TypePtr annot, TermPtr body);
TermPtr t_app(TermPtr f, TermPtr arg);
TermPtr t_pair(TermPtr l, TermPtr r);
TermPtr t_fst(TermPtr t);
TermPtr t_snd(TermPtr t);
TermPtr t_inl(TypePtr sum, TermPtr t);
TermPtr t_inr(TypePtr sum, TermPtr t);
TermPtr t_case(TermPtr scrut, std::string lname, TermPtr lbody, std::string rname, TermPtr rbody);
TermPtr t_unit();
TermPtr t_elem(uint64_t i, uint64_t n);
TermPtr t_succ(uint64_t n);

bool term_equal(const TermPtr& a, const TermPtr& b);

// Grammar: `\x:T. t`, juxtaposition, `(t, t)`, `fst t`, `snd t`, `inl[T] t`,
// `inr[T] t`, `case t of {inl x -> t | inr y -> t}`, `()`, `eK_N`, `succN`;
// types `BN`, `Unit`, `T*T`, `T+T`, `T->T` with * > + > ->. Input must be
// closed; unbound names are reported with their position.
TermPtr parse_term(const std::string& text);
std::string to_string(const TermPtr& t);

using Context = std::vector<std::pair<std::string, TypePtr>>;

TypePtr typecheck(const Context& ctx, const TermPtr& t);
TypePtr typecheck_closed(const TermPtr& t);

// Full beta-normal form, reducing under binders (leftmost-outermost). Used
// by the normalization test suite and `prove`.
TermPtr normalize_term(const TermPtr& t, uint64_t fuel = 100'000);
// Weak call-by-value evaluation: no reduction under binders. Cheaper, and
// enough for denotation equality of closed terms.
TermPtr evaluate_weak(const TermPtr& t, uint64_t fuel = 100'000);

// Finite-set semantics. Every type denotes a finite set (sizes below), every
// closed term an element of its type's set.
struct Denotation {
    enum class Kind { Elem, Unit, Pair, Tag, Table };

    Kind kind = Kind::Unit;
    uint64_t index = 0;  // Elem
    int tag = 0;         // Tag: 0 = inl, 1 = inr (payload in `a`)
    std::shared_ptr<const Denotation> a, b;
    std::vector<Denotation> table;  // Table, indexed by domain element

    bool operator==(const Denotation& o) const;
};

// |Base n| = n, |Unit| = 1, |Prod| = product, |Sum| = sum, |Arrow| = power.
uint64_t type_size(const TypePtr& t, const Limits& limits = {});
Denotation value_of(const TypePtr& t, uint64_t index, const Limits& limits = {});
uint64_t index_of(const TypePtr& t, const Denotation& d, const Limits& limits = {});

Denotation denote(const TermPtr& t, const Limits& limits = {});
std::pair<TypePtr, Denotation> denote_typed(const TermPtr& t, const Limits& limits = {});

// \x:Bn. succn (... k times ... x) — denotes the shift f_k.
TermPtr make_shift_term(uint64_t k, uint64_t n);

// Encrypts the denotation of a term of type Bn -> Bn (n = the key modulus)
// into the quotient scheme, provided it denotes a cyclic shift.
quotient::Ciphertext encrypt_denotation(const quotient::SecretKey& sk, const TermPtr& t, const Limits& limits = {});
// Composition of encrypted shift denotations = class composition.
quotient::Ciphertext hom_compose_terms(const quotient::PublicEvalKey& pk, const quotient::Ciphertext& c1,
                                       const quotient::Ciphertext& c2);

}  // namespace helab::lang
