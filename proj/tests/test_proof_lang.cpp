#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>
#include <vector>

#include "doctest.h"
#include "helab/lang.hpp"
#include "helab/quotient.hpp"
#include "support.hpp"

using namespace helab::lang;
namespace quotient = helab::quotient;

namespace {

quotient::SchemeParams sampled_params(uint32_t n, uint64_t c, uint64_t extra, uint64_t seed) {
    quotient::SchemeParams p;
    p.n = n;
    p.class_size = c;
    p.mode = quotient::Mode::Sampled;
    p.universe_extra = extra;
    p.seed = seed;
    return p;
}

TermPtr parsed(const std::string& s) { return parse_term(s); }

// table denotation as a plain index vector, for readable comparisons
std::vector<uint64_t> table_of(const Denotation& d) {
    REQUIRE(d.kind == Denotation::Kind::Table);
    std::vector<uint64_t> out;
    for (const Denotation& e : d.table) {
        REQUIRE(e.kind == Denotation::Kind::Elem);
        out.push_back(e.index);
    }
    return out;
}

}  // namespace

TEST_CASE("types print with the documented precedences") {
    CHECK(to_string(ty_arrow(ty_base(4), ty_base(4))) == "B4->B4");
    CHECK(to_string(ty_arrow(ty_arrow(ty_base(2), ty_base(2)), ty_base(2))) == "(B2->B2)->B2");
    CHECK(to_string(ty_prod(ty_sum(ty_base(1), ty_base(2)), ty_base(3))) == "(B1+B2)*B3");
    CHECK(to_string(ty_sum(ty_prod(ty_base(1), ty_base(2)), ty_base(3))) == "B1*B2+B3");
    CHECK(to_string(ty_prod(ty_unit(), ty_prod(ty_base(2), ty_base(2)))) == "Unit*(B2*B2)");
    CHECK(type_equal(ty_prod(ty_base(2), ty_unit()), ty_prod(ty_base(2), ty_unit())));
    CHECK(!type_equal(ty_base(2), ty_base(3)));
    CHECK(!type_equal(ty_sum(ty_base(2), ty_base(2)), ty_prod(ty_base(2), ty_base(2))));
    CHECK_THROWS_AS(ty_base(0), helab::UsageError);
}

TEST_CASE("parsing builds the expected trees") {
    const TermPtr id = parsed("\\x:B4. x");
    CHECK(id->kind == Term::Kind::Lam);
    CHECK(id->name == "x");
    CHECK(type_equal(id->annot, ty_base(4)));
    CHECK(id->a->kind == Term::Kind::Var);
    CHECK(to_string(id) == "\\x:B4. x");

    const TermPtr two = parsed("succ4 (succ4 e0_4)");
    CHECK(term_equal(two, t_app(t_succ(4), t_app(t_succ(4), t_elem(0, 4)))));

    const TermPtr swapped = parsed("\\p:B2*Unit. (snd p, fst p)");
    CHECK(to_string(swapped) == "\\p:B2*Unit. (snd p, fst p)");

    const TermPtr tagged = parsed("case inl[B2+Unit] e1_2 of {inl a -> a | inr u -> e0_2}");
    CHECK(tagged->kind == Term::Kind::Case);
    CHECK(tagged->lname == "a");
    CHECK(term_equal(parsed(to_string(tagged)), tagged));
}

TEST_CASE("parsing rejects unbound names and malformed input") {
    CHECK_THROWS_AS(parsed("fst (x, y)"), helab::ParseError);
    CHECK_THROWS_AS(parsed("\\x:B4. y"), helab::ParseError);
    CHECK_THROWS_AS(parsed(""), helab::ParseError);
    CHECK_THROWS_AS(parsed("\\x:B4"), helab::ParseError);
    CHECK_THROWS_AS(parsed("e4_4"), helab::ParseError);   // index out of carrier
    CHECK_THROWS_AS(parsed("succ0"), helab::ParseError);  // empty carrier
    CHECK_THROWS_AS(parsed("e0_2 )"), helab::ParseError);
    CHECK_THROWS_AS(parsed("inl e0_2"), helab::ParseError);  // injection needs [T]
    CHECK_THROWS_AS(parsed("case e0_2 of {inl x -> x}"), helab::ParseError);
    CHECK_THROWS_AS(parsed("\\x:B4. x -"), helab::ParseError);
    // positions are reported
    try {
        parsed("\\x:B4. y");
        FAIL("expected a parse error");
    } catch (const helab::ParseError& e) {
        CHECK(std::string(e.what()).find("unbound variable 'y'") != std::string::npos);
    }
}

TEST_CASE("typechecking accepts the classics and rejects misuse") {
    CHECK(to_string(typecheck_closed(parsed("\\x:B4. x"))) == "B4->B4");
    CHECK(to_string(typecheck_closed(parsed("((), e2_4)"))) == "Unit*B4");
    CHECK(to_string(typecheck_closed(parsed("succ4"))) == "B4->B4");
    CHECK(to_string(typecheck_closed(parsed("\\f:B2->B2. \\x:B2. f (f x)"))) == "(B2->B2)->B2->B2");
    CHECK(to_string(typecheck_closed(parsed("inr[Unit+B3] e1_3"))) == "Unit+B3");

    CHECK_THROWS_AS(typecheck_closed(parsed("e0_4 ()")), helab::TypecheckError);
    CHECK_THROWS_AS(typecheck_closed(parsed("fst e0_2")), helab::TypecheckError);
    CHECK_THROWS_AS(typecheck_closed(parsed("succ4 e0_2")), helab::TypecheckError);
    CHECK_THROWS_AS(typecheck_closed(parsed("inl[B2+B2] ()")), helab::TypecheckError);
    CHECK_THROWS_AS(typecheck_closed(parsed("case inl[B2+B2] e0_2 of {inl x -> x | inr y -> ()}")),
                    helab::TypecheckError);
    CHECK_THROWS_AS(typecheck_closed(parsed("(\\x:B2. x) e0_3")), helab::TypecheckError);

    const Context ctx = {{"x", ty_base(4)}};
    CHECK(type_equal(typecheck(ctx, t_var("x")), ty_base(4)));
    CHECK_THROWS_AS(typecheck(ctx, t_var("z")), helab::TypecheckError);
}

TEST_CASE("normalization computes full beta-normal forms") {
    CHECK(term_equal(normalize_term(parsed("(\\x:B4. x) e2_4")), t_elem(2, 4)));
    CHECK(term_equal(normalize_term(parsed("fst (e1_2, ())")), t_elem(1, 2)));
    CHECK(term_equal(normalize_term(parsed("snd (e1_2, ())")), t_unit()));
    CHECK(term_equal(normalize_term(parsed("succ4 (succ4 (succ4 (succ4 e1_4)))")), t_elem(1, 4)));
    CHECK(term_equal(normalize_term(parsed("case inr[B2+B3] e2_3 of {inl x -> e0_3 | inr y -> y}")), t_elem(2, 3)));
    // reduction happens under binders
    CHECK(to_string(normalize_term(parsed("\\x:B2. (\\y:B2. y) x"))) == "\\x:B2. x");
    // normal forms are fixed points
    const TermPtr nf = normalize_term(parsed("(\\f:B3->B3. f (f e0_3)) succ3"));
    CHECK(term_equal(nf, t_elem(2, 3)));
    CHECK(term_equal(normalize_term(nf), nf));
}

TEST_CASE("weak evaluation stops at lambdas") {
    const TermPtr frozen = parsed("\\x:B2. (\\y:B2. y) x");
    CHECK(term_equal(evaluate_weak(frozen), frozen));  // no reduction under the binder
    CHECK(term_equal(evaluate_weak(parsed("(\\x:B4. x) e2_4")), t_elem(2, 4)));
    CHECK(term_equal(evaluate_weak(parsed("snd ((), succ2 e0_2)")), t_elem(1, 2)));
}

TEST_CASE("fuel is a tripwire, not a budget that honest terms hit") {
    const TermPtr chain = parsed("(\\x:B4. x) ((\\x:B4. x) ((\\x:B4. x) e2_4))");
    CHECK_THROWS_AS(normalize_term(chain, 1), helab::FuelExhausted);
    CHECK_THROWS_AS(evaluate_weak(chain, 1), helab::FuelExhausted);
    CHECK(term_equal(normalize_term(chain, 3), t_elem(2, 4)));
    // already-normal terms survive zero fuel
    CHECK(term_equal(normalize_term(t_elem(0, 2), 0), t_elem(0, 2)));
}

TEST_CASE("finite-set sizes, indexing and enumeration are mutually inverse") {
    CHECK(type_size(ty_base(4)) == 4);
    CHECK(type_size(ty_unit()) == 1);
    CHECK(type_size(ty_prod(ty_base(2), ty_base(3))) == 6);
    CHECK(type_size(ty_sum(ty_base(2), ty_base(3))) == 5);
    CHECK(type_size(ty_arrow(ty_base(2), ty_base(3))) == 9);
    CHECK(type_size(ty_arrow(ty_arrow(ty_base(2), ty_base(2)), ty_base(2))) == 16);

    const std::vector<TypePtr> types = {
        ty_base(1),
        ty_base(5),
        ty_unit(),
        ty_prod(ty_base(2), ty_sum(ty_unit(), ty_base(3))),
        ty_sum(ty_arrow(ty_base(2), ty_base(2)), ty_unit()),
        ty_arrow(ty_prod(ty_base(2), ty_base(2)), ty_sum(ty_base(2), ty_base(2))),
    };
    for (const TypePtr& t : types) {
        const uint64_t size = type_size(t);
        for (uint64_t i = 0; i < size; ++i) {
            const Denotation d = value_of(t, i);
            CHECK(index_of(t, d) == i);
        }
        CHECK_THROWS_AS(value_of(t, size), helab::UsageError);
    }

    CHECK_THROWS_AS(type_size(ty_arrow(ty_base(10), ty_base(10))), helab::BudgetExceeded);
}

TEST_CASE("denotations of the worked examples") {
    CHECK(table_of(denote(parsed("\\x:B4. x"))) == std::vector<uint64_t>{0, 1, 2, 3});
    CHECK(table_of(denote(parsed("succ4"))) == std::vector<uint64_t>{1, 2, 3, 0});
    CHECK(table_of(denote(parsed("\\x:B4. succ4 (succ4 x)"))) == std::vector<uint64_t>{2, 3, 0, 1});

    const Denotation e2 = denote(parsed("e2_4"));
    CHECK(e2.kind == Denotation::Kind::Elem);
    CHECK(e2.index == 2);

    const Denotation pr = denote(parsed("((), e1_3)"));
    REQUIRE(pr.kind == Denotation::Kind::Pair);
    CHECK(pr.a->kind == Denotation::Kind::Unit);
    CHECK(pr.b->index == 1);

    const Denotation tag = denote(parsed("inr[B2+B3] e1_3"));
    REQUIRE(tag.kind == Denotation::Kind::Tag);
    CHECK(tag.tag == 1);
    CHECK(tag.a->index == 1);

    const Denotation applied = denote(parsed("(\\x:B2. (x, x)) e1_2"));
    REQUIRE(applied.kind == Denotation::Kind::Pair);
    CHECK(applied.a->index == 1);
    CHECK(applied.b->index == 1);

    const auto [ty, d] = denote_typed(parsed("succ3 e1_3"));
    CHECK(to_string(ty) == "B3");
    CHECK(d.index == 2);

    CHECK_THROWS_AS(denote(t_var("x")), helab::TypecheckError);
}

TEST_CASE("shift terms denote the cyclic shifts") {
    CHECK(to_string(make_shift_term(0, 4)) == "\\x:B4. x");
    CHECK(to_string(make_shift_term(2, 4)) == "\\x:B4. succ4 (succ4 x)");
    for (uint64_t n = 1; n <= 6; ++n)
        for (uint64_t k = 0; k < n; ++k) {
            const TermPtr t = make_shift_term(k, n);
            CHECK(to_string(typecheck_closed(t)) == "B" + std::to_string(n) + "->B" + std::to_string(n));
            const auto tbl = table_of(denote(t));
            for (uint64_t i = 0; i < n; ++i) CHECK(tbl[i] == (i + k) % n);
        }
    CHECK_THROWS_AS(make_shift_term(0, 0), helab::UsageError);
}

TEST_CASE("generated corpus: typing, termination, semantics preservation") {
    testsupport::TermGen gen(20260816);
    int arrows = 0, sums = 0;
    for (int i = 0; i < 1100; ++i) {
        const TermPtr t = gen.closed_term(6);
        const TypePtr ty = typecheck_closed(t);

        // printer and parser agree on every generated tree
        CHECK(term_equal(parse_term(to_string(t)), t));

        // normalization terminates well under the tripwire and preserves types
        const TermPtr nf = normalize_term(t, 100'000);
        CHECK(type_equal(typecheck_closed(nf), ty));
        CHECK(term_equal(normalize_term(nf, 100'000), nf));

        // semantics is invariant under both reduction strategies
        const Denotation before = denote(t);
        CHECK(denote(nf) == before);
        CHECK(denote(evaluate_weak(t, 100'000)) == before);

        // the denotation inhabits the stated type
        CHECK(index_of(ty, before) < type_size(ty));

        arrows += ty->kind == Type::Kind::Arrow;
        sums += ty->kind == Type::Kind::Sum;
    }
    CHECK(arrows > 50);  // the generator exercises higher-order types
    CHECK(sums > 50);
}

TEST_CASE("term denotations encrypt into the quotient scheme") {
    const quotient::SecretKey sk = quotient::keygen(sampled_params(4, 3, 1, 42)).sk;

    const quotient::Ciphertext id = encrypt_denotation(sk, parsed("\\x:B4. x"));
    CHECK(id.label == quotient::encrypt(sk, 0).label);
    CHECK(quotient::decrypt(sk, encrypt_denotation(sk, parsed("\\x:B4. succ4 (succ4 (succ4 x))"))) == 3);
    // unnormalized terms are fine; the denotation is what gets encrypted
    CHECK(quotient::decrypt(sk, encrypt_denotation(sk, parsed("(\\f:B4->B4. \\x:B4. f (f x)) succ4"))) == 2);

    CHECK_THROWS_AS(encrypt_denotation(sk, parsed("\\x:B4. e0_4")), helab::NotAShift);
    CHECK_THROWS_AS(encrypt_denotation(sk, parsed("\\x:B3. x")), helab::ParamsError);
    CHECK_THROWS_AS(encrypt_denotation(sk, parsed("e0_4")), helab::ParamsError);
}

TEST_CASE("composing encrypted shift terms adds the shifts") {
    for (uint32_t n = 2; n <= 8; ++n) {
        const auto params = n == 2 ? sampled_params(2, 2, 0, 72) : sampled_params(n, 3, 1, 70 + n);
        const quotient::KeyPair kp = quotient::keygen(params);
        const quotient::SecretKey& sk = kp.sk;
        const quotient::PublicEvalKey& pk = kp.pk;
        for (uint64_t k = 0; k < n; ++k)
            for (uint64_t l = 0; l < n; ++l) {
                const quotient::Ciphertext c1 = encrypt_denotation(sk, make_shift_term(k, n));
                const quotient::Ciphertext c2 = encrypt_denotation(sk, make_shift_term(l, n));
                const quotient::Ciphertext sum = hom_compose_terms(pk, c1, c2);
                CHECK(quotient::decrypt(sk, sum) == (k + l) % n);
            }
    }
}
