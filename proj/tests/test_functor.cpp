#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "helab/functor.hpp"
#include "support.hpp"

using namespace helab::functor;
using PF = PolyFunctor;

namespace {

NormalForm nf(std::initializer_list<std::pair<uint64_t, int>> terms) {
    NormalForm out;
    for (auto [e, m] : terms) out.terms[e] = m;
    return out;
}

}  // namespace

TEST_CASE("normalize expands products over sums") {
    const PF f = PF::prod({PF::pow(2), PF::sum({PF::var(), PF::constant_of(1)})});
    CHECK(normalize(f) == nf({{3, 1}, {2, 1}}));
}

TEST_CASE("normalize keeps plain powers") {
    CHECK(normalize(PF::pow(4)) == nf({{4, 1}}));
}

TEST_CASE("normalize collects like terms") {
    CHECK(normalize(PF::sum({PF::var(), PF::var()})) == nf({{1, 2}}));
}

TEST_CASE("normalize edge cases") {
    CHECK(normalize(PF::constant_of(0)) == NormalForm{});
    CHECK(normalize(PF::pow(0)) == nf({{0, 1}}));
    CHECK(normalize(PF::prod({PF::constant_of(0), PF::pow(7)})) == NormalForm{});
    CHECK(normalize(PF::sum({PF::constant_of(2), PF::constant_of(3)})) == nf({{0, 5}}));
}

TEST_CASE("cardinality of the full function space") {
    CHECK(cardinality(nf({{4, 1}}), 4) == 256);
}

TEST_CASE("cardinality of a constant functor") {
    for (uint64_t n : {0ull, 1ull, 9ull}) CHECK(cardinality(nf({{0, 1}}), n) == 1);
}

TEST_CASE("cardinality matches enumeration count") {
    const NormalForm f = nf({{3, 1}, {2, 1}});
    CHECK(cardinality(f, 2) == 12);
    CHECK(enumerate(f, FiniteSet{2}).size() == 12);
}

TEST_CASE("enumerate lists pairs lexicographically") {
    const auto elems = enumerate(nf({{2, 1}}), FiniteSet{2});
    const std::vector<Element> expected = {
        {0, {0, 0}}, {0, {0, 1}}, {0, {1, 0}}, {0, {1, 1}}};
    CHECK(elems == expected);
}

TEST_CASE("enumerate handles the one-point set") {
    CHECK(enumerate(nf({{1, 1}, {0, 1}}), FiniteSet{1}).size() == 2);
}

TEST_CASE("enumerate starts at the zero tuple") {
    const auto elems = enumerate(nf({{4, 1}}), FiniteSet{4});
    REQUIRE(elems.size() == 256);
    CHECK(elems.front() == Element{0, {0, 0, 0, 0}});
}

TEST_CASE("random trees: normalized cardinality equals the semantic oracle") {
    helab::Rng rng(2026);
    for (int i = 0; i < 300; ++i) {
        const PF f = testsupport::random_functor(rng, 5);
        const NormalForm normal = normalize(f);
        for (uint64_t n = 0; n <= 4; ++n)
            CHECK(cardinality(normal, n) == testsupport::tree_cardinality(f, n));
    }
}

TEST_CASE("normalize is idempotent through re-rendering") {
    helab::Rng rng(77);
    for (int i = 0; i < 300; ++i) {
        const PF f = testsupport::random_functor(rng, 5);
        const NormalForm once = normalize(f);
        CHECK(normalize(to_poly(once)) == once);
    }
}

TEST_CASE("enumerate emits exactly cardinality-many distinct elements") {
    helab::Rng rng(404);
    int covered = 0;
    for (int i = 0; covered < 60 && i < 400; ++i) {
        const PF f = testsupport::random_functor(rng, 4);
        const NormalForm normal = normalize(f);
        const uint64_t n = 1 + helab::uniform_below(rng, 3);
        const Nat count = cardinality(normal, n);
        if (count > 4096) continue;
        ++covered;
        const auto elems = enumerate(normal, FiniteSet{n});
        CHECK(Nat(elems.size()) == count);
        const std::set<Element> uniq(elems.begin(), elems.end());
        CHECK(uniq.size() == elems.size());
        CHECK(std::is_sorted(elems.begin(), elems.end()));
    }
    CHECK(covered == 60);
}

TEST_CASE("textual syntax parses to the same normal forms") {
    CHECK(normalize(parse("X^2 * (X + 1)")) == nf({{3, 1}, {2, 1}}));
    CHECK(normalize(parse("X+X")) == nf({{1, 2}}));
    CHECK(normalize(parse("0")) == NormalForm{});
    CHECK(normalize(parse("1 + X*X*X")) == nf({{3, 1}, {0, 1}}));
    CHECK(normalize(parse("  X ^ 4  ")) == nf({{4, 1}}));
    CHECK(normalize(parse("(X+1)*(X+1)")) == nf({{2, 1}, {1, 2}, {0, 1}}));
}

TEST_CASE("parse and print round-trip") {
    helab::Rng rng(9001);
    for (int i = 0; i < 200; ++i) {
        const PF f = testsupport::random_functor(rng, 4);
        CHECK(normalize(parse(to_string(f))) == normalize(f));
    }
    const NormalForm direct = nf({{5, 2}, {1, 3}, {0, 7}});
    CHECK(normalize(parse(to_string(to_poly(direct)))) == direct);
    // degree-one terms render as bare X, matching the input syntax
    CHECK(to_string(to_poly(direct)) == "2 * X^5 + 3 * X + 7");
    CHECK(to_string(to_poly(normalize(parse("X*(X+1)")))) == "X^2 + X");
}

TEST_CASE("parse rejects malformed input") {
    CHECK_THROWS_AS(parse(""), helab::ParseError);
    CHECK_THROWS_AS(parse("X^"), helab::ParseError);
    CHECK_THROWS_AS(parse("X +"), helab::ParseError);
    CHECK_THROWS_AS(parse("(X"), helab::ParseError);
    CHECK_THROWS_AS(parse("Y"), helab::ParseError);
    CHECK_THROWS_AS(parse("2^X"), helab::ParseError);
    CHECK_THROWS_AS(parse("X X"), helab::ParseError);
}

TEST_CASE("JSON rendering sorts by descending exponent") {
    CHECK(to_json(nf({{2, 1}, {3, 1}})) ==
          R"({"terms":[{"exp":3,"mult":1},{"exp":2,"mult":1}]})");
}

TEST_CASE("JSON round-trips byte-exactly") {
    helab::Rng rng(31337);
    for (int i = 0; i < 200; ++i) {
        const NormalForm normal = normalize(testsupport::random_functor(rng, 4));
        const std::string doc = to_json(normal);
        CHECK(normal_form_from_json(doc) == normal);
        CHECK(to_json(normal_form_from_json(doc)) == doc);
    }
}

TEST_CASE("JSON parser rejects malformed documents") {
    CHECK_THROWS_AS(normal_form_from_json("not json"), helab::ParseError);
    CHECK_THROWS_AS(normal_form_from_json(R"({"x":1})"), helab::ParseError);
    CHECK_THROWS_AS(normal_form_from_json(R"({"terms":[{"exp":1,"mult":0}]})"), helab::ParseError);
    CHECK_THROWS_AS(normal_form_from_json(R"({"terms":[{"exp":1,"mult":1},{"exp":1,"mult":2}]})"),
                    helab::ParseError);
}

TEST_CASE("structural validation") {
    CHECK_THROWS_AS(validate(PF::sum({})), helab::UsageError);

    PF deep = PF::var();
    for (int i = 0; i < 250; ++i) deep = PF::sum({deep});
    CHECK_THROWS_AS(normalize(deep), helab::BudgetExceeded);
}

TEST_CASE("enumeration respects the element budget") {
    helab::Limits tight;
    tight.max_enumeration = 100;
    CHECK_THROWS_AS(enumerate(nf({{4, 1}}), FiniteSet{4}, tight), helab::BudgetExceeded);
}
