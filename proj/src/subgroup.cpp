#include "helab/subgroup.hpp"

#include <algorithm>
#include <cctype>

#include "json.hpp"

namespace helab::subgroup {

using nlohmann::json;

namespace {

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

uint64_t powmod(uint64_t base, uint64_t exp, uint64_t m) {
    uint64_t r = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

}  // namespace

bool is_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    // deterministic Miller-Rabin, valid for all 64-bit inputs with this base set
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

GroupParams setup(uint64_t p, uint64_t q) {
    if (!is_prime(p)) throw ParamsError(std::to_string(p) + " is not prime");
    if (!is_prime(q)) throw ParamsError(std::to_string(q) + " is not prime");
    if (p == q) throw ParamsError("the two primes must be distinct");
    if (p <= 3 || q <= 3) throw ParamsError("primes must exceed 3");
    unsigned __int128 prod = static_cast<unsigned __int128>(p) * q;
    if (prod > UINT64_MAX) throw ParamsError("p*q does not fit in 64 bits");
    return GroupParams{p, q, p * q};
}

SourceElem encrypt_bit(const GroupParams& g, int bit, Rng& rng) {
    if (bit != 0 && bit != 1) throw UsageError("plaintext must be a bit");
    const uint64_t order = bit ? g.p : g.q;
    const uint64_t r = 1 + uniform_below(rng, order - 1);
    return encrypt_bit_with_r(g, bit, r);
}

SourceElem encrypt_bit_with_r(const GroupParams& g, int bit, uint64_t r) {
    if (bit != 0 && bit != 1) throw UsageError("plaintext must be a bit");
    const uint64_t order = bit ? g.p : g.q;
    if (r == 0 || r >= order) throw RangeError("blinding factor out of range");
    return SourceElem{mulmod(bit ? g.q : g.p, r, g.N)};
}

SourceElem hom_or(const GroupParams& g, const SourceElem& a, const SourceElem& b) {
    return SourceElem{(a.x + b.x) % g.N};
}

TargetElem hom_and(const GroupParams& g, const SourceElem& a, const SourceElem& b) {
    return TargetElem{mulmod(a.x, b.x, g.N)};
}

TargetElem hom_or_target(const GroupParams& g, const TargetElem& a, const TargetElem& b) {
    return TargetElem{(a.y + b.y) % g.N};
}

namespace {

// c^q is the identity exactly when the G_p component of c is trivial, i.e.
// the exponent times q vanishes mod N.
int decrypt_exponent(const GroupParams& g, uint64_t x) { return mulmod(x, g.q, g.N) == 0 ? 0 : 1; }

}  // namespace

int decrypt_bit(const GroupParams& g, const SourceElem& c) { return decrypt_exponent(g, c.x); }
int decrypt_bit(const GroupParams& g, const TargetElem& c) { return decrypt_exponent(g, c.y); }

TargetElem eval_2dnf(const GroupParams& g, const DnfFormula& f, const std::vector<SourceElem>& cs) {
    if (cs.size() != f.variable_count)
        throw ArityError("formula expects " + std::to_string(f.variable_count) + " inputs, got " +
                         std::to_string(cs.size()));
    if (f.conjuncts.empty()) throw UsageError("formula has no conjuncts");
    TargetElem acc{};
    bool first = true;
    for (auto [i, j] : f.conjuncts) {
        if (i >= cs.size() || j >= cs.size()) throw ArityError("conjunct references a missing variable");
        const TargetElem t = hom_and(g, cs[i], cs[j]);
        acc = first ? t : hom_or_target(g, acc, t);
        first = false;
    }
    return acc;
}

int eval_2dnf_plain(const DnfFormula& f, const std::vector<int>& bits) {
    if (bits.size() != f.variable_count) throw ArityError("formula arity mismatch");
    for (auto [i, j] : f.conjuncts)
        if (bits[i] && bits[j]) return 1;
    return 0;
}

namespace {

struct DnfParser {
    const std::string& s;
    size_t pos = 0;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, 1, static_cast<int>(pos + 1)); }

    uint32_t variable() {
        skip();
        if (pos >= s.size() || s[pos] != 'x') fail("expected a variable like x0");
        ++pos;
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) fail("expected a variable index");
        uint64_t v = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            v = v * 10 + (s[pos] - '0');
            if (v > 1'000'000) fail("variable index too large");
            ++pos;
        }
        return static_cast<uint32_t>(v);
    }

    std::pair<uint32_t, uint32_t> conjunct() {
        const bool parens = eat('(');
        const uint32_t a = variable();
        if (!eat('&')) fail("expected '&'");
        const uint32_t b = variable();
        if (parens && !eat(')')) fail("expected ')'");
        return {a, b};
    }

    DnfFormula formula() {
        DnfFormula f;
        f.conjuncts.push_back(conjunct());
        while (eat('|')) f.conjuncts.push_back(conjunct());
        skip();
        if (pos != s.size()) fail("trailing input after formula");
        uint32_t max_var = 0;
        for (auto [a, b] : f.conjuncts) max_var = std::max({max_var, a, b});
        f.variable_count = max_var + 1;
        return f;
    }
};

}  // namespace

DnfFormula parse_dnf(const std::string& text) {
    DnfParser p{text};
    return p.formula();
}

std::string to_string(const DnfFormula& f) {
    std::string out;
    for (size_t i = 0; i < f.conjuncts.size(); ++i) {
        if (i) out += " | ";
        out += "(x" + std::to_string(f.conjuncts[i].first) + " & x" + std::to_string(f.conjuncts[i].second) + ")";
    }
    return out;
}

std::string to_json(const GroupParams& g) {
    json j;
    j["p"] = g.p;
    j["q"] = g.q;
    return j.dump();
}

namespace {

std::string elem_json(const char* group, uint64_t x) {
    json j;
    j["group"] = group;
    j["x"] = std::to_string(x);
    return j.dump();
}

}  // namespace

std::string to_json(const SourceElem& c) { return elem_json("source", c.x); }
std::string to_json(const TargetElem& c) { return elem_json("target", c.y); }

GroupParams params_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid params JSON: ") + e.what());
    }
    try {
        return setup(j.at("p").get<uint64_t>(), j.at("q").get<uint64_t>());
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid params JSON: ") + e.what());
    }
}

bool elem_from_json(const std::string& text, SourceElem& s, TargetElem& t) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid ciphertext JSON: ") + e.what());
    }
    std::string group, xs;
    try {
        group = j.at("group").get<std::string>();
        xs = j.at("x").get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid ciphertext JSON: ") + e.what());
    }
    if (xs.empty() || xs.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("exponent must be a decimal string");
    uint64_t x = 0;
    try {
        x = std::stoull(xs);
    } catch (const std::out_of_range&) {
        throw ParseError("exponent does not fit in 64 bits");
    }
    if (group == "source") {
        s = SourceElem{x};
        return true;
    }
    if (group == "target") {
        t = TargetElem{x};
        return false;
    }
    throw ParseError("group must be \"source\" or \"target\"");
}

}  // namespace helab::subgroup
