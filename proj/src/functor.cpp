#include "helab/functor.hpp"

#include <cctype>
#include <utility>

#include "json.hpp"

namespace helab::functor {

using nlohmann::json;

PolyFunctor PolyFunctor::constant_of(Nat c) {
    PolyFunctor f;
    f.kind = Kind::Const;
    f.constant = std::move(c);
    return f;
}

PolyFunctor PolyFunctor::var() {
    PolyFunctor f;
    f.kind = Kind::Var;
    return f;
}

PolyFunctor PolyFunctor::pow(uint64_t e) {
    PolyFunctor f;
    f.kind = Kind::Pow;
    f.exponent = e;
    return f;
}

PolyFunctor PolyFunctor::sum(std::vector<PolyFunctor> parts) {
    PolyFunctor f;
    f.kind = Kind::Sum;
    f.children = std::move(parts);
    return f;
}

PolyFunctor PolyFunctor::prod(std::vector<PolyFunctor> parts) {
    PolyFunctor f;
    f.kind = Kind::Prod;
    f.children = std::move(parts);
    return f;
}

bool PolyFunctor::operator==(const PolyFunctor& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
        case Kind::Const: return constant == o.constant;
        case Kind::Var: return true;
        case Kind::Pow: return exponent == o.exponent;
        case Kind::Sum:
        case Kind::Prod: return children == o.children;
    }
    return false;
}

namespace {

void validate_rec(const PolyFunctor& f, const Limits& limits, uint64_t depth, uint64_t& nodes) {
    if (++nodes > limits.max_tree_nodes)
        throw BudgetExceeded("functor tree exceeds node limit of " + std::to_string(limits.max_tree_nodes));
    if (depth > limits.max_tree_depth)
        throw BudgetExceeded("functor tree exceeds depth limit of " + std::to_string(limits.max_tree_depth));
    switch (f.kind) {
        case PolyFunctor::Kind::Const:
            if (f.constant < 0) throw UsageError("constant cardinals must be non-negative");
            break;
        case PolyFunctor::Kind::Var:
        case PolyFunctor::Kind::Pow:
            break;
        case PolyFunctor::Kind::Sum:
        case PolyFunctor::Kind::Prod:
            if (f.children.empty()) throw UsageError("sum/product nodes need at least one child");
            for (const auto& c : f.children) validate_rec(c, limits, depth + 1, nodes);
            break;
    }
}

struct ExpandBudget {
    uint64_t remaining;

    void spend(uint64_t ops) {
        if (ops > remaining) throw BudgetExceeded("normalization exceeded the expansion budget");
        remaining -= ops;
    }
};

uint64_t checked_exp_add(uint64_t a, uint64_t b) {
    uint64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw BudgetExceeded("exponent overflow during expansion");
    return r;
}

NormalForm nf_add(NormalForm a, const NormalForm& b, ExpandBudget& budget) {
    budget.spend(b.terms.size());
    for (const auto& [e, m] : b.terms) {
        auto it = a.terms.find(e);
        if (it == a.terms.end())
            a.terms.emplace(e, m);
        else
            it->second += m;
    }
    return a;
}

NormalForm nf_mul(const NormalForm& a, const NormalForm& b, ExpandBudget& budget) {
    budget.spend(static_cast<uint64_t>(a.terms.size()) * static_cast<uint64_t>(b.terms.size()) + 1);
    NormalForm out;
    for (const auto& [ea, ma] : a.terms)
        for (const auto& [eb, mb] : b.terms) {
            const uint64_t e = checked_exp_add(ea, eb);
            auto it = out.terms.find(e);
            if (it == out.terms.end())
                out.terms.emplace(e, ma * mb);
            else
                it->second += ma * mb;
        }
    return out;
}

NormalForm normalize_rec(const PolyFunctor& f, ExpandBudget& budget) {
    budget.spend(1);
    NormalForm out;
    switch (f.kind) {
        case PolyFunctor::Kind::Const:
            if (f.constant > 0) out.terms.emplace(0, f.constant);
            return out;
        case PolyFunctor::Kind::Var:
            out.terms.emplace(1, 1);
            return out;
        case PolyFunctor::Kind::Pow:
            out.terms.emplace(f.exponent, 1);
            return out;
        case PolyFunctor::Kind::Sum: {
            for (const auto& c : f.children) out = nf_add(std::move(out), normalize_rec(c, budget), budget);
            return out;
        }
        case PolyFunctor::Kind::Prod: {
            out.terms.emplace(0, 1);
            for (const auto& c : f.children) out = nf_mul(out, normalize_rec(c, budget), budget);
            return out;
        }
    }
    return out;
}

}  // namespace

void validate(const PolyFunctor& f, const Limits& limits) {
    uint64_t nodes = 0;
    validate_rec(f, limits, 1, nodes);
}

NormalForm normalize(const PolyFunctor& f, const Limits& limits) {
    validate(f, limits);
    ExpandBudget budget{limits.max_expand_ops};
    return normalize_rec(f, budget);
}

PolyFunctor to_poly(const NormalForm& nf) {
    if (nf.terms.empty()) return PolyFunctor::constant_of(0);
    std::vector<PolyFunctor> parts;
    for (auto it = nf.terms.rbegin(); it != nf.terms.rend(); ++it) {
        const auto& [e, m] = *it;
        PolyFunctor power = e == 0 ? PolyFunctor::constant_of(1) : PolyFunctor::pow(e);
        if (m == 1) {
            parts.push_back(std::move(power));
        } else if (e == 0) {
            parts.push_back(PolyFunctor::constant_of(m));
        } else {
            std::vector<PolyFunctor> factors;
            factors.push_back(PolyFunctor::constant_of(m));
            factors.push_back(std::move(power));
            parts.push_back(PolyFunctor::prod(std::move(factors)));
        }
    }
    if (parts.size() == 1) return parts[0];
    return PolyFunctor::sum(std::move(parts));
}

namespace {

Nat nat_pow(uint64_t base, uint64_t exp, const Limits& limits) {
    if (base >= 2) {
        // crude bit estimate keeps absurd inputs from exhausting memory
        const double bits = static_cast<double>(exp) * (64 - static_cast<double>(__builtin_clzll(base)));
        if (bits > static_cast<double>(limits.max_cardinality_bits))
            throw BudgetExceeded("cardinality magnitude exceeds configured bit limit");
    }
    Nat result = 1;
    Nat b = base;
    uint64_t e = exp;
    while (e > 0) {
        if (e & 1) result *= b;
        e >>= 1;
        if (e > 0) b *= b;
    }
    return result;
}

}  // namespace

Nat cardinality(const NormalForm& nf, uint64_t set_size, const Limits& limits) {
    Nat total = 0;
    for (const auto& [e, m] : nf.terms) total += m * nat_pow(set_size, e, limits);
    return total;
}

std::vector<Element> enumerate(const NormalForm& nf, FiniteSet a, const Limits& limits) {
    const Nat count = cardinality(nf, a.size, limits);
    if (count > limits.max_enumeration)
        throw BudgetExceeded("enumeration of " + count.str() + " elements exceeds the limit of " +
                             std::to_string(limits.max_enumeration));

    std::vector<Element> out;
    out.reserve(static_cast<size_t>(count));
    uint64_t summand = 0;
    for (auto it = nf.terms.rbegin(); it != nf.terms.rend(); ++it) {
        const uint64_t exp = it->first;
        if (exp > limits.max_enumeration) throw BudgetExceeded("tuple arity exceeds the enumeration limit");
        if (it->second > UINT64_MAX) throw BudgetExceeded("multiplicity too large to enumerate");
        const uint64_t mult = static_cast<uint64_t>(it->second);
        for (uint64_t copy = 0; copy < mult; ++copy, ++summand) {
            if (a.size == 0 && exp > 0) continue;  // X^e at |X|=0 is empty
            std::vector<uint64_t> tuple(exp, 0);
            bool done = false;
            while (!done) {
                out.push_back(Element{summand, tuple});
                // odometer step, most significant digit first
                size_t pos = tuple.size();
                while (true) {
                    if (pos == 0) {
                        done = true;
                        break;
                    }
                    --pos;
                    if (++tuple[pos] < a.size) break;
                    tuple[pos] = 0;
                }
            }
        }
    }
    return out;
}

namespace {

struct FunctorParser {
    const std::string& src;
    size_t pos = 0;

    explicit FunctorParser(const std::string& s) : src(s) {}

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(msg, 1, static_cast<int>(pos) + 1);
    }

    Nat natural() {
        skip_ws();
        size_t start = pos;
        while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
        if (pos == start) fail("expected a natural number");
        return Nat(src.substr(start, pos - start));
    }

    PolyFunctor expr() {
        std::vector<PolyFunctor> parts;
        parts.push_back(term());
        while (eat('+')) parts.push_back(term());
        if (parts.size() == 1) return parts[0];
        return PolyFunctor::sum(std::move(parts));
    }

    PolyFunctor term() {
        std::vector<PolyFunctor> parts;
        parts.push_back(factor());
        while (eat('*')) parts.push_back(factor());
        if (parts.size() == 1) return parts[0];
        return PolyFunctor::prod(std::move(parts));
    }

    PolyFunctor factor() {
        skip_ws();
        if (pos >= src.size()) fail("unexpected end of input");
        const char c = src[pos];
        if (c == '(') {
            ++pos;
            PolyFunctor inner = expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (c == 'X' || c == 'x') {
            ++pos;
            if (eat('^')) {
                Nat e = natural();
                if (e > UINT64_MAX) fail("exponent too large");
                return PolyFunctor::pow(static_cast<uint64_t>(e));
            }
            return PolyFunctor::var();
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return PolyFunctor::constant_of(natural());
        fail(std::string("unexpected character '") + c + "'");
    }

    PolyFunctor parse_all() {
        PolyFunctor f = expr();
        skip_ws();
        if (pos != src.size()) fail("trailing input after expression");
        return f;
    }
};

void to_string_rec(const PolyFunctor& f, std::string& out, int parent_prec) {
    // precedence: sum 0, product 1, atoms 2
    switch (f.kind) {
        case PolyFunctor::Kind::Const:
            out += f.constant.str();
            break;
        case PolyFunctor::Kind::Var:
            out += 'X';
            break;
        case PolyFunctor::Kind::Pow:
            if (f.exponent == 1)
                out += 'X';
            else
                out += "X^" + std::to_string(f.exponent);
            break;
        case PolyFunctor::Kind::Sum: {
            const bool wrap = parent_prec > 0;
            if (wrap) out += '(';
            for (size_t i = 0; i < f.children.size(); ++i) {
                if (i) out += " + ";
                to_string_rec(f.children[i], out, 0);
            }
            if (wrap) out += ')';
            break;
        }
        case PolyFunctor::Kind::Prod: {
            const bool wrap = parent_prec > 1;
            if (wrap) out += '(';
            for (size_t i = 0; i < f.children.size(); ++i) {
                if (i) out += " * ";
                to_string_rec(f.children[i], out, 1);
            }
            if (wrap) out += ')';
            break;
        }
    }
}

}  // namespace

PolyFunctor parse(const std::string& text) {
    FunctorParser p(text);
    return p.parse_all();
}

std::string to_string(const PolyFunctor& f) {
    std::string out;
    to_string_rec(f, out, 0);
    return out;
}

std::string to_json(const NormalForm& nf) {
    json terms = json::array();
    for (auto it = nf.terms.rbegin(); it != nf.terms.rend(); ++it) {
        json term;
        term["exp"] = it->first;
        if (it->second <= UINT64_MAX)
            term["mult"] = static_cast<uint64_t>(it->second);
        else
            term["mult"] = it->second.str();
        terms.push_back(std::move(term));
    }
    json doc;
    doc["terms"] = std::move(terms);
    return doc.dump();
}

NormalForm normal_form_from_json(const std::string& text) {
    NormalForm nf;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid normal-form JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("terms") || !doc["terms"].is_array())
        throw ParseError("normal-form JSON must be {\"terms\": [...]}");
    try {
        for (const auto& term : doc["terms"]) {
            const uint64_t e = term.at("exp").get<uint64_t>();
            Nat m;
            if (term.at("mult").is_string()) {
                const std::string ms = term.at("mult").get<std::string>();
                if (ms.empty() || ms.find_first_not_of("0123456789") != std::string::npos)
                    throw ParseError("multiplicities must be decimal naturals");
                m = Nat(ms);
            } else {
                m = term.at("mult").get<uint64_t>();
            }
            if (m <= 0) throw ParseError("multiplicities must be positive");
            if (nf.terms.count(e)) throw ParseError("duplicate exponent in normal-form JSON");
            nf.terms.emplace(e, std::move(m));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid normal-form JSON: ") + e.what());
    }
    return nf;
}

}  // namespace helab::functor
