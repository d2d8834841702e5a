#include "helab/lang.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

namespace helab::lang {

TypePtr ty_base(uint64_t n) {
    if (n == 0) throw UsageError("base type needs at least one element");
    auto t = std::make_shared<Type>();
    t->kind = Type::Kind::Base;
    t->size = n;
    return t;
}

TypePtr ty_unit() {
    auto t = std::make_shared<Type>();
    t->kind = Type::Kind::Unit;
    return t;
}

namespace {

TypePtr ty_node(Type::Kind kind, TypePtr l, TypePtr r) {
    if (!l || !r) throw UsageError("type components must be present");
    auto t = std::make_shared<Type>();
    t->kind = kind;
    t->l = std::move(l);
    t->r = std::move(r);
    return t;
}

}  // namespace

TypePtr ty_prod(TypePtr l, TypePtr r) { return ty_node(Type::Kind::Prod, std::move(l), std::move(r)); }
TypePtr ty_sum(TypePtr l, TypePtr r) { return ty_node(Type::Kind::Sum, std::move(l), std::move(r)); }
TypePtr ty_arrow(TypePtr dom, TypePtr cod) { return ty_node(Type::Kind::Arrow, std::move(dom), std::move(cod)); }

bool type_equal(const TypePtr& a, const TypePtr& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
        case Type::Kind::Base:
            return a->size == b->size;
        case Type::Kind::Unit:
            return true;
        default:
            return type_equal(a->l, b->l) && type_equal(a->r, b->r);
    }
}

namespace {

// Precedence: -> (0, right assoc) < + (1, left) < * (2, left) < atoms (3).
std::string print_type(const TypePtr& t, int min_prec) {
    std::string s;
    int prec = 3;
    switch (t->kind) {
        case Type::Kind::Base:
            s = "B" + std::to_string(t->size);
            break;
        case Type::Kind::Unit:
            s = "Unit";
            break;
        case Type::Kind::Prod:
            s = print_type(t->l, 2) + "*" + print_type(t->r, 3);
            prec = 2;
            break;
        case Type::Kind::Sum:
            s = print_type(t->l, 1) + "+" + print_type(t->r, 2);
            prec = 1;
            break;
        case Type::Kind::Arrow:
            s = print_type(t->l, 1) + "->" + print_type(t->r, 0);
            prec = 0;
            break;
    }
    return prec < min_prec ? "(" + s + ")" : s;
}

}  // namespace

std::string to_string(const TypePtr& t) { return print_type(t, 0); }

namespace {

std::shared_ptr<Term> term_node(Term::Kind kind) {
    auto t = std::make_shared<Term>();
    t->kind = kind;
    return t;
}

}  // namespace

TermPtr t_var(std::string name) {
    auto t = term_node(Term::Kind::Var);
    t->name = std::move(name);
    return t;
}

TermPtr t_lam(std::string name, TypePtr annot, TermPtr body) {
    if (!annot || !body) throw UsageError("lambda needs an annotation and a body");
    auto t = term_node(Term::Kind::Lam);
    t->name = std::move(name);
    t->annot = std::move(annot);
    t->a = std::move(body);
    return t;
}

TermPtr t_app(TermPtr f, TermPtr arg) {
    if (!f || !arg) throw UsageError("application needs two terms");
    auto t = term_node(Term::Kind::App);
    t->a = std::move(f);
    t->b = std::move(arg);
    return t;
}

TermPtr t_pair(TermPtr l, TermPtr r) {
    if (!l || !r) throw UsageError("pair needs two components");
    auto t = term_node(Term::Kind::Pair);
    t->a = std::move(l);
    t->b = std::move(r);
    return t;
}

TermPtr t_fst(TermPtr x) {
    if (!x) throw UsageError("fst needs an operand");
    auto t = term_node(Term::Kind::Fst);
    t->a = std::move(x);
    return t;
}

TermPtr t_snd(TermPtr x) {
    if (!x) throw UsageError("snd needs an operand");
    auto t = term_node(Term::Kind::Snd);
    t->a = std::move(x);
    return t;
}

namespace {

TermPtr injection(Term::Kind kind, TypePtr sum, TermPtr x) {
    if (!sum || sum->kind != Type::Kind::Sum) throw UsageError("injection annotation must be a sum type");
    if (!x) throw UsageError("injection needs an operand");
    auto t = term_node(kind);
    t->annot = std::move(sum);
    t->a = std::move(x);
    return t;
}

}  // namespace

TermPtr t_inl(TypePtr sum, TermPtr x) { return injection(Term::Kind::Inl, std::move(sum), std::move(x)); }
TermPtr t_inr(TypePtr sum, TermPtr x) { return injection(Term::Kind::Inr, std::move(sum), std::move(x)); }

TermPtr t_case(TermPtr scrut, std::string lname, TermPtr lbody, std::string rname, TermPtr rbody) {
    if (!scrut || !lbody || !rbody) throw UsageError("case needs a scrutinee and two branches");
    auto t = term_node(Term::Kind::Case);
    t->a = std::move(scrut);
    t->b = std::move(lbody);
    t->c = std::move(rbody);
    t->lname = std::move(lname);
    t->rname = std::move(rname);
    return t;
}

TermPtr t_unit() { return term_node(Term::Kind::Unit); }

TermPtr t_elem(uint64_t i, uint64_t n) {
    if (n == 0) throw UsageError("element constant needs a nonempty carrier");
    if (i >= n) throw UsageError("element index " + std::to_string(i) + " out of range for B" + std::to_string(n));
    auto t = term_node(Term::Kind::ConstElem);
    t->elem = i;
    t->base = n;
    return t;
}

TermPtr t_succ(uint64_t n) {
    if (n == 0) throw UsageError("succ needs a nonempty carrier");
    auto t = term_node(Term::Kind::ConstSucc);
    t->base = n;
    return t;
}

bool term_equal(const TermPtr& a, const TermPtr& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
        case Term::Kind::Var:
            return a->name == b->name;
        case Term::Kind::Lam:
            return a->name == b->name && type_equal(a->annot, b->annot) && term_equal(a->a, b->a);
        case Term::Kind::App:
        case Term::Kind::Pair:
            return term_equal(a->a, b->a) && term_equal(a->b, b->b);
        case Term::Kind::Fst:
        case Term::Kind::Snd:
            return term_equal(a->a, b->a);
        case Term::Kind::Inl:
        case Term::Kind::Inr:
            return type_equal(a->annot, b->annot) && term_equal(a->a, b->a);
        case Term::Kind::Case:
            return a->lname == b->lname && a->rname == b->rname && term_equal(a->a, b->a) &&
                   term_equal(a->b, b->b) && term_equal(a->c, b->c);
        case Term::Kind::Unit:
            return true;
        case Term::Kind::ConstElem:
            return a->elem == b->elem && a->base == b->base;
        case Term::Kind::ConstSucc:
            return a->base == b->base;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Lexer / parser

namespace {

struct Token {
    enum class Kind {
        Ident,
        Lambda,
        Dot,
        Colon,
        LParen,
        RParen,
        Comma,
        Arrow,
        Plus,
        Star,
        LBracket,
        RBracket,
        LBrace,
        RBrace,
        Pipe,
        End,
    };

    Kind kind = Kind::End;
    std::string text;
    int line = 1;
    int col = 1;
};

const char* token_name(Token::Kind k) {
    switch (k) {
        case Token::Kind::Ident: return "identifier";
        case Token::Kind::Lambda: return "'\\'";
        case Token::Kind::Dot: return "'.'";
        case Token::Kind::Colon: return "':'";
        case Token::Kind::LParen: return "'('";
        case Token::Kind::RParen: return "')'";
        case Token::Kind::Comma: return "','";
        case Token::Kind::Arrow: return "'->'";
        case Token::Kind::Plus: return "'+'";
        case Token::Kind::Star: return "'*'";
        case Token::Kind::LBracket: return "'['";
        case Token::Kind::RBracket: return "']'";
        case Token::Kind::LBrace: return "'{'";
        case Token::Kind::RBrace: return "'}'";
        case Token::Kind::Pipe: return "'|'";
        case Token::Kind::End: return "end of input";
    }
    return "?";
}

std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto push = [&](Token::Kind k, std::string s) { out.push_back(Token{k, std::move(s), line, col}); };
    while (i < text.size()) {
        const char c = text[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++col;
            ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
                                       text[j] == '\''))
                ++j;
            push(Token::Kind::Ident, text.substr(i, j - i));
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (c == '-') {
            if (i + 1 < text.size() && text[i + 1] == '>') {
                push(Token::Kind::Arrow, "->");
                col += 2;
                i += 2;
                continue;
            }
            throw ParseError("stray '-' (did you mean '->')", line, col);
        }
        Token::Kind k;
        switch (c) {
            case '\\': k = Token::Kind::Lambda; break;
            case '.': k = Token::Kind::Dot; break;
            case ':': k = Token::Kind::Colon; break;
            case '(': k = Token::Kind::LParen; break;
            case ')': k = Token::Kind::RParen; break;
            case ',': k = Token::Kind::Comma; break;
            case '+': k = Token::Kind::Plus; break;
            case '*': k = Token::Kind::Star; break;
            case '[': k = Token::Kind::LBracket; break;
            case ']': k = Token::Kind::RBracket; break;
            case '{': k = Token::Kind::LBrace; break;
            case '}': k = Token::Kind::RBrace; break;
            case '|': k = Token::Kind::Pipe; break;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
        push(k, std::string(1, c));
        ++col;
        ++i;
    }
    out.push_back(Token{Token::Kind::End, "", line, col});
    return out;
}

bool is_keyword(const std::string& s) {
    return s == "fst" || s == "snd" || s == "inl" || s == "inr" || s == "case" || s == "of" || s == "Unit";
}

// succN and eK_N literals are carved out of the identifier space. Digit runs
// are capped at 18 so the values always fit in 64 bits.
bool parse_succ_literal(const std::string& s, uint64_t& n) {
    if (s.size() <= 4 || s.size() > 4 + 18 || s.compare(0, 4, "succ") != 0) return false;
    for (size_t i = 4; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    n = std::stoull(s.substr(4));
    return true;
}

bool parse_elem_literal(const std::string& s, uint64_t& k, uint64_t& n) {
    if (s.size() < 4 || s[0] != 'e') return false;
    const size_t underscore = s.find('_');
    if (underscore == std::string::npos || underscore < 2 || underscore + 1 >= s.size()) return false;
    if (underscore - 1 > 18 || s.size() - underscore - 1 > 18) return false;
    for (size_t i = 1; i < s.size(); ++i) {
        if (i == underscore) continue;
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    k = std::stoull(s.substr(1, underscore - 1));
    n = std::stoull(s.substr(underscore + 1));
    return true;
}

struct TermParser {
    std::vector<Token> toks;
    size_t pos = 0;
    std::vector<std::string> scope = {};

    const Token& peek() const { return toks[pos]; }

    Token take() { return toks[pos++]; }

    [[noreturn]] void fail(const Token& t, const std::string& msg) { throw ParseError(msg, t.line, t.col); }

    Token expect(Token::Kind k) {
        if (peek().kind != k)
            fail(peek(), std::string("expected ") + token_name(k) + ", found " + token_name(peek().kind));
        return take();
    }

    bool at_ident(const char* word) const { return peek().kind == Token::Kind::Ident && peek().text == word; }

    std::string binder() {
        const Token t = expect(Token::Kind::Ident);
        uint64_t k, n;
        if (is_keyword(t.text) || parse_succ_literal(t.text, n) || parse_elem_literal(t.text, k, n))
            fail(t, "'" + t.text + "' cannot be used as a variable name");
        return t.text;
    }

    TypePtr type() {
        TypePtr l = sum_type();
        if (peek().kind == Token::Kind::Arrow) {
            take();
            return ty_arrow(std::move(l), type());
        }
        return l;
    }

    TypePtr sum_type() {
        TypePtr l = prod_type();
        while (peek().kind == Token::Kind::Plus) {
            take();
            l = ty_sum(std::move(l), prod_type());
        }
        return l;
    }

    TypePtr prod_type() {
        TypePtr l = atom_type();
        while (peek().kind == Token::Kind::Star) {
            take();
            l = ty_prod(std::move(l), atom_type());
        }
        return l;
    }

    TypePtr atom_type() {
        if (peek().kind == Token::Kind::LParen) {
            take();
            TypePtr t = type();
            expect(Token::Kind::RParen);
            return t;
        }
        const Token t = expect(Token::Kind::Ident);
        if (t.text == "Unit") return ty_unit();
        if (t.text.size() > 1 && t.text[0] == 'B') {
            bool digits = true;
            for (size_t i = 1; i < t.text.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(t.text[i]))) digits = false;
            if (digits) {
                uint64_t n = 0;
                try {
                    n = std::stoull(t.text.substr(1));
                } catch (const std::out_of_range&) {
                    fail(t, "base type size out of range");
                }
                if (n == 0) fail(t, "B0 has no elements; base sizes start at 1");
                return ty_base(n);
            }
        }
        fail(t, "expected a type (BN, Unit, or parentheses)");
    }

    TermPtr term() {
        if (peek().kind == Token::Kind::Lambda) {
            take();
            const std::string x = binder();
            expect(Token::Kind::Colon);
            TypePtr annot = type();
            expect(Token::Kind::Dot);
            scope.push_back(x);
            TermPtr body = term();
            scope.pop_back();
            return t_lam(x, std::move(annot), std::move(body));
        }
        if (at_ident("case")) {
            take();
            TermPtr scrut = term();
            if (!at_ident("of")) fail(peek(), "expected 'of'");
            take();
            expect(Token::Kind::LBrace);
            if (!at_ident("inl")) fail(peek(), "expected 'inl'");
            take();
            const std::string x = binder();
            expect(Token::Kind::Arrow);
            scope.push_back(x);
            TermPtr lbody = term();
            scope.pop_back();
            expect(Token::Kind::Pipe);
            if (!at_ident("inr")) fail(peek(), "expected 'inr'");
            take();
            const std::string y = binder();
            expect(Token::Kind::Arrow);
            scope.push_back(y);
            TermPtr rbody = term();
            scope.pop_back();
            expect(Token::Kind::RBrace);
            return t_case(std::move(scrut), x, std::move(lbody), y, std::move(rbody));
        }
        return app_term();
    }

    bool starts_operand() const {
        if (peek().kind == Token::Kind::LParen) return true;
        if (peek().kind != Token::Kind::Ident) return false;
        return peek().text != "of" && peek().text != "case";
    }

    TermPtr app_term() {
        TermPtr acc = prefix_term();
        while (starts_operand()) acc = t_app(std::move(acc), prefix_term());
        return acc;
    }

    TermPtr prefix_term() {
        if (at_ident("fst")) {
            take();
            return t_fst(prefix_term());
        }
        if (at_ident("snd")) {
            take();
            return t_snd(prefix_term());
        }
        if (at_ident("inl") || at_ident("inr")) {
            const bool left = peek().text == "inl";
            const Token kw = take();
            expect(Token::Kind::LBracket);
            TypePtr annot = type();
            expect(Token::Kind::RBracket);
            if (annot->kind != Type::Kind::Sum) fail(kw, "injection annotation must be a sum type");
            TermPtr operand = prefix_term();
            return left ? t_inl(std::move(annot), std::move(operand))
                        : t_inr(std::move(annot), std::move(operand));
        }
        return atom();
    }

    TermPtr atom() {
        if (peek().kind == Token::Kind::LParen) {
            take();
            if (peek().kind == Token::Kind::RParen) {
                take();
                return t_unit();
            }
            TermPtr first = term();
            if (peek().kind == Token::Kind::Comma) {
                take();
                TermPtr second = term();
                expect(Token::Kind::RParen);
                return t_pair(std::move(first), std::move(second));
            }
            expect(Token::Kind::RParen);
            return first;
        }
        const Token t = expect(Token::Kind::Ident);
        uint64_t k = 0, n = 0;
        if (parse_succ_literal(t.text, n)) {
            if (n == 0) fail(t, "succ0 has an empty carrier");
            return t_succ(n);
        }
        if (parse_elem_literal(t.text, k, n)) {
            if (n == 0) fail(t, "e_0 carriers start at B1");
            if (k >= n) fail(t, "element index " + std::to_string(k) + " out of range for B" + std::to_string(n));
            return t_elem(k, n);
        }
        if (is_keyword(t.text)) fail(t, "unexpected keyword '" + t.text + "'");
        if (std::find(scope.rbegin(), scope.rend(), t.text) == scope.rend())
            fail(t, "unbound variable '" + t.text + "'");
        return t_var(t.text);
    }
};

}  // namespace

TermPtr parse_term(const std::string& text) {
    TermParser p{lex(text)};
    TermPtr t = p.term();
    if (p.peek().kind != Token::Kind::End) p.fail(p.peek(), "trailing input after term");
    return t;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string print_term(const TermPtr& t);

// Operands of application and of the prefix operators must re-parse as a
// single prefix-term; anything looser gets parentheses.
std::string print_operand(const TermPtr& t) {
    switch (t->kind) {
        case Term::Kind::App:
        case Term::Kind::Lam:
        case Term::Kind::Case:
            return "(" + print_term(t) + ")";
        default:
            return print_term(t);
    }
}

std::string print_applicand(const TermPtr& t) {
    switch (t->kind) {
        case Term::Kind::Lam:
        case Term::Kind::Case:
            return "(" + print_term(t) + ")";
        default:
            return print_term(t);
    }
}

std::string print_term(const TermPtr& t) {
    switch (t->kind) {
        case Term::Kind::Var:
            return t->name;
        case Term::Kind::Lam:
            return "\\" + t->name + ":" + to_string(t->annot) + ". " + print_term(t->a);
        case Term::Kind::App:
            return print_applicand(t->a) + " " + print_operand(t->b);
        case Term::Kind::Pair:
            return "(" + print_term(t->a) + ", " + print_term(t->b) + ")";
        case Term::Kind::Fst:
            return "fst " + print_operand(t->a);
        case Term::Kind::Snd:
            return "snd " + print_operand(t->a);
        case Term::Kind::Inl:
            return "inl[" + to_string(t->annot) + "] " + print_operand(t->a);
        case Term::Kind::Inr:
            return "inr[" + to_string(t->annot) + "] " + print_operand(t->a);
        case Term::Kind::Case:
            return "case " + print_term(t->a) + " of {inl " + t->lname + " -> " + print_term(t->b) + " | inr " +
                   t->rname + " -> " + print_term(t->c) + "}";
        case Term::Kind::Unit:
            return "()";
        case Term::Kind::ConstElem:
            return "e" + std::to_string(t->elem) + "_" + std::to_string(t->base);
        case Term::Kind::ConstSucc:
            return "succ" + std::to_string(t->base);
    }
    return "?";
}

}  // namespace

std::string to_string(const TermPtr& t) { return print_term(t); }

// ---------------------------------------------------------------------------
// Typechecking

namespace {

[[noreturn]] void type_fail(const TermPtr& at, const std::string& msg) {
    throw TypecheckError(msg + " in `" + to_string(at) + "`");
}

}  // namespace

TypePtr typecheck(const Context& ctx, const TermPtr& t) {
    switch (t->kind) {
        case Term::Kind::Var: {
            for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
                if (it->first == t->name) return it->second;
            type_fail(t, "unbound variable '" + t->name + "'");
        }
        case Term::Kind::Lam: {
            Context inner = ctx;
            inner.emplace_back(t->name, t->annot);
            return ty_arrow(t->annot, typecheck(inner, t->a));
        }
        case Term::Kind::App: {
            const TypePtr ft = typecheck(ctx, t->a);
            if (ft->kind != Type::Kind::Arrow)
                type_fail(t, "cannot apply a value of type " + to_string(ft));
            const TypePtr at = typecheck(ctx, t->b);
            if (!type_equal(ft->l, at))
                type_fail(t, "argument has type " + to_string(at) + ", expected " + to_string(ft->l));
            return ft->r;
        }
        case Term::Kind::Pair:
            return ty_prod(typecheck(ctx, t->a), typecheck(ctx, t->b));
        case Term::Kind::Fst: {
            const TypePtr pt = typecheck(ctx, t->a);
            if (pt->kind != Type::Kind::Prod) type_fail(t, "fst needs a product, got " + to_string(pt));
            return pt->l;
        }
        case Term::Kind::Snd: {
            const TypePtr pt = typecheck(ctx, t->a);
            if (pt->kind != Type::Kind::Prod) type_fail(t, "snd needs a product, got " + to_string(pt));
            return pt->r;
        }
        case Term::Kind::Inl: {
            const TypePtr pt = typecheck(ctx, t->a);
            if (!type_equal(pt, t->annot->l))
                type_fail(t, "inl payload has type " + to_string(pt) + ", expected " + to_string(t->annot->l));
            return t->annot;
        }
        case Term::Kind::Inr: {
            const TypePtr pt = typecheck(ctx, t->a);
            if (!type_equal(pt, t->annot->r))
                type_fail(t, "inr payload has type " + to_string(pt) + ", expected " + to_string(t->annot->r));
            return t->annot;
        }
        case Term::Kind::Case: {
            const TypePtr st = typecheck(ctx, t->a);
            if (st->kind != Type::Kind::Sum) type_fail(t, "case scrutinee must be a sum, got " + to_string(st));
            Context lc = ctx;
            lc.emplace_back(t->lname, st->l);
            const TypePtr lt = typecheck(lc, t->b);
            Context rc = ctx;
            rc.emplace_back(t->rname, st->r);
            const TypePtr rt = typecheck(rc, t->c);
            if (!type_equal(lt, rt))
                type_fail(t, "case branches disagree: " + to_string(lt) + " vs " + to_string(rt));
            return lt;
        }
        case Term::Kind::Unit:
            return ty_unit();
        case Term::Kind::ConstElem:
            return ty_base(t->base);
        case Term::Kind::ConstSucc: {
            const TypePtr b = ty_base(t->base);
            return ty_arrow(b, b);
        }
    }
    throw TypecheckError("unreachable term kind");
}

TypePtr typecheck_closed(const TermPtr& t) { return typecheck({}, t); }

// ---------------------------------------------------------------------------
// Substitution and normalization

namespace {

void collect_free(const TermPtr& t, std::vector<std::string>& bound, std::set<std::string>& out) {
    switch (t->kind) {
        case Term::Kind::Var:
            if (std::find(bound.begin(), bound.end(), t->name) == bound.end()) out.insert(t->name);
            return;
        case Term::Kind::Lam:
            bound.push_back(t->name);
            collect_free(t->a, bound, out);
            bound.pop_back();
            return;
        case Term::Kind::Case:
            collect_free(t->a, bound, out);
            bound.push_back(t->lname);
            collect_free(t->b, bound, out);
            bound.pop_back();
            bound.push_back(t->rname);
            collect_free(t->c, bound, out);
            bound.pop_back();
            return;
        default:
            if (t->a) collect_free(t->a, bound, out);
            if (t->b) collect_free(t->b, bound, out);
            if (t->c) collect_free(t->c, bound, out);
            return;
    }
}

std::set<std::string> free_vars(const TermPtr& t) {
    std::vector<std::string> bound;
    std::set<std::string> out;
    collect_free(t, bound, out);
    return out;
}

struct Substituter {
    const std::string& x;
    const TermPtr& v;
    const std::set<std::string>& fv_v;

    TermPtr operator()(const TermPtr& t) const {
        switch (t->kind) {
            case Term::Kind::Var:
                return t->name == x ? v : t;
            case Term::Kind::Lam: {
                if (t->name == x) return t;  // shadowed
                auto [binder, body] = rebind(t->name, t->a);
                return t_lam(binder, t->annot, (*this)(body));
            }
            case Term::Kind::App:
                return t_app((*this)(t->a), (*this)(t->b));
            case Term::Kind::Pair:
                return t_pair((*this)(t->a), (*this)(t->b));
            case Term::Kind::Fst:
                return t_fst((*this)(t->a));
            case Term::Kind::Snd:
                return t_snd((*this)(t->a));
            case Term::Kind::Inl:
                return t_inl(t->annot, (*this)(t->a));
            case Term::Kind::Inr:
                return t_inr(t->annot, (*this)(t->a));
            case Term::Kind::Case: {
                const TermPtr scrut = (*this)(t->a);
                TermPtr lbody = t->b, rbody = t->c;
                std::string ln = t->lname, rn = t->rname;
                if (ln != x) {
                    auto [nb, body] = rebind(ln, lbody);
                    ln = nb;
                    lbody = (*this)(body);
                }
                if (rn != x) {
                    auto [nb, body] = rebind(rn, rbody);
                    rn = nb;
                    rbody = (*this)(body);
                }
                return t_case(scrut, ln, lbody, rn, rbody);
            }
            default:
                return t;
        }
    }

    // Alpha-renames `binder` in `body` when it would capture a free variable
    // of the substituted value.
    std::pair<std::string, TermPtr> rebind(const std::string& binder, const TermPtr& body) const {
        if (!fv_v.count(binder)) return {binder, body};
        const std::set<std::string> fv_body = free_vars(body);
        std::string fresh = binder;
        do {
            fresh += "'";
        } while (fv_v.count(fresh) || fv_body.count(fresh) || fresh == x);
        const std::set<std::string> fv_fresh{fresh};
        const TermPtr fresh_var = t_var(fresh);
        Substituter rename{binder, fresh_var, fv_fresh};
        return {fresh, rename(body)};
    }
};

TermPtr subst(const TermPtr& t, const std::string& x, const TermPtr& v) {
    const std::set<std::string> fv_v = free_vars(v);
    return Substituter{x, v, fv_v}(t);
}

// One leftmost-outermost reduction step, or nullptr at normal form.
TermPtr step(const TermPtr& t) {
    switch (t->kind) {
        case Term::Kind::App: {
            if (t->a->kind == Term::Kind::Lam) return subst(t->a->a, t->a->name, t->b);
            if (t->a->kind == Term::Kind::ConstSucc && t->b->kind == Term::Kind::ConstElem &&
                t->a->base == t->b->base)
                return t_elem((t->b->elem + 1) % t->b->base, t->b->base);
            if (TermPtr s = step(t->a)) return t_app(s, t->b);
            if (TermPtr s = step(t->b)) return t_app(t->a, s);
            return nullptr;
        }
        case Term::Kind::Fst: {
            if (t->a->kind == Term::Kind::Pair) return t->a->a;
            if (TermPtr s = step(t->a)) return t_fst(s);
            return nullptr;
        }
        case Term::Kind::Snd: {
            if (t->a->kind == Term::Kind::Pair) return t->a->b;
            if (TermPtr s = step(t->a)) return t_snd(s);
            return nullptr;
        }
        case Term::Kind::Case: {
            if (t->a->kind == Term::Kind::Inl) return subst(t->b, t->lname, t->a->a);
            if (t->a->kind == Term::Kind::Inr) return subst(t->c, t->rname, t->a->a);
            if (TermPtr s = step(t->a)) return t_case(s, t->lname, t->b, t->rname, t->c);
            if (TermPtr s = step(t->b)) return t_case(t->a, t->lname, s, t->rname, t->c);
            if (TermPtr s = step(t->c)) return t_case(t->a, t->lname, t->b, t->rname, s);
            return nullptr;
        }
        case Term::Kind::Lam: {
            if (TermPtr s = step(t->a)) return t_lam(t->name, t->annot, s);
            return nullptr;
        }
        case Term::Kind::Pair: {
            if (TermPtr s = step(t->a)) return t_pair(s, t->b);
            if (TermPtr s = step(t->b)) return t_pair(t->a, s);
            return nullptr;
        }
        case Term::Kind::Inl: {
            if (TermPtr s = step(t->a)) return t_inl(t->annot, s);
            return nullptr;
        }
        case Term::Kind::Inr: {
            if (TermPtr s = step(t->a)) return t_inr(t->annot, s);
            return nullptr;
        }
        default:
            return nullptr;
    }
}

}  // namespace

TermPtr normalize_term(const TermPtr& t, uint64_t fuel) {
    TermPtr cur = t;
    for (uint64_t used = 0;; ++used) {
        TermPtr next = step(cur);
        if (!next) return cur;
        if (used >= fuel)
            throw FuelExhausted("normalization did not finish within " + std::to_string(fuel) + " steps");
        cur = next;
    }
}

namespace {

// Fuel counts reduction steps, matching normalize_term.
void spend(uint64_t& fuel) {
    if (fuel == 0) throw FuelExhausted("evaluation fuel exhausted");
    --fuel;
}

TermPtr eval_weak(const TermPtr& t, uint64_t& fuel) {
    switch (t->kind) {
        case Term::Kind::App: {
            const TermPtr f = eval_weak(t->a, fuel);
            const TermPtr v = eval_weak(t->b, fuel);
            if (f->kind == Term::Kind::Lam) {
                spend(fuel);
                return eval_weak(subst(f->a, f->name, v), fuel);
            }
            if (f->kind == Term::Kind::ConstSucc && v->kind == Term::Kind::ConstElem && f->base == v->base) {
                spend(fuel);
                return t_elem((v->elem + 1) % v->base, v->base);
            }
            return t_app(f, v);
        }
        case Term::Kind::Pair:
            return t_pair(eval_weak(t->a, fuel), eval_weak(t->b, fuel));
        case Term::Kind::Fst: {
            const TermPtr p = eval_weak(t->a, fuel);
            if (p->kind == Term::Kind::Pair) {
                spend(fuel);
                return p->a;
            }
            return t_fst(p);
        }
        case Term::Kind::Snd: {
            const TermPtr p = eval_weak(t->a, fuel);
            if (p->kind == Term::Kind::Pair) {
                spend(fuel);
                return p->b;
            }
            return t_snd(p);
        }
        case Term::Kind::Inl:
            return t_inl(t->annot, eval_weak(t->a, fuel));
        case Term::Kind::Inr:
            return t_inr(t->annot, eval_weak(t->a, fuel));
        case Term::Kind::Case: {
            const TermPtr s = eval_weak(t->a, fuel);
            if (s->kind == Term::Kind::Inl) {
                spend(fuel);
                return eval_weak(subst(t->b, t->lname, s->a), fuel);
            }
            if (s->kind == Term::Kind::Inr) {
                spend(fuel);
                return eval_weak(subst(t->c, t->rname, s->a), fuel);
            }
            return t_case(s, t->lname, t->b, t->rname, t->c);
        }
        default:
            return t;
    }
}

}  // namespace

TermPtr evaluate_weak(const TermPtr& t, uint64_t fuel) { return eval_weak(t, fuel); }

// ---------------------------------------------------------------------------
// Finite-set semantics

bool Denotation::operator==(const Denotation& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
        case Kind::Elem:
            return index == o.index;
        case Kind::Unit:
            return true;
        case Kind::Pair:
            return *a == *o.a && *b == *o.b;
        case Kind::Tag:
            return tag == o.tag && *a == *o.a;
        case Kind::Table:
            return table == o.table;
    }
    return false;
}

namespace {

uint64_t checked_mul(uint64_t a, uint64_t b, const Limits& limits) {
    uint64_t r;
    if (__builtin_mul_overflow(a, b, &r) || r > limits.max_denotation)
        throw BudgetExceeded("semantic set larger than the denotation budget");
    return r;
}

uint64_t checked_add(uint64_t a, uint64_t b, const Limits& limits) {
    uint64_t r;
    if (__builtin_add_overflow(a, b, &r) || r > limits.max_denotation)
        throw BudgetExceeded("semantic set larger than the denotation budget");
    return r;
}

}  // namespace

uint64_t type_size(const TypePtr& t, const Limits& limits) {
    switch (t->kind) {
        case Type::Kind::Base:
            if (t->size > limits.max_denotation)
                throw BudgetExceeded("semantic set larger than the denotation budget");
            return t->size;
        case Type::Kind::Unit:
            return 1;
        case Type::Kind::Prod:
            return checked_mul(type_size(t->l, limits), type_size(t->r, limits), limits);
        case Type::Kind::Sum:
            return checked_add(type_size(t->l, limits), type_size(t->r, limits), limits);
        case Type::Kind::Arrow: {
            const uint64_t dom = type_size(t->l, limits);
            const uint64_t cod = type_size(t->r, limits);
            uint64_t r = 1;
            for (uint64_t i = 0; i < dom; ++i) r = checked_mul(r, cod, limits);
            return r;
        }
    }
    throw UsageError("unreachable type kind");
}

Denotation value_of(const TypePtr& t, uint64_t index, const Limits& limits) {
    const uint64_t size = type_size(t, limits);
    if (index >= size) throw UsageError("semantic index out of range");
    Denotation d;
    switch (t->kind) {
        case Type::Kind::Base:
            d.kind = Denotation::Kind::Elem;
            d.index = index;
            return d;
        case Type::Kind::Unit:
            d.kind = Denotation::Kind::Unit;
            return d;
        case Type::Kind::Prod: {
            const uint64_t sr = type_size(t->r, limits);
            d.kind = Denotation::Kind::Pair;
            d.a = std::make_shared<Denotation>(value_of(t->l, index / sr, limits));
            d.b = std::make_shared<Denotation>(value_of(t->r, index % sr, limits));
            return d;
        }
        case Type::Kind::Sum: {
            const uint64_t sl = type_size(t->l, limits);
            d.kind = Denotation::Kind::Tag;
            if (index < sl) {
                d.tag = 0;
                d.a = std::make_shared<Denotation>(value_of(t->l, index, limits));
            } else {
                d.tag = 1;
                d.a = std::make_shared<Denotation>(value_of(t->r, index - sl, limits));
            }
            return d;
        }
        case Type::Kind::Arrow: {
            const uint64_t dom = type_size(t->l, limits);
            const uint64_t cod = type_size(t->r, limits);
            d.kind = Denotation::Kind::Table;
            d.table.resize(dom);
            uint64_t rest = index;
            for (uint64_t j = dom; j > 0; --j) {
                d.table[j - 1] = value_of(t->r, rest % cod, limits);
                rest /= cod;
            }
            return d;
        }
    }
    throw UsageError("unreachable type kind");
}

uint64_t index_of(const TypePtr& t, const Denotation& d, const Limits& limits) {
    switch (t->kind) {
        case Type::Kind::Base:
            if (d.kind != Denotation::Kind::Elem || d.index >= t->size)
                throw UsageError("denotation does not inhabit the base type");
            return d.index;
        case Type::Kind::Unit:
            if (d.kind != Denotation::Kind::Unit) throw UsageError("denotation does not inhabit Unit");
            return 0;
        case Type::Kind::Prod: {
            if (d.kind != Denotation::Kind::Pair) throw UsageError("denotation does not inhabit the product");
            const uint64_t sr = type_size(t->r, limits);
            return index_of(t->l, *d.a, limits) * sr + index_of(t->r, *d.b, limits);
        }
        case Type::Kind::Sum: {
            if (d.kind != Denotation::Kind::Tag) throw UsageError("denotation does not inhabit the sum");
            if (d.tag == 0) return index_of(t->l, *d.a, limits);
            return type_size(t->l, limits) + index_of(t->r, *d.a, limits);
        }
        case Type::Kind::Arrow: {
            if (d.kind != Denotation::Kind::Table || d.table.size() != type_size(t->l, limits))
                throw UsageError("denotation does not inhabit the arrow type");
            const uint64_t cod = type_size(t->r, limits);
            uint64_t idx = 0;
            for (const Denotation& entry : d.table) idx = idx * cod + index_of(t->r, entry, limits);
            return idx;
        }
    }
    throw UsageError("unreachable type kind");
}

namespace {

struct Denoter {
    const Limits& limits;
    std::vector<std::tuple<std::string, TypePtr, Denotation>> env;

    std::pair<TypePtr, Denotation> rec(const TermPtr& t) {
        switch (t->kind) {
            case Term::Kind::Var: {
                for (auto it = env.rbegin(); it != env.rend(); ++it)
                    if (std::get<0>(*it) == t->name) return {std::get<1>(*it), std::get<2>(*it)};
                throw TypecheckError("unbound variable '" + t->name + "'");
            }
            case Term::Kind::Lam: {
                const uint64_t dom = type_size(t->annot, limits);
                Denotation table;
                table.kind = Denotation::Kind::Table;
                table.table.reserve(dom);
                TypePtr body_type;
                for (uint64_t i = 0; i < dom; ++i) {
                    env.emplace_back(t->name, t->annot, value_of(t->annot, i, limits));
                    auto [bt, bv] = rec(t->a);
                    env.pop_back();
                    body_type = bt;
                    table.table.push_back(std::move(bv));
                }
                return {ty_arrow(t->annot, body_type), std::move(table)};
            }
            case Term::Kind::App: {
                auto [ft, fv] = rec(t->a);
                if (ft->kind != Type::Kind::Arrow) type_fail(t, "cannot apply a value of type " + to_string(ft));
                auto [at, av] = rec(t->b);
                if (!type_equal(ft->l, at))
                    type_fail(t, "argument has type " + to_string(at) + ", expected " + to_string(ft->l));
                return {ft->r, fv.table[index_of(at, av, limits)]};
            }
            case Term::Kind::Pair: {
                auto [lt, lv] = rec(t->a);
                auto [rt, rv] = rec(t->b);
                Denotation d;
                d.kind = Denotation::Kind::Pair;
                d.a = std::make_shared<Denotation>(std::move(lv));
                d.b = std::make_shared<Denotation>(std::move(rv));
                return {ty_prod(lt, rt), std::move(d)};
            }
            case Term::Kind::Fst: {
                auto [pt, pv] = rec(t->a);
                if (pt->kind != Type::Kind::Prod) type_fail(t, "fst needs a product, got " + to_string(pt));
                return {pt->l, *pv.a};
            }
            case Term::Kind::Snd: {
                auto [pt, pv] = rec(t->a);
                if (pt->kind != Type::Kind::Prod) type_fail(t, "snd needs a product, got " + to_string(pt));
                return {pt->r, *pv.b};
            }
            case Term::Kind::Inl:
            case Term::Kind::Inr: {
                auto [pt, pv] = rec(t->a);
                const bool left = t->kind == Term::Kind::Inl;
                const TypePtr want = left ? t->annot->l : t->annot->r;
                if (!type_equal(pt, want))
                    type_fail(t, "payload has type " + to_string(pt) + ", expected " + to_string(want));
                Denotation d;
                d.kind = Denotation::Kind::Tag;
                d.tag = left ? 0 : 1;
                d.a = std::make_shared<Denotation>(std::move(pv));
                return {t->annot, std::move(d)};
            }
            case Term::Kind::Case: {
                auto [st, sv] = rec(t->a);
                if (st->kind != Type::Kind::Sum)
                    type_fail(t, "case scrutinee must be a sum, got " + to_string(st));
                if (sv.tag == 0) {
                    env.emplace_back(t->lname, st->l, *sv.a);
                    auto out = rec(t->b);
                    env.pop_back();
                    return out;
                }
                env.emplace_back(t->rname, st->r, *sv.a);
                auto out = rec(t->c);
                env.pop_back();
                return out;
            }
            case Term::Kind::Unit: {
                Denotation d;
                d.kind = Denotation::Kind::Unit;
                return {ty_unit(), std::move(d)};
            }
            case Term::Kind::ConstElem: {
                Denotation d;
                d.kind = Denotation::Kind::Elem;
                d.index = t->elem;
                return {ty_base(t->base), std::move(d)};
            }
            case Term::Kind::ConstSucc: {
                Denotation d;
                d.kind = Denotation::Kind::Table;
                d.table.resize(t->base);
                for (uint64_t i = 0; i < t->base; ++i) {
                    d.table[i].kind = Denotation::Kind::Elem;
                    d.table[i].index = (i + 1) % t->base;
                }
                const TypePtr b = ty_base(t->base);
                return {ty_arrow(b, b), std::move(d)};
            }
        }
        throw TypecheckError("unreachable term kind");
    }
};

}  // namespace

std::pair<TypePtr, Denotation> denote_typed(const TermPtr& t, const Limits& limits) {
    Denoter d{limits, {}};
    return d.rec(t);
}

Denotation denote(const TermPtr& t, const Limits& limits) { return denote_typed(t, limits).second; }

// ---------------------------------------------------------------------------
// Bridge into the quotient scheme

TermPtr make_shift_term(uint64_t k, uint64_t n) {
    if (n == 0) throw UsageError("carrier must be nonempty");
    TermPtr body = t_var("x");
    for (uint64_t i = 0; i < k % n; ++i) body = t_app(t_succ(n), body);
    return t_lam("x", ty_base(n), body);
}

quotient::Ciphertext encrypt_denotation(const quotient::SecretKey& sk, const TermPtr& t, const Limits& limits) {
    auto [ty, d] = denote_typed(t, limits);
    const uint32_t n = sk.params.n;
    const bool shape_ok = ty->kind == Type::Kind::Arrow && ty->l->kind == Type::Kind::Base &&
                          ty->r->kind == Type::Kind::Base && ty->l->size == n && ty->r->size == n;
    if (!shape_ok)
        throw ParamsError("term has type " + to_string(ty) + "; the key carries maps B" + std::to_string(n) +
                          "->B" + std::to_string(n));
    quotient::FunctionTable table;
    table.values.reserve(d.table.size());
    for (const Denotation& entry : d.table) table.values.push_back(static_cast<uint32_t>(entry.index));
    const auto k = quotient::shift_index(table);
    if (!k) throw NotAShift("denotation is not a cyclic shift; only shifts are carried by the scheme");
    return quotient::encrypt(sk, *k);
}

quotient::Ciphertext hom_compose_terms(const quotient::PublicEvalKey& pk, const quotient::Ciphertext& c1,
                                       const quotient::Ciphertext& c2) {
    return quotient::eval_add(pk, c1, c2);
}

}  // namespace helab::lang
