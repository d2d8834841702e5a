#include "helab.h"

#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>

#include "helab/bench.hpp"
#include "helab/common.hpp"
#include "helab/distinguish.hpp"
#include "helab/functor.hpp"
#include "helab/lang.hpp"
#include "helab/quotient.hpp"
#include "helab/subgroup.hpp"
#include "json.hpp"

struct helab_qhe {
    std::optional<helab::quotient::SecretKey> sk;
    std::optional<helab::quotient::PublicEvalKey> pk;
};

struct helab_sg {
    helab::subgroup::GroupParams params;
    helab::Rng rng;
};

namespace {

thread_local std::string g_last_error;

helab_status status_of(helab::Status s) {
    switch (s) {
        case helab::Status::Ok: return HELAB_OK;
        case helab::Status::Usage: return HELAB_ERR_USAGE;
        case helab::Status::Params: return HELAB_ERR_PARAMS;
        case helab::Status::Crypto: return HELAB_ERR_CRYPTO;
        case helab::Status::Parse: return HELAB_ERR_PARSE;
        case helab::Status::Budget: return HELAB_ERR_BUDGET;
        case helab::Status::Io: return HELAB_ERR_IO;
        case helab::Status::Internal: return HELAB_ERR_INTERNAL;
    }
    return HELAB_ERR_INTERNAL;
}

template <typename F>
helab_status guard(F&& f) noexcept {
    try {
        f();
        g_last_error.clear();
        return HELAB_OK;
    } catch (const helab::Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return HELAB_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return HELAB_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void require(bool cond, const char* msg) {
    if (!cond) throw helab::UsageError(msg);
}

helab::functor::NormalForm parse_and_normalize(const char* text) {
    require(text != nullptr, "functor text is null");
    return helab::functor::normalize(helab::functor::parse(text));
}

helab::distinguish::Graph parse_graph_arg(const char* text, const char* what) {
    require(text != nullptr, (std::string(what) + " graph is null").c_str());
    return helab::distinguish::parse_graph(text);
}

}  // namespace

extern "C" {

const char* helab_last_error(void) { return g_last_error.c_str(); }

void helab_string_free(char* s) { std::free(s); }

/* ------------------------------------------------------------------ */

helab_status helab_functor_normalize(const char* text, char** out_json) {
    return guard([&] {
        require(out_json != nullptr, "output pointer is null");
        *out_json = dup_string(helab::functor::to_json(parse_and_normalize(text)));
    });
}

helab_status helab_functor_normal_text(const char* text, char** out_text) {
    return guard([&] {
        require(out_text != nullptr, "output pointer is null");
        *out_text = dup_string(helab::functor::to_string(helab::functor::to_poly(parse_and_normalize(text))));
    });
}

helab_status helab_functor_cardinality(const char* text, uint64_t set_size, char** out_decimal) {
    return guard([&] {
        require(out_decimal != nullptr, "output pointer is null");
        const auto card = helab::functor::cardinality(parse_and_normalize(text), set_size);
        *out_decimal = dup_string(card.str());
    });
}

helab_status helab_functor_enumerate(const char* text, uint64_t set_size, char** out_json) {
    return guard([&] {
        require(out_json != nullptr, "output pointer is null");
        const auto elems = helab::functor::enumerate(parse_and_normalize(text), helab::functor::FiniteSet{set_size});
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& e : elems) arr.push_back(nlohmann::json::array({e.summand, e.tuple}));
        *out_json = dup_string(arr.dump());
    });
}

/* ------------------------------------------------------------------ */

helab_status helab_qhe_keygen(uint32_t n, uint64_t class_size, const char* mode, uint64_t universe_extra,
                              uint64_t seed, helab_qhe** out) {
    return guard([&] {
        require(out != nullptr, "output pointer is null");
        require(mode != nullptr, "mode is null");
        helab::quotient::SchemeParams params;
        params.n = n;
        params.class_size = class_size;
        params.universe_extra = universe_extra;
        params.seed = seed;
        const std::string m = mode;
        if (m == "full")
            params.mode = helab::quotient::Mode::Full;
        else if (m == "sampled")
            params.mode = helab::quotient::Mode::Sampled;
        else
            throw helab::ParamsError("mode must be \"full\" or \"sampled\"");
        auto kp = helab::quotient::keygen(params);
        auto* h = new helab_qhe;
        h->sk = std::move(kp.sk);
        h->pk = std::move(kp.pk);
        *out = h;
    });
}

helab_status helab_qhe_from_json(const char* secret_json, const char* public_json, helab_qhe** out) {
    return guard([&] {
        require(out != nullptr, "output pointer is null");
        require(secret_json != nullptr || public_json != nullptr, "no key material given");
        auto h = std::make_unique<helab_qhe>();
        if (secret_json) h->sk = helab::quotient::secret_key_from_json(secret_json);
        if (public_json) h->pk = helab::quotient::public_key_from_json(public_json);
        *out = h.release();
    });
}

void helab_qhe_free(helab_qhe* h) { delete h; }

namespace {

const helab::quotient::SecretKey& need_sk(const helab_qhe* h) {
    require(h != nullptr, "key handle is null");
    if (!h->sk) throw helab::UsageError("operation needs the secret key");
    return *h->sk;
}

const helab::quotient::PublicEvalKey& need_pk(const helab_qhe* h) {
    require(h != nullptr, "key handle is null");
    if (!h->pk) throw helab::UsageError("operation needs the public key");
    return *h->pk;
}

}  // namespace

helab_status helab_qhe_secret_json(const helab_qhe* h, char** out_json) {
    return guard([&] {
        require(out_json != nullptr, "output pointer is null");
        *out_json = dup_string(helab::quotient::to_json(need_sk(h)));
    });
}

helab_status helab_qhe_public_json(const helab_qhe* h, char** out_json) {
    return guard([&] {
        require(out_json != nullptr, "output pointer is null");
        *out_json = dup_string(helab::quotient::to_json(need_pk(h)));
    });
}

helab_status helab_qhe_class_count(const helab_qhe* h, uint64_t* out) {
    return guard([&] {
        require(h != nullptr, "key handle is null");
        require(out != nullptr, "output pointer is null");
        if (h->pk)
            *out = h->pk->labels.size();
        else if (h->sk)
            *out = h->sk->classes.size();
        else
            throw helab::UsageError("handle holds no key material");
    });
}

helab_status helab_qhe_encrypt(const helab_qhe* h, uint32_t m, char** out_ct_json) {
    return guard([&] {
        require(out_ct_json != nullptr, "output pointer is null");
        *out_ct_json = dup_string(helab::quotient::to_json(helab::quotient::encrypt(need_sk(h), m)));
    });
}

helab_status helab_qhe_add(const helab_qhe* h, const char* ct1_json, const char* ct2_json, char** out_ct_json) {
    return guard([&] {
        require(ct1_json != nullptr && ct2_json != nullptr, "ciphertext is null");
        require(out_ct_json != nullptr, "output pointer is null");
        const auto c1 = helab::quotient::ciphertext_from_json(ct1_json);
        const auto c2 = helab::quotient::ciphertext_from_json(ct2_json);
        *out_ct_json = dup_string(helab::quotient::to_json(helab::quotient::eval_add(need_pk(h), c1, c2)));
    });
}

helab_status helab_qhe_decrypt(const helab_qhe* h, const char* ct_json, uint32_t* out_m) {
    return guard([&] {
        require(ct_json != nullptr, "ciphertext is null");
        require(out_m != nullptr, "output pointer is null");
        *out_m = helab::quotient::decrypt(need_sk(h), helab::quotient::ciphertext_from_json(ct_json));
    });
}

helab_status helab_qhe_encrypt_term(const helab_qhe* h, const char* term_text, char** out_ct_json) {
    return guard([&] {
        require(term_text != nullptr, "term text is null");
        require(out_ct_json != nullptr, "output pointer is null");
        const auto term = helab::lang::parse_term(term_text);
        const auto ct = helab::lang::encrypt_denotation(need_sk(h), term);
        *out_ct_json = dup_string(helab::quotient::to_json(ct));
    });
}

/* ------------------------------------------------------------------ */

helab_status helab_sg_new(uint64_t p, uint64_t q, uint64_t seed, helab_sg** out) {
    return guard([&] {
        require(out != nullptr, "output pointer is null");
        auto params = helab::subgroup::setup(p, q);
        *out = new helab_sg{params, helab::Rng(seed)};
    });
}

void helab_sg_free(helab_sg* h) { delete h; }

namespace {

const helab_sg& need_sg(const helab_sg* h) {
    require(h != nullptr, "group handle is null");
    return *h;
}

struct ParsedElem {
    bool source;
    helab::subgroup::SourceElem s;
    helab::subgroup::TargetElem t;
};

ParsedElem parse_elem(const char* json) {
    require(json != nullptr, "ciphertext is null");
    ParsedElem e{};
    e.source = helab::subgroup::elem_from_json(json, e.s, e.t);
    return e;
}

}  // namespace

helab_status helab_sg_params_json(const helab_sg* h, char** out_json) {
    return guard([&] {
        require(out_json != nullptr, "output pointer is null");
        *out_json = dup_string(helab::subgroup::to_json(need_sg(h).params));
    });
}

helab_status helab_sg_encrypt_bit(helab_sg* h, int bit, char** out_ct_json) {
    return guard([&] {
        require(h != nullptr, "group handle is null");
        require(out_ct_json != nullptr, "output pointer is null");
        *out_ct_json = dup_string(helab::subgroup::to_json(helab::subgroup::encrypt_bit(h->params, bit, h->rng)));
    });
}

helab_status helab_sg_or(const helab_sg* h, const char* ct1_json, const char* ct2_json, char** out_ct_json) {
    return guard([&] {
        require(out_ct_json != nullptr, "output pointer is null");
        const auto& g = need_sg(h).params;
        const ParsedElem a = parse_elem(ct1_json);
        const ParsedElem b = parse_elem(ct2_json);
        if (a.source != b.source) throw helab::UsageError("cannot OR a source element with a target element");
        if (a.source)
            *out_ct_json = dup_string(helab::subgroup::to_json(helab::subgroup::hom_or(g, a.s, b.s)));
        else
            *out_ct_json = dup_string(helab::subgroup::to_json(helab::subgroup::hom_or_target(g, a.t, b.t)));
    });
}

helab_status helab_sg_and(const helab_sg* h, const char* ct1_json, const char* ct2_json, char** out_ct_json) {
    return guard([&] {
        require(out_ct_json != nullptr, "output pointer is null");
        const auto& g = need_sg(h).params;
        const ParsedElem a = parse_elem(ct1_json);
        const ParsedElem b = parse_elem(ct2_json);
        if (!a.source || !b.source)
            throw helab::UsageError("AND pairs two source elements; target elements cannot be paired again");
        *out_ct_json = dup_string(helab::subgroup::to_json(helab::subgroup::hom_and(g, a.s, b.s)));
    });
}

helab_status helab_sg_decrypt(const helab_sg* h, const char* ct_json, int* out_bit) {
    return guard([&] {
        require(out_bit != nullptr, "output pointer is null");
        const auto& g = need_sg(h).params;
        const ParsedElem e = parse_elem(ct_json);
        *out_bit = e.source ? helab::subgroup::decrypt_bit(g, e.s) : helab::subgroup::decrypt_bit(g, e.t);
    });
}

helab_status helab_sg_eval_dnf(helab_sg* h, const char* formula, const int* bits, size_t nbits,
                               char** out_ct_json) {
    return guard([&] {
        require(h != nullptr, "group handle is null");
        require(formula != nullptr, "formula is null");
        require(bits != nullptr || nbits == 0, "bit array is null");
        require(out_ct_json != nullptr, "output pointer is null");
        const auto f = helab::subgroup::parse_dnf(formula);
        std::vector<helab::subgroup::SourceElem> cs;
        cs.reserve(nbits);
        for (size_t i = 0; i < nbits; ++i)
            cs.push_back(helab::subgroup::encrypt_bit(h->params, bits[i], h->rng));
        *out_ct_json = dup_string(helab::subgroup::to_json(helab::subgroup::eval_2dnf(h->params, f, cs)));
    });
}

helab_status helab_sg_eval_dnf_cts(const helab_sg* h, const char* formula, const char* cts_json,
                                   char** out_ct_json) {
    return guard([&] {
        require(formula != nullptr, "formula is null");
        require(cts_json != nullptr, "ciphertext array is null");
        require(out_ct_json != nullptr, "output pointer is null");
        const auto& g = need_sg(h).params;
        const auto f = helab::subgroup::parse_dnf(formula);
        nlohmann::json arr;
        try {
            arr = nlohmann::json::parse(cts_json);
        } catch (const nlohmann::json::exception& e) {
            throw helab::ParseError(std::string("invalid ciphertext array: ") + e.what());
        }
        if (!arr.is_array()) throw helab::ParseError("ciphertext list must be a JSON array");
        std::vector<helab::subgroup::SourceElem> cs;
        for (const auto& item : arr) {
            const ParsedElem e = parse_elem(item.dump().c_str());
            if (!e.source) throw helab::UsageError("2-DNF inputs must be source elements");
            cs.push_back(e.s);
        }
        *out_ct_json = dup_string(helab::subgroup::to_json(helab::subgroup::eval_2dnf(g, f, cs)));
    });
}

/* ------------------------------------------------------------------ */

helab_status helab_graph_normalize(const char* text, char** out_json) {
    return guard([&] {
        require(out_json != nullptr, "output pointer is null");
        *out_json = dup_string(helab::distinguish::to_json(parse_graph_arg(text, "input")));
    });
}

helab_status helab_si_check(const char* pattern, const char* host, int* out_present) {
    return guard([&] {
        require(out_present != nullptr, "output pointer is null");
        const auto p = parse_graph_arg(pattern, "pattern");
        const auto h = parse_graph_arg(host, "host");
        *out_present = helab::distinguish::subgraph_iso_bruteforce(p, h).has_value() ? 1 : 0;
    });
}

helab_status helab_reduce_check(const char* pattern, const char* host, uint64_t seed, int* out_present) {
    return guard([&] {
        require(out_present != nullptr, "output pointer is null");
        const auto p = parse_graph_arg(pattern, "pattern");
        const auto h = parse_graph_arg(host, "host");
        helab::Rng rng(seed);
        const auto recognizer = helab::distinguish::make_oracle_recognizer();
        *out_present = helab::distinguish::reduce_si_to_distinguishing(p, h, recognizer, rng) ? 1 : 0;
    });
}

helab_status helab_si_game(const char* host, const char* p0, const char* p1, const char* adversary,
                           uint64_t trials, uint64_t seed, uint32_t jobs, char** out_json) {
    return guard([&] {
        require(adversary != nullptr, "adversary name is null");
        require(out_json != nullptr, "output pointer is null");
        const auto h = parse_graph_arg(host, "host");
        const auto g0 = parse_graph_arg(p0, "first candidate");
        const auto g1 = parse_graph_arg(p1, "second candidate");
        const std::string name = adversary;
        helab::distinguish::Adversary adv;
        if (name == "coin")
            adv = helab::distinguish::make_coin_adversary();
        else if (name == "profile")
            adv = helab::distinguish::make_profile_adversary();
        else if (name == "canonical")
            adv = helab::distinguish::make_canonical_adversary();
        else
            throw helab::ParamsError("adversary must be \"coin\", \"profile\" or \"canonical\"");
        helab::Rng rng(seed);
        const auto result = helab::distinguish::distinguish_game(h, g0, g1, trials, adv, rng, jobs);
        *out_json = dup_string(helab::distinguish::to_json(result));
    });
}

/* ------------------------------------------------------------------ */

helab_status helab_term_prove(const char* term_text, uint64_t fuel, char** out_json) {
    return guard([&] {
        require(term_text != nullptr, "term text is null");
        require(out_json != nullptr, "output pointer is null");
        const auto term = helab::lang::parse_term(term_text);
        const auto type = helab::lang::typecheck_closed(term);
        const auto normal = helab::lang::normalize_term(term, fuel);
        nlohmann::json j;
        j["normal"] = helab::lang::to_string(normal);
        j["type"] = helab::lang::to_string(type);
        *out_json = dup_string(j.dump());
    });
}

/* ------------------------------------------------------------------ */

helab_status helab_bench_quotient(uint32_t n_min, uint32_t n_max, uint64_t reps, uint64_t seed,
                                  char** out_json) {
    return guard([&] {
        require(out_json != nullptr, "output pointer is null");
        const auto report = helab::bench::bench_quotient(n_min, n_max, reps, seed);
        *out_json = dup_string(helab::bench::to_json(report));
    });
}

}  // extern "C"
