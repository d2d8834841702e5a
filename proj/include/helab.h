#ifndef HELAB_H
#define HELAB_H

/* C interface to the homomorphic-encryption laboratory. All functions return
 * a helab_status; on failure helab_last_error() describes what went wrong
 * (per thread). Strings handed out through char** parameters are owned by
 * the caller and released with helab_string_free(). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HELAB_API __declspec(dllexport)
#else
#define HELAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum helab_status {
    HELAB_OK = 0,
    HELAB_ERR_USAGE = 1,
    HELAB_ERR_PARAMS = 2,
    HELAB_ERR_CRYPTO = 3,
    HELAB_ERR_PARSE = 4,
    HELAB_ERR_BUDGET = 5,
    HELAB_ERR_IO = 6,
    HELAB_ERR_INTERNAL = 7
} helab_status;

HELAB_API const char* helab_last_error(void);
HELAB_API void helab_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Polynomial functor algebra.                                         */

/* Text syntax: 0, 1, X, X^k, f + g, f * g, parentheses. */
HELAB_API helab_status helab_functor_normalize(const char* text, char** out_json);
HELAB_API helab_status helab_functor_normal_text(const char* text, char** out_text);
HELAB_API helab_status helab_functor_cardinality(const char* text, uint64_t set_size, char** out_decimal);
HELAB_API helab_status helab_functor_enumerate(const char* text, uint64_t set_size, char** out_json);

/* ------------------------------------------------------------------ */
/* Quotient scheme: residues mod n, homomorphic addition.              */

typedef struct helab_qhe helab_qhe;

/* mode is "full" or "sampled". */
HELAB_API helab_status helab_qhe_keygen(uint32_t n, uint64_t class_size, const char* mode,
                                        uint64_t universe_extra, uint64_t seed, helab_qhe** out);
/* Either JSON may be NULL, not both. */
HELAB_API helab_status helab_qhe_from_json(const char* secret_json, const char* public_json, helab_qhe** out);
HELAB_API void helab_qhe_free(helab_qhe* h);

HELAB_API helab_status helab_qhe_secret_json(const helab_qhe* h, char** out_json);
HELAB_API helab_status helab_qhe_public_json(const helab_qhe* h, char** out_json);
HELAB_API helab_status helab_qhe_class_count(const helab_qhe* h, uint64_t* out);
HELAB_API helab_status helab_qhe_encrypt(const helab_qhe* h, uint32_t m, char** out_ct_json);
HELAB_API helab_status helab_qhe_add(const helab_qhe* h, const char* ct1_json, const char* ct2_json,
                                     char** out_ct_json);
HELAB_API helab_status helab_qhe_decrypt(const helab_qhe* h, const char* ct_json, uint32_t* out_m);

/* Encrypts the denotation of a closed term of type Bn->Bn (n = key modulus),
 * provided it denotes a cyclic shift. */
HELAB_API helab_status helab_qhe_encrypt_term(const helab_qhe* h, const char* term_text, char** out_ct_json);

/* ------------------------------------------------------------------ */
/* Subgroup bit scheme over simulated composite-order bilinear groups. */

typedef struct helab_sg helab_sg;

HELAB_API helab_status helab_sg_new(uint64_t p, uint64_t q, uint64_t seed, helab_sg** out);
HELAB_API void helab_sg_free(helab_sg* h);

HELAB_API helab_status helab_sg_params_json(const helab_sg* h, char** out_json);
/* Draws fresh randomness from the handle's generator. */
HELAB_API helab_status helab_sg_encrypt_bit(helab_sg* h, int bit, char** out_ct_json);
/* OR of two source elements or of two target elements (not mixed). */
HELAB_API helab_status helab_sg_or(const helab_sg* h, const char* ct1_json, const char* ct2_json,
                                   char** out_ct_json);
/* AND (the pairing) of two source elements; lands in the target group. */
HELAB_API helab_status helab_sg_and(const helab_sg* h, const char* ct1_json, const char* ct2_json,
                                    char** out_ct_json);
HELAB_API helab_status helab_sg_decrypt(const helab_sg* h, const char* ct_json, int* out_bit);

/* Formula text: (x0 & x1) | (x2 & x3). bits[i] is the plaintext for xi;
 * they are encrypted with the handle's generator, then evaluated. */
HELAB_API helab_status helab_sg_eval_dnf(helab_sg* h, const char* formula, const int* bits, size_t nbits,
                                         char** out_ct_json);
/* Same evaluation over caller-provided ciphertexts (a JSON array). */
HELAB_API helab_status helab_sg_eval_dnf_cts(const helab_sg* h, const char* formula, const char* cts_json,
                                             char** out_ct_json);

/* ------------------------------------------------------------------ */
/* Graphs, subgraph isomorphism, the distinguishing game.              */

/* Accepts edge-list text ("n m" header then "u v" lines) or JSON
 * {"n":...,"edges":[[u,v],...]}; emits canonical JSON. */
HELAB_API helab_status helab_graph_normalize(const char* text, char** out_json);
/* Brute-force subgraph isomorphism: pattern into host. */
HELAB_API helab_status helab_si_check(const char* pattern, const char* host, int* out_present);
/* The same decision run through the quotient + recognizer reduction. */
HELAB_API helab_status helab_reduce_check(const char* pattern, const char* host, uint64_t seed,
                                          int* out_present);
/* adversary: "coin", "profile", or "canonical". */
HELAB_API helab_status helab_si_game(const char* host, const char* p0, const char* p1, const char* adversary,
                                     uint64_t trials, uint64_t seed, uint32_t jobs, char** out_json);

/* ------------------------------------------------------------------ */
/* Proof-term language.                                                */

/* Parses, typechecks and fully normalizes a closed term; returns
 * {"normal": "...", "type": "..."}. */
HELAB_API helab_status helab_term_prove(const char* term_text, uint64_t fuel, char** out_json);

/* ------------------------------------------------------------------ */
/* Benchmarks.                                                         */

/* Full-mode keygen vs eval_add timing grid over n in [n_min, n_max]. */
HELAB_API helab_status helab_bench_quotient(uint32_t n_min, uint32_t n_max, uint64_t reps, uint64_t seed,
                                            char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* HELAB_H */
