#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "helab/common.hpp"

namespace helab::quotient {

// Additively homomorphic scheme over residues mod n. Plaintext k is carried
// by the shift table f_k(i) = (i+k) mod n; the secret key is a partition of
// function tables hiding each shift among dummies, and the public key is the
// class-composition table computed from canonical representatives.

enum class Mode { Full, Sampled };

struct SchemeParams {
    uint32_t n = 4;
    uint64_t class_size = 4;
    Mode mode = Mode::Full;
    uint64_t universe_extra = 0;  // dummy-only classes (Sampled mode)
    uint64_t seed = 0;

    bool operator==(const SchemeParams&) const = default;
};

using Label = uint64_t;  // opaque; 0 is reserved as "no entry"

// A total function on {0..n-1}, stored as its value tuple.
struct FunctionTable {
    std::vector<uint32_t> values;

    bool operator==(const FunctionTable&) const = default;
    bool operator<(const FunctionTable& o) const { return values < o.values; }
};

// (f after g)(i) = f(g(i))
FunctionTable compose(const FunctionTable& f, const FunctionTable& g);
FunctionTable shift_table(uint32_t n, uint32_t k);
std::optional<uint32_t> shift_index(const FunctionTable& t);

struct KeyClass {
    std::vector<FunctionTable> members;
    uint32_t canonical = 0;  // index into members
    Label label = 0;
    std::optional<uint32_t> shift;  // residue when this class carries a shift

    const FunctionTable& canonical_rep() const { return members[canonical]; }
};

struct SecretKey {
    SchemeParams params;
    std::vector<KeyClass> classes;  // classes[k] carries shift k for k < n

    // lookups rebuilt after deserialization, not part of the wire format
    std::unordered_map<Label, size_t> class_by_label;

    const KeyClass* find_class(Label label) const;
    void rebuild_lookups();
};

struct PublicEvalKey {
    std::vector<Label> labels;  // ascending, unique, nonzero
    std::vector<Label> star;    // dense labels.size()^2, row-major; 0 = undefined

    std::unordered_map<Label, uint32_t> index_by_label;  // rebuilt, not serialized

    Label star_at(Label a, Label b) const;  // throws UnknownLabel / UndefinedComposition
    void rebuild_lookups();
};

struct Ciphertext {
    Label label = 0;

    bool operator==(const Ciphertext&) const = default;
};

struct KeyPair {
    SecretKey sk;
    PublicEvalKey pk;
};

KeyPair keygen(const SchemeParams& params, Rng& rng, const Limits& limits = {});
KeyPair keygen(const SchemeParams& params, const Limits& limits = {});  // seeds from params.seed

Ciphertext encrypt(const SecretKey& sk, uint32_t m);
uint32_t decrypt(const SecretKey& sk, const Ciphertext& c);
Ciphertext eval_add(const PublicEvalKey& pk, const Ciphertext& c1, const Ciphertext& c2);
Ciphertext eval_sum(const PublicEvalKey& pk, const std::vector<Ciphertext>& cs);

// JSON wire formats; serialization is canonical, so serialize/parse/serialize
// round-trips byte-exactly.
std::string to_json(const SecretKey& sk);
std::string to_json(const PublicEvalKey& pk);
std::string to_json(const Ciphertext& c);
SecretKey secret_key_from_json(const std::string& text);
PublicEvalKey public_key_from_json(const std::string& text);
Ciphertext ciphertext_from_json(const std::string& text);

}  // namespace helab::quotient
