#include "helab/quotient.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace helab::quotient {

using nlohmann::json;

FunctionTable compose(const FunctionTable& f, const FunctionTable& g) {
    if (f.values.size() != g.values.size()) throw UsageError("composing tables of different arity");
    FunctionTable out;
    out.values.resize(g.values.size());
    for (size_t i = 0; i < g.values.size(); ++i) out.values[i] = f.values[g.values[i]];
    return out;
}

FunctionTable shift_table(uint32_t n, uint32_t k) {
    FunctionTable t;
    t.values.resize(n);
    for (uint32_t i = 0; i < n; ++i) t.values[i] = (i + k) % n;
    return t;
}

std::optional<uint32_t> shift_index(const FunctionTable& t) {
    const uint32_t n = static_cast<uint32_t>(t.values.size());
    if (n == 0) return std::nullopt;
    const uint32_t k = t.values[0];
    for (uint32_t i = 0; i < n; ++i)
        if (t.values[i] != (i + k) % n) return std::nullopt;
    return k;
}

const KeyClass* SecretKey::find_class(Label label) const {
    auto it = class_by_label.find(label);
    if (it == class_by_label.end()) return nullptr;
    return &classes[it->second];
}

void SecretKey::rebuild_lookups() {
    class_by_label.clear();
    for (size_t i = 0; i < classes.size(); ++i) class_by_label.emplace(classes[i].label, i);
}

Label PublicEvalKey::star_at(Label a, Label b) const {
    auto ia = index_by_label.find(a);
    auto ib = index_by_label.find(b);
    if (ia == index_by_label.end()) throw UnknownLabel("label " + std::to_string(a) + " is not in the universe");
    if (ib == index_by_label.end()) throw UnknownLabel("label " + std::to_string(b) + " is not in the universe");
    const Label r = star[static_cast<size_t>(ia->second) * labels.size() + ib->second];
    if (r == 0)
        throw UndefinedComposition("composition of " + std::to_string(a) + " and " + std::to_string(b) +
                                   " leaves the materialized universe");
    return r;
}

void PublicEvalKey::rebuild_lookups() {
    index_by_label.clear();
    for (uint32_t i = 0; i < labels.size(); ++i) index_by_label.emplace(labels[i], i);
}

namespace {

// n^n, throwing ParamsError when it exceeds `cap`.
uint64_t checked_universe_size(uint32_t n, uint64_t cap) {
    uint64_t size = 1;
    for (uint32_t i = 0; i < n; ++i) {
        if (size > cap / n)
            throw ParamsError("full mode needs " + std::to_string(n) + "^" + std::to_string(n) +
                              " tables, which exceeds the enumeration budget");
        size *= n;
    }
    if (size > cap)
        throw ParamsError("full mode universe exceeds the enumeration budget");
    return size;
}

FunctionTable decode_table(uint64_t index, uint32_t n) {
    FunctionTable t;
    t.values.resize(n);
    for (uint32_t i = n; i > 0; --i) {
        t.values[i - 1] = static_cast<uint32_t>(index % n);
        index /= n;
    }
    return t;
}

uint64_t encode_table(const FunctionTable& t, uint32_t n) {
    uint64_t index = 0;
    for (uint32_t v : t.values) index = index * n + v;
    return index;
}

std::string pack_key(const FunctionTable& t) {
    std::string key;
    key.reserve(t.values.size() * 4);
    for (uint32_t v : t.values)
        for (int b = 0; b < 4; ++b) key.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
    return key;
}

std::vector<Label> draw_labels(Rng& rng, size_t count) {
    std::unordered_set<Label> seen;
    std::vector<Label> out;
    out.reserve(count);
    while (out.size() < count) {
        const Label l = rng();
        if (l == 0 || !seen.insert(l).second) continue;
        out.push_back(l);
    }
    return out;
}

size_t lex_min_index(const std::vector<FunctionTable>& members) {
    size_t best = 0;
    for (size_t i = 1; i < members.size(); ++i)
        if (members[i] < members[best]) best = i;
    return best;
}

KeyPair keygen_full(const SchemeParams& params, Rng& rng, const Limits& limits) {
    const uint32_t n = params.n;
    const uint64_t universe = checked_universe_size(n, limits.max_enumeration);
    if (params.universe_extra != 0) throw ParamsError("universe_extra applies to sampled mode only");
    if (params.class_size == 0 || universe % params.class_size != 0)
        throw ParamsError("class size must divide " + std::to_string(universe));
    const uint64_t class_count = universe / params.class_size;
    if (class_count < n) throw ParamsError("not enough classes to separate the shift functions");
    if (class_count > limits.max_star_entries / class_count)
        throw ParamsError("composition table with " + std::to_string(class_count) + "^2 entries exceeds the budget");

    // shifts are pinned; everything else is dealt out at random
    std::vector<uint64_t> shift_indices(n);
    for (uint32_t k = 0; k < n; ++k) shift_indices[k] = encode_table(shift_table(n, k), n);
    std::vector<char> is_shift_idx(universe, 0);
    for (uint64_t s : shift_indices) is_shift_idx[s] = 1;

    std::vector<uint64_t> pool;
    pool.reserve(universe - n);
    for (uint64_t i = 0; i < universe; ++i)
        if (!is_shift_idx[i]) pool.push_back(i);
    shuffle_in_place(rng, pool);

    SecretKey sk;
    sk.params = params;
    sk.classes.resize(class_count);
    std::vector<uint32_t> class_of_table(universe);
    size_t next = 0;
    const std::vector<Label> labels = draw_labels(rng, class_count);
    for (uint64_t c = 0; c < class_count; ++c) {
        KeyClass& cls = sk.classes[c];
        cls.label = labels[c];
        if (c < n) {
            cls.shift = static_cast<uint32_t>(c);
            cls.members.push_back(shift_table(n, static_cast<uint32_t>(c)));
        }
        while (cls.members.size() < params.class_size) cls.members.push_back(decode_table(pool[next++], n));
        cls.canonical = cls.shift ? 0 : static_cast<uint32_t>(lex_min_index(cls.members));
        for (const auto& m : cls.members) class_of_table[encode_table(m, n)] = static_cast<uint32_t>(c);
    }
    sk.rebuild_lookups();

    PublicEvalKey pk;
    pk.labels = labels;
    std::sort(pk.labels.begin(), pk.labels.end());
    pk.rebuild_lookups();
    pk.star.assign(class_count * class_count, 0);
    for (uint64_t i = 0; i < class_count; ++i)
        for (uint64_t j = 0; j < class_count; ++j) {
            const FunctionTable composite = compose(sk.classes[i].canonical_rep(), sk.classes[j].canonical_rep());
            const Label out = sk.classes[class_of_table[encode_table(composite, n)]].label;
            const size_t row = pk.index_by_label.at(sk.classes[i].label);
            const size_t col = pk.index_by_label.at(sk.classes[j].label);
            pk.star[row * class_count + col] = out;
        }
    return KeyPair{std::move(sk), std::move(pk)};
}

KeyPair keygen_sampled(const SchemeParams& params, Rng& rng, const Limits& limits) {
    const uint32_t n = params.n;
    const uint64_t materialized = n + params.universe_extra;
    if (params.class_size == 0) throw ParamsError("class size must be positive");

    // c * (n + extra) <= n^n guarantees enough distinct tables exist
    uint64_t needed;
    if (params.universe_extra > limits.max_enumeration ||
        __builtin_mul_overflow(params.class_size, materialized, &needed) || needed > limits.max_enumeration)
        throw ParamsError("sampled mode materializes more tables than the enumeration budget allows");
    uint64_t space = 1;
    bool huge = false;
    for (uint32_t i = 0; i < n && !huge; ++i) {
        if (space > UINT64_MAX / n)
            huge = true;
        else
            space *= n;
    }
    if (!huge && needed > space)
        throw ParamsError("class_size*(n+universe_extra) exceeds the n^n distinct tables available");
    if (materialized > limits.max_star_entries / materialized)
        throw ParamsError("composition table exceeds the budget");

    SecretKey sk;
    sk.params = params;
    sk.classes.resize(materialized);

    std::unordered_set<std::string> used;
    for (uint32_t k = 0; k < n; ++k) used.insert(pack_key(shift_table(n, k)));

    auto draw_dummy = [&]() {
        FunctionTable t;
        t.values.resize(n);
        for (uint64_t attempts = 0; attempts < 100'000; ++attempts) {
            for (uint32_t i = 0; i < n; ++i) t.values[i] = static_cast<uint32_t>(uniform_below(rng, n));
            if (used.insert(pack_key(t)).second) return t;
        }
        throw ParamsError("could not sample enough distinct dummy tables");
    };

    const std::vector<Label> labels = draw_labels(rng, materialized);
    std::unordered_map<std::string, uint32_t> class_of_table;
    for (uint64_t c = 0; c < materialized; ++c) {
        KeyClass& cls = sk.classes[c];
        cls.label = labels[c];
        if (c < n) {
            cls.shift = static_cast<uint32_t>(c);
            cls.members.push_back(shift_table(n, static_cast<uint32_t>(c)));
        }
        while (cls.members.size() < params.class_size) cls.members.push_back(draw_dummy());
        cls.canonical = cls.shift ? 0 : static_cast<uint32_t>(lex_min_index(cls.members));
        for (const auto& m : cls.members) class_of_table.emplace(pack_key(m), static_cast<uint32_t>(c));
    }
    sk.rebuild_lookups();

    PublicEvalKey pk;
    pk.labels = labels;
    std::sort(pk.labels.begin(), pk.labels.end());
    pk.rebuild_lookups();
    pk.star.assign(materialized * materialized, 0);
    for (uint64_t i = 0; i < materialized; ++i)
        for (uint64_t j = 0; j < materialized; ++j) {
            const FunctionTable composite = compose(sk.classes[i].canonical_rep(), sk.classes[j].canonical_rep());
            auto hit = class_of_table.find(pack_key(composite));
            if (hit == class_of_table.end()) continue;  // composite leaves the sampled universe
            const size_t row = pk.index_by_label.at(sk.classes[i].label);
            const size_t col = pk.index_by_label.at(sk.classes[j].label);
            pk.star[row * materialized + col] = sk.classes[hit->second].label;
        }
    return KeyPair{std::move(sk), std::move(pk)};
}

}  // namespace

KeyPair keygen(const SchemeParams& params, Rng& rng, const Limits& limits) {
    if (params.n < 2) throw ParamsError("modulus must be at least 2");
    if (params.mode == Mode::Full) return keygen_full(params, rng, limits);
    return keygen_sampled(params, rng, limits);
}

KeyPair keygen(const SchemeParams& params, const Limits& limits) {
    Rng rng(params.seed);
    return keygen(params, rng, limits);
}

Ciphertext encrypt(const SecretKey& sk, uint32_t m) {
    if (m >= sk.params.n)
        throw RangeError("plaintext " + std::to_string(m) + " is out of range mod " + std::to_string(sk.params.n));
    return Ciphertext{sk.classes[m].label};
}

uint32_t decrypt(const SecretKey& sk, const Ciphertext& c) {
    const KeyClass* cls = sk.find_class(c.label);
    if (!cls) throw UnknownLabel("ciphertext label " + std::to_string(c.label) + " is not in this key");
    if (!cls->shift) throw NotAShiftClass("ciphertext names a dummy-only class");
    return *cls->shift;
}

Ciphertext eval_add(const PublicEvalKey& pk, const Ciphertext& c1, const Ciphertext& c2) {
    return Ciphertext{pk.star_at(c1.label, c2.label)};
}

Ciphertext eval_sum(const PublicEvalKey& pk, const std::vector<Ciphertext>& cs) {
    if (cs.empty()) throw UsageError("eval_sum needs at least one ciphertext");
    Ciphertext acc = cs[0];
    for (size_t i = 1; i < cs.size(); ++i) acc = eval_add(pk, acc, cs[i]);
    return acc;
}

namespace {

std::string label_str(Label l) { return std::to_string(l); }

Label label_from_json(const json& j) {
    if (!j.is_string()) throw ParseError("labels must be decimal strings");
    const std::string& s = j.get_ref<const std::string&>();
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("labels must be decimal strings");
    Label l = 0;
    try {
        l = std::stoull(s);
    } catch (const std::out_of_range&) {
        throw ParseError("label " + s + " does not fit in 64 bits");
    }
    if (l == 0) throw ParseError("label 0 is reserved");
    return l;
}

json params_to_json(const SchemeParams& p) {
    json j;
    j["class_size"] = p.class_size;
    j["mode"] = p.mode == Mode::Full ? "full" : "sampled";
    j["n"] = p.n;
    j["seed"] = p.seed;
    j["universe_extra"] = p.universe_extra;
    return j;
}

SchemeParams params_from_json(const json& j) {
    SchemeParams p;
    p.n = j.at("n").get<uint32_t>();
    p.class_size = j.at("class_size").get<uint64_t>();
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "full")
        p.mode = Mode::Full;
    else if (mode == "sampled")
        p.mode = Mode::Sampled;
    else
        throw ParseError("mode must be \"full\" or \"sampled\"");
    p.universe_extra = j.at("universe_extra").get<uint64_t>();
    p.seed = j.at("seed").get<uint64_t>();
    return p;
}

}  // namespace

std::string to_json(const SecretKey& sk) {
    json classes = json::array();
    for (const auto& cls : sk.classes) {
        json members = json::array();
        for (const auto& m : cls.members) members.push_back(m.values);
        json c;
        c["canonical"] = cls.canonical;
        c["label"] = label_str(cls.label);
        c["members"] = std::move(members);
        if (cls.shift)
            c["shift"] = *cls.shift;
        else
            c["shift"] = nullptr;
        classes.push_back(std::move(c));
    }
    json doc;
    doc["classes"] = std::move(classes);
    doc["params"] = params_to_json(sk.params);
    return doc.dump();
}

std::string to_json(const PublicEvalKey& pk) {
    json labels = json::array();
    for (Label l : pk.labels) labels.push_back(label_str(l));
    json star = json::array();
    const size_t k = pk.labels.size();
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) {
            const Label out = pk.star[i * k + j];
            if (out == 0) continue;
            star.push_back(json::array({label_str(pk.labels[i]), label_str(pk.labels[j]), label_str(out)}));
        }
    json doc;
    doc["labels"] = std::move(labels);
    doc["star"] = std::move(star);
    return doc.dump();
}

std::string to_json(const Ciphertext& c) {
    json doc;
    doc["label"] = label_str(c.label);
    return doc.dump();
}

namespace {

json parse_doc(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid ") + what + " JSON: " + e.what());
    }
}

}  // namespace

SecretKey secret_key_from_json(const std::string& text) {
    const json doc = parse_doc(text, "secret key");
    try {
    SecretKey sk;
    sk.params = params_from_json(doc.at("params"));
    for (const auto& c : doc.at("classes")) {
        KeyClass cls;
        cls.canonical = c.at("canonical").get<uint32_t>();
        cls.label = label_from_json(c.at("label"));
        for (const auto& m : c.at("members")) {
            FunctionTable t;
            t.values = m.get<std::vector<uint32_t>>();
            if (t.values.size() != sk.params.n) throw ParseError("table arity does not match the modulus");
            for (uint32_t v : t.values)
                if (v >= sk.params.n) throw ParseError("table entry out of range");
            cls.members.push_back(std::move(t));
        }
        if (cls.members.empty() || cls.canonical >= cls.members.size())
            throw ParseError("canonical representative index out of range");
        if (!c.at("shift").is_null()) cls.shift = c.at("shift").get<uint32_t>();
        sk.classes.push_back(std::move(cls));
    }
    sk.rebuild_lookups();
    if (sk.class_by_label.size() != sk.classes.size()) throw ParseError("duplicate class labels");
    std::unordered_set<std::string> seen_tables;
    for (const auto& cls : sk.classes) {
        if (cls.members.size() != sk.params.class_size) throw ParseError("class does not have class_size members");
        for (const auto& m : cls.members)
            if (!seen_tables.insert(pack_key(m)).second) throw ParseError("classes must be pairwise disjoint");
    }
    for (uint32_t k = 0; k < sk.params.n; ++k) {
        if (k >= sk.classes.size() || !sk.classes[k].shift || *sk.classes[k].shift != k)
            throw ParseError("shift classes must come first, in residue order");
        if (!(sk.classes[k].canonical_rep() == shift_table(sk.params.n, k)))
            throw ParseError("shift class " + std::to_string(k) + " has the wrong canonical representative");
    }
    return sk;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid secret key JSON: ") + e.what());
    }
}

PublicEvalKey public_key_from_json(const std::string& text) {
    const json doc = parse_doc(text, "public key");
    try {
    PublicEvalKey pk;
    for (const auto& l : doc.at("labels")) pk.labels.push_back(label_from_json(l));
    if (!std::is_sorted(pk.labels.begin(), pk.labels.end()) ||
        std::adjacent_find(pk.labels.begin(), pk.labels.end()) != pk.labels.end())
        throw ParseError("label universe must be strictly ascending");
    pk.rebuild_lookups();
    pk.star.assign(pk.labels.size() * pk.labels.size(), 0);
    for (const auto& triple : doc.at("star")) {
        if (!triple.is_array() || triple.size() != 3) throw ParseError("star entries must be [l1,l2,l3] triples");
        const Label a = label_from_json(triple[0]);
        const Label b = label_from_json(triple[1]);
        const Label out = label_from_json(triple[2]);
        auto ia = pk.index_by_label.find(a);
        auto ib = pk.index_by_label.find(b);
        auto io = pk.index_by_label.find(out);
        if (ia == pk.index_by_label.end() || ib == pk.index_by_label.end() || io == pk.index_by_label.end())
            throw ParseError("star entry references a label outside the universe");
        pk.star[static_cast<size_t>(ia->second) * pk.labels.size() + ib->second] = out;
    }
    return pk;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid public key JSON: ") + e.what());
    }
}

Ciphertext ciphertext_from_json(const std::string& text) {
    const json doc = parse_doc(text, "ciphertext");
    try {
        return Ciphertext{label_from_json(doc.at("label"))};
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid ciphertext JSON: ") + e.what());
    }
}

}  // namespace helab::quotient
