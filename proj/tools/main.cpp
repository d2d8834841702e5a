// helab: command-line front end over the C API (helab.h). Every randomized
// step is driven by --seed, so repeated invocations are byte-identical.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "helab.h"
#include "json.hpp"

namespace {

[[noreturn]] void die(int code, const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    std::exit(code);
}

void check(helab_status st) {
    if (st != HELAB_OK) die(static_cast<int>(st), helab_last_error());
}

struct CStr {
    char* p = nullptr;
    CStr() = default;
    CStr(const CStr&) = delete;
    CStr& operator=(const CStr&) = delete;
    ~CStr() { helab_string_free(p); }
    std::string str() const { return p ? std::string(p) : std::string(); }
};

struct QheHandle {
    helab_qhe* h = nullptr;
    QheHandle() = default;
    QheHandle(const QheHandle&) = delete;
    QheHandle& operator=(const QheHandle&) = delete;
    QheHandle(QheHandle&& o) noexcept : h(o.h) { o.h = nullptr; }
    ~QheHandle() { helab_qhe_free(h); }
};

struct SgHandle {
    helab_sg* h = nullptr;
    SgHandle() = default;
    SgHandle(const SgHandle&) = delete;
    SgHandle& operator=(const SgHandle&) = delete;
    ~SgHandle() { helab_sg_free(h); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) die(6, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) die(6, "cannot read " + path);
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) die(6, "cannot open " + path + " for writing");
    out << text;
    out.flush();
    if (!out) die(6, "cannot write " + path);
}

// Primary result goes to stdout unless --out redirects it to a file.
void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
}

QheHandle load_secret(const std::string& path) {
    const std::string sk = slurp(path);
    QheHandle k;
    check(helab_qhe_from_json(sk.c_str(), nullptr, &k.h));
    return k;
}

void require_bits(const std::vector<int>& bits) {
    for (int b : bits)
        if (b != 0 && b != 1) die(1, "bits must be 0 or 1");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale homomorphic encryption laboratory"};
    app.require_subcommand(1);

    uint64_t seed = 0;
    std::string out_path;
    uint32_t jobs = 1;
    app.add_option("--seed", seed, "seed driving every randomized step")->capture_default_str();
    app.add_option("--out", out_path, "write the primary result to this file instead of stdout");
    app.add_option("--jobs", jobs, "worker threads for game trials")->capture_default_str();

    auto* keygen = app.add_subcommand("keygen", "generate a quotient-scheme key pair");
    keygen->fallthrough();
    uint32_t kg_n = 0;
    uint64_t kg_c = 0, kg_extra = 0;
    std::string kg_mode = "full", kg_secret = "secret_key.json", kg_public = "public_key.json";
    keygen->add_option("--n", kg_n, "plaintext modulus")->required();
    keygen->add_option("--class-size", kg_c, "tables per equivalence class")->required();
    keygen->add_option("--mode", kg_mode, "full or sampled")->capture_default_str();
    keygen->add_option("--universe-extra", kg_extra, "extra dummy classes (sampled mode)")
        ->capture_default_str();
    keygen->add_option("--secret-out", kg_secret, "secret key path")->capture_default_str();
    keygen->add_option("--public-out", kg_public, "public evaluation key path")->capture_default_str();
    keygen->callback([&] {
        QheHandle k;
        check(helab_qhe_keygen(kg_n, kg_c, kg_mode.c_str(), kg_extra, seed, &k.h));
        CStr sk, pk;
        check(helab_qhe_secret_json(k.h, &sk.p));
        check(helab_qhe_public_json(k.h, &pk.p));
        uint64_t classes = 0;
        check(helab_qhe_class_count(k.h, &classes));
        write_file(kg_secret, sk.str() + "\n");
        write_file(kg_public, pk.str() + "\n");
        std::cout << "classes: " << classes << "\n"
                  << "labels: " << classes << "\n"
                  << "secret key: " << kg_secret << "\n"
                  << "public key: " << kg_public << "\n";
    });

    auto* encrypt = app.add_subcommand("encrypt", "encrypt a residue with the secret key");
    encrypt->fallthrough();
    std::string enc_key;
    uint32_t enc_m = 0;
    encrypt->add_option("--key", enc_key, "secret key file")->required();
    encrypt->add_option("--m", enc_m, "plaintext residue")->required();
    encrypt->callback([&] {
        QheHandle k = load_secret(enc_key);
        CStr ct;
        check(helab_qhe_encrypt(k.h, enc_m, &ct.p));
        emit(out_path, ct.str() + "\n");
    });

    auto* add = app.add_subcommand("add", "compose ciphertexts with the public star table");
    add->fallthrough();
    std::string add_key;
    std::vector<std::string> add_cts;
    add->add_option("--evalkey", add_key, "public evaluation key file")->required();
    add->add_option("cts", add_cts, "ciphertext files (folded left to right)")->required();
    add->callback([&] {
        if (add_cts.size() < 2) die(1, "add needs at least two ciphertext files");
        const std::string pk = slurp(add_key);
        QheHandle k;
        check(helab_qhe_from_json(nullptr, pk.c_str(), &k.h));
        std::string acc = slurp(add_cts[0]);
        for (size_t i = 1; i < add_cts.size(); ++i) {
            const std::string rhs = slurp(add_cts[i]);
            CStr next;
            check(helab_qhe_add(k.h, acc.c_str(), rhs.c_str(), &next.p));
            acc = next.str();
        }
        emit(out_path, acc + "\n");
    });

    auto* decrypt = app.add_subcommand("decrypt", "decrypt a ciphertext with the secret key");
    decrypt->fallthrough();
    std::string dec_key, dec_ct;
    decrypt->add_option("--key", dec_key, "secret key file")->required();
    decrypt->add_option("ct", dec_ct, "ciphertext file")->required();
    decrypt->callback([&] {
        QheHandle k = load_secret(dec_key);
        const std::string ct = slurp(dec_ct);
        uint32_t m = 0;
        check(helab_qhe_decrypt(k.h, ct.c_str(), &m));
        emit(out_path, std::to_string(m) + "\n");
    });

    auto* boolean = app.add_subcommand("bool", "one boolean gate over freshly encrypted bits");
    boolean->fallthrough();
    uint64_t b_p = 0, b_q = 0;
    std::string b_op;
    std::vector<int> b_bits;
    boolean->add_option("--p", b_p, "first prime")->required();
    boolean->add_option("--q", b_q, "second prime")->required();
    boolean->add_option("op", b_op, "or | and")->required();
    boolean->add_option("bits", b_bits, "two plaintext bits")->required();
    boolean->callback([&] {
        if (b_op != "or" && b_op != "and") die(1, "op must be \"or\" or \"and\"");
        if (b_bits.size() != 2) die(1, "exactly two bits expected");
        require_bits(b_bits);
        SgHandle g;
        check(helab_sg_new(b_p, b_q, seed, &g.h));
        CStr c1, c2, cr;
        check(helab_sg_encrypt_bit(g.h, b_bits[0], &c1.p));
        check(helab_sg_encrypt_bit(g.h, b_bits[1], &c2.p));
        if (b_op == "or")
            check(helab_sg_or(g.h, c1.p, c2.p, &cr.p));
        else
            check(helab_sg_and(g.h, c1.p, c2.p, &cr.p));
        int bit = 0;
        check(helab_sg_decrypt(g.h, cr.p, &bit));
        emit(out_path, std::to_string(bit) + "\n");
    });

    auto* dnf = app.add_subcommand("dnf", "evaluate a 2-DNF formula over encrypted bits");
    dnf->fallthrough();
    uint64_t d_p = 0, d_q = 0;
    std::string d_formula;
    std::vector<int> d_bits;
    dnf->add_option("--p", d_p, "first prime")->required();
    dnf->add_option("--q", d_q, "second prime")->required();
    dnf->add_option("--formula", d_formula, "e.g. \"(x0 & x1) | (x2 & x3)\"")->required();
    dnf->add_option("bits", d_bits, "plaintext bits, one per variable")->required();
    dnf->callback([&] {
        require_bits(d_bits);
        SgHandle g;
        check(helab_sg_new(d_p, d_q, seed, &g.h));
        CStr ct;
        check(helab_sg_eval_dnf(g.h, d_formula.c_str(), d_bits.data(), d_bits.size(), &ct.p));
        int bit = 0;
        check(helab_sg_decrypt(g.h, ct.p, &bit));
        emit(out_path, std::to_string(bit) + "\n");
    });

    auto* game = app.add_subcommand("si-game", "run the pattern-distinguishing game");
    game->fallthrough();
    std::string g_host, g_p0, g_p1, g_adv = "coin";
    uint64_t g_trials = 1000;
    game->add_option("--host", g_host, "host graph file")->required();
    game->add_option("--p0", g_p0, "first candidate pattern file")->required();
    game->add_option("--p1", g_p1, "second candidate pattern file")->required();
    game->add_option("--adversary", g_adv, "coin | profile | canonical")->capture_default_str();
    game->add_option("--trials", g_trials, "number of game rounds")->capture_default_str();
    game->callback([&] {
        const std::string host = slurp(g_host), p0 = slurp(g_p0), p1 = slurp(g_p1);
        CStr res;
        check(helab_si_game(host.c_str(), p0.c_str(), p1.c_str(), g_adv.c_str(), g_trials, seed, jobs,
                            &res.p));
        const auto j = nlohmann::json::parse(res.str());
        std::ostringstream summary;
        summary << "advantage " << j["advantage"].get<double>() << " (" << j["correct"].get<uint64_t>()
                << "/" << j["trials"].get<uint64_t>() << " correct)\n";
        if (out_path.empty()) {
            std::cout << res.str() << "\n" << summary.str();
        } else {
            write_file(out_path, res.str() + "\n");
            std::cout << summary.str();
        }
    });

    auto* reduce = app.add_subcommand("reduce-check",
                                      "decide subgraph presence through the distinguishing reduction");
    reduce->fallthrough();
    std::string r_pattern, r_host;
    reduce->add_option("--pattern", r_pattern, "pattern graph file")->required();
    reduce->add_option("--host", r_host, "host graph file")->required();
    reduce->callback([&] {
        const std::string p = slurp(r_pattern), h = slurp(r_host);
        int present = 0;
        check(helab_reduce_check(p.c_str(), h.c_str(), seed, &present));
        emit(out_path, present ? "present\n" : "absent\n");
    });

    auto* prove = app.add_subcommand("prove", "typecheck and normalize a closed term");
    prove->fallthrough();
    std::string p_term, p_file;
    uint64_t p_fuel = 100000;
    prove->add_option("term", p_term, "term text");
    prove->add_option("--file", p_file, "read the term from this file");
    prove->add_option("--fuel", p_fuel, "reduction step budget")->capture_default_str();
    prove->callback([&] {
        if (p_term.empty() == p_file.empty()) die(1, "give a term either inline or with --file");
        const std::string text = p_file.empty() ? p_term : slurp(p_file);
        CStr res;
        check(helab_term_prove(text.c_str(), p_fuel, &res.p));
        if (!out_path.empty()) {
            write_file(out_path, res.str() + "\n");
            return;
        }
        const auto j = nlohmann::json::parse(res.str());
        std::cout << "normal: " << j["normal"].get<std::string>() << "\n"
                  << "type: " << j["type"].get<std::string>() << "\n";
    });

    auto* denc = app.add_subcommand("denote-encrypt", "encrypt the shift a closed term denotes");
    denc->fallthrough();
    std::string de_key, de_term, de_file;
    denc->add_option("--key", de_key, "secret key file")->required();
    denc->add_option("term", de_term, "term text");
    denc->add_option("--file", de_file, "read the term from this file");
    denc->callback([&] {
        if (de_term.empty() == de_file.empty()) die(1, "give a term either inline or with --file");
        const std::string text = de_file.empty() ? de_term : slurp(de_file);
        QheHandle k = load_secret(de_key);
        CStr ct;
        check(helab_qhe_encrypt_term(k.h, text.c_str(), &ct.p));
        emit(out_path, ct.str() + "\n");
    });

    auto* bench = app.add_subcommand("bench", "time keygen against eval_add across n");
    bench->fallthrough();
    uint32_t be_min = 2, be_max = 6;
    uint64_t be_reps = 5;
    bench->add_option("--n-min", be_min, "smallest modulus")->capture_default_str();
    bench->add_option("--n-max", be_max, "largest modulus")->capture_default_str();
    bench->add_option("--reps", be_reps, "repetitions per point")->capture_default_str();
    bench->callback([&] {
        CStr res;
        check(helab_bench_quotient(be_min, be_max, be_reps, seed, &res.p));
        emit(out_path, res.str() + "\n");
    });

    auto* functor = app.add_subcommand("functor", "normalize a polynomial functor expression");
    functor->fallthrough();
    std::string f_expr;
    uint64_t f_set = 0;
    bool f_json = false, f_enum = false;
    functor->add_option("expr", f_expr, "expression, e.g. \"X^2 + 3*X + 1\"")->required();
    auto* f_set_opt =
        functor->add_option("--set-size", f_set, "finite set size for cardinality/enumeration");
    functor->add_flag("--json", f_json, "also print the normal form as JSON");
    functor->add_flag("--enumerate", f_enum, "list the elements of F(set); needs --set-size");
    functor->callback([&] {
        std::ostringstream doc;
        CStr text;
        check(helab_functor_normal_text(f_expr.c_str(), &text.p));
        doc << text.str() << "\n";
        if (f_json) {
            CStr j;
            check(helab_functor_normalize(f_expr.c_str(), &j.p));
            doc << j.str() << "\n";
        }
        if (f_set_opt->count() > 0) {
            CStr card;
            check(helab_functor_cardinality(f_expr.c_str(), f_set, &card.p));
            doc << "cardinality: " << card.str() << "\n";
            if (f_enum) {
                CStr elems;
                check(helab_functor_enumerate(f_expr.c_str(), f_set, &elems.p));
                doc << elems.str() << "\n";
            }
        } else if (f_enum) {
            die(1, "--enumerate needs --set-size");
        }
        emit(out_path, doc.str());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return 0;
}
