#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mixaudit/classifier.hpp"
#include "mixaudit/errors.hpp"
#include "mixaudit/gf2field.hpp"
#include "mixaudit/groupan.hpp"
#include "mixaudit/layers.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes, shared across subcommands:
//   0 success path (NonTypePreserving / Primitive / attack confirmed / agreement)
//   1 oracle disagreement, 2 parse or validation error, 3 guard or undecided,
//   4 attack precondition failure, 10 TypePreserving, 11 Imprimitive.
enum ExitCode {
    kOk = 0,
    kDisagreement = 1,
    kBadInput = 2,
    kUndecided = 3,
    kPreconditionFailed = 4,
    kTypePreserving = 10,
    kImprimitive = 11,
};

uint64_t fnv1a64(const std::string& data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string digest_of_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw mixaudit::ParseError("cannot open input: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv64:%016llx", (unsigned long long)fnv1a64(ss.str()));
    return buf;
}

std::string digest_of_string(const std::string& s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv64:%016llx", (unsigned long long)fnv1a64(s));
    return buf;
}

struct LoadedMatrix {
    mixaudit::BlockView view;
    std::string digest;
    std::string description;
};

// Inputs: builtin:<name>, gf:<path> (lifted field matrix), or a matrix file.
LoadedMatrix load_matrix(const std::string& input, std::optional<int> m, std::optional<int> delta,
                         bool transpose) {
    std::optional<mixaudit::BlockView> view;
    std::string digest, description;
    if (input.rfind("builtin:", 0) == 0) {
        mixaudit::LayerDescriptor d = mixaudit::builtin_layer(input.substr(8), m, delta);
        view.emplace(d.view);
        digest = digest_of_string(mixaudit::format_matrix_text(d.view));
        description = d.name;
    } else if (input.rfind("gf:", 0) == 0) {
        std::string path = input.substr(3);
        view.emplace(mixaudit::lift_gf_matrix(mixaudit::parse_gf_matrix_file(path)));
        digest = digest_of_file(path);
        description = path;
    } else {
        view.emplace(mixaudit::parse_matrix_file(input));
        digest = digest_of_file(input);
        description = input;
    }
    if (m || delta) {  // shape override, e.g. reinterpreting brick width
        int mm = m.value_or(view->m());
        int dd = delta.value_or(view->n() / mm);
        if (mm * dd != view->n())
            throw mixaudit::ParseError("override shape m*delta must equal matrix order");
        mixaudit::BitMatrix mat = view->matrix();
        view.emplace(std::move(mat), mm, dd);
    }
    if (transpose) {
        mixaudit::BitMatrix mat = view->matrix().transposed();
        int mm = view->m(), dd = view->delta();
        view.emplace(std::move(mat), mm, dd);
    }
    return LoadedMatrix{std::move(*view), std::move(digest), std::move(description)};
}

nlohmann::json make_meta(const std::string& command, const nlohmann::json& inputs, const nlohmann::json& options) {
    return {{"tool", "mixaudit"}, {"version", kVersion}, {"command", command}, {"inputs", inputs},
            {"options", options}};
}

void emit(const nlohmann::json& report, bool json_mode, const std::string& text) {
    if (json_mode) std::cout << report.dump(2) << '\n';
    else std::cout << text;
}

std::string render_verdict_text(const mixaudit::Verdict& v) {
    std::ostringstream out;
    out << "verdict: " << mixaudit::to_string(v.kind) << (v.vacuous ? " (no nontrivial types at delta=1)" : "")
        << '\n';
    out << "fast path: " << (v.fast_path_used ? "used" : "not used") << '\n';
    auto tri = [](mixaudit::Tri t) {
        switch (t) {
            case mixaudit::Tri::False: return "no ";
            case mixaudit::Tri::True: return "yes";
            case mixaudit::Tri::NotApplicable: return " - ";
            default: return " ? ";
        }
    };
    for (const auto& r : v.evidence) {
        out << "  n_w=" << r.n_w << "  eq2=" << tri(r.eq2) << " a=" << tri(r.a) << " b=" << tri(r.b)
            << " c=" << tri(r.c) << " d=" << tri(r.d) << (r.preserved ? "  PRESERVED" : "") << '\n';
        if (r.witness) {
            out << "    witness: whites=[";
            for (size_t i = 0; i < r.witness->white_values.size(); ++i)
                out << (i ? "," : "") << std::hex << r.witness->white_values[i] << std::dec;
            out << "] ruled={";
            for (size_t i = 0; i < r.witness->ruled_content.size(); ++i)
                out << (i ? "," : "") << std::hex << r.witness->ruled_content[i] << std::dec;
            out << "}" << (r.witness_confirmed ? " (enumeration-checked)" : "") << '\n';
        }
    }
    return out.str();
}

int cmd_classify(const std::string& input, std::optional<int> m, std::optional<int> delta, bool transpose,
                 bool no_fast_path, bool json_mode) {
    LoadedMatrix loaded = load_matrix(input, m, delta, transpose);
    mixaudit::ClassifyOptions opt;
    opt.use_fast_path = !no_fast_path;
    mixaudit::Verdict v = mixaudit::classify(loaded.view, opt);

    nlohmann::json report = {{"meta", make_meta("classify", {{loaded.description, loaded.digest}},
                                                {{"transpose", transpose},
                                                 {"fast_path", !no_fast_path},
                                                 {"confirm_enumeration_max_n", opt.confirm_enumeration_max_n}})},
                             {"result", mixaudit::to_json(v)}};
    emit(report, json_mode, render_verdict_text(v));
    return v.kind == mixaudit::Verdict::Kind::TypePreserving ? kTypePreserving : kOk;
}

int cmd_oracle(const std::string& input, std::optional<int> m, std::optional<int> delta, bool transpose,
               uint64_t budget, bool count_all, bool json_mode) {
    LoadedMatrix loaded = load_matrix(input, m, delta, transpose);
    if (loaded.view.n() > 16) throw mixaudit::GuardError("oracle infeasible: n > 16");

    mixaudit::Verdict structural = mixaudit::classify(loaded.view);
    mixaudit::OracleOptions opt;
    opt.element_budget = budget;
    opt.count_all = count_all;
    mixaudit::OracleVerdict oracle = mixaudit::oracle_classify(loaded.view, opt);

    bool oracle_decided = oracle.kind != mixaudit::OracleVerdict::Kind::Undecided;
    bool agree = oracle_decided &&
                 ((oracle.kind == mixaudit::OracleVerdict::Kind::TypePreserving) ==
                  (structural.kind == mixaudit::Verdict::Kind::TypePreserving));

    nlohmann::json report = {
        {"meta", make_meta("oracle", {{loaded.description, loaded.digest}},
                           {{"transpose", transpose}, {"element_budget", budget}, {"count_all", count_all}})},
        {"result",
         {{"structural", mixaudit::to_json(structural)},
          {"oracle", mixaudit::to_json(oracle)},
          {"agreement", oracle_decided ? nlohmann::json(agree) : nlohmann::json(nullptr)}}}};

    std::ostringstream text;
    text << "structural: " << mixaudit::to_string(structural.kind) << '\n'
         << "oracle:     " << mixaudit::to_string(oracle.kind) << '\n'
         << "agreement:  " << (oracle_decided ? (agree ? "yes" : "NO") : "undecided") << '\n';
    emit(report, json_mode, text.str());
    if (!oracle_decided) return kUndecided;
    return agree ? kOk : kDisagreement;
}

int cmd_primitivity(const std::string& config_path, uint64_t budget, int threads, bool json_mode) {
    mixaudit::CipherConfig cfg = mixaudit::parse_cipher_config_file(config_path);
    mixaudit::PrimitivityReport report;
    if (cfg.kind == "spnmod") {
        report = mixaudit::spnmod_primitivity(mixaudit::build_spnmod(cfg));
    } else {
        mixaudit::FeistelSearchOptions opt;
        opt.op_budget = budget;
        opt.threads = threads;
        report = mixaudit::feistel_block_search(mixaudit::build_feistel(cfg), opt);
    }

    nlohmann::json jreport = {{"meta", make_meta("primitivity", {{config_path, digest_of_file(config_path)}},
                                                 {{"op_budget", budget}, {"sbox_seed", cfg.sbox_seed}})},
                              {"result", mixaudit::to_json(report)}};
    std::ostringstream text;
    text << "verdict: " << mixaudit::to_string(report.verdict) << '\n';
    for (const auto& w : report.q_witnesses)
        if (w.invariant) text << "  invariant coset partition at q=" << w.q << '\n';
    if (report.block_witness)
        text << "  block system from seed " << report.block_witness->seed_point << " with "
             << report.block_witness->num_blocks << " blocks\n";
    emit(jreport, json_mode, text.str());
    switch (report.verdict) {
        case mixaudit::PrimitivityReport::Outcome::Primitive: return kOk;
        case mixaudit::PrimitivityReport::Outcome::Imprimitive: return kImprimitive;
        default: return kUndecided;
    }
}

int cmd_attack(const std::string& config_path, int q, int rounds, uint64_t trials, uint64_t seed,
               bool json_mode) {
    if (trials == 0) throw mixaudit::ParseError("attack: trials must be positive");
    if (rounds <= 0) throw mixaudit::ParseError("attack: rounds must be positive");
    mixaudit::CipherConfig cfg = mixaudit::parse_cipher_config_file(config_path);
    if (cfg.kind != "spnmod") throw mixaudit::ParseError("attack: config must describe an spnmod cipher");
    mixaudit::SpnModCipher cipher = mixaudit::build_spnmod(cfg);
    mixaudit::CosetPartition part = mixaudit::coset_partition(q, cipher.n());
    mixaudit::AttackStats stats = mixaudit::attack_demo(cipher, part, rounds, trials, seed);

    nlohmann::json report = {
        {"meta", make_meta("attack", {{config_path, digest_of_file(config_path)}},
                           {{"q", q}, {"rounds", rounds}, {"trials", trials}, {"seed", seed}})},
        {"result", mixaudit::to_json(stats)}};
    std::ostringstream text;
    text << "confirmation rate: " << stats.confirmation_rate << " over " << stats.trials << " trials\n"
         << "leaked bits per encryption: " << stats.leaked_bits << '\n';
    emit(report, json_mode, text.str());
    return stats.confirmation_rate == 1.0 ? kOk : kDisagreement;
}

int cmd_layers_emit(const std::string& name, std::optional<int> m, std::optional<int> delta,
                    const std::string& out_path) {
    mixaudit::LayerDescriptor d = mixaudit::builtin_layer(name, m, delta);
    std::string text = "# " + d.name + ": " + d.provenance + "\n" + mixaudit::format_matrix_text(d.view);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out_path);
        if (!f) throw mixaudit::ParseError("cannot write: " + out_path);
        f << text;
    }
    return kOk;
}

int cmd_layers_list() {
    for (const auto& [name, desc] : mixaudit::builtin_layer_catalog())
        std::cout << name << "\n    " << desc << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mixaudit: audits block-cipher mixing layers for modular-addition type preservation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string input, config_path, out_path;
    std::optional<int> m, delta;
    bool transpose = false, json_mode = false, no_fast_path = false, count_all = false;
    uint64_t budget = 400'000'000;
    uint64_t op_budget = uint64_t{1} << 34;
    int q = 0, rounds = 3, threads = 0;
    uint64_t trials = 1000, seed = 1;

    auto add_matrix_opts = [&](CLI::App* cmd) {
        cmd->add_option("input", input, "matrix file, builtin:<name>, or gf:<path>")->required();
        cmd->add_option("--m", m, "brick width override");
        cmd->add_option("--delta", delta, "brick count override");
        cmd->add_flag("--transpose", transpose, "ingest a left-action matrix");
        cmd->add_flag("--json", json_mode, "machine-readable output");
    };

    CLI::App* classify = app.add_subcommand("classify", "structural type-preservation verdict");
    add_matrix_opts(classify);
    classify->add_flag("--no-fast-path", no_fast_path, "skip the cheap refutation pass");

    CLI::App* oracle = app.add_subcommand("oracle", "exhaustive cross-check of the structural verdict");
    add_matrix_opts(oracle);
    oracle->add_option("--budget", budget, "materialized-element budget");
    oracle->add_flag("--count-all", count_all, "count every preserved set instead of stopping at one");

    CLI::App* prim = app.add_subcommand("primitivity", "coset-partition / block-system analysis");
    prim->add_option("--config", config_path, "cipher config JSON")->required();
    prim->add_option("--budget", op_budget, "operation budget for the block search");
    prim->add_option("--threads", threads, "worker cap (default MIXAUDIT_THREADS)");
    prim->add_flag("--json", json_mode, "machine-readable output");

    CLI::App* attack = app.add_subcommand("attack", "coset-tracking demonstration on an imprimitive cipher");
    attack->add_option("--config", config_path, "cipher config JSON (spnmod)")->required();
    attack->add_option("--q", q, "coset partition parameter")->required();
    attack->add_option("--rounds", rounds, "encryption rounds");
    attack->add_option("--trials", trials, "random (plaintext, key-vector) trials");
    attack->add_option("--seed", seed, "RNG seed");
    attack->add_flag("--json", json_mode, "machine-readable output");

    CLI::App* layers = app.add_subcommand("layers", "builtin mixing layers");
    CLI::App* emit_cmd = layers->add_subcommand("emit", "write a builtin layer in matrix text format");
    emit_cmd->add_option("name", input, "builtin layer name")->required();
    emit_cmd->add_option("--m", m, "brick width (identity layer)");
    emit_cmd->add_option("--delta", delta, "brick count (identity layer)");
    emit_cmd->add_option("-o,--output", out_path, "output file (default stdout)");
    CLI::App* list_cmd = layers->add_subcommand("list", "list builtin layers");
    layers->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (classify->parsed()) return cmd_classify(input, m, delta, transpose, no_fast_path, json_mode);
        if (oracle->parsed()) return cmd_oracle(input, m, delta, transpose, budget, count_all, json_mode);
        if (prim->parsed()) return cmd_primitivity(config_path, op_budget, threads, json_mode);
        if (attack->parsed()) return cmd_attack(config_path, q, rounds, trials, seed, json_mode);
        if (layers->parsed()) {
            if (emit_cmd->parsed()) return cmd_layers_emit(input, m, delta, out_path);
            if (list_cmd->parsed()) return cmd_layers_list();
        }
    } catch (const mixaudit::PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return attack->parsed() ? kPreconditionFailed : kBadInput;
    } catch (const mixaudit::GuardError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUndecided;
    } catch (const mixaudit::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    }
    return kBadInput;
}
