#include "mixaudit/ciphersim.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include "mixaudit/errors.hpp"
#include "mixaudit/layers.hpp"
#include "mixaudit/typesys.hpp"

namespace mixaudit {

bool SBoxSet::zero_not_fixed() const {
    for (const auto& t : tables)
        if (t[0] == 0) return false;
    return true;
}

void SBoxSet::validate() const {
    if (int(tables.size()) != delta) throw std::invalid_argument("SBoxSet: expected delta tables");
    size_t size = size_t{1} << m;
    for (const auto& t : tables) {
        if (t.size() != size) throw std::invalid_argument("SBoxSet: table size must be 2^m");
        std::vector<bool> seen(size, false);
        for (uint16_t v : t) {
            if (v >= size || seen[v]) throw std::invalid_argument("SBoxSet: table is not a bijection");
            seen[v] = true;
        }
    }
}

uint64_t SBoxSet::apply(uint64_t v) const {
    uint64_t mask = (uint64_t{1} << m) - 1;
    uint64_t out = 0;
    for (int j = 0; j < delta; ++j) out |= uint64_t(tables[j][(v >> (j * m)) & mask]) << (j * m);
    return out;
}

uint64_t SBoxSet::apply_inverse(uint64_t v) const {
    uint64_t mask = (uint64_t{1} << m) - 1;
    uint64_t out = 0;
    for (int j = 0; j < delta; ++j) {
        uint64_t target = (v >> (j * m)) & mask;
        uint64_t pre = 0;
        while (tables[j][pre] != target) ++pre;
        out |= pre << (j * m);
    }
    return out;
}

SBoxSet identity_sboxes(int m, int delta) {
    SBoxSet s{m, delta, {}};
    std::vector<uint16_t> id(size_t{1} << m);
    std::iota(id.begin(), id.end(), uint16_t{0});
    s.tables.assign(size_t(delta), id);
    return s;
}

SBoxSet random_sbox_set(int m, int delta, uint64_t seed, bool require_zero_not_fixed) {
    if (m < 1 || m > 16 || delta < 1) throw std::invalid_argument("random_sbox_set: bad shape");
    std::mt19937_64 rng(seed);
    SBoxSet s{m, delta, {}};
    for (int j = 0; j < delta; ++j) {
        std::vector<uint16_t> t(size_t{1} << m);
        std::iota(t.begin(), t.end(), uint16_t{0});
        do {
            std::shuffle(t.begin(), t.end(), rng);
        } while (require_zero_not_fixed && t[0] == 0);
        s.tables.push_back(std::move(t));
    }
    s.validate();
    return s;
}

SpnModCipher::SpnModCipher(SBoxSet s, BlockView l) : sboxes(std::move(s)), layer(std::move(l)) {
    sboxes.validate();
    if (layer.n() != sboxes.n()) throw std::invalid_argument("SpnModCipher: layer and S-box widths differ");
    if (layer.m() != sboxes.m) throw std::invalid_argument("SpnModCipher: brick widths differ");
    if (!layer.matrix().is_invertible()) throw PreconditionError("SpnModCipher: mixing layer must be invertible");
}

uint64_t SpnModCipher::round(uint64_t v, uint64_t k) const {
    return boxplus(rho(v), k, n());
}

FeistelGostCipher::FeistelGostCipher(SBoxSet s, BlockView l) : sboxes(std::move(s)), layer(std::move(l)) {
    sboxes.validate();
    if (layer.n() != sboxes.n()) throw std::invalid_argument("FeistelGostCipher: layer and S-box widths differ");
    if (layer.m() != sboxes.m) throw std::invalid_argument("FeistelGostCipher: brick widths differ");
    if (!layer.matrix().is_invertible())
        throw PreconditionError("FeistelGostCipher: mixing layer must be invertible");
}

std::pair<uint64_t, uint64_t> FeistelGostCipher::p_map(uint64_t x1, uint64_t x2) const {
    return {x2, x1 ^ rho(x2)};
}

std::pair<uint64_t, uint64_t> FeistelGostCipher::round(uint64_t x1, uint64_t x2,
                                                       std::pair<uint64_t, uint64_t> k,
                                                       std::pair<uint64_t, uint64_t> h) const {
    int hn = half_n();
    auto [y1, y2] = p_map(boxplus(x1, k.first, hn), boxplus(x2, k.second, hn));
    return {boxplus(y1, h.first, hn), boxplus(y2, h.second, hn)};
}

CipherConfig parse_cipher_config(const nlohmann::json& j) {
    CipherConfig cfg;
    try {
        cfg.kind = j.at("kind").get<std::string>();
        cfg.m = j.at("m").get<int>();
        cfg.delta = j.at("delta").get<int>();
        cfg.layer_spec = j.at("layer").get<std::string>();
        cfg.sbox_seed = j.value("sbox_seed", uint64_t{1});
        cfg.zero_not_fixed = j.value("zero_not_fixed", true);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("cipher config: ") + e.what());
    }
    if (cfg.kind != "spnmod" && cfg.kind != "feistel")
        throw ParseError("cipher config: kind must be \"spnmod\" or \"feistel\"");
    if (cfg.m < 1 || cfg.delta < 1) throw ParseError("cipher config: m and delta must be positive");
    return cfg;
}

CipherConfig parse_cipher_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_cipher_config(j);
}

BlockView resolve_layer_spec(const std::string& spec, int m, int delta) {
    const std::string builtin_prefix = "builtin:";
    const std::string file_prefix = "file:";
    if (spec.rfind(builtin_prefix, 0) == 0) {
        LayerDescriptor d = builtin_layer(spec.substr(builtin_prefix.size()), m, delta);
        if (d.m != m || d.delta != delta)
            throw ParseError("layer " + d.name + " has shape m=" + std::to_string(d.m) + " delta=" +
                             std::to_string(d.delta) + ", config wants m=" + std::to_string(m) + " delta=" +
                             std::to_string(delta));
        return d.view;
    }
    if (spec.rfind(file_prefix, 0) == 0) {
        BlockView v = parse_matrix_file(spec.substr(file_prefix.size()));
        if (v.m() != m || v.delta() != delta) throw ParseError("layer file shape does not match config");
        return v;
    }
    throw ParseError("layer spec must start with builtin: or file:");
}

SpnModCipher build_spnmod(const CipherConfig& cfg) {
    if (cfg.kind != "spnmod") throw std::invalid_argument("build_spnmod: config kind mismatch");
    return SpnModCipher(random_sbox_set(cfg.m, cfg.delta, cfg.sbox_seed, cfg.zero_not_fixed),
                        resolve_layer_spec(cfg.layer_spec, cfg.m, cfg.delta));
}

FeistelGostCipher build_feistel(const CipherConfig& cfg) {
    if (cfg.kind != "feistel") throw std::invalid_argument("build_feistel: config kind mismatch");
    return FeistelGostCipher(random_sbox_set(cfg.m, cfg.delta, cfg.sbox_seed, cfg.zero_not_fixed),
                             resolve_layer_spec(cfg.layer_spec, cfg.m, cfg.delta));
}

}  // namespace mixaudit
