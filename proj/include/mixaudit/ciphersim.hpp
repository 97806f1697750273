#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "mixaudit/bitmatrix.hpp"

namespace mixaudit {

/// delta parallel S-boxes, each a bijection of {0..2^m-1} applied to one brick.
struct SBoxSet {
    int m = 0;
    int delta = 0;
    std::vector<std::vector<uint16_t>> tables;

    int n() const { return m * delta; }
    bool zero_not_fixed() const;  // table_j(0) != 0 for every j
    void validate() const;        // every table a bijection

    uint64_t apply(uint64_t v) const;
    uint64_t apply_inverse(uint64_t v) const;
};

SBoxSet identity_sboxes(int m, int delta);
SBoxSet random_sbox_set(int m, int delta, uint64_t seed, bool require_zero_not_fixed);

/// SPN round v -> ((v gamma) lambda) boxplus k with whole-state modular key
/// addition. State fits a machine word (n <= 24 enforced by groupan callers).
struct SpnModCipher {
    SBoxSet sboxes;
    BlockView layer;

    SpnModCipher(SBoxSet s, BlockView l);
    int n() const { return sboxes.n(); }

    uint64_t rho(uint64_t v) const { return layer.matrix().apply_u64(sboxes.apply(v)); }
    uint64_t round(uint64_t v, uint64_t k) const;
};

/// Two-half Feistel state with modular key addition per half and the swap map
/// (x1, x2) -> (x2, x1 xor x2*rho), rho = gamma lambda on one half.
struct FeistelGostCipher {
    SBoxSet sboxes;   // on one half
    BlockView layer;  // on one half

    FeistelGostCipher(SBoxSet s, BlockView l);
    int half_n() const { return sboxes.n(); }

    uint64_t rho(uint64_t x) const { return layer.matrix().apply_u64(sboxes.apply(x)); }
    std::pair<uint64_t, uint64_t> p_map(uint64_t x1, uint64_t x2) const;
    std::pair<uint64_t, uint64_t> round(uint64_t x1, uint64_t x2, std::pair<uint64_t, uint64_t> k,
                                        std::pair<uint64_t, uint64_t> h) const;
};

/// Cipher config:
/// {"kind":"spnmod"|"feistel","m":..,"delta":..,"layer":"builtin:<name>"|"file:<path>",
///  "sbox_seed":..,"zero_not_fixed":true|false}
/// For feistel, m and delta describe one half.
struct CipherConfig {
    std::string kind;
    int m = 0;
    int delta = 0;
    std::string layer_spec;
    uint64_t sbox_seed = 1;
    bool zero_not_fixed = true;
};

CipherConfig parse_cipher_config(const nlohmann::json& j);
CipherConfig parse_cipher_config_file(const std::string& path);
BlockView resolve_layer_spec(const std::string& spec, int m, int delta);
SpnModCipher build_spnmod(const CipherConfig& cfg);
FeistelGostCipher build_feistel(const CipherConfig& cfg);

}  // namespace mixaudit
