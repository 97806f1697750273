#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "json.hpp"
#include "mixaudit/ciphersim.hpp"

namespace mixaudit {

/// The partition of Z_{2^n} into cosets of <2^q>: blocks are residue classes
/// modulo 2^q, labelled by the residue.
struct CosetPartition {
    int q = 0;
    int n = 0;

    uint64_t num_blocks() const { return uint64_t{1} << q; }
    uint64_t block_size() const { return uint64_t{1} << (n - q); }
    uint64_t block_of(uint64_t v) const { return v & (num_blocks() - 1); }
    std::vector<uint64_t> block_elements(uint64_t label) const;
};

CosetPartition coset_partition(int q, int n);  // 1 <= q <= n-1, n <= 24

/// True iff the image of every block is exactly one block. perm is a total
/// lookup table over 2^part.n points.
bool partition_invariant_under(const std::vector<uint32_t>& perm, const CosetPartition& part);

struct QWitness {
    int q = 0;
    bool invariant = false;          // coset partition mapped to itself blockwise
    bool theorem_condition = false;  // subgroup image equals the translated subgroup
};

struct BlockWitness {
    uint64_t seed_point = 0;  // the nonzero point merged with 0
    uint64_t num_blocks = 0;
    uint64_t block_size = 0;  // size of the block containing 0
};

struct PrimitivityReport {
    enum class Outcome { Primitive, Imprimitive, Undecided };
    Outcome verdict = Outcome::Undecided;
    std::string kind;  // "spnmod" | "feistel"
    std::vector<QWitness> q_witnesses;        // spnmod: one entry per q
    std::optional<BlockWitness> block_witness; // feistel: smallest imprimitive seed
    uint64_t seeds_total = 0;
    uint64_t seeds_examined = 0;
    uint64_t work_ops = 0;  // deterministic operation count
};

/// Decide primitivity of <translations, rho> by checking each of the n-1
/// coset partitions, the only candidate block systems, against rho.
/// Also records per q whether the subgroup image is the 0rho-translate.
PrimitivityReport spnmod_primitivity(const SpnModCipher& cipher);

struct FeistelSearchOptions {
    uint64_t op_budget = uint64_t{1} << 34;
    int threads = 0;  // 0 = use MIXAUDIT_THREADS or hardware default
};

/// Generic minimal-block-system search on the Feistel state space under the
/// translation generators and the swap map: for every nonzero w, close the
/// pair {0, w} under the generators and keep any nontrivial proper partition.
PrimitivityReport feistel_block_search(const FeistelGostCipher& cipher, const FeistelSearchOptions& opt = {});

struct AttackStats {
    int q = 0;
    int n = 0;
    int rounds = 0;
    uint64_t trials = 0;
    uint64_t confirmed = 0;
    double confirmation_rate = 0.0;
    int leaked_bits = 0;
    std::vector<uint64_t> block_permutation;  // composed label map of the first key vector
};

/// Track ciphertext cosets through multi-round encryptions with random round
/// keys: the block of the ciphertext is predicted from the block of the
/// plaintext and the key blocks alone, never from full decryption.
AttackStats attack_demo(const SpnModCipher& cipher, const CosetPartition& part, int rounds, uint64_t trials,
                        uint64_t seed);

const char* to_string(PrimitivityReport::Outcome o);
nlohmann::json to_json(const PrimitivityReport& r);
nlohmann::json to_json(const AttackStats& s);

/// Worker cap from MIXAUDIT_THREADS, defaulting to the hardware count.
int worker_count();

}  // namespace mixaudit
