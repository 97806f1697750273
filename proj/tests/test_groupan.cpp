#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "mixaudit/errors.hpp"
#include "mixaudit/groupan.hpp"
#include "mixaudit/layers.hpp"
#include "mixaudit/typesys.hpp"

using namespace mixaudit;

namespace {

std::vector<uint32_t> table_of(int n, auto&& fn) {
    std::vector<uint32_t> t(size_t{1} << n);
    for (uint64_t v = 0; v < t.size(); ++v) t[v] = uint32_t(fn(v));
    return t;
}

}  // namespace

TEST_CASE("coset partitions") {
    CosetPartition p = coset_partition(1, 2);
    CHECK(p.num_blocks() == 2);
    CHECK(p.block_elements(0) == std::vector<uint64_t>{0, 2});
    CHECK(p.block_elements(1) == std::vector<uint64_t>{1, 3});

    CosetPartition q3 = coset_partition(3, 10);
    CHECK(q3.block_elements(0) == subgroup_elements(3, 10));
    CHECK(q3.num_blocks() == 8);
    CHECK(q3.block_of(13) == 5);

    CHECK_THROWS_AS(coset_partition(0, 8), std::invalid_argument);
    CHECK_THROWS_AS(coset_partition(8, 8), std::invalid_argument);
}

TEST_CASE("partition invariance") {
    CosetPartition p = coset_partition(2, 8);
    CHECK(partition_invariant_under(table_of(8, [](uint64_t v) { return v; }), p));

    std::mt19937_64 rng(3);
    for (int i = 0; i < 10; ++i) {
        uint64_t k = rng() & 0xFF;
        CHECK(partition_invariant_under(table_of(8, [&](uint64_t v) { return boxplus(v, k, 8); }), p));
    }

    // any parallel gamma respects the partition when q is a brick boundary
    SBoxSet g = random_sbox_set(2, 4, 17, true);
    CHECK(partition_invariant_under(table_of(8, [&](uint64_t v) { return g.apply(v); }), p));
}

TEST_CASE("spnmod primitivity under a non-preserving rotation") {
    for (uint64_t seed : {1, 2, 3, 4}) {
        SpnModCipher cipher(random_sbox_set(2, 4, seed, true), rotation_layer(8, 2, 2).view);
        PrimitivityReport r = spnmod_primitivity(cipher);
        CHECK(r.verdict == PrimitivityReport::Outcome::Primitive);
        CHECK(r.q_witnesses.size() == 7);
        for (const QWitness& w : r.q_witnesses) CHECK_FALSE(w.invariant);
    }
}

TEST_CASE("identity layer yields imprimitivity at brick boundaries") {
    SpnModCipher cipher(random_sbox_set(2, 4, 5, true), identity_layer(2, 4).view);
    PrimitivityReport r = spnmod_primitivity(cipher);
    CHECK(r.verdict == PrimitivityReport::Outcome::Imprimitive);
    for (const QWitness& w : r.q_witnesses) {
        if (w.q % 2 == 0) CHECK(w.invariant);
        if (w.invariant) CHECK(w.theorem_condition);
    }
}

TEST_CASE("identity round fixes every partition") {
    SpnModCipher cipher(identity_sboxes(2, 4), identity_layer(2, 4).view);
    PrimitivityReport r = spnmod_primitivity(cipher);
    CHECK(r.verdict == PrimitivityReport::Outcome::Imprimitive);
    for (const QWitness& w : r.q_witnesses) {
        CHECK(w.invariant);
        CHECK(w.theorem_condition);
    }
}

TEST_CASE("feistel of the identity has a block system") {
    FeistelGostCipher cipher(identity_sboxes(3, 1), identity_layer(3, 1).view);
    PrimitivityReport r = feistel_block_search(cipher);
    CHECK(r.verdict == PrimitivityReport::Outcome::Imprimitive);
    REQUIRE(r.block_witness.has_value());
    CHECK(r.block_witness->num_blocks > 1);
    CHECK(r.block_witness->block_size > 1);
    CHECK(r.block_witness->num_blocks * r.block_witness->block_size <= 64);
}

TEST_CASE("feistel with a non-preserving half rotation is primitive") {
    FeistelGostCipher cipher(random_sbox_set(2, 2, 21, true), rotation_layer(4, 2, 2).view);
    PrimitivityReport r = feistel_block_search(cipher);
    CHECK(r.verdict == PrimitivityReport::Outcome::Primitive);
    CHECK(r.seeds_examined == r.seeds_total);
    CHECK(r.seeds_total == 255);
}

TEST_CASE("feistel search respects the budget") {
    FeistelGostCipher cipher(random_sbox_set(2, 2, 22, true), rotation_layer(4, 2, 2).view);
    FeistelSearchOptions opt;
    opt.op_budget = 4;
    opt.threads = 1;
    PrimitivityReport r = feistel_block_search(cipher, opt);
    CHECK(r.verdict == PrimitivityReport::Outcome::Undecided);
    CHECK(r.seeds_examined < r.seeds_total);
}

TEST_CASE("attack confirms coset tracking on an imprimitive cipher") {
    SpnModCipher cipher(random_sbox_set(2, 4, 7, true), identity_layer(2, 4).view);
    AttackStats stats = attack_demo(cipher, coset_partition(2, 8), 3, 1000, 99);
    CHECK(stats.confirmed == 1000);
    CHECK(stats.confirmation_rate == 1.0);
    CHECK(stats.leaked_bits == 2);
    CHECK(stats.block_permutation.size() == 4);

    AttackStats deeper = attack_demo(cipher, coset_partition(4, 8), 5, 500, 100);
    CHECK(deeper.confirmation_rate == 1.0);
    CHECK(deeper.leaked_bits == 4);
}

TEST_CASE("attack rejects a primitive cipher") {
    SpnModCipher cipher(random_sbox_set(2, 4, 8, true), rotation_layer(8, 2, 2).view);
    CHECK_THROWS_AS(attack_demo(cipher, coset_partition(2, 8), 3, 100, 1), PreconditionError);
}

TEST_CASE("attack validates its inputs") {
    SpnModCipher cipher(random_sbox_set(2, 4, 7, true), identity_layer(2, 4).view);
    CHECK_THROWS_AS(attack_demo(cipher, coset_partition(2, 8), 3, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(attack_demo(cipher, coset_partition(2, 8), 0, 10, 1), std::invalid_argument);
}

TEST_CASE("a gpig2-layer cipher with a parity-swapping s-box is imprimitive") {
    // The gpig2 permutation fixes bit 0, so with brick S-boxes x -> x+1 the
    // even/odd cosets swap under the keyless round and survive key addition.
    // This is a live trapdoor behind a layer whose sub-diagonal blocks are
    // all nonzero; it exists precisely because the layer preserves the
    // parity split's type (see the classifier tests).
    std::vector<uint16_t> plus_one(16);
    for (int i = 0; i < 16; ++i) plus_one[i] = uint16_t((i + 1) % 16);
    SBoxSet gamma{4, 4, std::vector<std::vector<uint16_t>>(4, plus_one)};
    gamma.validate();
    CHECK(gamma.zero_not_fixed());

    SpnModCipher cipher(gamma, builtin_layer("gpig2").view);
    PrimitivityReport r = spnmod_primitivity(cipher);
    CHECK(r.verdict == PrimitivityReport::Outcome::Imprimitive);
    REQUIRE(r.q_witnesses[0].q == 1);
    CHECK(r.q_witnesses[0].invariant);
    CHECK(r.q_witnesses[0].theorem_condition);

    AttackStats stats = attack_demo(cipher, coset_partition(1, 16), 4, 500, 5);
    CHECK(stats.confirmation_rate == 1.0);
    CHECK(stats.leaked_bits == 1);
}

TEST_CASE("s-box images of subgroups keep the subgroup type") {
    SBoxSet g = random_sbox_set(3, 4, 31, true);
    for (int q = 0; q <= 12; ++q) {
        std::vector<uint64_t> sub = subgroup_elements(q, 12);
        std::vector<uint64_t> image;
        for (uint64_t v : sub) image.push_back(g.apply(v));
        std::sort(image.begin(), image.end());
        CHECK(count_triple(type_of_set(image, 12, 3, 4)) == subgroup_type(q, 12, 3));
    }
}

TEST_CASE("report json") {
    SpnModCipher cipher(random_sbox_set(2, 4, 5, true), identity_layer(2, 4).view);
    nlohmann::json j = to_json(spnmod_primitivity(cipher));
    CHECK(j["verdict"] == "Imprimitive");
    CHECK(j["per_q"].is_array());
    CHECK(j["per_q"].size() == 7);

    nlohmann::json a = to_json(attack_demo(cipher, coset_partition(2, 8), 3, 10, 1));
    CHECK(a["leaked_bits"] == 2);
    CHECK(a["confirmation_rate"] == 1.0);
}
