#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "mixaudit/classifier.hpp"
#include "mixaudit/errors.hpp"
#include "mixaudit/layers.hpp"
#include "mixaudit/typesys.hpp"

using namespace mixaudit;

namespace {

BlockView random_invertible_view(int m, int delta, std::mt19937_64& rng) {
    int n = m * delta;
    while (true) {
        BitMatrix mat(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) mat.set(r, c, rng() & 1);
        if (mat.is_invertible()) return BlockView(std::move(mat), m, delta);
    }
}

bool rotation_predicate_non_preserving(int m, int delta, int s) {
    return s >= m && s <= m * (delta - 1);
}

// Independent confirmation that a witness set keeps its type under the layer.
void check_witness(const BlockView& view, const CanonicalSet& w) {
    std::vector<uint64_t> d = materialize(w);
    std::vector<uint64_t> image;
    for (uint64_t v : d) image.push_back(view.matrix().apply_u64(v));
    CHECK(type_of_set(image, w.n, w.m, w.delta) == type_of_set(d, w.n, w.m, w.delta));
}

}  // namespace

TEST_CASE("check_eq2") {
    // block-diagonal: two invertible 2x2 blocks on the diagonal
    BitMatrix diag = BitMatrix::identity(6);
    diag.set(0, 1, true);
    diag.set(4, 5, true);
    BlockView diag_view(diag, 2, 3);
    for (int n_w = 1; n_w <= 2; ++n_w) CHECK(check_eq2(diag_view, n_w));

    CHECK_FALSE(check_eq2(builtin_layer("gost").view, 1));

    const BlockView id = identity_layer(2, 4).view;
    for (int n_w = 1; n_w <= 3; ++n_w) CHECK(check_eq2(id, n_w));

    CHECK_THROWS_AS(check_eq2(id, 0), std::invalid_argument);
    CHECK_THROWS_AS(check_eq2(id, 4), std::invalid_argument);
}

TEST_CASE("ruled conditions on rotations") {
    // in-range shifts: every ruled split is refuted (via (a), (b) or the
    // content search, depending on where the wrapped window lands)
    for (int s : {2, 3, 4, 5, 6}) {
        const BlockView rot = rotation_layer(8, 2, s).view;
        for (int n_w = 0; n_w <= 3; ++n_w) {
            ConditionReport r = check_ruled_conditions(rot, n_w);
            CAPTURE(s);
            CAPTURE(n_w);
            CHECK_FALSE(r.preserved);
            CHECK((r.a == Tri::False || r.b == Tri::False || r.c == Tri::False || r.d == Tri::False));
        }
    }

    // 0 < s < m: the top split satisfies the reduced pair and yields a witness
    ConditionReport top = check_ruled_conditions(rotation_layer(8, 2, 1).view, 3);
    CHECK(top.b == Tri::True);
    CHECK(top.c == Tri::True);
    CHECK(top.d == Tri::NotApplicable);
    CHECK(top.preserved);
    REQUIRE(top.witness.has_value());
    CHECK(top.witness_confirmed);

    // identity at the top split: corner block nonzero, white columns zero
    ConditionReport id_top = check_ruled_conditions(identity_layer(2, 4).view, 3);
    CHECK(id_top.b == Tri::True);
    CHECK(id_top.c == Tri::True);
    CHECK(id_top.preserved);
}

TEST_CASE("classify rotations against the closed-form law") {
    for (auto [m, delta] : {std::pair{2, 3}, std::pair{3, 3}}) {
        int n = m * delta;
        for (int s = 0; s < n; ++s) {
            Verdict v = classify(rotation_layer(n, m, s).view);
            bool expect_non = rotation_predicate_non_preserving(m, delta, s);
            CAPTURE(m);
            CAPTURE(delta);
            CAPTURE(s);
            CHECK((v.kind == Verdict::Kind::NonTypePreserving) == expect_non);
        }
    }
}

TEST_CASE("classify identity and degenerate shapes") {
    Verdict id = classify(identity_layer(2, 3).view);
    CHECK(id.kind == Verdict::Kind::TypePreserving);
    CHECK_FALSE(id.vacuous);

    Verdict tiny = classify(identity_layer(4, 1).view);
    CHECK(tiny.kind == Verdict::Kind::TypePreserving);
    CHECK(tiny.vacuous);

    CHECK_THROWS_AS(classify(BlockView(BitMatrix(4, 4), 2, 2)), PreconditionError);
}

TEST_CASE("classify witnesses are sound") {
    std::mt19937_64 rng(101);
    int preserved_seen = 0;
    for (int trial = 0; trial < 200; ++trial) {
        BlockView view = random_invertible_view(2, 3, rng);
        Verdict v = classify(view);
        for (const ConditionReport& r : v.evidence)
            if (r.preserved) {
                ++preserved_seen;
                REQUIRE(r.witness.has_value());
                check_witness(view, *r.witness);
            }
    }
    CHECK(preserved_seen > 0);  // the battery must exercise the witness path
}

TEST_CASE("fast path fires on gost and aes") {
    std::optional<Verdict> gost = fast_path(builtin_layer("gost").view);
    REQUIRE(gost.has_value());
    CHECK(gost->kind == Verdict::Kind::NonTypePreserving);
    CHECK(gost->fast_path_used);

    std::optional<Verdict> aes = fast_path(builtin_layer("aes").view);
    REQUIRE(aes.has_value());
    CHECK(aes->kind == Verdict::Kind::NonTypePreserving);

    // block-diagonal: zero sub-diagonal blocks, no verdict
    BitMatrix diag = BitMatrix::identity(6);
    CHECK_FALSE(fast_path(BlockView(diag, 2, 3)).has_value());
}

TEST_CASE("fast path stays silent on layers that fix the end positions") {
    // Both permutations fix positions 1 and n, so the parity subgroup <2> maps
    // to itself and the top split satisfies the reduced pair: no sound cheap
    // refutation exists, and the full classifier reports preservation.
    const BlockView present = builtin_layer("present").view;
    CHECK_FALSE(fast_path(present).has_value());

    const BlockView gpig2 = builtin_layer("gpig2").view;
    CHECK_FALSE(fast_path(gpig2).has_value());
}

TEST_CASE("present and gpig2 are type-preserving, with verified witnesses") {
    // gpig2 (n = 16) is small enough for full enumeration of the witness.
    Verdict gpig2 = classify(builtin_layer("gpig2").view);
    CHECK(gpig2.kind == Verdict::Kind::TypePreserving);
    CHECK(gpig2.interior_blocks_nonzero);  // the sub-diagonal shortcut hypothesis held anyway
    bool found_low = false;
    for (const ConditionReport& r : gpig2.evidence)
        if (r.preserved) {
            REQUIRE(r.witness.has_value());
            CHECK(r.witness_confirmed);
            check_witness(builtin_layer("gpig2").view, *r.witness);
            if (r.n_w == 0) found_low = true;
        }
    CHECK(found_low);

    // present (n = 64): the witness at n_w = 0 is the even/odd split; row 1
    // of the permutation matrix is e_1, so {v : bit0 = 0} maps to itself.
    const BlockView present = builtin_layer("present").view;
    CHECK(present.matrix().get(0, 0));
    Verdict pv = classify(present);
    CHECK(pv.kind == Verdict::Kind::TypePreserving);
    CHECK(pv.interior_blocks_nonzero);
    bool low = false, high = false;
    for (const ConditionReport& r : pv.evidence) {
        if (r.n_w == 0 && r.preserved) low = true;
        if (r.n_w == 15 && r.preserved) high = true;
    }
    CHECK(low);
    CHECK(high);  // position 64 is fixed too, so {0, 2^63} maps to itself
    CHECK(present.matrix().get(63, 63));
}

TEST_CASE("fast path consistency with the full classifier") {
    std::mt19937_64 rng(202);
    ClassifyOptions no_fast;
    no_fast.use_fast_path = false;
    int fired = 0;
    for (int trial = 0; trial < 150; ++trial) {
        BlockView view = random_invertible_view(2, trial % 2 ? 3 : 4, rng);
        std::optional<Verdict> quick = fast_path(view);
        if (!quick) continue;
        ++fired;
        CHECK(classify(view, no_fast).kind == quick->kind);
    }
    CHECK(fired > 0);
}

TEST_CASE("oracle finds witnesses for the identity") {
    const BlockView id = identity_layer(2, 3).view;
    for (TypeTriple t : {TypeTriple{1, 0, 2}, TypeTriple{0, 1, 2}, TypeTriple{1, 1, 1}, TypeTriple{2, 1, 0}}) {
        OracleResult r = oracle_preserved(id, t);
        CHECK(r.status == OracleResult::Status::FoundWitness);
    }
    // the trivial all-black triple is the full space
    OracleResult full = oracle_preserved(rotation_layer(6, 2, 3).view, TypeTriple{0, 0, 3});
    CHECK(full.status == OracleResult::Status::FoundWitness);
}

TEST_CASE("oracle refutes the in-range rotation") {
    OracleResult r = oracle_preserved(rotation_layer(6, 2, 2).view, TypeTriple{1, 0, 2});
    CHECK(r.status == OracleResult::Status::NoneExists);
}

TEST_CASE("oracle guards") {
    CHECK_THROWS_AS(oracle_preserved(builtin_layer("gost").view, TypeTriple{1, 0, 7}), GuardError);
    CHECK_THROWS_AS(oracle_preserved(identity_layer(2, 3).view, TypeTriple{1, 2, 0}), std::invalid_argument);
    OracleOptions tight;
    tight.element_budget = 1;
    OracleResult starved = oracle_preserved(identity_layer(2, 3).view, TypeTriple{0, 0, 3}, tight);
    CHECK(starved.status == OracleResult::Status::Undecided);
}

TEST_CASE("oracle agrees with classify on all small rotations") {
    for (int s = 0; s < 6; ++s) {
        const BlockView rot = rotation_layer(6, 2, s).view;
        Verdict structural = classify(rot);
        OracleVerdict oracle = oracle_classify(rot);
        bool s_tp = structural.kind == Verdict::Kind::TypePreserving;
        bool o_tp = oracle.kind == OracleVerdict::Kind::TypePreserving;
        CAPTURE(s);
        CHECK(oracle.kind != OracleVerdict::Kind::Undecided);
        CHECK(s_tp == o_tp);
        CHECK(s_tp == !rotation_predicate_non_preserving(2, 3, s));
    }
}

TEST_CASE("oracle agrees with classify on random views") {
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 20; ++trial) {
        BlockView view = random_invertible_view(2, 3, rng);
        Verdict structural = classify(view);
        OracleVerdict oracle = oracle_classify(view);
        CAPTURE(trial);
        CHECK(oracle.kind != OracleVerdict::Kind::Undecided);
        CHECK((structural.kind == Verdict::Kind::TypePreserving) ==
              (oracle.kind == OracleVerdict::Kind::TypePreserving));
    }
}

TEST_CASE("oracle agrees with classify on two-brick and wide-brick views") {
    std::mt19937_64 rng(606);
    for (auto [m, delta, trials] : {std::tuple{2, 2, 30}, std::tuple{3, 3, 10}}) {
        for (int trial = 0; trial < trials; ++trial) {
            BlockView view = random_invertible_view(m, delta, rng);
            Verdict structural = classify(view);
            OracleVerdict oracle = oracle_classify(view);
            CAPTURE(m);
            CAPTURE(trial);
            CHECK(oracle.kind != OracleVerdict::Kind::Undecided);
            CHECK((structural.kind == Verdict::Kind::TypePreserving) ==
                  (oracle.kind == OracleVerdict::Kind::TypePreserving));
        }
    }
}

TEST_CASE("oracle agrees with classify on random views at delta=4") {
    // delta = 4 exercises splits with several trailing bricks, where witnesses
    // of odd cardinality and per-brick coverage both come into play.
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 25; ++trial) {
        BlockView view = random_invertible_view(2, 4, rng);
        Verdict structural = classify(view);
        OracleVerdict oracle = oracle_classify(view);
        CAPTURE(trial);
        CHECK(oracle.kind != OracleVerdict::Kind::Undecided);
        CHECK((structural.kind == Verdict::Kind::TypePreserving) ==
              (oracle.kind == OracleVerdict::Kind::TypePreserving));
    }
}

TEST_CASE("block-triangular views are preserved through the zero-submatrix route") {
    std::mt19937_64 rng(505);
    for (int trial = 0; trial < 20; ++trial) {
        // [[A B],[0 D]] with invertible diagonal blocks, split after brick 2
        BlockView a = random_invertible_view(2, 2, rng);
        BlockView d = random_invertible_view(2, 2, rng);
        BitMatrix mat(8, 8);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                if (a.matrix().get(r, c)) mat.set(r, c, true);
                if (d.matrix().get(r, c)) mat.set(4 + r, 4 + c, true);
                mat.set(r, 4 + c, rng() & 1);
            }
        BlockView view(mat, 2, 4);
        Verdict v = classify(view);
        CHECK(v.kind == Verdict::Kind::TypePreserving);
        bool eq2_route = false;
        for (const ConditionReport& r : v.evidence)
            if (r.n_w == 2) eq2_route = r.eq2 == Tri::True && r.preserved;
        CHECK(eq2_route);
        CHECK(oracle_classify(view).kind == OracleVerdict::Kind::TypePreserving);
    }
}

TEST_CASE("oracle count-all reports how many sets are preserved") {
    OracleOptions opt;
    opt.count_all = true;
    OracleResult r = oracle_preserved(identity_layer(2, 2).view, TypeTriple{1, 0, 1}, opt);
    CHECK(r.status == OracleResult::Status::FoundWitness);
    CHECK(r.preserved_count == 4);  // one preserved set per white value
}

TEST_CASE("gpig2 oracle cross-check of the preserved split") {
    // Exhaustive confirmation at n = 16 that some canonical set of the ruled
    // top-split type survives the gpig2 permutation.
    OracleOptions opt;
    opt.element_budget = 2'000'000'000;
    OracleResult r = oracle_preserved(builtin_layer("gpig2").view, TypeTriple{0, 1, 3}, opt);
    REQUIRE(r.status == OracleResult::Status::FoundWitness);
    check_witness(builtin_layer("gpig2").view, *r.witness);
}

TEST_CASE("full classification works beyond enumeration scale") {
    // With the fast path disabled, the per-split analysis must still decide
    // the 32-bit and 128-bit layers from rank and coset algebra alone.
    ClassifyOptions no_fast;
    no_fast.use_fast_path = false;
    Verdict gost = classify(builtin_layer("gost").view, no_fast);
    CHECK(gost.kind == Verdict::Kind::NonTypePreserving);
    CHECK_FALSE(gost.fast_path_used);

    Verdict aes = classify(builtin_layer("aes").view, no_fast);
    CHECK(aes.kind == Verdict::Kind::NonTypePreserving);
    for (const ConditionReport& r : aes.evidence) CHECK_FALSE(r.preserved);
}

TEST_CASE("verdict json shape") {
    nlohmann::json j = to_json(classify(rotation_layer(6, 2, 2).view));
    CHECK(j["kind"] == "NonTypePreserving");
    CHECK(j.contains("fast_path_used"));
    CHECK(j["evidence"].is_array());
    for (const auto& e : j["evidence"]) {
        CHECK(e.contains("n_w"));
        CHECK(e.contains("eq2"));
        CHECK(e.contains("witness"));
    }
}
