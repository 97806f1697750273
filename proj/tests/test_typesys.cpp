#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mixaudit/errors.hpp"
#include "mixaudit/typesys.hpp"

using namespace mixaudit;

TEST_CASE("type of explicit sets") {
    TypeVector all_white = type_of_set({0}, 8, 2, 4);
    CHECK(all_white == TypeVector(4, BoxType::White));

    std::vector<uint64_t> full(256);
    for (int i = 0; i < 256; ++i) full[i] = i;
    CHECK(type_of_set(full, 8, 2, 4) == TypeVector(4, BoxType::Black));

    // multiples of 8 in Z_256: bits 0..2 zero, brick 2 = bits {2,3} sees two values
    TypeVector t = type_of_set(subgroup_elements(3, 8), 8, 2, 4);
    CHECK(t == TypeVector{BoxType::White, BoxType::Ruled, BoxType::Black, BoxType::Black});

    CHECK_THROWS_AS(type_of_set({}, 8, 2, 4), std::invalid_argument);
}

TEST_CASE("subgroup type formula") {
    CHECK(subgroup_type(0, 8, 2) == TypeTriple{0, 0, 4});
    CHECK(subgroup_type(8, 8, 2) == TypeTriple{4, 0, 0});
    CHECK(subgroup_type(3, 8, 2) == TypeTriple{1, 1, 2});
    CHECK(count_triple(type_of_set(subgroup_elements(3, 8), 8, 2, 4)) == TypeTriple{1, 1, 2});
}

TEST_CASE("subgroup type formula matches enumeration exhaustively") {
    for (int n : {8, 12}) {
        for (int m : {2, 4}) {
            for (int q = 0; q <= n; ++q) {
                TypeVector tv = type_of_set(subgroup_elements(q, n), n, m, n / m);
                CHECK(count_triple(tv) == subgroup_type(q, n, m));
                CHECK(is_canonical_order(tv));
            }
        }
    }
}

TEST_CASE("subgroup elements") {
    CHECK(subgroup_elements(4, 4) == std::vector<uint64_t>{0});
    CHECK(subgroup_elements(0, 2) == std::vector<uint64_t>{0, 1, 2, 3});
    CHECK(subgroup_elements(2, 4) == std::vector<uint64_t>{0, 4, 8, 12});
    CHECK_THROWS_AS(subgroup_elements(1, 30), GuardError);
}

TEST_CASE("boxplus") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        uint64_t a = rng() & 0xFFF;
        CHECK(boxplus(a, 0, 12) == a);
    }
    CHECK(boxplus(1, 1, 2) == 2);           // (1,0) + (1,0) = (0,1)
    CHECK(boxplus((1u << 8) - 1, 1, 8) == 0);  // all-ones wraps to zero
    CHECK_THROWS_AS(boxplus(4, 0, 2), std::invalid_argument);
}

TEST_CASE("translation") {
    CHECK(translate_set({0}, 9, 4) == std::vector<uint64_t>{9});
    std::vector<uint64_t> s{1, 5, 9};
    CHECK(translate_set(s, 0, 4) == s);

    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        int q = 1 + int(rng() % 11);
        uint64_t v = rng() & 0xFFF;
        std::vector<uint64_t> sub = subgroup_elements(q, 12);
        CHECK(type_of_set(translate_set(sub, v, 12), 12, 2, 6) == type_of_set(sub, 12, 2, 6));
    }
}

TEST_CASE("translation preserves subgroup types exhaustively at n=12") {
    for (int q = 1; q <= 11; ++q) {
        std::vector<uint64_t> sub = subgroup_elements(q, 12);
        TypeVector base = type_of_set(sub, 12, 3, 4);
        for (uint64_t v = 0; v < (1u << 12); ++v)
            if (type_of_set(translate_set(sub, v, 12), 12, 3, 4) != base) {
                CAPTURE(q);
                CAPTURE(v);
                FAIL("translate changed the type");
            }
    }
}

TEST_CASE("subgroup lattice is linearly ordered") {
    for (int q = 0; q < 12; ++q) {
        std::vector<uint64_t> larger = subgroup_elements(q, 12);
        std::vector<uint64_t> smaller = subgroup_elements(q + 1, 12);
        CHECK(std::includes(larger.begin(), larger.end(), smaller.begin(), smaller.end()));
    }
}

TEST_CASE("canonical set materialization") {
    CanonicalSet as_subgroup{12, 2, 6, {0, 0}, {}};
    CHECK(materialize(as_subgroup) == subgroup_elements(4, 12));

    CanonicalSet two{2, 2, 1, {}, {1, 2}};
    CHECK(materialize(two) == std::vector<uint64_t>{1, 2});

    CanonicalSet bad{4, 2, 2, {}, {0, 1, 2, 3}};
    CHECK_THROWS_AS(materialize(bad), std::invalid_argument);
    CanonicalSet too_big{24, 2, 12, {}, {}};
    CHECK_THROWS_AS(materialize(too_big), GuardError);
}

TEST_CASE("random canonical sets match their declared type") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        int m = 2 + int(rng() % 3);
        int delta = 2 + int(rng() % 3);
        int n = m * delta;
        if (n > 15) continue;
        CanonicalSet c;
        c.n = n;
        c.m = m;
        c.delta = delta;
        int n_w = int(rng() % delta);
        bool ruled = (n_w < delta) && (rng() & 1);
        for (int j = 0; j < n_w; ++j) c.white_values.push_back(uint32_t(rng()) & ((1u << m) - 1));
        if (ruled && n_w < delta) {
            int size = 2 + int(rng() % ((1 << m) - 3));
            std::vector<uint32_t> vals(size_t{1} << m);
            for (size_t i = 0; i < vals.size(); ++i) vals[i] = uint32_t(i);
            std::shuffle(vals.begin(), vals.end(), rng);
            vals.resize(size);
            std::sort(vals.begin(), vals.end());
            c.ruled_content = vals;
        }
        std::vector<uint64_t> elems = materialize(c);
        TypeVector tv = type_of_set(elems, n, m, delta);
        CHECK(tv == c.declared_type());
        CHECK(is_canonical_order(tv));
        CHECK(uint64_t(elems.size()) == c.cardinality());
    }
}

TEST_CASE("set fixture format") {
    std::vector<uint64_t> sub = subgroup_elements(2, 8);
    std::string text = format_set_text(sub, 8, 2, 4);
    std::istringstream in(text);
    ParsedSet parsed = parse_set_text(in);
    CHECK(parsed.n == 8);
    CHECK(parsed.m == 2);
    CHECK(parsed.delta == 4);
    CHECK(parsed.elements == sub);

    std::istringstream bad("8 2 3\n");
    CHECK_THROWS_AS(parse_set_text(bad), ParseError);
}
