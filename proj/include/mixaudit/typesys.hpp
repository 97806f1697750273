#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mixaudit {

class BlockView;

// State vectors live in Z_{2^n} with bit 0 the least significant bit, so a
// plain integer below 2^n is the vector and boxplus is integer addition.

enum class BoxType : uint8_t { White, Ruled, Black };

char box_char(BoxType t);  // 'w', 'r', 'b'

using TypeVector = std::vector<BoxType>;

struct TypeTriple {
    int n_w = 0;
    int n_r = 0;
    int n_b = 0;
    friend bool operator==(const TypeTriple&, const TypeTriple&) = default;
};

std::string to_string(const TypeVector& t);
std::string to_string(const TypeTriple& t);

/// Box-wise classification of a set's brick projections.
TypeVector type_of_set(const std::vector<uint64_t>& S, int n, int m, int delta);

/// Counts of each box type, in any order of appearance.
TypeTriple count_triple(const TypeVector& t);

/// True iff all white boxes precede the ruled box (if any) which precedes all
/// black boxes -- the shape every subgroup and canonical set has.
bool is_canonical_order(const TypeVector& t);

/// Type triple of the subgroup <2^q> of Z_{2^n}, from its closed form.
TypeTriple subgroup_type(int q, int n, int m);

/// All 2^(n-q) elements of <2^q>, ascending. Guard: n <= 24.
std::vector<uint64_t> subgroup_elements(int q, int n);

uint64_t boxplus(uint64_t a, uint64_t b, int n);

std::vector<uint64_t> translate_set(const std::vector<uint64_t>& S, uint64_t v, int n);

/// A set in white|ruled|black product form: fixed values on the low white
/// bricks, an arbitrary proper subset on the single ruled brick (optional),
/// full boxes on the remaining black bricks.
struct CanonicalSet {
    int n = 0, m = 0, delta = 0;
    std::vector<uint32_t> white_values;   // one m-bit value per white brick
    std::vector<uint32_t> ruled_content;  // sorted; empty means no ruled brick

    int n_w() const { return int(white_values.size()); }
    int n_r() const { return ruled_content.empty() ? 0 : 1; }
    int n_b() const { return delta - n_w() - n_r(); }
    TypeTriple triple() const { return {n_w(), n_r(), n_b()}; }
    TypeVector declared_type() const;
    uint64_t cardinality() const;

    void validate() const;  // throws on malformed content
    friend bool operator==(const CanonicalSet&, const CanonicalSet&) = default;
};

/// Explicit sorted element list of a canonical set. Guard: n <= 20.
std::vector<uint64_t> materialize(const CanonicalSet& C);

// Set fixture format: header "n m delta", then one hex element per line.
std::string format_set_text(const std::vector<uint64_t>& S, int n, int m, int delta);
struct ParsedSet {
    int n, m, delta;
    std::vector<uint64_t> elements;
};
ParsedSet parse_set_text(std::istream& in);

}  // namespace mixaudit
