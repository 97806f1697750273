#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixaudit/bitmatrix.hpp"
#include "mixaudit/gf2field.hpp"

namespace mixaudit {

struct LayerDescriptor {
    std::string name;
    int n = 0, m = 0, delta = 0;
    std::string provenance;
    BlockView view;
};

/// Identity layer on n = m*delta bits.
LayerDescriptor identity_layer(int m, int delta);

/// Circulant permutation matrix of the rotation x -> x+s mod n (1-based
/// positions); block form [[0, I_{n-s}], [I_s, 0]].
LayerDescriptor rotation_layer(int n, int m, int s);

/// The 64-bit bit permutation of PRESENT (m = 4, delta = 16), stored as a
/// literal table and asserted against its generating formula.
LayerDescriptor present_layer();

/// The 16-bit GPig2 bit-slice permutation (m = 4, delta = 4), literal table.
LayerDescriptor gpig2_layer();

/// AES-style layer on delta = 2^t bricks of m bits: the transpose product of
/// the brick shift and the block-diagonal MDS mix, lifted to a binary matrix.
/// M must be an MDS matrix of order 2^(t/2) over F_{2^m}.
LayerDescriptor aes_like_layer(int t, int m, const GFMatrix& M);

/// The 128-bit AES mixing layer (t = 4, m = 8, the classic circulant).
LayerDescriptor aes_layer();

/// Seeded MDS matrix of the given order via the Cauchy construction;
/// verified with is_mds before returning. Requires field size > 2*order.
GFMatrix random_mds(int order, const GFField& field, uint64_t seed);

/// Parse a builtin layer name: identity (needs m, delta), rot:<n>:<m>:<s>,
/// gost, present, gpig2, aes, aeslike:<t>:<m>:<seed>.
LayerDescriptor builtin_layer(const std::string& name, std::optional<int> m = {}, std::optional<int> delta = {});

/// Names and one-line descriptions for `layers list`.
std::vector<std::pair<std::string, std::string>> builtin_layer_catalog();

}  // namespace mixaudit
