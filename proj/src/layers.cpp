#include "mixaudit/layers.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "mixaudit/errors.hpp"

namespace mixaudit {

namespace {

LayerDescriptor make_descriptor(std::string name, int m, int delta, std::string provenance, BitMatrix matrix) {
    BlockView view(std::move(matrix), m, delta);
    if (!view.matrix().is_invertible())
        throw std::logic_error("layer constructor produced a singular matrix: " + name);
    return LayerDescriptor{std::move(name), m * delta, m, delta, std::move(provenance), std::move(view)};
}

}  // namespace

LayerDescriptor identity_layer(int m, int delta) {
    if (m < 1 || delta < 1) throw std::invalid_argument("identity_layer: m and delta must be positive");
    return make_descriptor("identity", m, delta, "identity map", BitMatrix::identity(m * delta));
}

LayerDescriptor rotation_layer(int n, int m, int s) {
    if (m < 1 || n % m != 0) throw std::invalid_argument("rotation_layer: m must divide n");
    if (s < 0 || s >= n) throw std::invalid_argument("rotation_layer: shift must be in 0..n-1");
    std::vector<int> image(n);
    for (int x = 1; x <= n; ++x) image[x - 1] = (x + s - 1) % n + 1;
    BitMatrix mat = BitMatrix::from_permutation(image);

    // The row-built matrix must equal the block form [[0, I_{n-s}], [I_s, 0]].
    BitMatrix block_form(n, n);
    for (int i = 0; i < n - s; ++i) block_form.set(i, s + i, true);
    for (int i = 0; i < s; ++i) block_form.set(n - s + i, i, true);
    if (!(mat == block_form)) throw std::logic_error("rotation_layer: block form mismatch");

    std::ostringstream name;
    name << "rot:" << n << ':' << m << ':' << s;
    return make_descriptor(name.str(), m, n / m, "bit rotation by " + std::to_string(s), std::move(mat));
}

LayerDescriptor present_layer() {
    static const int table[64] = {
        1, 17, 33, 49, 2, 18, 34, 50, 3, 19, 35, 51, 4, 20, 36, 52,
        5, 21, 37, 53, 6, 22, 38, 54, 7, 23, 39, 55, 8, 24, 40, 56,
        9, 25, 41, 57, 10, 26, 42, 58, 11, 27, 43, 59, 12, 28, 44, 60,
        13, 29, 45, 61, 14, 30, 46, 62, 15, 31, 47, 63, 16, 32, 48, 64,
    };
    std::vector<int> image(table, table + 64);
    for (int i = 1; i <= 64; ++i) {
        int expected = i == 64 ? 64 : (16 * (i - 1)) % 63 + 1;
        if (image[i - 1] != expected) throw std::logic_error("present_layer: table disagrees with formula");
    }
    return make_descriptor("present", 4, 16, "PRESENT bit permutation (pLayer)",
                           BitMatrix::from_permutation(image));
}

LayerDescriptor gpig2_layer() {
    // Literal 16x16 table of the GPig2 bit-slice permutation.
    static const int table[16] = {1, 5, 9, 13, 2, 6, 10, 14, 3, 7, 11, 15, 4, 8, 12, 16};
    std::vector<int> image(table, table + 16);
    return make_descriptor("gpig2", 4, 4, "GPig2 mixing permutation", BitMatrix::from_permutation(image));
}

LayerDescriptor aes_like_layer(int t, int m, const GFMatrix& M) {
    if (t < 2 || t % 2 != 0) throw std::invalid_argument("aes_like_layer: t must be a positive even integer");
    int w = 1 << (t / 2);
    int delta = 1 << t;
    if (M.n_rows() != w || M.n_cols() != w)
        throw std::invalid_argument("aes_like_layer: M must have order 2^(t/2)");
    if (M.field().m() != m) throw std::invalid_argument("aes_like_layer: field degree must equal m");
    if (!is_mds(M)) throw std::invalid_argument("aes_like_layer: M must be MDS");

    // Right-action field matrix: big block (I,J) is row k of M^T placed at
    // row k, with k = ((I-J) mod w) + 1. Entry (i,j) with i=(I-1)w+a,
    // j=(J-1)w+b is M[b][a] when a == k, else zero.
    GFMatrix field_matrix(M.field(), delta, delta);
    for (int bi = 0; bi < w; ++bi)
        for (int bj = 0; bj < w; ++bj) {
            int k = ((bi - bj) % w + w) % w;  // 0-based selector
            for (int b = 0; b < w; ++b) field_matrix.set(bi * w + k, bj * w + b, M.get(b, k));
        }

    BlockView lifted = lift_gf_matrix(field_matrix);
    std::ostringstream prov;
    prov << "brick-shift x MDS mix, transposed for right action; modulus 0x" << std::hex << M.field().modulus();
    std::ostringstream name;
    name << "aeslike:" << t << ':' << m;
    LayerDescriptor d = make_descriptor(name.str(), m, delta, prov.str(), lifted.matrix());
    return d;
}

LayerDescriptor aes_layer() {
    GFField field(8, 0x11B);
    GFMatrix M(field, 4, 4);
    static const uint32_t circ[4][4] = {{2, 3, 1, 1}, {1, 2, 3, 1}, {1, 1, 2, 3}, {3, 1, 1, 2}};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) M.set(r, c, circ[r][c]);
    LayerDescriptor d = aes_like_layer(4, 8, M);
    d.name = "aes";
    d.provenance = "AES MixColumns * ShiftRows, transposed for right action; modulus 0x11b";
    return d;
}

GFMatrix random_mds(int order, const GFField& field, uint64_t seed) {
    if (order < 1 || order > 6) throw std::invalid_argument("random_mds: order must be in 1..6");
    std::mt19937_64 rng(seed);

    if (field.size() >= uint32_t(2 * order)) {
        // Cauchy matrix 1/(x_i + y_j) from 2*order distinct field elements.
        std::vector<uint32_t> elems(field.size());
        for (uint32_t i = 0; i < field.size(); ++i) elems[i] = i;
        std::shuffle(elems.begin(), elems.end(), rng);
        GFMatrix M(field, order, order);
        for (int i = 0; i < order; ++i)
            for (int j = 0; j < order; ++j) M.set(i, j, field.inv(elems[i] ^ elems[order + j]));
        if (!is_mds(M)) throw std::logic_error("random_mds: Cauchy matrix failed the minor check");
        return M;
    }

    // Field too small for Cauchy (e.g. order 3 over F_4); fall back to seeded
    // rejection sampling over all-nonzero matrices.
    if (field.size() == 2 && order >= 2)
        throw std::invalid_argument("random_mds: no MDS matrix of this order exists over F_2");
    std::uniform_int_distribution<uint32_t> nonzero(1, field.size() - 1);
    GFMatrix M(field, order, order);
    for (int attempt = 0; attempt < 500000; ++attempt) {
        for (int i = 0; i < order; ++i)
            for (int j = 0; j < order; ++j) M.set(i, j, nonzero(rng));
        if (is_mds(M)) return M;
    }
    throw std::invalid_argument("random_mds: no MDS matrix found for this order and field");
}

LayerDescriptor builtin_layer(const std::string& name, std::optional<int> m, std::optional<int> delta) {
    std::vector<std::string> parts;
    std::string token;
    std::istringstream ss(name);
    while (std::getline(ss, token, ':')) parts.push_back(token);
    if (parts.empty()) throw ParseError("empty layer name");

    auto want_int = [&](size_t i, const char* what) {
        if (i >= parts.size()) throw ParseError(std::string("layer name missing field: ") + what);
        try {
            return std::stoi(parts[i]);
        } catch (const std::exception&) {
            throw ParseError(std::string("layer name field is not an integer: ") + what);
        }
    };

    const std::string& kind = parts[0];
    if (kind == "identity") {
        if (!m || !delta) throw ParseError("identity layer needs m and delta (use --m/--delta)");
        return identity_layer(*m, *delta);
    }
    if (kind == "rot") {
        int n = want_int(1, "n"), mm = want_int(2, "m"), s = want_int(3, "s");
        return rotation_layer(n, mm, s);
    }
    if (kind == "gost") {
        LayerDescriptor d = rotation_layer(32, 4, 11);
        d.name = "gost";
        d.provenance = "GOST 28147-89 rotation by 11";
        return d;
    }
    if (kind == "present") return present_layer();
    if (kind == "gpig2") return gpig2_layer();
    if (kind == "aes") return aes_layer();
    if (kind == "aeslike") {
        int t = want_int(1, "t"), mm = want_int(2, "m");
        uint64_t seed = 1;
        if (parts.size() > 3) {
            try {
                seed = std::stoull(parts[3]);
            } catch (const std::exception&) {
                throw ParseError("layer name field is not an integer: seed");
            }
        }
        GFField field(mm, GFField::default_modulus(mm));
        int order = 1 << (t / 2);
        LayerDescriptor d = aes_like_layer(t, mm, random_mds(order, field, seed));
        d.name = name;
        return d;
    }
    throw ParseError("unknown builtin layer: " + name);
}

std::vector<std::pair<std::string, std::string>> builtin_layer_catalog() {
    return {
        {"identity", "identity map; pass --m and --delta"},
        {"rot:<n>:<m>:<s>", "bit rotation by s on n bits, bricks of m"},
        {"gost", "32-bit GOST rotation (rot:32:4:11)"},
        {"present", "64-bit PRESENT bit permutation, m=4"},
        {"gpig2", "16-bit GPig2 permutation, m=4"},
        {"aes", "128-bit AES mixing layer, m=8"},
        {"aeslike:<t>:<m>:<seed>", "AES-style layer from a seeded Cauchy MDS matrix"},
    };
}

}  // namespace mixaudit
