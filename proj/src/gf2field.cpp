#include "mixaudit/gf2field.hpp"

#include <fstream>
#include <istream>
#include <sstream>

#include "mixaudit/errors.hpp"

namespace mixaudit {

namespace {

// Carryless product of two polynomials over GF(2), no reduction.
uint64_t clmul(uint64_t a, uint64_t b) {
    uint64_t acc = 0;
    while (b) {
        if (b & 1) acc ^= a;
        a <<= 1;
        b >>= 1;
    }
    return acc;
}

int poly_degree(uint64_t p) {
    int d = -1;
    while (p) { ++d; p >>= 1; }
    return d;
}

uint64_t poly_mod(uint64_t a, uint64_t mod) {
    int dm = poly_degree(mod);
    for (int d = poly_degree(a); d >= dm; d = poly_degree(a))
        a ^= mod << (d - dm);
    return a;
}

bool poly_irreducible(uint32_t p, int m) {
    if (poly_degree(p) != m) return false;
    if ((p & 1) == 0) return false;  // divisible by x
    // Trial division by every polynomial of degree 1..m/2.
    for (int d = 1; 2 * d <= m; ++d) {
        for (uint64_t q = (uint64_t{1} << d); q < (uint64_t{1} << (d + 1)); ++q) {
            if (poly_mod(p, q) == 0) return false;
        }
    }
    return true;
}

}  // namespace

GFField::GFField(int m, uint32_t modulus) : m_(m), modulus_(modulus) {
    if (m < 1 || m > 16) throw std::invalid_argument("GFField: extension degree must be in 1..16");
    if (!poly_irreducible(modulus, m))
        throw std::invalid_argument("GFField: modulus is not an irreducible polynomial of degree m");
}

uint32_t GFField::default_modulus(int m) {
    // Low-weight irreducible polynomials, one per degree.
    static const uint32_t table[] = {
        0,      0x3,    0x7,     0xB,     0x13,    0x25,    0x43,    0x83,
        0x11B,  0x203,  0x409,   0x805,   0x1009,  0x201B,  0x4021,  0x8003,
        0x1002B,
    };
    if (m < 1 || m > 16) throw std::invalid_argument("default_modulus: m out of range");
    return table[m];
}

uint32_t GFField::mul(uint32_t a, uint32_t b) const {
    return uint32_t(poly_mod(clmul(a, b), modulus_));
}

uint32_t GFField::inv(uint32_t a) const {
    if (a == 0) throw std::invalid_argument("GFField::inv: zero has no inverse");
    // a^(2^m - 2) by square and multiply.
    uint32_t result = 1, base = a;
    uint64_t e = (uint64_t{1} << m_) - 2;
    while (e) {
        if (e & 1) result = mul(result, base);
        base = mul(base, base);
        e >>= 1;
    }
    return result;
}

BitMatrix GFField::mul_matrix(uint32_t c) const {
    BitMatrix out(m_, m_);
    for (int k = 0; k < m_; ++k) {
        uint32_t image = mul(uint32_t{1} << k, c);
        for (int j = 0; j < m_; ++j)
            if ((image >> j) & 1) out.set(k, j, true);
    }
    return out;
}

GFMatrix::GFMatrix(GFField field, int n_rows, int n_cols)
    : field_(field), n_rows_(n_rows), n_cols_(n_cols), entries_(size_t(n_rows) * n_cols, 0) {
    if (n_rows < 1 || n_cols < 1) throw std::invalid_argument("GFMatrix: dimensions must be positive");
}

GFMatrix GFMatrix::identity(const GFField& field, int n) {
    GFMatrix m(field, n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
}

void GFMatrix::set(int r, int c, uint32_t v) {
    if (v >= field_.size()) throw std::invalid_argument("GFMatrix::set: entry not reduced modulo the field modulus");
    entries_[size_t(r) * n_cols_ + c] = v;
}

GFMatrix GFMatrix::multiply(const GFMatrix& rhs) const {
    if (n_cols_ != rhs.n_rows_ || !(field_ == rhs.field_))
        throw std::invalid_argument("GFMatrix::multiply: incompatible operands");
    GFMatrix out(field_, n_rows_, rhs.n_cols_);
    for (int r = 0; r < n_rows_; ++r)
        for (int c = 0; c < rhs.n_cols_; ++c) {
            uint32_t acc = 0;
            for (int k = 0; k < n_cols_; ++k) acc ^= field_.mul(get(r, k), rhs.get(k, c));
            out.set(r, c, acc);
        }
    return out;
}

GFMatrix GFMatrix::transposed() const {
    GFMatrix out(field_, n_cols_, n_rows_);
    for (int r = 0; r < n_rows_; ++r)
        for (int c = 0; c < n_cols_; ++c) out.set(c, r, get(r, c));
    return out;
}

uint32_t GFMatrix::determinant() const {
    if (n_rows_ != n_cols_) throw std::invalid_argument("determinant: matrix must be square");
    GFMatrix work = *this;
    uint32_t det = 1;
    int n = n_rows_;
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r)
            if (work.get(r, col) != 0) { pivot = r; break; }
        if (pivot < 0) return 0;
        if (pivot != col)
            for (int c = 0; c < n; ++c) {
                uint32_t t = work.get(col, c);
                work.set(col, c, work.get(pivot, c));
                work.set(pivot, c, t);
            }
        uint32_t p = work.get(col, col);
        det = field_.mul(det, p);
        uint32_t pinv = field_.inv(p);
        for (int r = col + 1; r < n; ++r) {
            uint32_t factor = field_.mul(work.get(r, col), pinv);
            if (factor == 0) continue;
            for (int c = col; c < n; ++c)
                work.set(r, c, work.get(r, c) ^ field_.mul(factor, work.get(col, c)));
        }
    }
    return det;
}

bool is_mds(const GFMatrix& M) {
    if (M.n_rows() != M.n_cols()) throw std::invalid_argument("is_mds: matrix must be square");
    int n = M.n_rows();
    if (n > 8) throw GuardError("is_mds: order > 8 not supported (minor enumeration is exponential)");

    // Enumerate all k-subsets of rows and columns for every order k.
    for (int k = 1; k <= n; ++k) {
        std::vector<int> rsel(k), csel(k);
        for (int i = 0; i < k; ++i) rsel[i] = i;
        while (true) {
            for (int i = 0; i < k; ++i) csel[i] = i;
            while (true) {
                GFMatrix minor(M.field(), k, k);
                for (int r = 0; r < k; ++r)
                    for (int c = 0; c < k; ++c) minor.set(r, c, M.get(rsel[r], csel[c]));
                if (minor.determinant() == 0) return false;
                int i = k - 1;
                while (i >= 0 && csel[i] == n - k + i) --i;
                if (i < 0) break;
                ++csel[i];
                for (int j = i + 1; j < k; ++j) csel[j] = csel[j - 1] + 1;
            }
            int i = k - 1;
            while (i >= 0 && rsel[i] == n - k + i) --i;
            if (i < 0) break;
            ++rsel[i];
            for (int j = i + 1; j < k; ++j) rsel[j] = rsel[j - 1] + 1;
        }
    }
    return true;
}

BlockView lift_gf_matrix(const GFMatrix& M) {
    if (M.n_rows() != M.n_cols()) throw std::invalid_argument("lift_gf_matrix: matrix must be square");
    int delta = M.n_rows();
    int m = M.field().m();
    BitMatrix out(m * delta, m * delta);
    for (int i = 0; i < delta; ++i)
        for (int j = 0; j < delta; ++j) {
            BitMatrix block = M.field().mul_matrix(M.get(i, j));
            for (int r = 0; r < m; ++r)
                for (int c = 0; c < m; ++c)
                    if (block.get(r, c)) out.set(i * m + r, j * m + c, true);
        }
    return BlockView(std::move(out), m, delta);
}

GFMatrix parse_gf_matrix_text(std::istream& in) {
    std::string line;
    int lineno = 0;
    auto next_line = [&](std::string& out) -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            size_t first = line.find_first_not_of(" \t");
            if (first == std::string::npos) continue;
            if (line[first] == '#') continue;
            out = line;
            return true;
        }
        return false;
    };

    std::string header;
    if (!next_line(header)) throw ParseError("empty GF-matrix file: expected header \"delta m modulus_hex\"", lineno);
    std::istringstream hs(header);
    int delta = 0, m = 0;
    std::string modhex;
    if (!(hs >> delta >> m >> modhex)) throw ParseError("malformed header, expected \"delta m modulus_hex\"", lineno);
    uint32_t modulus = 0;
    try {
        modulus = uint32_t(std::stoul(modhex, nullptr, 16));
    } catch (const std::exception&) {
        throw ParseError("modulus is not a hex integer", lineno);
    }
    GFField field(m, modulus);
    GFMatrix mat(field, delta, delta);
    for (int r = 0; r < delta; ++r) {
        std::string rowstr;
        if (!next_line(rowstr)) throw ParseError("expected " + std::to_string(delta) + " entry rows", lineno);
        std::istringstream rs(rowstr);
        for (int c = 0; c < delta; ++c) {
            std::string tok;
            if (!(rs >> tok)) throw ParseError("row has fewer than delta entries", lineno);
            unsigned long v = 0;
            try {
                v = std::stoul(tok, nullptr, 16);
            } catch (const std::exception&) {
                throw ParseError("entry is not a hex integer", lineno);
            }
            if (v >= field.size()) throw ParseError("entry not reduced modulo the field modulus", lineno);
            mat.set(r, c, uint32_t(v));
        }
        std::string tok;
        if (rs >> tok) throw ParseError("row has more than delta entries", lineno);
    }
    return mat;
}

GFMatrix parse_gf_matrix_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open GF-matrix file: " + path);
    return parse_gf_matrix_text(f);
}

std::string format_gf_matrix_text(const GFMatrix& M) {
    std::ostringstream out;
    out << M.n_rows() << ' ' << M.field().m() << ' ' << std::hex << M.field().modulus() << '\n';
    for (int r = 0; r < M.n_rows(); ++r) {
        for (int c = 0; c < M.n_cols(); ++c) out << (c ? " " : "") << std::hex << M.get(r, c);
        out << '\n';
    }
    return out.str();
}

}  // namespace mixaudit
