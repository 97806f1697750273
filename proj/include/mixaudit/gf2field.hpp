#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mixaudit/bitmatrix.hpp"

namespace mixaudit {

/// F_{2^m} in polynomial basis. The modulus bitmask includes the leading
/// term, e.g. 0x11B for x^8+x^4+x^3+x+1. Irreducibility is verified at
/// construction (m <= 16).
class GFField {
public:
    GFField(int m, uint32_t modulus);

    int m() const { return m_; }
    uint32_t modulus() const { return modulus_; }
    uint32_t size() const { return uint32_t{1} << m_; }

    uint32_t mul(uint32_t a, uint32_t b) const;
    uint32_t inv(uint32_t a) const;  // a != 0

    /// Right-action multiplication-by-c matrix: row k = coefficients of x^k * c.
    BitMatrix mul_matrix(uint32_t c) const;

    /// Default modulus for each supported m (AES polynomial for m = 8).
    static uint32_t default_modulus(int m);

    friend bool operator==(const GFField&, const GFField&) = default;

private:
    int m_;
    uint32_t modulus_;
};

class GFMatrix {
public:
    GFMatrix(GFField field, int n_rows, int n_cols);
    static GFMatrix identity(const GFField& field, int n);

    const GFField& field() const { return field_; }
    int n_rows() const { return n_rows_; }
    int n_cols() const { return n_cols_; }

    uint32_t get(int r, int c) const { return entries_[size_t(r) * n_cols_ + c]; }
    void set(int r, int c, uint32_t v);

    GFMatrix multiply(const GFMatrix& rhs) const;
    GFMatrix transposed() const;
    uint32_t determinant() const;  // square only

    friend bool operator==(const GFMatrix&, const GFMatrix&) = default;

private:
    GFField field_;
    int n_rows_, n_cols_;
    std::vector<uint32_t> entries_;
};

/// True iff every minor of every order is nonzero. Square matrices of order
/// <= 8 only; the minor count grows as sum C(n,k)^2.
bool is_mds(const GFMatrix& M);

/// Replace each field entry by its m x m multiplication matrix so that the
/// binary right action agrees with the field-level right action.
BlockView lift_gf_matrix(const GFMatrix& M);

// GF-matrix text format: header "delta m modulus_hex", then delta lines of
// delta hex entries. '#' starts a comment line.
GFMatrix parse_gf_matrix_text(std::istream& in);
GFMatrix parse_gf_matrix_file(const std::string& path);
std::string format_gf_matrix_text(const GFMatrix& M);

}  // namespace mixaudit
