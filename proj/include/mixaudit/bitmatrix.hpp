#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mixaudit {

/// A bit-vector over GF(2). Coordinate 0 is the least significant bit, so a
/// vector of length n <= 64 round-trips with the integer it encodes mod 2^n.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(int length);
    static BitVec from_u64(uint64_t value, int length);

    int length() const { return length_; }
    bool get(int i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(int i, bool v) {
        uint64_t mask = uint64_t{1} << (i & 63);
        if (v) words_[i >> 6] |= mask; else words_[i >> 6] &= ~mask;
    }

    uint64_t to_u64() const;  // requires length <= 64
    bool is_zero() const;
    int leading_bit() const;  // highest set coordinate, -1 if zero
    BitVec slice(int first, int count) const;

    BitVec& operator^=(const BitVec& other);
    friend BitVec operator^(BitVec a, const BitVec& b) { a ^= b; return a; }
    friend bool operator==(const BitVec&, const BitVec&) = default;
    friend bool operator<(const BitVec& a, const BitVec& b);

    std::string to_string() const;  // "0101..." coordinate 0 first

private:
    int length_ = 0;
    std::vector<uint64_t> words_;
    friend class BitMatrix;
};

/// Dense binary matrix with word-packed rows. Vectors act on the right
/// (w = v * M), so row i is the image of the i-th unit vector.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(int n_rows, int n_cols);
    static BitMatrix identity(int n);
    static BitMatrix from_permutation(const std::vector<int>& image_of_row);  // 1-based images
    static BitMatrix from_rows(const std::vector<BitVec>& rows);

    int n_rows() const { return n_rows_; }
    int n_cols() const { return n_cols_; }

    bool get(int r, int c) const { return (words_[size_t(r) * wpr_ + (c >> 6)] >> (c & 63)) & 1u; }
    void set(int r, int c, bool v) {
        uint64_t mask = uint64_t{1} << (c & 63);
        size_t idx = size_t(r) * wpr_ + (c >> 6);
        if (v) words_[idx] |= mask; else words_[idx] &= ~mask;
    }

    BitVec row(int r) const;
    bool is_zero() const;
    bool is_square() const { return n_rows_ == n_cols_; }

    /// v * M over GF(2); v indexes rows, the result indexes columns.
    BitVec apply(const BitVec& v) const;
    uint64_t apply_u64(uint64_t v) const;  // requires n_rows, n_cols <= 64

    BitMatrix multiply(const BitMatrix& rhs) const;
    BitMatrix transposed() const;

    int rank() const;
    bool is_invertible() const;
    /// Basis of the left kernel {v : v*M = 0}; empty when M has full row rank.
    std::vector<BitVec> left_kernel_basis() const;

    friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

private:
    int n_rows_ = 0, n_cols_ = 0;
    int wpr_ = 0;  // words per row
    std::vector<uint64_t> words_;

    void xor_row_into(int dst, int src);
};

/// Incremental row-space basis in echelon form, used for image/coset
/// computations. reduce() maps a vector to its canonical coset representative.
class Gf2Span {
public:
    explicit Gf2Span(int length) : length_(length) {}

    bool insert(BitVec v);         // returns true if the vector enlarged the span
    BitVec reduce(BitVec v) const; // canonical representative of v + span
    bool contains(const BitVec& v) const { return reduce(v).is_zero(); }
    int dim() const { return int(basis_.size()); }
    int length() const { return length_; }

private:
    int length_;
    std::vector<BitVec> basis_;  // kept with distinct leading bits, descending
};

/// A square BitMatrix seen as a delta x delta grid of m x m blocks.
/// Block row ranges select input bricks, block column ranges output bricks.
class BlockView {
public:
    BlockView(BitMatrix matrix, int m, int delta);

    const BitMatrix& matrix() const { return matrix_; }
    int m() const { return m_; }
    int delta() const { return delta_; }
    int n() const { return m_ * delta_; }

    /// The m(i2-i1+1) x m(j2-j1+1) submatrix of blocks (i1..i2) x (j1..j2), 1-based inclusive.
    BitMatrix submatrix(int i1, int j1, int i2, int j2) const;
    BitMatrix block(int i, int j) const { return submatrix(i, j, i, j); }

private:
    BitMatrix matrix_;
    int m_;
    int delta_;
};

// Matrix text format: header "n m delta", then n rows of n characters from
// {0,1}; '#' starts a comment line. Row i is the image row for right action.
BlockView parse_matrix_text(std::istream& in);
BlockView parse_matrix_file(const std::string& path);
std::string format_matrix_text(const BlockView& view);

}  // namespace mixaudit
