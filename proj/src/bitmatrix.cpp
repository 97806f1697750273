#include "mixaudit/bitmatrix.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <sstream>

#include "mixaudit/errors.hpp"

namespace mixaudit {

namespace {
int words_for(int bits) { return (bits + 63) >> 6; }
}  // namespace

BitVec::BitVec(int length) : length_(length), words_(words_for(length), 0) {}

BitVec BitVec::from_u64(uint64_t value, int length) {
    if (length < 64 && length >= 0 && (value >> length) != 0)
        throw std::invalid_argument("BitVec::from_u64: value does not fit in length");
    BitVec v(length);
    if (length > 0) v.words_[0] = value;
    return v;
}

uint64_t BitVec::to_u64() const {
    if (length_ > 64) throw std::invalid_argument("BitVec::to_u64: length > 64");
    return words_.empty() ? 0 : words_[0];
}

bool BitVec::is_zero() const {
    for (uint64_t w : words_)
        if (w) return false;
    return true;
}

int BitVec::leading_bit() const {
    for (int wi = int(words_.size()) - 1; wi >= 0; --wi)
        if (words_[wi]) return wi * 64 + 63 - std::countl_zero(words_[wi]);
    return -1;
}

BitVec BitVec::slice(int first, int count) const {
    BitVec out(count);
    for (int i = 0; i < count; ++i) out.set(i, get(first + i));
    return out;
}

BitVec& BitVec::operator^=(const BitVec& other) {
    if (length_ != other.length_) throw std::invalid_argument("BitVec xor: length mismatch");
    for (size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
    return *this;
}

bool operator<(const BitVec& a, const BitVec& b) {
    if (a.length_ != b.length_) return a.length_ < b.length_;
    for (int i = int(a.words_.size()) - 1; i >= 0; --i)
        if (a.words_[i] != b.words_[i]) return a.words_[i] < b.words_[i];
    return false;
}

std::string BitVec::to_string() const {
    std::string s(length_, '0');
    for (int i = 0; i < length_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

BitMatrix::BitMatrix(int n_rows, int n_cols)
    : n_rows_(n_rows), n_cols_(n_cols), wpr_(words_for(n_cols)),
      words_(size_t(n_rows) * size_t(words_for(n_cols)), 0) {
    if (n_rows < 0 || n_cols < 0) throw std::invalid_argument("BitMatrix: negative dimension");
}

BitMatrix BitMatrix::identity(int n) {
    BitMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

BitMatrix BitMatrix::from_permutation(const std::vector<int>& image_of_row) {
    int n = int(image_of_row.size());
    BitMatrix m(n, n);
    std::vector<bool> seen(n + 1, false);
    for (int r = 0; r < n; ++r) {
        int c = image_of_row[r];
        if (c < 1 || c > n || seen[c]) throw std::invalid_argument("from_permutation: not a permutation of 1..n");
        seen[c] = true;
        m.set(r, c - 1, true);
    }
    return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<BitVec>& rows) {
    if (rows.empty()) return BitMatrix(0, 0);
    BitMatrix m(int(rows.size()), rows[0].length());
    for (size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].length() != rows[0].length())
            throw std::invalid_argument("from_rows: ragged rows");
        for (int c = 0; c < rows[r].length(); ++c)
            if (rows[r].get(c)) m.set(int(r), c, true);
    }
    return m;
}

BitVec BitMatrix::row(int r) const {
    BitVec v(n_cols_);
    std::copy(words_.begin() + size_t(r) * wpr_, words_.begin() + size_t(r + 1) * wpr_, v.words_.begin());
    return v;
}

bool BitMatrix::is_zero() const {
    for (uint64_t w : words_)
        if (w) return false;
    return true;
}

BitVec BitMatrix::apply(const BitVec& v) const {
    if (v.length() != n_rows_) throw std::invalid_argument("apply: vector length must equal row count");
    BitVec out(n_cols_);
    for (int r = 0; r < n_rows_; ++r)
        if (v.get(r))
            for (int w = 0; w < wpr_; ++w) out.words_[w] ^= words_[size_t(r) * wpr_ + w];
    return out;
}

uint64_t BitMatrix::apply_u64(uint64_t v) const {
    if (n_rows_ > 64 || n_cols_ > 64) throw std::invalid_argument("apply_u64: matrix too large");
    if (n_rows_ < 64 && (v >> n_rows_) != 0) throw std::invalid_argument("apply_u64: value out of range");
    uint64_t out = 0;
    uint64_t rest = v;
    while (rest) {
        int r = std::countr_zero(rest);
        rest &= rest - 1;
        out ^= words_[size_t(r) * wpr_];
    }
    return out;
}

void BitMatrix::xor_row_into(int dst, int src) {
    for (int w = 0; w < wpr_; ++w) words_[size_t(dst) * wpr_ + w] ^= words_[size_t(src) * wpr_ + w];
}

BitMatrix BitMatrix::multiply(const BitMatrix& rhs) const {
    if (n_cols_ != rhs.n_rows_) throw std::invalid_argument("multiply: inner dimensions differ");
    BitMatrix out(n_rows_, rhs.n_cols_);
    for (int r = 0; r < n_rows_; ++r)
        for (int c = 0; c < n_cols_; ++c)
            if (get(r, c))
                for (int w = 0; w < rhs.wpr_; ++w)
                    out.words_[size_t(r) * out.wpr_ + w] ^= rhs.words_[size_t(c) * rhs.wpr_ + w];
    return out;
}

BitMatrix BitMatrix::transposed() const {
    BitMatrix out(n_cols_, n_rows_);
    for (int r = 0; r < n_rows_; ++r)
        for (int c = 0; c < n_cols_; ++c)
            if (get(r, c)) out.set(c, r, true);
    return out;
}

int BitMatrix::rank() const {
    BitMatrix work = *this;
    int r = 0;
    for (int c = 0; c < n_cols_ && r < n_rows_; ++c) {
        int pivot = -1;
        for (int i = r; i < n_rows_; ++i)
            if (work.get(i, c)) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != r)
            for (int w = 0; w < wpr_; ++w)
                std::swap(work.words_[size_t(pivot) * wpr_ + w], work.words_[size_t(r) * wpr_ + w]);
        for (int i = r + 1; i < n_rows_; ++i)
            if (work.get(i, c)) work.xor_row_into(i, r);
        ++r;
    }
    return r;
}

bool BitMatrix::is_invertible() const {
    if (!is_square()) throw std::invalid_argument("is_invertible: matrix must be square");
    return rank() == n_rows_;
}

std::vector<BitVec> BitMatrix::left_kernel_basis() const {
    // Eliminate [M | I]; rows whose M-part vanishes yield kernel vectors.
    BitMatrix aug(n_rows_, n_cols_ + n_rows_);
    for (int r = 0; r < n_rows_; ++r) {
        for (int c = 0; c < n_cols_; ++c)
            if (get(r, c)) aug.set(r, c, true);
        aug.set(r, n_cols_ + r, true);
    }
    int rr = 0;
    for (int c = 0; c < n_cols_ && rr < n_rows_; ++c) {
        int pivot = -1;
        for (int i = rr; i < n_rows_; ++i)
            if (aug.get(i, c)) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != rr)
            for (int w = 0; w < aug.wpr_; ++w)
                std::swap(aug.words_[size_t(pivot) * aug.wpr_ + w], aug.words_[size_t(rr) * aug.wpr_ + w]);
        for (int i = 0; i < n_rows_; ++i)
            if (i != rr && aug.get(i, c)) aug.xor_row_into(i, rr);
        ++rr;
    }
    std::vector<BitVec> basis;
    for (int r = rr; r < n_rows_; ++r) {
        BitVec full = aug.row(r);
        basis.push_back(full.slice(n_cols_, n_rows_));
    }
    return basis;
}

bool Gf2Span::insert(BitVec v) {
    for (const BitVec& b : basis_) {
        int lead = b.leading_bit();
        if (v.get(lead)) v ^= b;
    }
    if (v.is_zero()) return false;
    basis_.push_back(std::move(v));
    std::sort(basis_.begin(), basis_.end(),
              [](const BitVec& a, const BitVec& b) { return a.leading_bit() > b.leading_bit(); });
    return true;
}

BitVec Gf2Span::reduce(BitVec v) const {
    for (const BitVec& b : basis_) {
        int lead = b.leading_bit();
        if (v.get(lead)) v ^= b;
    }
    return v;
}

BlockView::BlockView(BitMatrix matrix, int m, int delta) : matrix_(std::move(matrix)), m_(m), delta_(delta) {
    if (m < 1 || delta < 1) throw std::invalid_argument("BlockView: m and delta must be positive");
    if (!matrix_.is_square() || matrix_.n_rows() != m * delta)
        throw std::invalid_argument("BlockView: matrix must be square of order m*delta");
}

BitMatrix BlockView::submatrix(int i1, int j1, int i2, int j2) const {
    if (i1 < 1 || j1 < 1 || i1 > i2 || j1 > j2 || i2 > delta_ || j2 > delta_)
        throw std::invalid_argument("submatrix: block indices out of range");
    BitMatrix out(m_ * (i2 - i1 + 1), m_ * (j2 - j1 + 1));
    int r0 = (i1 - 1) * m_, c0 = (j1 - 1) * m_;
    for (int r = 0; r < out.n_rows(); ++r)
        for (int c = 0; c < out.n_cols(); ++c)
            if (matrix_.get(r0 + r, c0 + c)) out.set(r, c, true);
    return out;
}

BlockView parse_matrix_text(std::istream& in) {
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
    if (!next_line(header)) throw ParseError("empty matrix file: expected header \"n m delta\"", lineno);
    std::istringstream hs(header);
    long n = 0, m = 0, delta = 0;
    if (!(hs >> n >> m >> delta)) throw ParseError("malformed header, expected \"n m delta\"", lineno);
    std::string trailing;
    if (hs >> trailing) throw ParseError("unexpected token after header", lineno);
    if (n <= 0 || m <= 0 || delta <= 0 || n != m * delta)
        throw ParseError("header must satisfy n = m*delta with positive values", lineno);
    if (n > 512) throw ParseError("matrix order beyond supported scale (n <= 512)", lineno);

    BitMatrix mat(static_cast<int>(n), static_cast<int>(n));
    for (int r = 0; r < n; ++r) {
        std::string rowstr;
        if (!next_line(rowstr))
            throw ParseError("expected " + std::to_string(n) + " matrix rows, got " + std::to_string(r), lineno);
        if (int(rowstr.size()) != n)
            throw ParseError("row has " + std::to_string(rowstr.size()) + " characters, expected " + std::to_string(n),
                             lineno, int(rowstr.size()) + 1);
        for (int c = 0; c < n; ++c) {
            if (rowstr[c] == '1') mat.set(r, c, true);
            else if (rowstr[c] != '0') throw ParseError("invalid character in matrix row", lineno, c + 1);
        }
    }
    std::string extra;
    if (next_line(extra)) throw ParseError("unexpected content after matrix rows", lineno);
    return BlockView(std::move(mat), int(m), int(delta));
}

BlockView parse_matrix_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open matrix file: " + path);
    return parse_matrix_text(f);
}

std::string format_matrix_text(const BlockView& view) {
    std::ostringstream out;
    out << view.n() << ' ' << view.m() << ' ' << view.delta() << '\n';
    const BitMatrix& m = view.matrix();
    for (int r = 0; r < m.n_rows(); ++r) {
        for (int c = 0; c < m.n_cols(); ++c) out << (m.get(r, c) ? '1' : '0');
        out << '\n';
    }
    return out.str();
}

}  // namespace mixaudit
