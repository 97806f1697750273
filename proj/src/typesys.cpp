#include "mixaudit/typesys.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

#include "mixaudit/errors.hpp"

namespace mixaudit {

char box_char(BoxType t) {
    switch (t) {
        case BoxType::White: return 'w';
        case BoxType::Ruled: return 'r';
        case BoxType::Black: return 'b';
    }
    return '?';
}

std::string to_string(const TypeVector& t) {
    std::string s;
    s.reserve(t.size());
    for (BoxType b : t) s.push_back(box_char(b));
    return s;
}

std::string to_string(const TypeTriple& t) {
    return "(" + std::to_string(t.n_w) + "," + std::to_string(t.n_r) + "," + std::to_string(t.n_b) + ")";
}

TypeVector type_of_set(const std::vector<uint64_t>& S, int n, int m, int delta) {
    if (S.empty()) throw std::invalid_argument("type_of_set: empty set has no type");
    if (n != m * delta) throw std::invalid_argument("type_of_set: n must equal m*delta");
    if (m > 20) throw GuardError("type_of_set: brick width beyond desk scale");
    uint64_t brick_mask = (m == 64) ? ~uint64_t{0} : ((uint64_t{1} << m) - 1);
    TypeVector type(delta);
    std::vector<char> seen(size_t{1} << m);
    for (int j = 0; j < delta; ++j) {
        std::fill(seen.begin(), seen.end(), 0);
        uint64_t distinct = 0;
        uint64_t full = uint64_t{1} << m;
        for (uint64_t v : S) {
            uint64_t b = (v >> (j * m)) & brick_mask;
            if (!seen[b]) {
                seen[b] = 1;
                if (++distinct == full) break;
            }
        }
        type[j] = distinct == 1 ? BoxType::White : (distinct == full ? BoxType::Black : BoxType::Ruled);
    }
    return type;
}

TypeTriple count_triple(const TypeVector& t) {
    TypeTriple c;
    for (BoxType b : t) {
        if (b == BoxType::White) ++c.n_w;
        else if (b == BoxType::Ruled) ++c.n_r;
        else ++c.n_b;
    }
    return c;
}

bool is_canonical_order(const TypeVector& t) {
    // must match w* r? b*
    size_t i = 0;
    while (i < t.size() && t[i] == BoxType::White) ++i;
    if (i < t.size() && t[i] == BoxType::Ruled) ++i;
    while (i < t.size() && t[i] == BoxType::Black) ++i;
    return i == t.size();
}

TypeTriple subgroup_type(int q, int n, int m) {
    if (q < 0 || q > n) throw std::invalid_argument("subgroup_type: q must be in 0..n");
    if (m < 1 || n % m != 0) throw std::invalid_argument("subgroup_type: m must divide n");
    int delta = n / m;
    if (q % m == 0) {
        int n_w = q / m;
        return {n_w, 0, delta - n_w};
    }
    int n_w = q / m;
    return {n_w, 1, delta - n_w - 1};
}

std::vector<uint64_t> subgroup_elements(int q, int n) {
    if (q < 0 || q > n) throw std::invalid_argument("subgroup_elements: q must be in 0..n");
    if (n > 24) throw GuardError("subgroup_elements: n > 24 enumeration guard");
    std::vector<uint64_t> out;
    out.reserve(size_t{1} << (n - q));
    uint64_t step = uint64_t{1} << q;
    uint64_t count = uint64_t{1} << (n - q);
    for (uint64_t k = 0; k < count; ++k) out.push_back(k * step);
    return out;
}

uint64_t boxplus(uint64_t a, uint64_t b, int n) {
    if (n < 1 || n > 64) throw std::invalid_argument("boxplus: n must be in 1..64");
    uint64_t mask = (n == 64) ? ~uint64_t{0} : ((uint64_t{1} << n) - 1);
    if ((a & ~mask) || (b & ~mask)) throw std::invalid_argument("boxplus: operand out of range");
    return (a + b) & mask;
}

std::vector<uint64_t> translate_set(const std::vector<uint64_t>& S, uint64_t v, int n) {
    std::vector<uint64_t> out;
    out.reserve(S.size());
    for (uint64_t s : S) out.push_back(boxplus(s, v, n));
    std::sort(out.begin(), out.end());
    return out;
}

TypeVector CanonicalSet::declared_type() const {
    TypeVector t;
    t.reserve(delta);
    for (int i = 0; i < n_w(); ++i) t.push_back(BoxType::White);
    if (n_r()) t.push_back(BoxType::Ruled);
    for (int i = 0; i < n_b(); ++i) t.push_back(BoxType::Black);
    return t;
}

uint64_t CanonicalSet::cardinality() const {
    uint64_t ruled = ruled_content.empty() ? 1 : ruled_content.size();
    return ruled << (uint64_t(m) * n_b());
}

void CanonicalSet::validate() const {
    if (n != m * delta || m < 1 || delta < 1) throw std::invalid_argument("CanonicalSet: n must equal m*delta");
    if (n_w() + n_r() > delta) throw std::invalid_argument("CanonicalSet: too many constrained bricks");
    uint64_t full = uint64_t{1} << m;
    for (uint32_t w : white_values)
        if (w >= full) throw std::invalid_argument("CanonicalSet: white value out of brick range");
    if (!ruled_content.empty()) {
        if (ruled_content.size() < 2 || ruled_content.size() >= full)
            throw std::invalid_argument("CanonicalSet: ruled content must be a proper subset with >= 2 elements");
        for (size_t i = 0; i < ruled_content.size(); ++i) {
            if (ruled_content[i] >= full) throw std::invalid_argument("CanonicalSet: ruled value out of brick range");
            if (i && ruled_content[i] <= ruled_content[i - 1])
                throw std::invalid_argument("CanonicalSet: ruled content must be sorted and duplicate-free");
        }
    }
}

std::vector<uint64_t> materialize(const CanonicalSet& C) {
    C.validate();
    if (C.n > 20) throw GuardError("materialize: n > 20 enumeration guard");
    uint64_t white_part = 0;
    for (int j = 0; j < C.n_w(); ++j) white_part |= uint64_t(C.white_values[j]) << (j * C.m);
    int ruled_shift = C.n_w() * C.m;
    int black_shift = (C.n_w() + C.n_r()) * C.m;
    uint64_t black_count = uint64_t{1} << (C.m * C.n_b());

    std::vector<uint64_t> out;
    out.reserve(C.cardinality());
    std::vector<uint32_t> ruled = C.ruled_content.empty() ? std::vector<uint32_t>{0} : C.ruled_content;
    for (uint64_t b = 0; b < black_count; ++b)
        for (uint32_t r : ruled)
            out.push_back(white_part | uint64_t(r) << ruled_shift | b << black_shift);
    std::sort(out.begin(), out.end());
    return out;
}

std::string format_set_text(const std::vector<uint64_t>& S, int n, int m, int delta) {
    std::ostringstream out;
    out << n << ' ' << m << ' ' << delta << '\n';
    for (uint64_t v : S) out << std::hex << v << '\n';
    return out.str();
}

ParsedSet parse_set_text(std::istream& in) {
    std::string line;
    int lineno = 0;
    ParsedSet result{};
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        if (!have_header) {
            std::istringstream hs(line);
            if (!(hs >> result.n >> result.m >> result.delta) || result.n != result.m * result.delta)
                throw ParseError("set header must be \"n m delta\" with n = m*delta", lineno);
            have_header = true;
            continue;
        }
        try {
            result.elements.push_back(std::stoull(line.substr(first), nullptr, 16));
        } catch (const std::exception&) {
            throw ParseError("set element is not a hex integer", lineno);
        }
        if (result.n < 64 && (result.elements.back() >> result.n) != 0)
            throw ParseError("set element out of range for n", lineno);
    }
    if (!have_header) throw ParseError("empty set file: expected header \"n m delta\"", lineno);
    std::sort(result.elements.begin(), result.elements.end());
    result.elements.erase(std::unique(result.elements.begin(), result.elements.end()), result.elements.end());
    return result;
}

}  // namespace mixaudit
