#include "mixaudit/classifier.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <functional>
#include <string>

#include "mixaudit/errors.hpp"

namespace mixaudit {

namespace {

// Echelon basis over m-bit values, m <= 32.
struct SmallSpan {
    std::vector<uint32_t> basis;  // descending leading bit, mutually reduced

    uint32_t reduce(uint32_t v) const {
        for (uint32_t b : basis) {
            uint32_t lead = uint32_t{1} << (31 - std::countl_zero(b));
            if (v & lead) v ^= b;
        }
        return v;
    }
    void insert(uint32_t v) {
        v = reduce(v);
        if (!v) return;
        basis.push_back(v);
        std::sort(basis.begin(), basis.end(), std::greater<>());
    }
    int dim() const { return int(basis.size()); }
};

std::vector<uint32_t> kernel_elements(const BitMatrix& mat) {
    std::vector<BitVec> basis = mat.left_kernel_basis();
    std::vector<uint32_t> out{0};
    for (const BitVec& b : basis) {
        uint32_t v = uint32_t(b.to_u64());
        size_t count = out.size();
        for (size_t i = 0; i < count; ++i) out.push_back(out[i] ^ v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

uint32_t row_image_u32(const BitMatrix& mat, uint32_t v) {
    return uint32_t(mat.apply_u64(v));
}

// Per-r data for the ruled-split analysis at one n_w: the coset
// representative of the ruled contribution on each constrained output brick.
struct RuledTables {
    std::vector<uint32_t> domain;               // admissible ruled values (white-constant)
    std::vector<uint32_t> rep_c;                // representative on the ruled output brick
    int w_dim = 0;                              // dim of the black contribution there
    std::vector<std::vector<uint32_t>> rep_bj;  // per trailing brick, per domain index
    std::vector<uint32_t> quot_size;            // classes to cover per trailing brick
};

struct RuledOutcome {
    Tri a = Tri::NotApplicable;
    Tri b = Tri::NotApplicable;
    Tri c = Tri::Undecided;
    Tri d = Tri::Undecided;
    std::optional<std::vector<uint32_t>> witness_content;
};

// Evaluate one candidate ruled content; indices refer to tables.domain.
bool eval_candidate(const RuledTables& t, const std::vector<int>& idx, int m, bool& c_ok, bool& d_ok) {
    std::vector<uint32_t> seen;
    seen.reserve(idx.size());
    for (int i : idx) seen.push_back(t.rep_c[i]);
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    uint64_t image_card = uint64_t(seen.size()) << t.w_dim;
    c_ok = image_card >= 2 && image_card < (uint64_t{1} << m);

    d_ok = true;
    for (size_t j = 0; j < t.rep_bj.size() && d_ok; ++j) {
        seen.clear();
        for (int i : idx) seen.push_back(t.rep_bj[j][i]);
        std::sort(seen.begin(), seen.end());
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
        d_ok = seen.size() == t.quot_size[j];
    }
    return c_ok && d_ok;
}

// Candidate cardinalities for the content search. The family mirrors the
// oracle exactly: every size 2..2^m-2 when m <= 3, powers of two when m >= 4.
std::vector<int> candidate_sizes(size_t domain_size, int m) {
    std::vector<int> sizes;
    uint64_t limit = std::min<uint64_t>(domain_size, (uint64_t{1} << m) - 1);
    if (m <= 3) {
        for (uint64_t k = 2; k <= limit; ++k) sizes.push_back(int(k));
    } else {
        for (uint64_t k = 2; k <= limit; k *= 2) sizes.push_back(int(k));
    }
    return sizes;
}

RuledOutcome search_ruled_contents(const RuledTables& t, int m) {
    RuledOutcome out;
    out.c = Tri::False;
    out.d = Tri::False;
    if (t.domain.size() < 2) return out;

    // Refutations that no content can evade: a full black contribution paints
    // the ruled output brick black; a trailing brick whose classes cannot all
    // be hit even by the whole domain stays short for every subset.
    bool c_impossible = t.w_dim >= m;
    bool d_impossible = false;
    for (size_t j = 0; j < t.rep_bj.size(); ++j) {
        std::vector<uint32_t> all(t.rep_bj[j]);
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        if (all.size() < t.quot_size[j]) { d_impossible = true; break; }
    }
    if (c_impossible && d_impossible) return out;

    bool any_c = false, any_d = false;
    int nd = int(t.domain.size());
    auto take_witness = [&](const std::vector<int>& idx) {
        out.c = Tri::True;
        out.d = Tri::True;
        out.witness_content.emplace();
        for (int i : idx) out.witness_content->push_back(t.domain[i]);
    };

    // The whole admissible domain (the kernel of the white-column matrix) is
    // the natural first candidate; it succeeds for most preserved layers.
    if (t.domain.size() <= (size_t{1} << m) - 1) {
        std::vector<int> idx(t.domain.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = int(i);
        bool c_ok = false, d_ok = false;
        if (eval_candidate(t, idx, m, c_ok, d_ok)) { take_witness(idx); return out; }
        any_c = c_ok;
        any_d = d_ok;
    }

    if (t.domain.size() > 16) {
        // Beyond exhaustive subset range; report what the refutations settle
        // and leave the rest honestly undecided.
        out.c = c_impossible ? Tri::False : (any_c ? Tri::True : Tri::Undecided);
        out.d = d_impossible ? Tri::False : (any_d ? Tri::True : Tri::Undecided);
        return out;
    }

    for (int k : candidate_sizes(t.domain.size(), m)) {
        std::vector<int> idx(k);
        for (int i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            bool c_ok = false, d_ok = false;
            bool both = eval_candidate(t, idx, m, c_ok, d_ok);
            any_c = any_c || c_ok;
            any_d = any_d || d_ok;
            if (both) { take_witness(idx); return out; }
            int i = k - 1;
            while (i >= 0 && idx[i] == nd - k + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    out.c = any_c ? Tri::True : Tri::False;
    out.d = any_d ? Tri::True : Tri::False;
    return out;
}

CanonicalSet make_canonical(const BlockView& view, int n_w, std::vector<uint32_t> ruled_content) {
    CanonicalSet c;
    c.n = view.n();
    c.m = view.m();
    c.delta = view.delta();
    c.white_values.assign(size_t(n_w), 0);
    std::sort(ruled_content.begin(), ruled_content.end());
    c.ruled_content = std::move(ruled_content);
    return c;
}

// Materialized cross-check of a structural witness, desk scale only.
bool confirm_witness(const BlockView& view, const CanonicalSet& c, const ClassifyOptions& opt, bool& ran) {
    ran = false;
    if (view.n() > opt.confirm_enumeration_max_n || view.n() > 20) return true;
    ran = true;
    std::vector<uint64_t> d = materialize(c);
    std::vector<uint64_t> image;
    image.reserve(d.size());
    for (uint64_t v : d) image.push_back(view.matrix().apply_u64(v));
    return type_of_set(image, c.n, c.m, c.delta) == type_of_set(d, c.n, c.m, c.delta);
}

}  // namespace

bool check_eq2(const BlockView& view, int n_w) {
    if (n_w < 1 || n_w > view.delta() - 1)
        throw std::invalid_argument("check_eq2: n_w must be in 1..delta-1");
    return view.submatrix(n_w + 1, 1, view.delta(), n_w).is_zero();
}

ConditionReport check_ruled_conditions(const BlockView& view, int n_w, const ClassifyOptions& opt) {
    int delta = view.delta();
    int m = view.m();
    if (n_w < 0 || n_w > delta - 1)
        throw std::invalid_argument("check_ruled_conditions: n_w must be in 0..delta-1");
    if (m > 20) throw GuardError("check_ruled_conditions: brick width beyond desk scale");

    ConditionReport report;
    report.n_w = n_w;
    if (n_w >= 1) report.eq2 = check_eq2(view, n_w) ? Tri::True : Tri::False;

    // (a): black input bricks must not touch the white output columns.
    if (n_w >= 1 && n_w + 2 <= delta)
        report.a = view.submatrix(n_w + 2, 1, delta, n_w).is_zero() ? Tri::True : Tri::False;

    // (b): the ruled input brick hits the white columns with a kernel to hide in.
    std::vector<uint32_t> domain;
    if (n_w >= 1) {
        BitMatrix white_cols = view.submatrix(n_w + 1, 1, n_w + 1, n_w);
        report.b = white_cols.rank() < m ? Tri::True : Tri::False;
        domain = kernel_elements(white_cols);
    } else {
        domain.resize(size_t{1} << m);
        for (size_t i = 0; i < domain.size(); ++i) domain[i] = uint32_t(i);
    }

    bool whites_possible = (report.a != Tri::False) && domain.size() >= 2;
    if (!whites_possible) {
        report.c = Tri::False;
        report.d = Tri::False;
        return report;
    }

    RuledTables tables;
    tables.domain = std::move(domain);

    BitMatrix ruled_to_c = view.block(n_w + 1, n_w + 1);
    SmallSpan w_span;
    if (n_w + 2 <= delta) {
        BitMatrix black_to_c = view.submatrix(n_w + 2, n_w + 1, delta, n_w + 1);
        for (int r = 0; r < black_to_c.n_rows(); ++r)
            w_span.insert(uint32_t(black_to_c.row(r).to_u64()));
    }
    tables.w_dim = w_span.dim();
    tables.rep_c.reserve(tables.domain.size());
    for (uint32_t r : tables.domain) tables.rep_c.push_back(w_span.reduce(row_image_u32(ruled_to_c, r)));

    for (int bj = n_w + 2; bj <= delta; ++bj) {
        SmallSpan s_j;
        BitMatrix black_rows = view.submatrix(n_w + 2, bj, delta, bj);
        for (int r = 0; r < black_rows.n_rows(); ++r) s_j.insert(uint32_t(black_rows.row(r).to_u64()));
        BitMatrix ruled_row = view.block(n_w + 1, bj);
        std::vector<uint32_t> reps;
        reps.reserve(tables.domain.size());
        for (uint32_t r : tables.domain) reps.push_back(s_j.reduce(row_image_u32(ruled_row, r)));
        tables.rep_bj.push_back(std::move(reps));
        tables.quot_size.push_back(uint32_t{1} << (m - s_j.dim()));
    }

    RuledOutcome outcome = search_ruled_contents(tables, m);
    report.c = outcome.c;
    report.d = outcome.d;
    if (n_w == delta - 1) report.d = Tri::NotApplicable;  // no trailing bricks to cover

    if (outcome.witness_content) {
        CanonicalSet witness = make_canonical(view, n_w, *outcome.witness_content);
        bool ran = false;
        if (!confirm_witness(view, witness, opt, ran))
            throw std::logic_error("check_ruled_conditions: structural witness failed enumeration cross-check");
        report.preserved = true;
        report.witness = std::move(witness);
        report.witness_confirmed = ran;
    }
    return report;
}

std::optional<Verdict> fast_path(const BlockView& view) {
    int delta = view.delta();
    int m = view.m();
    if (delta < 3) return std::nullopt;
    if (!view.matrix().is_invertible()) return std::nullopt;

    for (int n_w = 1; n_w <= delta - 2; ++n_w)
        if (view.submatrix(n_w + 2, 1, delta, n_w).is_zero()) return std::nullopt;

    // Edge (0,1,delta-1): with the black rows mapping onto the first output
    // brick, that brick is black for every content; no ruled image survives.
    BitMatrix black_to_first = view.submatrix(2, 1, delta, 1);
    if (black_to_first.rank() < m) return std::nullopt;

    // Edge (delta-1,1,0): refuted only when the last input brick hits the
    // white columns at full rank or cannot reach its own output brick.
    BitMatrix last_white = view.submatrix(delta, 1, delta, delta - 1);
    int last_rank = last_white.rank();
    bool corner_nonzero = !view.block(delta, delta).is_zero();
    if (last_rank < m && corner_nonzero) return std::nullopt;

    Verdict v;
    v.kind = Verdict::Kind::NonTypePreserving;
    v.fast_path_used = true;
    v.interior_blocks_nonzero = true;
    for (int n_w = 0; n_w <= delta - 1; ++n_w) {
        ConditionReport r;
        r.n_w = n_w;
        if (n_w == 0) {
            r.c = Tri::False;
            r.d = Tri::Undecided;
        } else if (n_w <= delta - 2) {
            r.eq2 = Tri::False;
            r.a = Tri::False;
            r.b = r.c = r.d = Tri::Undecided;
        } else {
            r.eq2 = last_rank == 0 ? Tri::True : Tri::False;  // rank 0 cannot happen here
            r.b = last_rank < m ? Tri::True : Tri::False;
            r.c = corner_nonzero ? Tri::True : Tri::False;
        }
        v.evidence.push_back(std::move(r));
    }
    return v;
}

Verdict classify(const BlockView& view, const ClassifyOptions& opt) {
    if (!view.matrix().is_invertible())
        throw PreconditionError("classify: mixing layer must be invertible");

    if (view.delta() == 1) {
        Verdict v;
        v.kind = Verdict::Kind::TypePreserving;
        v.vacuous = true;
        return v;
    }

    if (opt.use_fast_path) {
        if (std::optional<Verdict> quick = fast_path(view)) return *quick;
    }

    Verdict v;
    bool interior_nonzero = true;
    bool any_preserved = false;
    bool any_undecided = false;
    for (int n_w = 0; n_w <= view.delta() - 1; ++n_w) {
        ConditionReport report = check_ruled_conditions(view, n_w, opt);
        if (report.eq2 == Tri::True && !report.preserved) {
            CanonicalSet witness = make_canonical(view, n_w, {});
            bool ran = false;
            if (!confirm_witness(view, witness, opt, ran))
                throw std::logic_error("classify: zero-submatrix witness failed enumeration cross-check");
            report.preserved = true;
            report.witness = std::move(witness);
            report.witness_confirmed = ran;
        } else if (report.eq2 == Tri::True) {
            report.preserved = true;
        }
        if (n_w >= 1 && n_w <= view.delta() - 2 && report.a != Tri::False) interior_nonzero = false;
        any_preserved = any_preserved || report.preserved;
        // A split refuted by one failed condition is decided even when the
        // content search could not settle the others.
        bool refuted = report.a == Tri::False || report.b == Tri::False || report.c == Tri::False ||
                       report.d == Tri::False;
        any_undecided = any_undecided || (!report.preserved && !refuted &&
                                          (report.c == Tri::Undecided || report.d == Tri::Undecided));
        v.evidence.push_back(std::move(report));
    }
    if (!any_preserved && any_undecided)
        throw GuardError("classify: ruled-content search inconclusive at this scale");
    v.kind = any_preserved ? Verdict::Kind::TypePreserving : Verdict::Kind::NonTypePreserving;
    v.interior_blocks_nonzero = interior_nonzero;
    return v;
}

namespace {

// Streaming type comparison for one materialized candidate. Aborts as soon
// as a brick's projection outgrows what the expected box type allows.
bool image_type_matches(const BlockView& view, const CanonicalSet& cand, const TypeVector& expected,
                        std::vector<uint32_t>& seen, std::vector<uint32_t>& counts, uint32_t& epoch,
                        uint64_t& elements) {
    int m = view.m();
    int delta = view.delta();
    uint64_t full = uint64_t{1} << m;
    uint32_t brick_mask = uint32_t(full - 1);
    ++epoch;
    std::fill(counts.begin(), counts.end(), 0);

    uint64_t white_part = 0;
    for (int j = 0; j < cand.n_w(); ++j) white_part |= uint64_t(cand.white_values[j]) << (j * m);
    int ruled_shift = cand.n_w() * m;
    int black_shift = (cand.n_w() + cand.n_r()) * m;
    uint64_t black_count = uint64_t{1} << (m * cand.n_b());
    std::vector<uint32_t> ruled = cand.ruled_content.empty() ? std::vector<uint32_t>{0} : cand.ruled_content;

    for (uint64_t b = 0; b < black_count; ++b) {
        for (uint32_t r : ruled) {
            uint64_t v = white_part | uint64_t(r) << ruled_shift | b << black_shift;
            uint64_t img = view.matrix().apply_u64(v);
            ++elements;
            for (int j = 0; j < delta; ++j) {
                uint32_t val = uint32_t(img >> (j * m)) & brick_mask;
                uint32_t slot = uint32_t(j) << m | val;
                if (seen[slot] != epoch) {
                    seen[slot] = epoch;
                    uint32_t cnt = ++counts[j];
                    if (expected[j] == BoxType::White && cnt > 1) return false;
                    if (expected[j] == BoxType::Ruled && cnt == full) return false;
                }
            }
        }
    }
    for (int j = 0; j < delta; ++j) {
        uint64_t cnt = counts[j];
        bool ok = expected[j] == BoxType::White ? cnt == 1
                : expected[j] == BoxType::Black ? cnt == full
                                                : (cnt > 1 && cnt < full);
        if (!ok) return false;
    }
    return true;
}

// Ruled contents enumerated for the oracle: every proper non-singleton
// subset for m <= 3, power-of-two cardinalities for m == 4.
std::vector<int> oracle_content_sizes(int m) {
    std::vector<int> sizes;
    int full = 1 << m;
    if (m <= 3) {
        for (int k = 2; k < full; ++k) sizes.push_back(k);
    } else {
        for (int k = 2; k < full; k *= 2) sizes.push_back(k);
    }
    return sizes;
}

}  // namespace

OracleResult oracle_preserved(const BlockView& view, const TypeTriple& triple, const OracleOptions& opt) {
    int n = view.n(), m = view.m(), delta = view.delta();
    if (n > 16) throw GuardError("oracle_preserved: n > 16 is beyond exhaustive range");
    if (m > 4) throw GuardError("oracle_preserved: ruled-content enumeration defined for m <= 4");
    if (triple.n_w < 0 || triple.n_r < 0 || triple.n_b < 0 || triple.n_r > 1 ||
        triple.n_w + triple.n_r + triple.n_b != delta)
        throw std::invalid_argument("oracle_preserved: triple outside the bounded family");

    OracleResult result;
    std::vector<uint32_t> seen(size_t(delta) << m, 0);
    std::vector<uint32_t> counts(delta, 0);
    uint32_t epoch = 0;

    CanonicalSet cand;
    cand.n = n;
    cand.m = m;
    cand.delta = delta;
    cand.white_values.assign(size_t(triple.n_w), 0);

    uint64_t white_count = uint64_t{1} << (m * triple.n_w);
    uint32_t brick_mask = (uint32_t{1} << m) - 1;

    std::vector<std::vector<uint32_t>> contents;
    if (triple.n_r == 1) {
        for (int k : oracle_content_sizes(m)) {
            std::vector<int> idx(k);
            for (int i = 0; i < k; ++i) idx[i] = i;
            int full = 1 << m;
            while (true) {
                std::vector<uint32_t> content(idx.begin(), idx.end());
                contents.push_back(std::move(content));
                int i = k - 1;
                while (i >= 0 && idx[i] == full - k + i) --i;
                if (i < 0) break;
                ++idx[i];
                for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            }
        }
    } else {
        contents.emplace_back();  // single shape with no ruled brick
    }

    for (uint64_t w = 0; w < white_count; ++w) {
        for (int j = 0; j < triple.n_w; ++j) cand.white_values[j] = uint32_t(w >> (j * m)) & brick_mask;
        for (const std::vector<uint32_t>& content : contents) {
            cand.ruled_content = content;
            TypeVector expected = cand.declared_type();
            ++result.candidates_tried;
            if (result.elements_processed + cand.cardinality() > opt.element_budget) {
                result.status = OracleResult::Status::Undecided;
                return result;
            }
            if (image_type_matches(view, cand, expected, seen, counts, epoch, result.elements_processed)) {
                ++result.preserved_count;
                if (!result.witness) result.witness = cand;
                result.status = OracleResult::Status::FoundWitness;
                if (!opt.count_all) return result;
            }
        }
    }
    return result;
}

OracleVerdict oracle_classify(const BlockView& view, const OracleOptions& opt) {
    int delta = view.delta();
    OracleVerdict verdict;
    std::vector<TypeTriple> triples;
    for (int n_w = 1; n_w <= delta - 1; ++n_w) triples.push_back({n_w, 0, delta - n_w});
    for (int n_w = 0; n_w <= delta - 1; ++n_w) triples.push_back({n_w, 1, delta - n_w - 1});

    bool any_witness = false, any_undecided = false;
    OracleOptions per = opt;
    for (const TypeTriple& t : triples) {
        per.element_budget = opt.element_budget - std::min(opt.element_budget, verdict.elements_processed);
        OracleResult r = oracle_preserved(view, t, per);
        verdict.elements_processed += r.elements_processed;
        any_witness = any_witness || r.status == OracleResult::Status::FoundWitness;
        any_undecided = any_undecided || r.status == OracleResult::Status::Undecided;
        verdict.per_triple.emplace_back(t, std::move(r));
        if (any_witness && !opt.count_all) break;
    }
    verdict.kind = any_witness       ? OracleVerdict::Kind::TypePreserving
                   : any_undecided   ? OracleVerdict::Kind::Undecided
                                     : OracleVerdict::Kind::NonTypePreserving;
    return verdict;
}

const char* to_string(Verdict::Kind k) {
    return k == Verdict::Kind::TypePreserving ? "TypePreserving" : "NonTypePreserving";
}

const char* to_string(OracleVerdict::Kind k) {
    switch (k) {
        case OracleVerdict::Kind::TypePreserving: return "TypePreserving";
        case OracleVerdict::Kind::NonTypePreserving: return "NonTypePreserving";
        default: return "Undecided";
    }
}

namespace {

nlohmann::json tri_json(Tri t) {
    switch (t) {
        case Tri::False: return false;
        case Tri::True: return true;
        case Tri::NotApplicable: return nullptr;
        default: return "undecided";
    }
}

std::string hex_u32(uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%x", v);
    return buf;
}

}  // namespace

nlohmann::json to_json(const CanonicalSet& c) {
    nlohmann::json white = nlohmann::json::array();
    for (uint32_t w : c.white_values) white.push_back(hex_u32(w));
    nlohmann::json ruled = nlohmann::json::array();
    for (uint32_t r : c.ruled_content) ruled.push_back(hex_u32(r));
    return {{"n", c.n},
            {"m", c.m},
            {"delta", c.delta},
            {"white_values_hex", white},
            {"ruled_content_hex", ruled}};
}

nlohmann::json to_json(const Verdict& v) {
    nlohmann::json evidence = nlohmann::json::array();
    for (const ConditionReport& r : v.evidence) {
        nlohmann::json e = {{"n_w", r.n_w},  {"eq2", tri_json(r.eq2)}, {"a", tri_json(r.a)},
                            {"b", tri_json(r.b)}, {"c", tri_json(r.c)},     {"d", tri_json(r.d)},
                            {"preserved", r.preserved}};
        e["witness"] = r.witness ? to_json(*r.witness) : nlohmann::json(nullptr);
        if (r.witness) e["witness_confirmed"] = r.witness_confirmed;
        evidence.push_back(std::move(e));
    }
    return {{"kind", to_string(v.kind)},
            {"fast_path_used", v.fast_path_used},
            {"vacuous", v.vacuous},
            {"interior_blocks_nonzero", v.interior_blocks_nonzero},
            {"evidence", evidence}};
}

nlohmann::json to_json(const OracleVerdict& v) {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& [triple, r] : v.per_triple) {
        nlohmann::json e = {{"triple", {triple.n_w, triple.n_r, triple.n_b}},
                            {"status", r.status == OracleResult::Status::FoundWitness ? "witness"
                                       : r.status == OracleResult::Status::NoneExists ? "none"
                                                                                      : "undecided"},
                            {"candidates_tried", r.candidates_tried},
                            {"elements_processed", r.elements_processed},
                            {"preserved_count", r.preserved_count}};
        e["witness"] = r.witness ? to_json(*r.witness) : nlohmann::json(nullptr);
        per.push_back(std::move(e));
    }
    return {{"kind", to_string(v.kind)},
            {"per_triple", per},
            {"elements_processed", v.elements_processed}};
}

}  // namespace mixaudit
