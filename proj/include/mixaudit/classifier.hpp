#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mixaudit/bitmatrix.hpp"
#include "mixaudit/typesys.hpp"

namespace mixaudit {

enum class Tri : uint8_t { False = 0, True = 1, NotApplicable = 2, Undecided = 3 };

inline bool tri_true(Tri t) { return t == Tri::True; }

/// Structural findings for one value of n_w. eq2 covers the all-white/black
/// split (n_w, 0, delta-n_w); properties a..d cover the ruled split
/// (n_w, 1, delta-n_w-1). Conditions c and d are existential over ruled
/// contents; d holds when every trailing output brick can be made black.
struct ConditionReport {
    int n_w = 0;
    Tri eq2 = Tri::NotApplicable;
    Tri a = Tri::NotApplicable;
    Tri b = Tri::NotApplicable;
    Tri c = Tri::NotApplicable;
    Tri d = Tri::NotApplicable;
    bool preserved = false;
    std::optional<CanonicalSet> witness;
    bool witness_confirmed = false;  // confirmed by materialized type computation
};

struct Verdict {
    enum class Kind { TypePreserving, NonTypePreserving };
    Kind kind = Kind::NonTypePreserving;
    bool fast_path_used = false;
    bool vacuous = false;                  // delta == 1: no nontrivial bounded types exist
    bool interior_blocks_nonzero = false;  // the sub-diagonal shortcut hypothesis held
    std::vector<ConditionReport> evidence;
};

struct ClassifyOptions {
    bool use_fast_path = true;
    int confirm_enumeration_max_n = 20;  // materialized witness confirmation guard
};

/// True iff the submatrix of blocks (n_w+1..delta) x (1..n_w) is zero.
bool check_eq2(const BlockView& view, int n_w);

/// Evaluate the ruled-split conditions for one n_w in 0..delta-1, searching
/// ruled contents for a witness set whose type survives the layer.
ConditionReport check_ruled_conditions(const BlockView& view, int n_w, const ClassifyOptions& opt = {});

/// Cheap refutation pass: a non-type-preserving verdict when the sub-diagonal
/// blocks are nonzero for every interior n_w and both edge splits are ruled
/// out by rank arguments. Returns nothing when a full classification is needed.
std::optional<Verdict> fast_path(const BlockView& view);

/// Full structural classification. Type-preserving means some canonical set
/// of a nontrivial bounded type keeps its type under the layer.
Verdict classify(const BlockView& view, const ClassifyOptions& opt = {});

struct OracleOptions {
    uint64_t element_budget = 400'000'000;  // materialized elements processed
    bool count_all = false;                 // keep scanning to count every preserved set
};

struct OracleResult {
    enum class Status { FoundWitness, NoneExists, Undecided };
    Status status = Status::NoneExists;
    std::optional<CanonicalSet> witness;
    uint64_t candidates_tried = 0;
    uint64_t elements_processed = 0;
    uint64_t preserved_count = 0;  // meaningful when count_all was set
};

/// Exhaustive ground truth: enumerate canonical sets of the given triple
/// (all white assignments, all ruled contents; power-of-two cardinalities
/// when m == 4), materialize each, push it through the layer and compare
/// types element by element. Guard: n <= 16, m <= 4.
OracleResult oracle_preserved(const BlockView& view, const TypeTriple& triple, const OracleOptions& opt = {});

struct OracleVerdict {
    enum class Kind { TypePreserving, NonTypePreserving, Undecided };
    Kind kind = Kind::NonTypePreserving;
    std::vector<std::pair<TypeTriple, OracleResult>> per_triple;
    uint64_t elements_processed = 0;
};

/// Union of oracle_preserved over every nontrivial bounded triple.
OracleVerdict oracle_classify(const BlockView& view, const OracleOptions& opt = {});

const char* to_string(Verdict::Kind k);
const char* to_string(OracleVerdict::Kind k);

nlohmann::json to_json(const CanonicalSet& c);
nlohmann::json to_json(const Verdict& v);
nlohmann::json to_json(const OracleVerdict& v);

}  // namespace mixaudit
