#include "mixaudit/groupan.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <thread>

#include "mixaudit/errors.hpp"
#include "mixaudit/typesys.hpp"

namespace mixaudit {

std::vector<uint64_t> CosetPartition::block_elements(uint64_t label) const {
    if (label >= num_blocks()) throw std::invalid_argument("block_elements: label out of range");
    std::vector<uint64_t> out;
    out.reserve(block_size());
    for (uint64_t k = 0; k < block_size(); ++k) out.push_back(label + (k << q));
    return out;
}

CosetPartition coset_partition(int q, int n) {
    if (n < 2 || n > 24) throw GuardError("coset_partition: n must be in 2..24");
    if (q < 1 || q > n - 1) throw std::invalid_argument("coset_partition: q must be in 1..n-1");
    return CosetPartition{q, n};
}

bool partition_invariant_under(const std::vector<uint32_t>& perm, const CosetPartition& part) {
    uint64_t points = uint64_t{1} << part.n;
    if (perm.size() != points) throw std::invalid_argument("partition_invariant_under: table size mismatch");
    uint64_t nblocks = part.num_blocks();
    std::vector<uint64_t> image_block(nblocks, ~uint64_t{0});
    for (uint64_t v = 0; v < points; ++v) {
        uint64_t b = part.block_of(v);
        uint64_t ib = part.block_of(perm[v]);
        if (image_block[b] == ~uint64_t{0}) image_block[b] = ib;
        else if (image_block[b] != ib) return false;
    }
    return true;
}

namespace {

std::vector<uint32_t> rho_table(const SpnModCipher& cipher) {
    uint64_t points = uint64_t{1} << cipher.n();
    std::vector<uint32_t> table(points);
    for (uint64_t v = 0; v < points; ++v) table[v] = uint32_t(cipher.rho(v));
    return table;
}

}  // namespace

PrimitivityReport spnmod_primitivity(const SpnModCipher& cipher) {
    int n = cipher.n();
    if (n < 2 || n > 20) throw GuardError("spnmod_primitivity: n must be in 2..20");

    PrimitivityReport report;
    report.kind = "spnmod";
    std::vector<uint32_t> rho = rho_table(cipher);
    report.work_ops += rho.size();

    bool any_invariant = false;
    for (int q = 1; q <= n - 1; ++q) {
        CosetPartition part = coset_partition(q, n);
        QWitness w;
        w.q = q;
        w.invariant = partition_invariant_under(rho, part);
        report.work_ops += rho.size();

        // Does the subgroup <2^q> map onto its 0rho-translate?
        std::vector<uint64_t> image;
        image.reserve(part.block_size());
        for (uint64_t v : subgroup_elements(q, n)) image.push_back(rho[v]);
        std::sort(image.begin(), image.end());
        std::vector<uint64_t> translated = translate_set(subgroup_elements(q, n), rho[0], n);
        w.theorem_condition = image == translated;
        report.work_ops += 2 * image.size();

        if (w.invariant && !w.theorem_condition)
            throw std::logic_error("spnmod_primitivity: invariant partition without the 0-block condition");
        any_invariant = any_invariant || w.invariant;
        report.q_witnesses.push_back(w);
    }
    report.verdict = any_invariant ? PrimitivityReport::Outcome::Imprimitive : PrimitivityReport::Outcome::Primitive;
    return report;
}

namespace {

struct UnionFind {
    std::vector<uint32_t> parent;
    uint32_t classes;

    explicit UnionFind(uint32_t size) : parent(size), classes(size) {
        for (uint32_t i = 0; i < size; ++i) parent[i] = i;
    }
    uint32_t find(uint32_t x) {
        uint32_t root = x;
        while (parent[root] != root) root = parent[root];
        while (parent[x] != root) {
            uint32_t next = parent[x];
            parent[x] = root;
            x = next;
        }
        return root;
    }
    bool unite(uint32_t a, uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        --classes;
        return true;
    }
};

// Finest partition in which 0 and w share a block and every generator maps
// blocks into blocks: close the merged pair set under the generator images.
uint64_t close_pair(const std::vector<std::vector<uint32_t>>& gens, uint32_t points, uint32_t w,
                    UnionFind& uf, std::vector<std::pair<uint32_t, uint32_t>>& stack, uint64_t& ops) {
    uf = UnionFind(points);
    stack.clear();
    stack.emplace_back(0, w);
    while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        ++ops;
        if (!uf.unite(a, b)) continue;
        for (const auto& g : gens) stack.emplace_back(g[a], g[b]);
    }
    return uf.classes;
}

void verify_block_system(const std::vector<std::vector<uint32_t>>& gens, UnionFind& uf, uint32_t points) {
    for (const auto& g : gens) {
        std::vector<uint32_t> image_root(points, UINT32_MAX);
        for (uint32_t v = 0; v < points; ++v) {
            uint32_t r = uf.find(v);
            uint32_t ir = uf.find(g[v]);
            if (image_root[r] == UINT32_MAX) image_root[r] = ir;
            else if (image_root[r] != ir)
                throw std::logic_error("feistel_block_search: closure is not generator-invariant");
        }
    }
}

}  // namespace

int worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MIXAUDIT_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) return int(std::min<unsigned>(hw, unsigned(cap)));
    }
    return int(std::min(hw, 8u));
}

PrimitivityReport feistel_block_search(const FeistelGostCipher& cipher, const FeistelSearchOptions& opt) {
    int h = cipher.half_n();
    if (2 * h > 14) throw GuardError("feistel_block_search: state space beyond 2^14 points");
    uint32_t half_points = uint32_t{1} << h;
    uint32_t points = half_points * half_points;

    // rho lookup on one half, then the three group generators as point maps.
    // Translation by 1 on a half generates every boxplus-translation of it.
    std::vector<uint32_t> rho(half_points);
    for (uint32_t x = 0; x < half_points; ++x) rho[x] = uint32_t(cipher.rho(x));

    auto encode = [&](uint32_t x1, uint32_t x2) { return x1 * half_points + x2; };
    std::vector<std::vector<uint32_t>> gens(3, std::vector<uint32_t>(points));
    for (uint32_t x1 = 0; x1 < half_points; ++x1)
        for (uint32_t x2 = 0; x2 < half_points; ++x2) {
            uint32_t p = encode(x1, x2);
            gens[0][p] = encode((x1 + 1) & (half_points - 1), x2);
            gens[1][p] = encode(x1, (x2 + 1) & (half_points - 1));
            gens[2][p] = encode(x2, x1 ^ rho[x2]);
        }

    PrimitivityReport report;
    report.kind = "feistel";
    report.seeds_total = points - 1;

    int threads = opt.threads > 0 ? opt.threads : worker_count();
    threads = std::max(1, std::min<int>(threads, int(report.seeds_total)));

    struct WorkerResult {
        std::optional<BlockWitness> witness;
        uint64_t ops = 0;
        uint64_t seeds = 0;
    };
    std::vector<WorkerResult> results(threads);
    uint64_t per_worker_budget = opt.op_budget / uint64_t(threads);

    auto run_range = [&](uint32_t first, uint32_t last, WorkerResult& res) {
        UnionFind uf(points);
        std::vector<std::pair<uint32_t, uint32_t>> stack;
        for (uint32_t w = first; w < last; ++w) {
            if (res.ops > per_worker_budget) return;
            uint64_t classes = close_pair(gens, points, w, uf, stack, res.ops);
            ++res.seeds;
            if (classes > 1) {
                uint32_t zero_root = uf.find(0);
                uint64_t size0 = 0;
                for (uint32_t v = 0; v < points; ++v)
                    if (uf.find(v) == zero_root) ++size0;
                verify_block_system(gens, uf, points);
                if (!res.witness) res.witness = BlockWitness{w, classes, size0};
            }
        }
    };

    if (threads == 1) {
        run_range(1, points, results[0]);
    } else {
        std::vector<std::thread> pool;
        uint32_t chunk = (points - 1 + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            uint32_t first = 1 + uint32_t(t) * chunk;
            uint32_t last = std::min(points, first + chunk);
            if (first >= last) continue;
            pool.emplace_back(run_range, first, last, std::ref(results[t]));
        }
        for (auto& th : pool) th.join();
    }

    for (const WorkerResult& res : results) {
        report.work_ops += res.ops;
        report.seeds_examined += res.seeds;
        if (res.witness && (!report.block_witness || res.witness->seed_point < report.block_witness->seed_point))
            report.block_witness = res.witness;
    }
    if (report.block_witness) report.verdict = PrimitivityReport::Outcome::Imprimitive;
    else if (report.seeds_examined == report.seeds_total) report.verdict = PrimitivityReport::Outcome::Primitive;
    else report.verdict = PrimitivityReport::Outcome::Undecided;
    return report;
}

AttackStats attack_demo(const SpnModCipher& cipher, const CosetPartition& part, int rounds, uint64_t trials,
                        uint64_t seed) {
    int n = cipher.n();
    if (part.n != n) throw std::invalid_argument("attack_demo: partition and cipher widths differ");
    if (rounds < 1) throw std::invalid_argument("attack_demo: rounds must be positive");
    if (trials < 1) throw std::invalid_argument("attack_demo: trials must be positive");
    if (part.q < 1 || part.q > n - 1) throw std::invalid_argument("attack_demo: partition must be nontrivial");

    std::vector<uint32_t> rho = rho_table(cipher);
    uint64_t nblocks = part.num_blocks();

    // Precondition: the keyless round must respect the partition.
    {
        std::vector<uint64_t> image_block(nblocks, ~uint64_t{0});
        for (uint64_t v = 0; v < rho.size(); ++v) {
            uint64_t b = part.block_of(v);
            uint64_t ib = part.block_of(rho[v]);
            if (image_block[b] == ~uint64_t{0}) image_block[b] = ib;
            else if (image_block[b] != ib)
                throw PreconditionError("attack_demo: partition not invariant under the round; failing block " +
                                            std::to_string(b),
                                        (long long)b);
        }
    }

    // Label map of rho: residue ell is its own coset representative.
    std::vector<uint64_t> label_map(nblocks);
    for (uint64_t ell = 0; ell < nblocks; ++ell) label_map[ell] = part.block_of(rho[ell]);

    AttackStats stats;
    stats.q = part.q;
    stats.n = n;
    stats.rounds = rounds;
    stats.trials = trials;
    stats.leaked_bits = part.q;

    std::mt19937_64 rng(seed);
    uint64_t state_mask = (uint64_t{1} << n) - 1;
    std::vector<uint64_t> keys(rounds);
    for (uint64_t t = 0; t < trials; ++t) {
        uint64_t plaintext = rng() & state_mask;
        for (int r = 0; r < rounds; ++r) keys[r] = rng() & state_mask;

        uint64_t c = plaintext;
        uint64_t predicted = part.block_of(plaintext);
        for (int r = 0; r < rounds; ++r) {
            c = cipher.round(c, keys[r]);
            predicted = (label_map[predicted] + part.block_of(keys[r])) & (nblocks - 1);
        }
        if (part.block_of(c) == predicted) ++stats.confirmed;

        if (t == 0) {
            stats.block_permutation.resize(nblocks);
            for (uint64_t ell = 0; ell < nblocks; ++ell) {
                uint64_t out = ell;
                for (int r = 0; r < rounds; ++r) out = (label_map[out] + part.block_of(keys[r])) & (nblocks - 1);
                stats.block_permutation[ell] = out;
            }
        }
    }
    stats.confirmation_rate = double(stats.confirmed) / double(stats.trials);
    return stats;
}

const char* to_string(PrimitivityReport::Outcome o) {
    switch (o) {
        case PrimitivityReport::Outcome::Primitive: return "Primitive";
        case PrimitivityReport::Outcome::Imprimitive: return "Imprimitive";
        default: return "Undecided";
    }
}

nlohmann::json to_json(const PrimitivityReport& r) {
    nlohmann::json j = {{"verdict", to_string(r.verdict)}, {"kind", r.kind}, {"work_ops", r.work_ops}};
    if (r.kind == "spnmod") {
        nlohmann::json per_q = nlohmann::json::array();
        for (const QWitness& w : r.q_witnesses)
            per_q.push_back({{"q", w.q}, {"invariant", w.invariant}, {"theorem_condition", w.theorem_condition}});
        j["per_q"] = per_q;
        j["candidate_block_systems"] = "coset partitions of <2^q>, q = 1..n-1";
    } else {
        j["seeds_total"] = r.seeds_total;
        j["seeds_examined"] = r.seeds_examined;
        j["block_witness"] =
            r.block_witness ? nlohmann::json{{"seed_point", r.block_witness->seed_point},
                                             {"num_blocks", r.block_witness->num_blocks},
                                             {"block_size", r.block_witness->block_size}}
                            : nlohmann::json(nullptr);
    }
    return j;
}

nlohmann::json to_json(const AttackStats& s) {
    nlohmann::json j = {{"q", s.q},
                        {"n", s.n},
                        {"rounds", s.rounds},
                        {"trials", s.trials},
                        {"confirmed", s.confirmed},
                        {"confirmation_rate", s.confirmation_rate},
                        {"leaked_bits", s.leaked_bits},
                        {"num_blocks", uint64_t{1} << s.q}};
    // keep reports readable for wide partitions
    j["block_permutation"] = s.block_permutation.size() <= 4096 ? nlohmann::json(s.block_permutation)
                                                                : nlohmann::json(nullptr);
    return j;
}

}  // namespace mixaudit
