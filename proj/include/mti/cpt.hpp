#pragma once
// Collision-partition tree protocol. Tags are split by pseudo-ID bits into a
// binary tree whose leaves hold at most two tags; the reader walks the
// leaves with delta-encoded path queries, and each leaf answers in a single
// short slot (two tags separated by Manchester coding on a bit where their
// pseudo-IDs differ).

#include <cstdint>
#include <memory>
#include <vector>

#include "mti/config.hpp"
#include "mti/core.hpp"
#include "mti/hashing.hpp"

namespace mti {

struct CptNode {
    // Internal nodes have split_bit >= 0 and both children; leaves have
    // split_bit == -1 and one or two tag indices.
    int16_t split_bit = -1;
    int16_t distinguishing_bit = -1;  // 2-tag leaves: lowest differing bit
    std::vector<uint32_t> tags;
    std::unique_ptr<CptNode> zero;
    std::unique_ptr<CptNode> one;

    bool is_leaf() const { return split_bit < 0; }
};

struct Cpt {
    std::unique_ptr<CptNode> root;
    uint32_t pseudo_id_bits = 0;
    uint32_t leaf_count = 0;
    uint32_t h_min = 0;  // shallowest leaf depth
    uint32_t h_max = 0;  // deepest leaf depth
};

// Greedy balanced split: each internal node picks the pseudo-ID bit with the
// smallest |zeros - ones| imbalance among its tags; ties are broken with one
// PRNG draw modulo the tie count. Throws std::invalid_argument on an empty
// or non-distinct pseudo-ID set.
Cpt build_cpt(const std::vector<uint64_t>& pseudo_ids, uint32_t pseudo_id_bits,
              PRNGState& rng);

struct PathStep {
    uint8_t bit = 0;    // pseudo-ID bit index tested at this edge
    uint8_t value = 0;  // branch taken (0 or 1)

    friend bool operator==(const PathStep& a, const PathStep& b) {
        return a.bit == b.bit && a.value == b.value;
    }
};

struct TraversalLeaf {
    const CptNode* node = nullptr;
    std::vector<PathStep> path;  // root-to-leaf directives
};

// Leaf visiting order for the walk. Every leaf appears exactly once.
std::vector<TraversalLeaf> plan_traversal(const Cpt& tree,
                                          CptTraversal order = CptTraversal::dfs);

// One reader broadcast: retract pop_count levels from the previous query's
// path, then descend along `directives`, then probe `probe_bit`.
struct QueryMessage {
    uint32_t pop_count = 0;
    std::vector<PathStep> directives;
    uint8_t probe_bit = 0;
    uint32_t size_bits = 0;
};

// Encoded size = ceil(log2(h_max+1)) + |directives| * (ceil(log2 L) + 1)
//              + ceil(log2 L), with L = pseudo_id_bits.
// prev_path == nullptr means the first query of a run: pop 0, full path.
QueryMessage delta_encode(const std::vector<PathStep>* prev_path,
                          const std::vector<PathStep>& next_path,
                          uint8_t probe_bit, uint32_t pseudo_id_bits,
                          uint32_t h_max);

// The probe bit a leaf answers on: the distinguishing bit for a pair, bit 0
// for a lone tag.
uint8_t leaf_probe_bit(const CptNode& leaf);

// Executes one leaf probe: present tags reply their pseudo-ID bit at the
// probe position, the slot is charged, and the leaf's absent tag indices are
// returned. missing_flags is indexed by tag index.
std::vector<uint32_t> leaf_check(const TraversalLeaf& leaf, const Inventory& inventory,
                                 const std::vector<char>& missing_flags,
                                 CostLedger& ledger);

// Full protocol run. The leaf budget is
//   n_leaves = min(leaf_count, ceil(stopping_sample_size(eps, delta, alpha)/2))
// (each leaf checks up to two tags); epsilon == 0, alpha == 0, or a stopping
// rule outside its Student-t domain (alpha >= 1/2) parse every leaf. The
// parsed range is a contiguous segment of the leaf order starting at a
// uniform random offset (wrapping). Tags of unparsed leaves are reported
// missing alongside the observed absentees: the reported set is the
// complement of the tags confirmed present.
IdentificationResult run_cpt(const Inventory& inventory, const GroundTruth& truth,
                             const AccuracyRequirement& requirement,
                             double expected_alpha, PRNGState& rng,
                             const TimingModel& timing,
                             const ProtocolConfig& config = {});

}  // namespace mti
