#include "mti/cpt.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <stdexcept>

#include "mti/channel.hpp"
#include "mti/stats.hpp"

namespace mti {

namespace {

struct TreeBuilder {
    const std::vector<uint64_t>& pids;
    uint32_t bits;
    PRNGState& rng;
    uint32_t leaf_count = 0;
    uint32_t h_min = UINT32_MAX;
    uint32_t h_max = 0;

    std::unique_ptr<CptNode> build(std::vector<uint32_t>&& tags, uint32_t depth) {
        auto node = std::make_unique<CptNode>();
        if (tags.size() <= 2) {
            node->tags = std::move(tags);
            if (node->tags.size() == 2) {
                uint64_t diff = pids[node->tags[0]] ^ pids[node->tags[1]];
                assert(diff != 0);
                node->distinguishing_bit =
                    static_cast<int16_t>(std::countr_zero(diff));
            }
            ++leaf_count;
            h_min = std::min(h_min, depth);
            h_max = std::max(h_max, depth);
            return node;
        }

        std::vector<uint32_t> ones(bits, 0);
        for (uint32_t t : tags) {
            uint64_t pid = pids[t];
            for (uint32_t b = 0; b < bits; ++b) ones[b] += (pid >> b) & 1;
        }
        uint32_t size = static_cast<uint32_t>(tags.size());
        uint32_t best_imbalance = UINT32_MAX;
        std::vector<uint32_t> tied;
        for (uint32_t b = 0; b < bits; ++b) {
            uint32_t o = ones[b];
            uint32_t z = size - o;
            uint32_t imbalance = o > z ? o - z : z - o;
            if (imbalance < best_imbalance) {
                best_imbalance = imbalance;
                tied.assign(1, b);
            } else if (imbalance == best_imbalance) {
                tied.push_back(b);
            }
        }
        uint32_t chosen =
            tied.size() == 1 ? tied[0]
                             : tied[static_cast<size_t>(prng_next(rng) % tied.size())];
        // a bit already fixed on this path splits 0/all and can never win
        assert(best_imbalance < size);

        std::vector<uint32_t> zeros_side, ones_side;
        zeros_side.reserve(size - ones[chosen]);
        ones_side.reserve(ones[chosen]);
        for (uint32_t t : tags) {
            if ((pids[t] >> chosen) & 1) {
                ones_side.push_back(t);
            } else {
                zeros_side.push_back(t);
            }
        }
        assert(!zeros_side.empty() && !ones_side.empty());
        tags.clear();
        tags.shrink_to_fit();

        node->split_bit = static_cast<int16_t>(chosen);
        node->zero = build(std::move(zeros_side), depth + 1);
        node->one = build(std::move(ones_side), depth + 1);
        return node;
    }
};

void collect_leaves_dfs(const CptNode& node, std::vector<PathStep>& path,
                        std::vector<TraversalLeaf>& out) {
    if (node.is_leaf()) {
        out.push_back(TraversalLeaf{&node, path});
        return;
    }
    auto bit = static_cast<uint8_t>(node.split_bit);
    path.push_back(PathStep{bit, 0});
    collect_leaves_dfs(*node.zero, path, out);
    path.back().value = 1;
    collect_leaves_dfs(*node.one, path, out);
    path.pop_back();
}

}  // namespace

Cpt build_cpt(const std::vector<uint64_t>& pseudo_ids, uint32_t pseudo_id_bits,
              PRNGState& rng) {
    if (pseudo_ids.empty())
        throw std::invalid_argument("build_cpt: empty pseudo-ID set");
    if (pseudo_id_bits == 0 || pseudo_id_bits > 64)
        throw std::invalid_argument("build_cpt: pseudo_id_bits outside [1,64]");
    {
        std::vector<uint64_t> sorted(pseudo_ids);
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("build_cpt: duplicate pseudo-IDs");
    }

    TreeBuilder builder{pseudo_ids, pseudo_id_bits, rng};
    std::vector<uint32_t> all(pseudo_ids.size());
    for (uint32_t i = 0; i < all.size(); ++i) all[i] = i;

    Cpt tree;
    tree.root = builder.build(std::move(all), 0);
    tree.pseudo_id_bits = pseudo_id_bits;
    tree.leaf_count = builder.leaf_count;
    tree.h_min = builder.h_min;
    tree.h_max = builder.h_max;
    return tree;
}

std::vector<TraversalLeaf> plan_traversal(const Cpt& tree, CptTraversal order) {
    std::vector<TraversalLeaf> leaves;
    leaves.reserve(tree.leaf_count);
    std::vector<PathStep> path;
    collect_leaves_dfs(*tree.root, path, leaves);
    if (order == CptTraversal::height_ordered) {
        std::stable_sort(leaves.begin(), leaves.end(),
                         [](const TraversalLeaf& a, const TraversalLeaf& b) {
                             return a.path.size() < b.path.size();
                         });
    }
    return leaves;
}

QueryMessage delta_encode(const std::vector<PathStep>* prev_path,
                          const std::vector<PathStep>& next_path,
                          uint8_t probe_bit, uint32_t pseudo_id_bits,
                          uint32_t h_max) {
    if (pseudo_id_bits == 0)
        throw std::invalid_argument("delta_encode: pseudo_id_bits must be > 0");
    QueryMessage msg;
    msg.probe_bit = probe_bit;
    size_t common = 0;
    if (prev_path != nullptr) {
        while (common < prev_path->size() && common < next_path.size() &&
               (*prev_path)[common] == next_path[common])
            ++common;
        msg.pop_count = static_cast<uint32_t>(prev_path->size() - common);
    }
    msg.directives.assign(next_path.begin() + static_cast<ptrdiff_t>(common),
                          next_path.end());
    uint32_t pop_field = ceil_log2(static_cast<uint64_t>(h_max) + 1);
    uint32_t bit_field = ceil_log2(pseudo_id_bits);
    msg.size_bits = pop_field +
                    static_cast<uint32_t>(msg.directives.size()) * (bit_field + 1) +
                    bit_field;
    return msg;
}

uint8_t leaf_probe_bit(const CptNode& leaf) {
    if (!leaf.is_leaf()) throw std::invalid_argument("leaf_probe_bit: not a leaf");
    if (leaf.tags.size() == 2) return static_cast<uint8_t>(leaf.distinguishing_bit);
    return 0;
}

std::vector<uint32_t> leaf_check(const TraversalLeaf& leaf, const Inventory& inventory,
                                 const std::vector<char>& missing_flags,
                                 CostLedger& ledger) {
    const CptNode& node = *leaf.node;
    uint8_t probe = leaf_probe_bit(node);
    std::vector<uint8_t> replies;
    replies.reserve(node.tags.size());
    for (uint32_t t : node.tags) {
        if (!missing_flags[t])
            replies.push_back(static_cast<uint8_t>((inventory.pseudo_ids[t] >> probe) & 1));
    }
    SlotObservation obs = transmit_slot(replies);
    charge_response(ledger, static_cast<uint32_t>(replies.size()));

    std::vector<uint32_t> absent;
    if (node.tags.size() == 2) {
        auto bit_of = [&](uint32_t t) {
            return static_cast<uint8_t>((inventory.pseudo_ids[t] >> probe) & 1);
        };
        PairPresence presence = decode_pair(obs, bit_of(node.tags[0]), bit_of(node.tags[1]));
        if (!presence.first) absent.push_back(node.tags[0]);
        if (!presence.second) absent.push_back(node.tags[1]);
    } else if (obs.kind == SlotKind::empty) {
        absent.push_back(node.tags[0]);
    }
    return absent;
}

IdentificationResult run_cpt(const Inventory& inventory, const GroundTruth& truth,
                             const AccuracyRequirement& requirement,
                             double expected_alpha, PRNGState& rng,
                             const TimingModel& timing,
                             const ProtocolConfig& config) {
    IdentificationResult result;
    uint32_t n = inventory.size();
    if (n == 0) return result;

    std::vector<char> missing_flags(n, 0);
    for (uint32_t idx : truth.missing) missing_flags.at(idx) = 1;

    Cpt tree = build_cpt(inventory.pseudo_ids, inventory.pseudo_id_bits, rng);
    std::vector<TraversalLeaf> plan = plan_traversal(tree, config.cpt_traversal);
    assert(plan.size() == tree.leaf_count);

    uint64_t budget = plan.size();
    if (requirement.epsilon > 0.0 && expected_alpha > 0.0) {
        try {
            uint64_t samples = stopping_sample_size(requirement.epsilon,
                                                    requirement.delta, expected_alpha);
            uint64_t leaves_needed = (samples + 1) / 2;  // each leaf covers <= 2 tags
            budget = std::min(budget, leaves_needed);
        } catch (const std::invalid_argument&) {
            // stopping rule undefined here (alpha or delta at a degenerate
            // value): fall back to parsing every leaf
        }
    }

    uint64_t offset = prng_below(rng, tree.leaf_count);
    std::vector<char> confirmed(n, 0);
    const std::vector<PathStep>* prev = nullptr;
    for (uint64_t i = 0; i < budget; ++i) {
        const TraversalLeaf& leaf = plan[(offset + i) % plan.size()];
        QueryMessage query = delta_encode(prev, leaf.path, leaf_probe_bit(*leaf.node),
                                          tree.pseudo_id_bits, tree.h_max);
        charge_query(result.ledger, query.size_bits, config.long_slot_bits);
        std::vector<uint32_t> absent =
            leaf_check(leaf, inventory, missing_flags, result.ledger);
        for (uint32_t t : leaf.node->tags) confirmed[t] = 1;
        for (uint32_t t : absent) confirmed[t] = 0;
        prev = &leaf.path;
    }

    result.reported_missing.reserve(n);
    for (uint32_t t = 0; t < n; ++t) {
        if (!confirmed[t]) result.reported_missing.push_back(t);
    }
    result.elapsed_s = elapsed_seconds(result.ledger, timing);
    return result;
}

}  // namespace mti
