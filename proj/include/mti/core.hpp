#pragma once
// Core value types for the missing-tag identification testbed: tag identity,
// ground truth, the accuracy requirement, the air-time model, and the cost
// ledger every protocol charges its slots and bits to.

#include <cstdint>
#include <vector>

namespace mti {

struct PRNGState;  // hashing.hpp

// 96-bit tag identifier, split into a 64-bit low word and 32-bit high word.
struct TagId {
    uint64_t lo = 0;
    uint32_t hi = 0;

    friend bool operator==(const TagId& a, const TagId& b) {
        return a.lo == b.lo && a.hi == b.hi;
    }
    friend bool operator!=(const TagId& a, const TagId& b) { return !(a == b); }
    friend bool operator<(const TagId& a, const TagId& b) {
        return a.hi != b.hi ? a.hi < b.hi : a.lo < b.lo;
    }
};

// The reader-side inventory list plus the short pseudo-IDs derived for one
// run. pseudo_ids is parallel to tags; values are distinct and < 2^bits.
struct Inventory {
    std::vector<TagId> tags;
    std::vector<uint64_t> pseudo_ids;
    uint32_t pseudo_id_bits = 0;
    uint64_t pseudo_id_seed = 0;
    uint32_t pseudo_id_iterations = 1;

    uint32_t size() const { return static_cast<uint32_t>(tags.size()); }
};

// Which tags are actually gone this run. `missing` holds sorted tag indices.
struct GroundTruth {
    std::vector<uint32_t> missing;
    double alpha = 0.0;
};

// Identification quality target: with probability >= 1-delta the reported set
// must cover >= 1-epsilon of the truly missing tags. The analytic range is
// 0 < epsilon <= 1/2 and 0 <= delta < 1/3; epsilon == 0 is accepted as the
// exhaustive-mode sentinel. Values outside the range still run but are
// flagged so callers can warn or refuse.
struct AccuracyRequirement {
    double epsilon = 0.01;
    double delta = 0.1;
};

bool requirement_in_range(const AccuracyRequirement& req);

// Slot durations and link rates. Uplink bits ride inside the charged slots
// and are recorded for reporting only; downlink (reader broadcast) bits add
// transmission time on top of the slot framing.
struct TimingModel {
    double t_short_s = 0.4e-3;
    double t_tag_s = 2.4e-3;
    double t_long_s = 0.8e-3;
    double uplink_bps = 40000.0;
    double downlink_bps = 40000.0;
    double per_slot_overhead_s = 0.0;
};

bool timing_valid(const TimingModel& t);

struct CostLedger {
    uint64_t short_slots = 0;
    uint64_t long_slots = 0;
    uint64_t tagid_slots = 0;
    uint64_t reader_bits = 0;
    uint64_t tag_bits = 0;
};

struct IdentificationResult {
    std::vector<uint32_t> reported_missing;  // sorted tag indices
    CostLedger ledger;
    double elapsed_s = 0.0;
};

// Wall-clock seconds implied by a ledger under a timing model.
double elapsed_seconds(const CostLedger& ledger, const TimingModel& timing);

// |missing ∩ reported| / |missing|; defined as 1.0 when nothing is missing.
double accuracy_ratio(const GroundTruth& truth, const IdentificationResult& result);

// Uniform sample of floor(alpha * n_tags) distinct missing indices.
GroundTruth make_ground_truth(uint32_t n_tags, double alpha, PRNGState& rng);

}  // namespace mti
