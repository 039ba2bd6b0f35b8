#include "mti/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mti/hashing.hpp"

namespace mti {

bool requirement_in_range(const AccuracyRequirement& req) {
    bool eps_ok = req.epsilon >= 0.0 && req.epsilon <= 0.5;
    bool delta_ok = req.delta >= 0.0 && req.delta < 1.0 / 3.0;
    return eps_ok && delta_ok;
}

bool timing_valid(const TimingModel& t) {
    return t.t_short_s > 0.0 && t.t_tag_s > 0.0 && t.t_long_s > 0.0 &&
           t.uplink_bps > 0.0 && t.downlink_bps > 0.0 &&
           t.per_slot_overhead_s >= 0.0;
}

double elapsed_seconds(const CostLedger& ledger, const TimingModel& timing) {
    double slots = static_cast<double>(ledger.short_slots) +
                   static_cast<double>(ledger.long_slots) +
                   static_cast<double>(ledger.tagid_slots);
    return static_cast<double>(ledger.short_slots) * timing.t_short_s +
           static_cast<double>(ledger.long_slots) * timing.t_long_s +
           static_cast<double>(ledger.tagid_slots) * timing.t_tag_s +
           static_cast<double>(ledger.reader_bits) / timing.downlink_bps +
           slots * timing.per_slot_overhead_s;
}

double accuracy_ratio(const GroundTruth& truth, const IdentificationResult& result) {
    if (truth.missing.empty()) return 1.0;
    size_t hits = 0, i = 0, j = 0;
    const auto& a = truth.missing;
    const auto& b = result.reported_missing;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            ++hits;
            ++i;
            ++j;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(a.size());
}

GroundTruth make_ground_truth(uint32_t n_tags, double alpha, PRNGState& rng) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("make_ground_truth: alpha outside [0,1]");
    // 1e-9 nudge keeps alpha*n that is an integer in exact arithmetic from
    // flooring one short (e.g. 0.3 * 1000).
    auto m = static_cast<uint32_t>(std::floor(alpha * static_cast<double>(n_tags) + 1e-9));
    if (m > n_tags) m = n_tags;

    GroundTruth truth;
    truth.alpha = alpha;
    if (m == 0) return truth;

    std::vector<uint32_t> idx(n_tags);
    std::iota(idx.begin(), idx.end(), 0u);
    for (uint32_t i = 0; i < m; ++i) {
        uint64_t j = i + prng_below(rng, n_tags - i);
        std::swap(idx[i], idx[j]);
    }
    truth.missing.assign(idx.begin(), idx.begin() + m);
    std::sort(truth.missing.begin(), truth.missing.end());
    return truth;
}

}  // namespace mti
