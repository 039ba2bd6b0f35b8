#include "mti/baselines.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "mti/channel.hpp"
#include "mti/stats.hpp"

namespace mti {

namespace {

constexpr uint64_t no_stopping = UINT64_MAX;

// Observation count at which a run may stop, or no_stopping for exhaustive
// mode (epsilon 0, no expected missing tags, or a rule outside the
// Student-t domain).
uint64_t stopping_target(const AccuracyRequirement& requirement, double expected_alpha) {
    if (requirement.epsilon <= 0.0 || expected_alpha <= 0.0) return no_stopping;
    try {
        return stopping_sample_size(requirement.epsilon, requirement.delta,
                                    expected_alpha);
    } catch (const std::invalid_argument&) {
        return no_stopping;
    }
}

uint64_t frame_length(size_t remaining, double rho_hat) {
    if (!(rho_hat > 0.0)) throw std::invalid_argument("frame length: rho_hat must be > 0");
    auto f = static_cast<uint64_t>(
        std::ceil(static_cast<double>(remaining) / rho_hat - 1e-9));
    return f < 1 ? 1 : f;
}

std::vector<char> missing_flags_of(const GroundTruth& truth, uint32_t n) {
    std::vector<char> flags(n, 0);
    for (uint32_t idx : truth.missing) flags.at(idx) = 1;
    return flags;
}

void finish(IdentificationResult& result, const std::vector<char>& confirmed,
            uint32_t n, const TimingModel& timing) {
    result.reported_missing.reserve(n);
    for (uint32_t t = 0; t < n; ++t) {
        if (!confirmed[t]) result.reported_missing.push_back(t);
    }
    result.elapsed_s = elapsed_seconds(result.ledger, timing);
}

}  // namespace

IdentificationResult run_polling(const Inventory& inventory,
                                 const GroundTruth& truth,
                                 const TimingModel& timing) {
    IdentificationResult result;
    uint32_t n = inventory.size();
    if (n == 0) return result;
    std::vector<char> missing = missing_flags_of(truth, n);
    std::vector<char> confirmed(n, 0);
    for (uint32_t t = 0; t < n; ++t) {
        result.ledger.tagid_slots += 1;  // reader speaks the full 96-bit ID
        bool present = !missing[t];
        charge_response(result.ledger, present ? 1 : 0);
        if (present) confirmed[t] = 1;
    }
    finish(result, confirmed, n, timing);
    return result;
}

IdentificationResult run_pcmti(const Inventory& inventory,
                               const GroundTruth& truth,
                               const AccuracyRequirement& requirement,
                               double expected_alpha,
                               PRNGState& rng,
                               const TimingModel& timing,
                               const ProtocolConfig& config) {
    IdentificationResult result;
    uint32_t n = inventory.size();
    if (n == 0) return result;
    std::vector<char> missing = missing_flags_of(truth, n);
    std::vector<char> confirmed(n, 0);
    std::vector<char> done(n, 0);
    uint64_t target = stopping_target(requirement, expected_alpha);
    uint64_t verified_slots = 0;

    std::vector<uint32_t> unverified(n);
    std::iota(unverified.begin(), unverified.end(), 0u);

    // two tags share one Manchester slot, replying their pseudo-ID bits at
    // the lowest position where the two pseudo-IDs differ
    auto verify_pair = [&](uint32_t a, uint32_t b) {
        uint64_t pa = inventory.pseudo_ids[a];
        uint64_t pb = inventory.pseudo_ids[b];
        assert(pa != pb);
        auto dbit = static_cast<uint32_t>(std::countr_zero(pa ^ pb));
        auto bit_a = static_cast<uint8_t>((pa >> dbit) & 1);
        auto bit_b = static_cast<uint8_t>((pb >> dbit) & 1);
        std::vector<uint8_t> replies;
        if (!missing[a]) replies.push_back(bit_a);
        if (!missing[b]) replies.push_back(bit_b);
        SlotObservation obs = transmit_slot(replies);
        charge_response(result.ledger, static_cast<uint32_t>(replies.size()));
        PairPresence presence = decode_pair(obs, bit_a, bit_b);
        confirmed[a] = presence.first ? 1 : 0;
        confirmed[b] = presence.second ? 1 : 0;
        done[a] = done[b] = 1;
        ++verified_slots;
    };

    bool stopped = false;
    for (uint32_t frame = 0;
         frame < config.max_frames && !unverified.empty() && !stopped; ++frame) {
        uint64_t f = frame_length(unverified.size(), config.rho_hat);
        uint32_t addr_bits = ceil_log2(f);
        uint64_t frame_seed = prng_next(rng);

        std::vector<std::vector<uint32_t>> slots(f);
        for (uint32_t t : unverified)
            slots[keyed_hash(inventory.tags[t], frame_seed) % f].push_back(t);

        auto charge_addr = [&] {
            charge_query(result.ledger, addr_bits, config.long_slot_bits);
        };

        std::optional<uint32_t> pending;  // lone singleton awaiting a partner
        for (uint64_t s = 0; s < f && !stopped; ++s) {
            size_t occ = slots[s].size();
            if (occ == 0 || occ >= 3) continue;  // >= 3 defers to the next frame
            if (occ == 2) {
                charge_addr();
                verify_pair(slots[s][0], slots[s][1]);
            } else if (!pending.has_value()) {
                pending = slots[s][0];
                continue;
            } else {
                // merge two singleton slots into one synthetic pair slot
                charge_addr();
                charge_addr();
                verify_pair(*pending, slots[s][0]);
                pending.reset();
            }
            if (verified_slots >= target) stopped = true;
        }
        if (!stopped && pending.has_value()) {
            uint32_t t = *pending;
            charge_addr();
            std::vector<uint8_t> replies;
            if (!missing[t])
                replies.push_back(static_cast<uint8_t>(inventory.pseudo_ids[t] & 1));
            SlotObservation obs = transmit_slot(replies);
            charge_response(result.ledger, static_cast<uint32_t>(replies.size()));
            confirmed[t] = obs.kind != SlotKind::empty ? 1 : 0;
            done[t] = 1;
            ++verified_slots;
            if (verified_slots >= target) stopped = true;
        }

        std::vector<uint32_t> next;
        next.reserve(unverified.size());
        for (uint32_t t : unverified) {
            if (!done[t]) next.push_back(t);
        }
        unverified = std::move(next);
    }

    finish(result, confirmed, n, timing);
    return result;
}

IdentificationResult run_mmti(const Inventory& inventory,
                              const GroundTruth& truth,
                              const AccuracyRequirement& requirement,
                              double expected_alpha,
                              PRNGState& rng,
                              const TimingModel& timing,
                              const ProtocolConfig& config) {
    IdentificationResult result;
    uint32_t n = inventory.size();
    if (n == 0) return result;
    if (config.mmti_seed_candidates < 1)
        throw std::invalid_argument("run_mmti: need at least one candidate seed");
    std::vector<char> missing = missing_flags_of(truth, n);
    std::vector<char> confirmed(n, 0);
    std::vector<char> done(n, 0);
    uint64_t target = stopping_target(requirement, expected_alpha);
    uint64_t observations = 0;

    // the frame span stays fixed at the full-inventory length: the per-slot
    // seed selector always covers the original hash range, so downlink cost
    // per pass does not shrink with the unverified count
    uint64_t f = frame_length(n, config.rho_hat);
    uint32_t k = config.mmti_seed_candidates;
    uint32_t selector_bits = ceil_log2(static_cast<uint64_t>(k) + 1);  // 0 = unused

    std::vector<uint32_t> unverified(n);
    std::iota(unverified.begin(), unverified.end(), 0u);

    std::vector<uint32_t> occupancy(static_cast<size_t>(k) * f);
    std::vector<uint32_t> sole_tag(static_cast<size_t>(k) * f);
    std::vector<uint32_t> claimed_tag(f);
    std::vector<char> tag_claimed(n);

    bool stopped = false;
    for (uint32_t frame = 0;
         frame < config.max_frames && !unverified.empty() && !stopped; ++frame) {
        uint64_t frame_seed = prng_next(rng);
        std::fill(occupancy.begin(), occupancy.end(), 0u);
        for (uint32_t j = 0; j < k; ++j) {
            uint64_t seed = frame_seed + j;
            uint32_t* occ = occupancy.data() + static_cast<size_t>(j) * f;
            uint32_t* sole = sole_tag.data() + static_cast<size_t>(j) * f;
            for (uint32_t t : unverified) {
                uint64_t s = keyed_hash(inventory.tags[t], seed) % f;
                occ[s] += 1;
                sole[s] = t;
            }
        }
        std::vector<uint32_t> singles(k, 0);
        for (uint32_t j = 0; j < k; ++j) {
            const uint32_t* occ = occupancy.data() + static_cast<size_t>(j) * f;
            for (uint64_t s = 0; s < f; ++s) singles[j] += occ[s] == 1;
        }
        uint32_t j_star = 0;
        for (uint32_t j = 1; j < k; ++j) {
            if (singles[j] > singles[j_star]) j_star = j;
        }
        for (uint32_t j = 0; j < k; ++j) assert(singles[j_star] >= singles[j]);

        std::fill(claimed_tag.begin(), claimed_tag.end(), UINT32_MAX);
        std::fill(tag_claimed.begin(), tag_claimed.end(), 0);
        uint64_t claimed_count = 0;
        {
            // pass 1: the winning seed takes every slot it isolates
            const uint32_t* occ = occupancy.data() + static_cast<size_t>(j_star) * f;
            const uint32_t* sole = sole_tag.data() + static_cast<size_t>(j_star) * f;
            for (uint64_t s = 0; s < f; ++s) {
                if (occ[s] == 1) {
                    claimed_tag[s] = sole[s];
                    tag_claimed[sole[s]] = 1;
                    ++claimed_count;
                }
            }
        }
        // pass 2: fill leftover slots with any other seed that isolates a
        // not-yet-claimed tag there
        for (uint64_t s = 0; s < f; ++s) {
            if (claimed_tag[s] != UINT32_MAX) continue;
            for (uint32_t j = 0; j < k; ++j) {
                uint32_t occ = occupancy[static_cast<size_t>(j) * f + s];
                if (occ != 1) continue;
                uint32_t t = sole_tag[static_cast<size_t>(j) * f + s];
                if (tag_claimed[t]) continue;
                claimed_tag[s] = t;
                tag_claimed[t] = 1;
                ++claimed_count;
                break;
            }
        }
        assert(claimed_count >= singles[j_star]);

        charge_query(result.ledger, f * selector_bits, config.long_slot_bits);
        for (uint64_t s = 0; s < f; ++s) {
            uint32_t t = claimed_tag[s];
            if (t == UINT32_MAX) continue;
            std::vector<uint8_t> replies;
            if (!missing[t])
                replies.push_back(static_cast<uint8_t>(inventory.pseudo_ids[t] & 1));
            SlotObservation obs = transmit_slot(replies);
            charge_response(result.ledger, static_cast<uint32_t>(replies.size()));
            confirmed[t] = obs.kind != SlotKind::empty ? 1 : 0;
            done[t] = 1;
            ++observations;
        }
        // the selector commits the reader to the whole frame, so the
        // stopping rule is consulted only between frames
        if (observations >= target) stopped = true;

        std::vector<uint32_t> next;
        next.reserve(unverified.size());
        for (uint32_t t : unverified) {
            if (!done[t]) next.push_back(t);
        }
        unverified = std::move(next);
    }

    finish(result, confirmed, n, timing);
    return result;
}

IdentificationResult run_sfmti(const Inventory& inventory,
                               const GroundTruth& truth,
                               const AccuracyRequirement& requirement,
                               double expected_alpha,
                               PRNGState& rng,
                               const TimingModel& timing,
                               const ProtocolConfig& config) {
    IdentificationResult result;
    uint32_t n = inventory.size();
    if (n == 0) return result;
    std::vector<char> missing = missing_flags_of(truth, n);
    std::vector<char> confirmed(n, 0);
    std::vector<char> done(n, 0);
    uint64_t target = stopping_target(requirement, expected_alpha);
    uint64_t observations = 0;

    std::vector<uint32_t> unverified(n);
    std::iota(unverified.begin(), unverified.end(), 0u);

    auto probe = [&](uint32_t t) {
        std::vector<uint8_t> replies;
        if (!missing[t])
            replies.push_back(static_cast<uint8_t>(inventory.pseudo_ids[t] & 1));
        SlotObservation obs = transmit_slot(replies);
        charge_response(result.ledger, static_cast<uint32_t>(replies.size()));
        confirmed[t] = obs.kind != SlotKind::empty ? 1 : 0;
        done[t] = 1;
        ++observations;
    };

    bool stopped = false;
    for (uint32_t frame = 0;
         frame < config.max_frames && !unverified.empty() && !stopped; ++frame) {
        uint64_t f = frame_length(unverified.size(), config.rho_hat);
        uint64_t frame_seed = prng_next(rng);

        std::vector<std::vector<uint32_t>> slots(f);
        for (uint32_t t : unverified)
            slots[keyed_hash(inventory.tags[t], frame_seed) % f].push_back(t);

        // 2 bits per slot classify it: empty-skip / singleton / reconciled /
        // unresolvable-skip
        charge_query(result.ledger, 2 * f, config.long_slot_bits);

        std::vector<uint32_t> ordered;
        for (uint64_t s = 0; s < f; ++s) {
            size_t occ = slots[s].size();
            if (occ == 0 || occ >= 4) continue;  // >= 4 defers to the next frame
            if (occ == 1) {
                probe(slots[s][0]);
                continue;
            }
            // occupancy 2 or 3: hunt a secondary seed spreading the members
            // over distinct sub-slots
            bool reconciled = false;
            for (uint32_t attempt = 0;
                 attempt < config.sfmti_reconcile_tries && !reconciled; ++attempt) {
                uint64_t sub_seed =
                    finalize64(frame_seed ^ (s * 0x9E3779B97F4A7C15ull) ^ attempt);
                ordered.assign(occ, UINT32_MAX);
                bool distinct = true;
                for (uint32_t t : slots[s]) {
                    uint64_t sub = keyed_hash(inventory.tags[t], sub_seed) % occ;
                    if (ordered[sub] != UINT32_MAX) {
                        distinct = false;
                        break;
                    }
                    ordered[sub] = t;
                }
                if (distinct) {
                    reconciled = true;
                    for (uint32_t t : ordered) probe(t);
                }
            }
            // unreconciled slots defer their tags to the next frame
        }
        if (observations >= target) stopped = true;

        std::vector<uint32_t> next;
        next.reserve(unverified.size());
        for (uint32_t t : unverified) {
            if (!done[t]) next.push_back(t);
        }
        unverified = std::move(next);
    }

    finish(result, confirmed, n, timing);
    return result;
}

}  // namespace mti
