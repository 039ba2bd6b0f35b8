#pragma once
// Baseline identification protocols: exhaustive polling and the three
// frame-based schemes (pair-collision, multi-seed singleton, sub-slot
// reconciliation). Each returns the same IdentificationResult shape as the
// tree protocol so the harness can treat them uniformly.

#include "mti/config.hpp"
#include "mti/core.hpp"
#include "mti/hashing.hpp"

namespace mti {

// Reader names every tag in turn: one full-ID slot to address it, one short
// slot for the (possible) reply. No broadcast bits are charged; the ID slot
// already carries the addressing cost.
IdentificationResult run_polling(const Inventory& inventory,
                                 const GroundTruth& truth,
                                 const TimingModel& timing);

// Pair-collision verification. Frames of f = ceil(|U| / rho_hat) slots;
// slots holding exactly two tags are kept as pairs (each tag replies the bit
// of its pseudo-ID at the pair's lowest differing bit, recovered from one
// Manchester short slot), runs of consecutive singletons merge into synthetic
// pairs with a lone leftover probed directly. Slots with three or more tags
// defer their tags to the next frame. Each retained slot costs
// ceil(log2 f) broadcast bits of slot-index addressing. Stops mid-frame as
// soon as the verified-tag count reaches the stopping-rule sample size.
IdentificationResult run_pcmti(const Inventory& inventory,
                               const GroundTruth& truth,
                               const AccuracyRequirement& requirement,
                               double expected_alpha,
                               PRNGState& rng,
                               const TimingModel& timing,
                               const ProtocolConfig& config = {});

// Multi-seed singleton harvesting. Each frame the reader tries
// config.mmti_seed_candidates seeds, picks the one yielding the most
// singleton slots, then greedily fills the remaining slots with whichever
// other seed isolates a tag there; the per-slot seed choice is broadcast as
// ceil(log2(k+1)) bits per slot (0 = slot unused). Marked slots are probed
// with one short slot each. The stopping rule is checked between frames
// (the selector commits the reader to the whole frame).
IdentificationResult run_mmti(const Inventory& inventory,
                              const GroundTruth& truth,
                              const AccuracyRequirement& requirement,
                              double expected_alpha,
                              PRNGState& rng,
                              const TimingModel& timing,
                              const ProtocolConfig& config = {});

// Sub-slot reconciliation. Frames of f = ceil(|U| / rho_hat) slots; slots of
// occupancy 1 verify directly, occupancy 2 or 3 search up to
// config.sfmti_reconcile_tries secondary seeds for one that spreads the
// tags over distinct sub-slots (unreconciled slots and occupancy >= 4 defer
// to the next frame). The per-frame filter vector costs exactly 2f broadcast
// bits. Verified slots are probed with one short slot per expected tag.
// The stopping rule is checked between frames.
IdentificationResult run_sfmti(const Inventory& inventory,
                               const GroundTruth& truth,
                               const AccuracyRequirement& requirement,
                               double expected_alpha,
                               PRNGState& rng,
                               const TimingModel& timing,
                               const ProtocolConfig& config = {});

}  // namespace mti
