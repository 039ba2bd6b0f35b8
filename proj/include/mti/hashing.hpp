#pragma once
// Deterministic hashing and PRNG primitives shared by the simulated reader
// and tags. All fixed-width integer arithmetic; runs reproduce bit-for-bit.

#include <cstdint>
#include <vector>

#include "mti/core.hpp"

namespace mti {

// splitmix64 finalizer. Bijective on 64-bit values (0 maps to 0).
uint64_t finalize64(uint64_t z);

// Keyed hash of a 96-bit ID: chains the finalizer over seed, low word, and
// zero-extended high word.
uint64_t keyed_hash(const TagId& id, uint64_t seed);

// splitmix64 stream: golden-ratio increment, then finalize.
struct PRNGState {
    uint64_t state = 0;
};

uint64_t prng_next(PRNGState& rng);

// Uniform-ish draw in [0, bound) by modulo reduction; bound must be > 0.
uint64_t prng_below(PRNGState& rng, uint64_t bound);

struct PseudoIdSet {
    std::vector<uint64_t> ids;  // parallel to the input tags, values < 2^bits
    uint32_t bits = 0;
    uint64_t seed = 0;          // the seed that produced a collision-free set
    uint32_t iterations = 1;    // seeds tried, >= 1
};

// Pseudo-IDs are the low `bits` of keyed_hash(tag, seed). On any collision
// the whole set is rebuilt with seed+1 (tags can follow the retry count), so
// the result is always collision-free. bits_override == 0 selects
// max(2, 2*ceil(log2 n)). Throws std::runtime_error after 64 failed seeds
// and std::invalid_argument for an empty tag list or bits > 64.
PseudoIdSet make_pseudo_ids(const std::vector<TagId>& tags, uint64_t initial_seed,
                            uint32_t bits_override = 0);

// ceil(log2(x)) for x >= 1; 0 when x == 1.
uint32_t ceil_log2(uint64_t x);

}  // namespace mti
