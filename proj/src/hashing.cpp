#include "mti/hashing.hpp"

#include <stdexcept>
#include <unordered_set>

namespace mti {

uint64_t finalize64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

uint64_t keyed_hash(const TagId& id, uint64_t seed) {
    return finalize64(finalize64(finalize64(seed) ^ id.lo) ^ id.hi);
}

uint64_t prng_next(PRNGState& rng) {
    rng.state += 0x9E3779B97F4A7C15ull;
    return finalize64(rng.state);
}

uint64_t prng_below(PRNGState& rng, uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("prng_below: bound must be > 0");
    return prng_next(rng) % bound;
}

uint32_t ceil_log2(uint64_t x) {
    if (x == 0) throw std::invalid_argument("ceil_log2: undefined for 0");
    uint32_t bits = 0;
    while (bits < 64 && (uint64_t{1} << bits) < x) ++bits;
    return bits;
}

PseudoIdSet make_pseudo_ids(const std::vector<TagId>& tags, uint64_t initial_seed,
                            uint32_t bits_override) {
    if (tags.empty()) throw std::invalid_argument("make_pseudo_ids: empty tag list");
    if (bits_override > 64) throw std::invalid_argument("make_pseudo_ids: bits > 64");
    uint32_t bits = bits_override;
    if (bits == 0) {
        uint32_t doubled = 2 * ceil_log2(tags.size());
        bits = doubled < 2 ? 2 : doubled;
    }
    if (bits < 64 && (uint64_t{1} << bits) < tags.size())
        throw std::invalid_argument("make_pseudo_ids: 2^bits < tag count");
    uint64_t mask = bits >= 64 ? ~uint64_t{0} : (uint64_t{1} << bits) - 1;

    PseudoIdSet out;
    out.bits = bits;
    std::unordered_set<uint64_t> seen;
    seen.reserve(tags.size() * 2);
    for (uint32_t attempt = 0; attempt < 64; ++attempt) {
        uint64_t seed = initial_seed + attempt;
        out.ids.clear();
        out.ids.reserve(tags.size());
        seen.clear();
        bool collided = false;
        for (const TagId& tag : tags) {
            uint64_t pid = keyed_hash(tag, seed) & mask;
            if (!seen.insert(pid).second) {
                collided = true;
                break;
            }
            out.ids.push_back(pid);
        }
        if (!collided) {
            out.seed = seed;
            out.iterations = attempt + 1;
            return out;
        }
    }
    throw std::runtime_error("make_pseudo_ids: no collision-free seed in 64 attempts");
}

}  // namespace mti
