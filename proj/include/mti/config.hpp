#pragma once
// Tunables shared by the protocol implementations. Defaults reproduce the
// shipped experiment settings; tests override individual fields.

#include <cstdint>

namespace mti {

enum class CptTraversal : uint8_t {
    dfs,             // left-to-right depth-first leaf order (default)
    height_ordered,  // shallow leaves first, DFS order within a depth
};

struct ProtocolConfig {
    double rho_hat = 1.0;              // expected tags per frame slot
    uint32_t mmti_seed_candidates = 8; // hash seeds offered per frame
    uint32_t sfmti_reconcile_tries = 16;
    uint32_t long_slot_bits = 32;      // broadcast payload per long slot
    CptTraversal cpt_traversal = CptTraversal::dfs;
    uint32_t max_frames = 100000;      // safety valve for frame protocols
};

}  // namespace mti
