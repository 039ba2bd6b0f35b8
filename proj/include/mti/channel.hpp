#pragma once
// Slot-level reply channel with Manchester-coded collision separation, plus
// the charge_* helpers that map protocol actions onto the cost ledger.

#include <cstdint>
#include <vector>

#include "mti/core.hpp"

namespace mti {

enum class SlotKind : uint8_t {
    empty,
    single,            // one distinguishable 1-bit waveform
    manchester_pair,   // two distinct bits, both recoverable
    unresolved,        // three or more responders
};

struct SlotObservation {
    SlotKind kind = SlotKind::empty;
    uint8_t bit = 0;  // meaningful only when kind == single
};

// Superposes 1-bit replies. Two identical bits alias to a single waveform;
// two distinct bits stay separable; three or more responders are noise.
SlotObservation transmit_slot(const std::vector<uint8_t>& response_bits);

struct PairPresence {
    bool first = false;
    bool second = false;
};

// Recovers which of two expected responders replied. The two expected bits
// must differ; an unresolved observation is a protocol error here. Throws
// std::invalid_argument on either violation.
PairPresence decode_pair(const SlotObservation& obs, uint8_t expected_first,
                         uint8_t expected_second);

inline constexpr uint32_t default_long_slot_bits = 32;

// Reader broadcast: payload bits always accrue to reader_bits; the airtime
// slot is one short slot for a 1-bit payload, ceil(bits/long_slot_bits) long
// slots otherwise. A zero payload charges nothing.
void charge_query(CostLedger& ledger, uint64_t payload_bits,
                  uint32_t long_slot_bits = default_long_slot_bits);

// Tag reply window: one short slot regardless of responder count (empty
// slots still consume air time); responder bits accrue to tag_bits.
void charge_response(CostLedger& ledger, uint32_t responder_count);

}  // namespace mti
