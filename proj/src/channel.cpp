#include "mti/channel.hpp"

#include <stdexcept>

namespace mti {

SlotObservation transmit_slot(const std::vector<uint8_t>& response_bits) {
    SlotObservation obs;
    if (response_bits.empty()) {
        obs.kind = SlotKind::empty;
        return obs;
    }
    if (response_bits.size() == 1) {
        obs.kind = SlotKind::single;
        obs.bit = response_bits[0] & 1;
        return obs;
    }
    if (response_bits.size() == 2) {
        uint8_t a = response_bits[0] & 1;
        uint8_t b = response_bits[1] & 1;
        if (a == b) {
            // equal-polarity transitions superpose into one waveform
            obs.kind = SlotKind::single;
            obs.bit = a;
        } else {
            obs.kind = SlotKind::manchester_pair;
        }
        return obs;
    }
    obs.kind = SlotKind::unresolved;
    return obs;
}

PairPresence decode_pair(const SlotObservation& obs, uint8_t expected_first,
                         uint8_t expected_second) {
    expected_first &= 1;
    expected_second &= 1;
    if (expected_first == expected_second)
        throw std::invalid_argument("decode_pair: expected bits must differ");
    PairPresence presence;
    switch (obs.kind) {
        case SlotKind::empty:
            return presence;
        case SlotKind::manchester_pair:
            presence.first = true;
            presence.second = true;
            return presence;
        case SlotKind::single:
            if (obs.bit == expected_first) {
                presence.first = true;
            } else {
                presence.second = true;
            }
            return presence;
        case SlotKind::unresolved:
            break;
    }
    throw std::invalid_argument("decode_pair: unresolved slot has no pair reading");
}

void charge_query(CostLedger& ledger, uint64_t payload_bits, uint32_t long_slot_bits) {
    if (payload_bits == 0) return;
    if (long_slot_bits == 0)
        throw std::invalid_argument("charge_query: long_slot_bits must be > 0");
    ledger.reader_bits += payload_bits;
    if (payload_bits == 1) {
        ledger.short_slots += 1;
    } else {
        ledger.long_slots += (payload_bits + long_slot_bits - 1) / long_slot_bits;
    }
}

void charge_response(CostLedger& ledger, uint32_t responder_count) {
    ledger.short_slots += 1;
    ledger.tag_bits += responder_count;
}

}  // namespace mti
