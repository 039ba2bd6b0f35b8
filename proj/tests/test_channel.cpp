#include "doctest.h"

#include <stdexcept>

#include "mti/channel.hpp"

using namespace mti;

TEST_CASE("transmit_slot kinds by responder count") {
    CHECK(transmit_slot({}).kind == SlotKind::empty);
    SlotObservation one = transmit_slot({1});
    CHECK(one.kind == SlotKind::single);
    CHECK(one.bit == 1);
    CHECK(transmit_slot({0}).bit == 0);
    CHECK(transmit_slot({0, 1}).kind == SlotKind::manchester_pair);
    CHECK(transmit_slot({1, 0}).kind == SlotKind::manchester_pair);
    CHECK(transmit_slot({0, 1, 1}).kind == SlotKind::unresolved);
    CHECK(transmit_slot({0, 0, 1, 1}).kind == SlotKind::unresolved);
}

TEST_CASE("two identical bits alias to a single response") {
    SlotObservation obs = transmit_slot({1, 1});
    CHECK(obs.kind == SlotKind::single);
    CHECK(obs.bit == 1);
    obs = transmit_slot({0, 0});
    CHECK(obs.kind == SlotKind::single);
    CHECK(obs.bit == 0);
}

TEST_CASE("decode_pair eight-case truth table") {
    const SlotObservation empty{SlotKind::empty, 0};
    const SlotObservation zero{SlotKind::single, 0};
    const SlotObservation one{SlotKind::single, 1};
    const SlotObservation both{SlotKind::manchester_pair, 0};

    PairPresence p = decode_pair(empty, 0, 1);
    CHECK((!p.first && !p.second));
    p = decode_pair(empty, 1, 0);
    CHECK((!p.first && !p.second));

    p = decode_pair(zero, 0, 1);
    CHECK((p.first && !p.second));
    p = decode_pair(zero, 1, 0);
    CHECK((!p.first && p.second));

    p = decode_pair(one, 0, 1);
    CHECK((!p.first && p.second));
    p = decode_pair(one, 1, 0);
    CHECK((p.first && !p.second));

    p = decode_pair(both, 0, 1);
    CHECK((p.first && p.second));
    p = decode_pair(both, 1, 0);
    CHECK((p.first && p.second));
}

TEST_CASE("decode_pair round-trips every presence pattern through the channel") {
    // expected bits 0 for the first tag and 1 for the second
    for (int present_first = 0; present_first <= 1; ++present_first) {
        for (int present_second = 0; present_second <= 1; ++present_second) {
            std::vector<uint8_t> replies;
            if (present_first) replies.push_back(0);
            if (present_second) replies.push_back(1);
            PairPresence got = decode_pair(transmit_slot(replies), 0, 1);
            CHECK(got.first == (present_first == 1));
            CHECK(got.second == (present_second == 1));
        }
    }
}

TEST_CASE("decode_pair rejects ambiguous setups") {
    CHECK_THROWS_AS(decode_pair({SlotKind::single, 1}, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(decode_pair({SlotKind::unresolved, 0}, 0, 1),
                    std::invalid_argument);
}

TEST_CASE("charge_query cost tiers") {
    CostLedger ledger;
    charge_query(ledger, 0);
    CHECK(ledger.short_slots == 0);
    CHECK(ledger.long_slots == 0);
    CHECK(ledger.reader_bits == 0);

    charge_query(ledger, 1);  // a lone bit fits a short slot
    CHECK(ledger.short_slots == 1);
    CHECK(ledger.long_slots == 0);
    CHECK(ledger.reader_bits == 1);

    charge_query(ledger, 32);  // exactly one long-slot payload
    CHECK(ledger.long_slots == 1);
    charge_query(ledger, 33);  // spills into a second long slot
    CHECK(ledger.long_slots == 3);
    CHECK(ledger.reader_bits == 1 + 32 + 33);
}

TEST_CASE("charge_query honors a custom long-slot payload width") {
    CostLedger ledger;
    charge_query(ledger, 33, 16);
    CHECK(ledger.long_slots == 3);  // ceil(33/16)
    CHECK_THROWS_AS(charge_query(ledger, 5, 0), std::invalid_argument);
}

TEST_CASE("charge_response always burns one short slot") {
    CostLedger ledger;
    charge_response(ledger, 0);  // listening costs the slot even when silent
    CHECK(ledger.short_slots == 1);
    CHECK(ledger.tag_bits == 0);
    charge_response(ledger, 3);
    CHECK(ledger.short_slots == 2);
    CHECK(ledger.tag_bits == 3);
}
