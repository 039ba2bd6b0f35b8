#pragma once
// Built-in consistency checks behind the `selftest` subcommand. Each check
// takes the function under test as a parameter so the test suite can verify
// the checks themselves catch seeded faults.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mti/channel.hpp"

namespace mti {

struct SelfTestResult {
    std::string name;
    bool passed = false;
    std::string detail;  // populated on failure
};

using QuantileFn = std::function<double(double, uint32_t)>;
using DecodeFn = std::function<PairPresence(const SlotObservation&, uint8_t, uint8_t)>;
using HashFn = std::function<uint64_t(const TagId&, uint64_t)>;

// Student-t quantiles against a frozen table (df = 1 analytic values and a
// spread of df/p points), tolerance 1e-6.
SelfTestResult check_quantiles(const QuantileFn& quantile);

// Manchester pair decoding truth table: all four (first, second) bit
// combinations against both orderings of expected bits.
SelfTestResult check_pair_decode(const DecodeFn& decode);

// Hash dispersion: 64-cell chi-square over 20000 keyed hashes within
// generous bounds, plus the frozen finalizer golden values.
SelfTestResult check_hash_dispersion(const HashFn& hash);

// Stopping-rule golden sizes and monotonicity in epsilon.
SelfTestResult check_stopping_rule();

// End-to-end: tiny exhaustive run of every protocol on a 64-tag inventory
// must report exactly the planted missing set.
SelfTestResult check_protocol_exactness();

// Runs every check with the production functions. Writes one line per check
// to out; returns true when all pass.
bool run_selftests(std::ostream& out);

}  // namespace mti
