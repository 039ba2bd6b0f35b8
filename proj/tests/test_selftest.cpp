#include "doctest.h"

#include <sstream>

#include "mti/selftest.hpp"
#include "mti/stats.hpp"

using namespace mti;

TEST_CASE("the shipped build passes every selftest") {
    std::ostringstream out;
    CHECK(run_selftests(out));
    std::string text = out.str();
    CHECK(text.find("ok quantile-oracle") != std::string::npos);
    CHECK(text.find("ok manchester-pair-decode") != std::string::npos);
    CHECK(text.find("ok hash-dispersion") != std::string::npos);
    CHECK(text.find("ok stopping-rule") != std::string::npos);
    CHECK(text.find("ok protocol-exactness") != std::string::npos);
    CHECK(text.find("FAIL") == std::string::npos);
}

TEST_CASE("a decoder with swapped outputs is caught and named") {
    DecodeFn swapped = [](const SlotObservation& obs, uint8_t first, uint8_t second) {
        PairPresence p = decode_pair(obs, first, second);
        return PairPresence{p.second, p.first};
    };
    SelfTestResult res = check_pair_decode(swapped);
    CHECK_FALSE(res.passed);
    CHECK(res.name == "manchester-pair-decode");
    CHECK_FALSE(res.detail.empty());
}

TEST_CASE("a sign-flipped quantile is caught and named") {
    QuantileFn flipped = [](double p, uint32_t df) {
        return -student_t_quantile(p, df);
    };
    SelfTestResult res = check_quantiles(flipped);
    CHECK_FALSE(res.passed);
    CHECK(res.name == "quantile-oracle");
    CHECK_FALSE(res.detail.empty());
}

TEST_CASE("a constant hash is caught by the golden values") {
    HashFn constant = [](const TagId&, uint64_t) { return UINT64_C(12345); };
    SelfTestResult res = check_hash_dispersion(constant);
    CHECK_FALSE(res.passed);
    CHECK(res.name == "hash-dispersion");
}

TEST_CASE("a poorly mixing hash fails the dispersion bound") {
    // passes the two goldens by special-casing them, then clumps everything
    HashFn rigged = [](const TagId& id, uint64_t seed) -> uint64_t {
        if (id.lo == 0 && id.hi == 0 && seed == 0) return 0;
        if (id.lo == 0xDEADBEEFCAFEBABEull && id.hi == 0x12345678u && seed == 42)
            return 0x492296e21a2115deull;
        return (id.lo % 3) * 64;  // three buckets out of sixty-four
    };
    SelfTestResult res = check_hash_dispersion(rigged);
    CHECK_FALSE(res.passed);
}
