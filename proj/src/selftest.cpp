#include "mti/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "mti/baselines.hpp"
#include "mti/core.hpp"
#include "mti/cpt.hpp"
#include "mti/harness.hpp"
#include "mti/hashing.hpp"
#include "mti/stats.hpp"

namespace mti {

namespace {

std::string fmt(const char* pattern, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), pattern, a, b);
    return buf;
}

std::string fmt1(const char* pattern, double a) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), pattern, a);
    return buf;
}

}  // namespace

SelfTestResult check_quantiles(const QuantileFn& quantile) {
    SelfTestResult res{"quantile-oracle", true, ""};
    struct Point {
        double p;
        uint32_t df;
        double expected;
    };
    // df = 1 rows are analytic: tan(pi * (0.5 - p)). The rest are frozen
    // high-precision reference values.
    const Point points[] = {
        {0.01, 1, 31.820515953773956},
        {0.05, 1, 6.313751514675043},
        {0.25, 1, 1.0},
        {0.5, 10, 0.0},
        {0.1, 8, 1.3968153097438607},
        {0.1, 98, 1.2902499038902855},
    };
    for (const Point& pt : points) {
        double got = quantile(pt.p, pt.df);
        double tol = 1e-6 * std::max(1.0, std::fabs(pt.expected));
        if (!(std::fabs(got - pt.expected) <= tol)) {
            res.passed = false;
            std::ostringstream detail;
            detail.precision(12);
            detail << "quantile(" << pt.p << ", " << pt.df << ") = " << got
                   << ", expected " << pt.expected;
            res.detail = detail.str();
            return res;
        }
    }
    return res;
}

SelfTestResult check_pair_decode(const DecodeFn& decode) {
    SelfTestResult res{"manchester-pair-decode", true, ""};
    const SlotObservation empty{SlotKind::empty, 0};
    const SlotObservation zero{SlotKind::single, 0};
    const SlotObservation one{SlotKind::single, 1};
    const SlotObservation both{SlotKind::manchester_pair, 0};
    struct Case {
        SlotObservation obs;
        uint8_t expect_first;
        uint8_t expect_second;
        bool first;
        bool second;
    };
    const Case cases[] = {
        {empty, 0, 1, false, false}, {empty, 1, 0, false, false},
        {zero, 0, 1, true, false},   {zero, 1, 0, false, true},
        {one, 0, 1, false, true},    {one, 1, 0, true, false},
        {both, 0, 1, true, true},    {both, 1, 0, true, true},
    };
    int idx = 0;
    for (const Case& c : cases) {
        PairPresence got = decode(c.obs, c.expect_first, c.expect_second);
        if (got.first != c.first || got.second != c.second) {
            res.passed = false;
            std::ostringstream detail;
            detail << "case " << idx << ": got {" << got.first << ',' << got.second
                   << "}, expected {" << c.first << ',' << c.second << '}';
            res.detail = detail.str();
            return res;
        }
        ++idx;
    }
    return res;
}

SelfTestResult check_hash_dispersion(const HashFn& hash) {
    SelfTestResult res{"hash-dispersion", true, ""};
    // Frozen golden values pin the exact mixing constants.
    uint64_t g0 = hash(TagId{0, 0}, 0);
    uint64_t g1 = hash(TagId{0xDEADBEEFCAFEBABEull, 0x12345678u}, 42);
    if (g0 != 0 || g1 != 0x492296e21a2115deull) {
        std::ostringstream detail;
        detail << std::hex << "golden mismatch: got " << g0 << ", " << g1;
        res = SelfTestResult{"hash-dispersion", false, detail.str()};
        return res;
    }
    // 64-cell chi-square over 20000 hashes of structured keys. A correct
    // mixer lands comfortably inside [20, 120] (63 degrees of freedom).
    constexpr int cells = 64;
    constexpr int samples = 20000;
    uint64_t counts[cells] = {};
    for (int i = 0; i < samples; ++i) {
        TagId id{static_cast<uint64_t>(i), static_cast<uint32_t>(i % 7)};
        counts[hash(id, 1234567) % cells]++;
    }
    double expected = static_cast<double>(samples) / cells;
    double chi2 = 0.0;
    for (uint64_t c : counts) {
        double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    if (!(chi2 >= 20.0 && chi2 <= 120.0)) {
        res.passed = false;
        res.detail = fmt1("chi-square %.3g outside [20, 120]", chi2);
    }
    return res;
}

SelfTestResult check_stopping_rule() {
    SelfTestResult res{"stopping-rule", true, ""};
    struct Case {
        double epsilon, delta, alpha;
        uint32_t r;
        uint64_t n;
    };
    const Case cases[] = {
        {0.05, 0.1, 0.1, 9, 781},
        {0.025, 0.1, 0.1, 9, 3122},
        {0.01, 0.1, 0.01, 99, 16648},
        {0.02, 0.1, 0.01, 99, 4162},
        {0.1, 0.1, 0.01, 99, 167},
    };
    for (const Case& c : cases) {
        StoppingRule rule = make_stopping_rule(c.epsilon, c.delta, c.alpha);
        if (rule.r != c.r || rule.n_min != c.n) {
            std::ostringstream detail;
            detail << "rule(" << c.epsilon << ',' << c.delta << ',' << c.alpha
                   << ") = {r=" << rule.r << ", n=" << rule.n_min << "}, expected {r="
                   << c.r << ", n=" << c.n << '}';
            res = SelfTestResult{"stopping-rule", false, detail.str()};
            return res;
        }
    }
    // Tightening epsilon can only grow the sample size.
    uint64_t loose = stopping_sample_size(0.1, 0.1, 0.01);
    uint64_t tight = stopping_sample_size(0.02, 0.1, 0.01);
    if (!(tight > loose)) {
        res.passed = false;
        res.detail = fmt("monotonicity: n(0.02)=%g <= n(0.1)=%g",
                         static_cast<double>(tight), static_cast<double>(loose));
    }
    return res;
}

SelfTestResult check_protocol_exactness() {
    SelfTestResult res{"protocol-exactness", true, ""};
    const uint64_t seed = 0xC0FFEEull;
    Inventory inv = make_inventory(64, seed);
    PRNGState truth_rng{finalize64(seed ^ 1)};
    GroundTruth truth = make_ground_truth(64, 0.25, truth_rng);
    AccuracyRequirement exhaustive{0.0, 0.1};
    TimingModel timing;
    ProtocolConfig config;

    const Algorithm algorithms[] = {Algorithm::cpt, Algorithm::polling,
                                    Algorithm::pcmti, Algorithm::mmti,
                                    Algorithm::sfmti};
    for (Algorithm a : algorithms) {
        PRNGState rng{finalize64(seed ^ 2)};
        IdentificationResult out;
        switch (a) {
            case Algorithm::cpt:
                out = run_cpt(inv, truth, exhaustive, truth.alpha, rng, timing, config);
                break;
            case Algorithm::polling:
                out = run_polling(inv, truth, timing);
                break;
            case Algorithm::pcmti:
                out = run_pcmti(inv, truth, exhaustive, truth.alpha, rng, timing, config);
                break;
            case Algorithm::mmti:
                out = run_mmti(inv, truth, exhaustive, truth.alpha, rng, timing, config);
                break;
            case Algorithm::sfmti:
                out = run_sfmti(inv, truth, exhaustive, truth.alpha, rng, timing, config);
                break;
        }
        if (out.reported_missing != truth.missing) {
            std::ostringstream detail;
            detail << algorithm_name(a) << ": reported " << out.reported_missing.size()
                   << " missing, expected exactly " << truth.missing.size();
            res = SelfTestResult{"protocol-exactness", false, detail.str()};
            return res;
        }
    }
    return res;
}

bool run_selftests(std::ostream& out) {
    const SelfTestResult results[] = {
        check_quantiles([](double p, uint32_t df) { return student_t_quantile(p, df); }),
        check_pair_decode([](const SlotObservation& obs, uint8_t a, uint8_t b) {
            return decode_pair(obs, a, b);
        }),
        check_hash_dispersion(
            [](const TagId& id, uint64_t seed) { return keyed_hash(id, seed); }),
        check_stopping_rule(),
        check_protocol_exactness(),
    };
    bool all = true;
    for (const SelfTestResult& r : results) {
        if (r.passed) {
            out << "ok " << r.name << '\n';
        } else {
            out << "FAIL " << r.name << ": " << r.detail << '\n';
            all = false;
        }
    }
    return all;
}

}  // namespace mti
