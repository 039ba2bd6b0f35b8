#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "mti/stats.hpp"

using namespace mti;

TEST_CASE("regularized incomplete beta identities") {
    CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == doctest::Approx(0.0));
    CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == doctest::Approx(1.0));
    // I_x(1,1) is the identity map
    CHECK(regularized_incomplete_beta(1.0, 1.0, 0.3) ==
          doctest::Approx(0.3).epsilon(1e-12));
    // symmetric parameters balance at one half
    CHECK(regularized_incomplete_beta(2.0, 2.0, 0.5) ==
          doctest::Approx(0.5).epsilon(1e-12));
    // complement identity I_x(a,b) = 1 - I_{1-x}(b,a)
    double lhs = regularized_incomplete_beta(3.5, 1.25, 0.42);
    double rhs = 1.0 - regularized_incomplete_beta(1.25, 3.5, 0.58);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
}

TEST_CASE("student t quantile frozen high-precision grid") {
    struct Point {
        double p;
        uint32_t df;
        double expected;
    };
    const Point grid[] = {
        {0.01, 1, 31.820515953773957}, {0.01, 8, 2.8964594477096223},
        {0.01, 30, 2.4572615424005914}, {0.01, 98, 2.3650024104869268},
        {0.01, 1000, 2.330082674755513}, {0.05, 1, 6.3137515146750427},
        {0.05, 8, 1.8595480375308984}, {0.05, 30, 1.6972608865939578},
        {0.05, 98, 1.6605512170657337}, {0.05, 1000, 1.6463788172854647},
        {0.1, 1, 3.0776835371752532}, {0.1, 8, 1.3968153097438647},
        {0.1, 30, 1.3104150253913955}, {0.1, 98, 1.2902499038902859},
        {0.1, 1000, 1.2823987214609244}, {0.25, 1, 1.0},
        {0.25, 8, 0.7063866126448386}, {0.25, 30, 0.68275569332129255},
        {0.25, 98, 0.67700143878068484}, {0.25, 1000, 0.67473516460700944},
    };
    for (const Point& pt : grid) {
        double got = student_t_quantile(pt.p, pt.df);
        CHECK_MESSAGE(
            std::fabs(got - pt.expected) <= 1e-6 * std::max(1.0, pt.expected),
            "p=", pt.p, " df=", pt.df, " got=", got);
    }
}

TEST_CASE("student t quantile analytic forms and symmetry") {
    // one degree of freedom: quantile is tan(pi*(1/2 - p))
    for (double p : {0.05, 0.15, 0.3, 0.45}) {
        CHECK(student_t_quantile(p, 1) ==
              doctest::Approx(std::tan(M_PI * (0.5 - p))).epsilon(1e-9));
    }
    // two degrees of freedom closed form
    for (double p : {0.05, 0.1, 0.25}) {
        double expected = (1.0 - 2.0 * p) * std::sqrt(2.0 / (4.0 * p * (1.0 - p)));
        CHECK(student_t_quantile(p, 2) == doctest::Approx(expected).epsilon(1e-9));
    }
    CHECK(student_t_quantile(0.5, 7) == doctest::Approx(0.0));
    // point symmetry about the median
    CHECK(student_t_quantile(0.75, 5) ==
          doctest::Approx(-student_t_quantile(0.25, 5)).epsilon(1e-9));
}

TEST_CASE("stopping rule golden sizes") {
    StoppingRule a = make_stopping_rule(0.05, 0.1, 0.1);
    CHECK(a.r == 9);
    CHECK(a.n_min == 781);
    CHECK(make_stopping_rule(0.025, 0.1, 0.1).n_min == 3122);
    StoppingRule b = make_stopping_rule(0.01, 0.1, 0.01);
    CHECK(b.r == 99);
    CHECK(b.n_min == 16648);
    CHECK(stopping_sample_size(0.02, 0.1, 0.01) == 4162);
    CHECK(stopping_sample_size(0.1, 0.1, 0.01) == 167);
}

TEST_CASE("stopping rule matches its closed form when 1/alpha is integral") {
    // with r = 1/alpha - 1 exactly, the group count cancels and
    // n = ceil(t^2 / eps^2)
    StoppingRule rule = make_stopping_rule(0.05, 0.1, 0.1);
    double t = student_t_quantile(0.1, rule.r - 1);
    CHECK(rule.n_min == static_cast<uint64_t>(std::ceil(t * t / (0.05 * 0.05) - 1e-9)));
    // general invariant: n is the least count satisfying n >= t^2 (1/a - 1)/(r e^2)
    double target = t * t * (1.0 / 0.1 - 1.0) / (rule.r * 0.05 * 0.05);
    CHECK(static_cast<double>(rule.n_min) >= target - 1e-6);
    CHECK(static_cast<double>(rule.n_min - 1) < target);
}

TEST_CASE("stopping rule monotonicity in the tolerance") {
    uint64_t prev = 0;
    for (double eps : {0.1, 0.05, 0.02, 0.01}) {
        uint64_t n = stopping_sample_size(eps, 0.1, 0.01);
        CHECK(n > prev);
        prev = n;
    }
}

TEST_CASE("stopping rule rejects degenerate parameters") {
    CHECK_THROWS_AS(make_stopping_rule(0.0, 0.1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(make_stopping_rule(0.01, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(make_stopping_rule(0.01, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(make_stopping_rule(0.01, 0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_stopping_rule(0.01, 0.1, 1.0), std::invalid_argument);
    // fewer than two sample groups: the variance estimate is undefined
    CHECK_THROWS_AS(make_stopping_rule(0.01, 0.1, 0.6), std::invalid_argument);
}

TEST_CASE("slot assignment probabilities, two tags one missing") {
    SlotProbs probs = slot_assignment_probs(2, 0.5, 2);
    CHECK(probs.one_missing_alone == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(probs.missing_with_present == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(probs.two_missing == doctest::Approx(0.0));
}

TEST_CASE("slot assignment probabilities, frozen ten-tag case") {
    // N=10, alpha=0.5, f=10: m=5, q=0.9
    SlotProbs probs = slot_assignment_probs(10, 0.5, 10);
    CHECK(probs.one_missing_alone == doctest::Approx(0.1937102445).epsilon(1e-9));
    CHECK(probs.missing_with_present == doctest::Approx(0.1076168025).epsilon(1e-9));
    CHECK(probs.two_missing == doctest::Approx(0.043046721).epsilon(1e-9));
}

TEST_CASE("slot assignment probabilities vanish with nothing missing") {
    SlotProbs probs = slot_assignment_probs(100, 0.0, 50);
    CHECK(probs.one_missing_alone == 0.0);
    CHECK(probs.missing_with_present == 0.0);
    CHECK(probs.two_missing == 0.0);
}

TEST_CASE("aggregate missing-slot probability closed form") {
    CHECK(pm_probability(0.1, 1.0) ==
          doctest::Approx(0.15 / std::exp(1.0)).epsilon(1e-12));
    // scales linearly in the missing fraction
    CHECK(pm_probability(0.2, 1.0) ==
          doctest::Approx(2.0 * pm_probability(0.1, 1.0)).epsilon(1e-12));
}

TEST_CASE("slot probabilities sum matches the aggregate form when all are missing") {
    // the closed aggregate form counts every slot holding missing tags; the
    // per-type split agrees with it when the missing set is the whole
    // population (alpha = 1, rho = 1)
    for (uint64_t n : {1000ull, 10000ull, 100000ull}) {
        SlotProbs probs = slot_assignment_probs(n, 1.0, n);
        double total = probs.sum();
        double aggregate = pm_probability(1.0, 1.0);
        CHECK(std::fabs(total - aggregate) / aggregate < 0.02);
    }
}

TEST_CASE("identification lower bound reference value") {
    BoundValue bound = lower_bound_reference(1024, 0.1, 0.0, 0.0);
    CHECK(bound.value == doctest::Approx(132.503).epsilon(1e-4));
    CHECK(bound.in_range);
}

TEST_CASE("lower bound keeps only the population term when nothing is present") {
    BoundValue bound = lower_bound_reference(1024, 0.1, 0.0, 1.0);
    CHECK(bound.value == doctest::Approx(102.4).epsilon(1e-9));
}

TEST_CASE("lower bound saturates below the tolerance floor") {
    // eps below (1-alpha)(1-delta)/sqrt(n): every tag must be interrogated
    BoundValue bound = lower_bound_reference(100, 0.05, 0.0, 0.0);
    CHECK(bound.value == doctest::Approx(100.0));
    CHECK_FALSE(bound.in_range);
}

TEST_CASE("lower bound rejects a collapsed logarithm") {
    // eps at or above (1-delta)(1-alpha) drives the log argument to 1
    CHECK_THROWS_AS(lower_bound_reference(100, 0.5, 0.4, 0.2), std::invalid_argument);
}

TEST_CASE("reference execution-time curves") {
    // population term plus accuracy term
    CHECK(expected_time_reference(RefAlgorithm::pcmti, 50000, 0.01, 0.1, 0.01) ==
          doctest::Approx(57938.81).epsilon(1e-4));
    // with nothing left present the accuracy term vanishes
    CHECK(expected_time_reference(RefAlgorithm::mmti, 65536, 0.1, 0.1, 1.0) ==
          doctest::Approx(1048576.0));
    CHECK(expected_time_reference(RefAlgorithm::sfmti, 4096, 0.1, 0.1, 1.0) ==
          doctest::Approx(4096.0));
    CHECK(expected_time_reference(RefAlgorithm::cpt, 65536, 0.1, 0.1, 1.0) ==
          doctest::Approx(65536.0 * std::log2(16.0) / 16.0).epsilon(1e-9));
}

TEST_CASE("reference curves order tree walk under linear under log-linear") {
    for (uint64_t n : {16ull, 1024ull, 65536ull, 1048576ull}) {
        double cpt = expected_time_reference(RefAlgorithm::cpt, n, 0.01, 0.1, 0.01);
        double lin = expected_time_reference(RefAlgorithm::pcmti, n, 0.01, 0.1, 0.01);
        double loglin = expected_time_reference(RefAlgorithm::mmti, n, 0.01, 0.1, 0.01);
        CHECK(cpt < lin);
        CHECK(lin < loglin);
    }
}

TEST_CASE("reference curves need a positive tolerance when tags are present") {
    CHECK_THROWS_AS(expected_time_reference(RefAlgorithm::pcmti, 100, 0.0, 0.1, 0.5),
                    std::invalid_argument);
}
