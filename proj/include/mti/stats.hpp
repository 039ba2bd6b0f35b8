#pragma once
// Statistical machinery: regularized incomplete beta, Student-t upper-tail
// quantiles, the sampling stopping rule, frame slot-content probabilities,
// and the closed-form reference curves behind the `bounds` subcommand.

#include <cstdint>

namespace mti {

// I_x(a, b) by continued fraction (Lentz), switching to the symmetric form
// when x > (a+1)/(a+b+2). Absolute error <= 1e-12 on a, b <= 1e6.
// Throws std::invalid_argument outside a, b > 0 or x outside [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

// Smallest t with P(T_df > t) <= p, found by bisection on the incomplete-
// beta CDF to interval width 1e-9. Requires 0 < p < 1 and df >= 1.
double student_t_quantile(double p, uint32_t df);

// Sample-size rule for terminating a verification sweep early: r pools of
// observations estimate the per-slot identification rate, and n_min is the
// observation count at which the one-sided Student-t confidence bound meets
// the (epsilon, delta) target.
struct StoppingRule {
    double epsilon = 0.0;
    double delta = 0.0;
    double alpha = 0.0;
    uint32_t r = 0;        // ceil(1/alpha - 1)
    uint64_t n_min = 0;    // ceil(t_delta(r-1)^2 / (r eps^2) * (1/alpha - 1))
};

// Requires 0 < epsilon, 0 < delta < 1, and alpha small enough that
// r = ceil(1/alpha - 1) >= 2 (the t quantile needs r-1 >= 1 degrees of
// freedom); throws std::invalid_argument otherwise, including alpha == 0.
StoppingRule make_stopping_rule(double epsilon, double delta, double alpha);
uint64_t stopping_sample_size(double epsilon, double delta, double alpha);

// Exact slot-content probabilities for one slot of a frame of length
// frame_len holding n_tags uniformly hashed tags of which floor(alpha *
// n_tags) are missing: exactly one missing tag alone; exactly one missing
// plus one present; exactly two missing.
struct SlotProbs {
    double one_missing_alone = 0.0;
    double missing_with_present = 0.0;
    double two_missing = 0.0;

    double sum() const {
        return one_missing_alone + missing_with_present + two_missing;
    }
};

SlotProbs slot_assignment_probs(uint64_t n_tags, double alpha, uint64_t frame_len);

// Asymptotic per-slot probability that a verifiable slot carries missing
// tags, at load rho = n_tags / frame_len: alpha * rho * e^-rho * (1 + rho/2).
// Consistent with slot_assignment_probs as n grows only when alpha -> 1; the
// binomial forms carry an extra (1-alpha) rho term the closed form drops.
double pm_probability(double alpha, double rho);

struct BoundValue {
    double value = 0.0;
    bool in_range = true;  // epsilon/delta inside the bound's validity range
};

// Information-theoretic floor on identification time (unit constants):
//   N/log2 N + (1-delta)^2 (1-alpha)^2 / (eps^2 log2((1-delta)(1-alpha)/eps)).
// Valid for (1-alpha)(1-delta)/sqrt(N) <= eps <= 1/2 and delta < 1/3; below
// the epsilon range the bound degenerates to N. A zero second-term numerator
// drops the term; otherwise a log argument <= 1 throws std::invalid_argument.
BoundValue lower_bound_reference(uint64_t n, double epsilon, double delta,
                                 double alpha);

enum class RefAlgorithm : uint8_t {
    iip_thp,
    p_mti,
    mmti,
    sfmti,
    protar,
    pcmti,
    cpt,
};

// Leading-order expected time with unit constants. All share the accuracy
// term (1-alpha)^2 (1-delta)^2 / eps^2; the first term is N log2 N for
// p_mti/mmti, N for iip_thp/sfmti/protar/pcmti, and N log2 log2 N / log2 N
// for cpt. Requires n >= 2.
double expected_time_reference(RefAlgorithm algorithm, uint64_t n, double epsilon,
                               double delta, double alpha);

}  // namespace mti
