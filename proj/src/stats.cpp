#include "mti/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace mti {

namespace {

// Continued-fraction kernel for I_x(a,b) (Lentz's method).
double beta_cf(double a, double b, double x) {
    constexpr int max_iter = 500;
    constexpr double eps = 1e-15;
    constexpr double fpmin = 1e-300;

    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw std::runtime_error("regularized_incomplete_beta: no convergence");
}

double floored_count(double alpha, uint64_t n) {
    // same 1e-9 anti-noise nudge as make_ground_truth
    double m = std::floor(alpha * static_cast<double>(n) + 1e-9);
    if (m < 0.0) m = 0.0;
    if (m > static_cast<double>(n)) m = static_cast<double>(n);
    return m;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("regularized_incomplete_beta: a, b must be > 0");
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("regularized_incomplete_beta: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log1p(-x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_quantile(double p, uint32_t df) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("student_t_quantile: p outside (0,1)");
    if (df < 1) throw std::invalid_argument("student_t_quantile: df must be >= 1");
    if (p == 0.5) return 0.0;
    if (p > 0.5) return -student_t_quantile(1.0 - p, df);

    auto upper_tail = [df](double t) {
        double fdf = static_cast<double>(df);
        return 0.5 * regularized_incomplete_beta(fdf * 0.5, 0.5, fdf / (fdf + t * t));
    };

    double lo = 0.0;
    double hi = 1.0;
    while (upper_tail(hi) > p) {
        hi *= 2.0;
        if (hi > 1e300)
            throw std::runtime_error("student_t_quantile: bracket overflow");
    }
    while (hi - lo > 1e-9) {
        double mid = 0.5 * (lo + hi);
        if (upper_tail(mid) > p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

StoppingRule make_stopping_rule(double epsilon, double delta, double alpha) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("stopping rule: epsilon must be > 0");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("stopping rule: delta outside (0,1)");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("stopping rule: alpha outside (0,1]");
    double inv = 1.0 / alpha - 1.0;
    // 1e-9 nudge: 1/alpha for decimal alpha can land a hair above the
    // intended integer and ceil one too high
    double r_raw = std::ceil(inv - 1e-9);
    if (r_raw < 2.0)
        throw std::invalid_argument("stopping rule: alpha too large (r < 2 leaves the t quantile undefined)");
    StoppingRule rule;
    rule.epsilon = epsilon;
    rule.delta = delta;
    rule.alpha = alpha;
    rule.r = static_cast<uint32_t>(r_raw);
    double t = student_t_quantile(delta, rule.r - 1);
    double raw = t * t * inv / (static_cast<double>(rule.r) * epsilon * epsilon);
    rule.n_min = static_cast<uint64_t>(std::ceil(raw - 1e-9));
    if (rule.n_min < 1) rule.n_min = 1;
    return rule;
}

uint64_t stopping_sample_size(double epsilon, double delta, double alpha) {
    return make_stopping_rule(epsilon, delta, alpha).n_min;
}

SlotProbs slot_assignment_probs(uint64_t n_tags, double alpha, uint64_t frame_len) {
    if (frame_len == 0) throw std::invalid_argument("slot_assignment_probs: f must be >= 1");
    if (n_tags == 0) throw std::invalid_argument("slot_assignment_probs: no tags");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("slot_assignment_probs: alpha outside [0,1]");
    double n = static_cast<double>(n_tags);
    double m = floored_count(alpha, n_tags);
    double f = static_cast<double>(frame_len);
    double q = 1.0 - 1.0 / f;

    SlotProbs probs;
    if (m >= 1.0) probs.one_missing_alone = m * (1.0 / f) * std::pow(q, n - 1.0);
    double coef_mixed = m * (n - m);
    if (coef_mixed > 0.0)
        probs.missing_with_present = coef_mixed * (1.0 / (f * f)) * std::pow(q, n - 2.0);
    double coef_two = m * (m - 1.0) / 2.0;
    if (coef_two > 0.0)
        probs.two_missing = coef_two * (1.0 / (f * f)) * std::pow(q, n - 2.0);
    return probs;
}

double pm_probability(double alpha, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("pm_probability: rho must be > 0");
    return alpha * rho * std::exp(-rho) * (1.0 + rho / 2.0);
}

BoundValue lower_bound_reference(uint64_t n, double epsilon, double delta,
                                 double alpha) {
    if (n < 2) throw std::invalid_argument("lower_bound_reference: n must be >= 2");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("lower_bound_reference: epsilon < 0");
    if (!(delta >= 0.0 && delta <= 1.0))
        throw std::invalid_argument("lower_bound_reference: delta outside [0,1]");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("lower_bound_reference: alpha outside [0,1]");

    double dn = static_cast<double>(n);
    double numerator = (1.0 - delta) * (1.0 - delta) * (1.0 - alpha) * (1.0 - alpha);
    double eps_floor = (1.0 - alpha) * (1.0 - delta) / std::sqrt(dn);

    BoundValue out;
    out.in_range = epsilon >= eps_floor && epsilon <= 0.5 && delta < 1.0 / 3.0;

    double first = dn / std::log2(dn);
    if (numerator == 0.0) {
        out.value = first;
        return out;
    }
    if (epsilon < eps_floor) {
        // identification degenerates to interrogating everything
        out.value = dn;
        return out;
    }
    double log_arg = (1.0 - delta) * (1.0 - alpha) / epsilon;
    if (log_arg <= 1.0)
        throw std::invalid_argument("lower_bound_reference: log argument <= 1 (outside validity)");
    out.value = first + numerator / (epsilon * epsilon * std::log2(log_arg));
    return out;
}

double expected_time_reference(RefAlgorithm algorithm, uint64_t n, double epsilon,
                               double delta, double alpha) {
    if (n < 2) throw std::invalid_argument("expected_time_reference: n must be >= 2");
    if (!(delta >= 0.0 && delta <= 1.0))
        throw std::invalid_argument("expected_time_reference: delta outside [0,1]");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("expected_time_reference: alpha outside [0,1]");

    double numerator = (1.0 - alpha) * (1.0 - alpha) * (1.0 - delta) * (1.0 - delta);
    double accuracy_term = 0.0;
    if (numerator > 0.0) {
        if (!(epsilon > 0.0))
            throw std::invalid_argument("expected_time_reference: epsilon must be > 0");
        accuracy_term = numerator / (epsilon * epsilon);
    }

    double dn = static_cast<double>(n);
    double first = 0.0;
    switch (algorithm) {
        case RefAlgorithm::p_mti:
        case RefAlgorithm::mmti:
            first = dn * std::log2(dn);
            break;
        case RefAlgorithm::iip_thp:
        case RefAlgorithm::sfmti:
        case RefAlgorithm::protar:
        case RefAlgorithm::pcmti:
            first = dn;
            break;
        case RefAlgorithm::cpt:
            first = dn * std::log2(std::log2(dn)) / std::log2(dn);
            break;
        default:
            throw std::invalid_argument("expected_time_reference: unknown algorithm");
    }
    return first + accuracy_term;
}

}  // namespace mti
