#include "mti/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "mti/baselines.hpp"
#include "mti/cpt.hpp"
#include "mti/hashing.hpp"

namespace mti {

namespace {

constexpr const char* trials_header =
    "algorithm,n,alpha,epsilon,delta,trial,seed,slots_short,slots_long,"
    "slots_tagid,reader_bits,tag_bits,time_s,missing_total,identified_true,"
    "identified_false,ratio,requirement_met";

constexpr const char* summary_header =
    "algorithm,n,alpha,epsilon,delta,trials,mean_time_s,success_fraction,"
    "requirement_ok";

// 1-ulp slack: ratio is a small rational and 1-epsilon a rounded double
bool meets(double ratio, double epsilon) { return ratio + 1e-12 >= 1.0 - epsilon; }

uint64_t intersect_count(const std::vector<uint32_t>& a,
                         const std::vector<uint32_t>& b) {
    uint64_t hits = 0;
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            ++hits;
            ++i;
            ++j;
        }
    }
    return hits;
}

}  // namespace

const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::cpt: return "cpt";
        case Algorithm::polling: return "polling";
        case Algorithm::pcmti: return "pcmti";
        case Algorithm::mmti: return "mmti";
        case Algorithm::sfmti: return "sfmti";
    }
    throw std::invalid_argument("algorithm_name: unknown algorithm");
}

Algorithm algorithm_from_name(const std::string& name) {
    if (name == "cpt") return Algorithm::cpt;
    if (name == "polling") return Algorithm::polling;
    if (name == "pcmti") return Algorithm::pcmti;
    if (name == "mmti") return Algorithm::mmti;
    if (name == "sfmti") return Algorithm::sfmti;
    throw std::invalid_argument("unknown algorithm: " + name);
}

Inventory make_inventory(uint64_t n, uint64_t seed) {
    if (n == 0) throw std::invalid_argument("make_inventory: n must be >= 1");
    Inventory inv;
    inv.tags.reserve(n);
    for (uint64_t i = 0; i < n; ++i) {
        TagId id;
        id.lo = finalize64(seed + 2 * i);
        id.hi = static_cast<uint32_t>(finalize64(seed + 2 * i + 1));
        inv.tags.push_back(id);
    }
    {
        std::vector<TagId> sorted(inv.tags);
        std::sort(sorted.begin(), sorted.end());
        for (size_t i = 1; i < sorted.size(); ++i) {
            if (sorted[i] == sorted[i - 1])
                throw std::runtime_error("make_inventory: duplicate tag IDs");
        }
    }
    PseudoIdSet pids =
        make_pseudo_ids(inv.tags, finalize64(seed ^ 0xA5A5A5A5A5A5A5A5ull));
    inv.pseudo_ids = std::move(pids.ids);
    inv.pseudo_id_bits = pids.bits;
    inv.pseudo_id_seed = pids.seed;
    inv.pseudo_id_iterations = pids.iterations;
    return inv;
}

CellSummary run_trials(const CellSpec& spec, const TimingModel& timing,
                       const ProtocolConfig& config) {
    if (spec.trials == 0) throw std::invalid_argument("run_trials: trials must be >= 1");
    if (!timing_valid(timing)) throw std::invalid_argument("run_trials: invalid timing model");
    CellSummary summary;
    summary.spec = spec;
    summary.trials.reserve(spec.trials);

    double time_sum = 0.0;
    uint32_t met_count = 0;
    for (uint32_t i = 0; i < spec.trials; ++i) {
        uint64_t trial_seed = finalize64(spec.base_seed ^ i);
        Inventory inv = make_inventory(spec.n, trial_seed);
        PRNGState rng{trial_seed};
        GroundTruth truth =
            make_ground_truth(static_cast<uint32_t>(spec.n), spec.alpha, rng);

        IdentificationResult res;
        switch (spec.algorithm) {
            case Algorithm::cpt:
                res = run_cpt(inv, truth, spec.requirement, spec.alpha, rng, timing,
                              config);
                break;
            case Algorithm::polling:
                res = run_polling(inv, truth, timing);
                break;
            case Algorithm::pcmti:
                res = run_pcmti(inv, truth, spec.requirement, spec.alpha, rng, timing,
                                config);
                break;
            case Algorithm::mmti:
                res = run_mmti(inv, truth, spec.requirement, spec.alpha, rng, timing,
                               config);
                break;
            case Algorithm::sfmti:
                res = run_sfmti(inv, truth, spec.requirement, spec.alpha, rng, timing,
                                config);
                break;
        }

        TrialRecord rec;
        rec.algorithm = spec.algorithm;
        rec.n = spec.n;
        rec.alpha = spec.alpha;
        rec.epsilon = spec.requirement.epsilon;
        rec.delta = spec.requirement.delta;
        rec.trial = i;
        rec.seed = trial_seed;
        rec.ledger = res.ledger;
        rec.time_s = res.elapsed_s;
        rec.missing_total = truth.missing.size();
        rec.identified_true = intersect_count(truth.missing, res.reported_missing);
        rec.identified_false = res.reported_missing.size() - rec.identified_true;
        rec.ratio = accuracy_ratio(truth, res);
        rec.requirement_met = meets(rec.ratio, rec.epsilon);

        time_sum += rec.time_s;
        met_count += rec.requirement_met ? 1 : 0;
        summary.trials.push_back(std::move(rec));
    }

    summary.mean_time_s = time_sum / spec.trials;
    summary.success_fraction = static_cast<double>(met_count) / spec.trials;
    summary.requirement_ok =
        summary.success_fraction >=
        verify_requirement_threshold(spec.requirement.delta, spec.trials);
    return summary;
}

double verify_requirement_threshold(double delta, uint32_t trials) {
    if (trials == 0)
        throw std::invalid_argument("verify_requirement_threshold: trials must be >= 1");
    if (!(delta >= 0.0 && delta <= 1.0))
        throw std::invalid_argument("verify_requirement_threshold: delta outside [0,1]");
    return (1.0 - delta) - 3.0 * std::sqrt(delta * (1.0 - delta) / trials);
}

VerifyOutcome verify_requirement(const std::vector<TrialRecord>& records,
                                 double epsilon, double delta) {
    if (records.size() < 30)
        throw std::invalid_argument("verify_requirement: need at least 30 records");
    uint64_t met = 0;
    for (const TrialRecord& rec : records) met += meets(rec.ratio, epsilon) ? 1 : 0;
    VerifyOutcome outcome;
    outcome.success_fraction = static_cast<double>(met) / records.size();
    outcome.ok = outcome.success_fraction >=
                 verify_requirement_threshold(delta, static_cast<uint32_t>(records.size()));
    return outcome;
}

std::vector<CellSummary> run_sweep(const SweepSpec& spec, const TimingModel& timing,
                                   const ProtocolConfig& config) {
    std::vector<CellSummary> cells;
    for (double epsilon : spec.epsilons) {
        for (double delta : spec.deltas) {
            for (double alpha : spec.alphas) {
                for (uint64_t n : spec.ns) {
                    for (Algorithm algorithm : spec.algorithms) {
                        CellSpec cell;
                        cell.algorithm = algorithm;
                        cell.n = n;
                        cell.alpha = alpha;
                        cell.requirement = AccuracyRequirement{epsilon, delta};
                        cell.trials = spec.trials;
                        cell.base_seed = spec.base_seed;
                        cells.push_back(run_trials(cell, timing, config));
                    }
                }
            }
        }
    }
    return cells;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

namespace {

void write_trial_row(std::ostream& out, const TrialRecord& r) {
    out << algorithm_name(r.algorithm) << ',' << r.n << ',' << format_double(r.alpha)
        << ',' << format_double(r.epsilon) << ',' << format_double(r.delta) << ','
        << r.trial << ',' << r.seed << ',' << r.ledger.short_slots << ','
        << r.ledger.long_slots << ',' << r.ledger.tagid_slots << ','
        << r.ledger.reader_bits << ',' << r.ledger.tag_bits << ','
        << format_double(r.time_s) << ',' << r.missing_total << ','
        << r.identified_true << ',' << r.identified_false << ','
        << format_double(r.ratio) << ',' << (r.requirement_met ? "true" : "false")
        << '\n';
}

}  // namespace

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& rows) {
    out << trials_header << '\n';
    for (const TrialRecord& r : rows) write_trial_row(out, r);
}

void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells) {
    out << summary_header << '\n';
    for (const CellSummary& c : cells) {
        out << algorithm_name(c.spec.algorithm) << ',' << c.spec.n << ','
            << format_double(c.spec.alpha) << ','
            << format_double(c.spec.requirement.epsilon) << ','
            << format_double(c.spec.requirement.delta) << ',' << c.spec.trials << ','
            << format_double(c.mean_time_s) << ','
            << format_double(c.success_fraction) << ','
            << (c.requirement_ok ? "true" : "false") << '\n';
    }
}

}  // namespace mti
