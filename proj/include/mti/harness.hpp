#pragma once
// Experiment harness: inventory construction, repeated trials of one
// parameter cell, requirement verification across trials, and parameter
// sweeps with CSV emission.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mti/config.hpp"
#include "mti/core.hpp"

namespace mti {

enum class Algorithm : uint8_t {
    cpt,
    polling,
    pcmti,
    mmti,
    sfmti,
};

const char* algorithm_name(Algorithm a);
// Throws std::invalid_argument on unknown names.
Algorithm algorithm_from_name(const std::string& name);

struct CellSpec {
    Algorithm algorithm = Algorithm::cpt;
    uint64_t n = 0;
    double alpha = 0.0;
    AccuracyRequirement requirement;
    uint32_t trials = 1;
    uint64_t base_seed = 0;
};

struct TrialRecord {
    Algorithm algorithm = Algorithm::cpt;
    uint64_t n = 0;
    double alpha = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    uint32_t trial = 0;
    uint64_t seed = 0;
    CostLedger ledger;
    double time_s = 0.0;
    uint64_t missing_total = 0;
    uint64_t identified_true = 0;
    uint64_t identified_false = 0;
    double ratio = 0.0;
    bool requirement_met = false;
};

struct CellSummary {
    CellSpec spec;
    std::vector<TrialRecord> trials;
    double mean_time_s = 0.0;
    double success_fraction = 0.0;
    bool requirement_ok = false;
};

// n distinct tag IDs derived by hash-mixing sequential integers with the
// given seed. Throws std::runtime_error if distinctness fails (it cannot at
// feasible n; the check guards the mixing).
Inventory make_inventory(uint64_t n, uint64_t seed);

// Runs spec.trials independent trials; trial i uses seed
// finalize64(spec.base_seed ^ i) for both the missing-set draw and the
// protocol's PRNG stream. Trials run sequentially so results are
// reproducible regardless of machine.
CellSummary run_trials(const CellSpec& spec, const TimingModel& timing,
                       const ProtocolConfig& config = {});

// Success fraction threshold adjusted three binomial standard deviations
// below 1 - delta so finite trial counts do not flag sampling noise:
//   (1 - delta) - 3 sqrt(delta (1 - delta) / trials).
double verify_requirement_threshold(double delta, uint32_t trials);

struct VerifyOutcome {
    bool ok = false;
    double success_fraction = 0.0;
};

// Share of trials with ratio >= 1 - epsilon, checked against the 3-sigma
// threshold above. Needs >= 30 records for the binomial band to mean
// anything; throws std::invalid_argument below that.
VerifyOutcome verify_requirement(const std::vector<TrialRecord>& records,
                                 double epsilon, double delta);

struct SweepSpec {
    std::vector<Algorithm> algorithms;
    std::vector<uint64_t> ns;
    std::vector<double> alphas;
    std::vector<double> epsilons;
    std::vector<double> deltas;
    uint32_t trials = 1;
    uint64_t base_seed = 0;
};

// Cells are visited epsilon -> delta -> alpha -> n -> algorithm (outermost
// to innermost), trials innermost.
std::vector<CellSummary> run_sweep(const SweepSpec& spec,
                                   const TimingModel& timing,
                                   const ProtocolConfig& config = {});

// CSV emitters. Floats print with %.9g, booleans as true/false.
// Header: algorithm,n,alpha,epsilon,delta,trial,seed,slots_short,slots_long,
//         slots_tagid,reader_bits,tag_bits,time_s,missing_total,
//         identified_true,identified_false,ratio,requirement_met
void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& rows);
// Header: algorithm,n,alpha,epsilon,delta,trials,mean_time_s,
//         success_fraction,requirement_ok
void write_summary_csv(std::ostream& out,
                       const std::vector<CellSummary>& cells);

std::string format_double(double v);  // %.9g

}  // namespace mti
