#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "admission/baselines.hpp"
#include "admission/exploration.hpp"
#include "admission/params.hpp"
#include "admission/simulator.hpp"

namespace admission {

enum class PolicyKind {
    alg1,          // learned admit test, sums frozen at empty-system arrivals
    alg2,          // learned admit test, live sums at every arrival
    sampled,       // alg1 rule fed by periodic inter-arrival inspections
    thompson,      // two-point Thompson sampling baseline
    rlearning,     // tabular average-reward RL baseline
    oracle,        // admit-if-room iff the true rate clears break-even
    always_admit,
    never_admit,
};

struct RunConfig {
    explicit RunConfig(const ModelParams& p) : params(p) {}

    ModelParams params;
    PolicyKind policy = PolicyKind::alg1;
    ExplorationSchedule schedule;
    int64_t horizon = 100000;       // number of arrivals (= decisions)
    int replications = 100;
    uint64_t base_seed = 1;
    std::vector<int64_t> checkpoints;  // empty -> default geometric grid
    SimMode sim_mode = SimMode::event;
    double sample_interval = 0;     // sampled policy; <=0 or +inf means none
    RLearningOptions rlearning;
    int64_t config_index = 0;       // position within a sweep; enters seed derivation

    /// Throws std::invalid_argument on the first violated constraint.
    void validate() const;
};

struct RegretTrace {
    std::vector<int64_t> checkpoints;
    std::vector<double> mean_regret;  // |mean over replications| per checkpoint
    std::vector<double> std_regret;   // sample std of the signed per-run values
    std::vector<std::vector<double>> runs;  // per-replication signed traces, if kept
};

/// Checkpoint grid {100, 10^2.25, 10^2.5, ...} capped by and ending at the
/// horizon, so log-x regret plots are evenly sampled.
std::vector<int64_t> default_checkpoints(int64_t horizon);

/// Regret of the configured policy against the oracle over the horizon,
/// averaged over replications.
///
/// When the oracle admits (true rate above break-even) the candidate runs
/// coupled with an oracle system on shared arrival and service streams and
/// the per-run statistic is the cumulative action difference.  When the
/// oracle admits nothing the statistic is just the candidate's acceptance
/// count; a coupled run would produce the identical number (the partner
/// never interferes), which measure_regret_path exposes for verification.
RegretTrace measure_regret(const RunConfig& cfg, bool keep_runs = false);

enum class RegretPath { automatic, coupled, count };
RegretTrace measure_regret_path(const RunConfig& cfg, RegretPath path, bool keep_runs = false);

/// Per-replication seed, derived so that every (config, replication) pair is
/// independent and reproducible regardless of worker scheduling.
uint64_t replication_seed(uint64_t base_seed, int64_t config_index, int replication);

/// One solo trajectory of the configured policy (first replication's seed):
/// records 1..horizon-1 prefixed by a zero row for arrival 0, ready for the
/// trajectory-dump writer.
std::vector<ArrivalRecord> trace_trajectory(const RunConfig& cfg);

struct SweepEntry {
    std::string name;
    RunConfig config;
};

struct SweepResult {
    std::string name;
    RegretTrace trace;
    std::string axis_hint;  // suggested plot scaling, see axis_hint()
    std::string error;      // nonempty if this entry failed; others still run
};

/// Runs each entry (replications spread over a worker pool), collecting
/// per-entry failures instead of aborting the sweep.  Empty input is an
/// error.
std::vector<SweepResult> sweep(const std::vector<SweepEntry>& entries);

/// Plot-scaling hint for a config: "log-x" when the oracle admits (regret
/// flattens), "log-log" otherwise (regret grows polylogarithmically).
std::string axis_hint(const RunConfig& cfg);

/// CSV serialization: header `checkpoint,mean_regret,std_regret`, one row per
/// checkpoint, full floating precision, LF endings.
std::string emit_csv(const RegretTrace& trace);
void write_csv(const RegretTrace& trace, const std::string& path);
RegretTrace parse_csv(std::istream& in);

}  // namespace admission
