#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "admission/params.hpp"
#include "admission/rng.hpp"

namespace admission {

/// Two interchangeable ways to move the loss system from one arrival to the
/// next.  `event` tracks each busy server's completion epoch explicitly and
/// is required for coupled runs and sub-interval sampling; `thinning` keeps
/// only the busy count and resolves departures with one binomial draw per
/// interval (each busy server independently finishes within an interval of
/// length t with probability 1 - e^{-mu t}, by memorylessness).  Both modes
/// produce the same law for the observed records.
enum class SimMode { event, thinning };

/// A busy server in event mode.  `id` is the arrival index of the job it is
/// serving and doubles as a stable identity for coupled-run bookkeeping.
struct BusyJob {
    double completion = 0;
    int64_t id = 0;
};

class LossSystem {
public:
    LossSystem(const ModelParams& params, SimMode mode, const RandomStreams& streams);

    /// Move time forward by dt, absorbing the service completions that fall
    /// inside the window.  Returns the number of completions.
    int advance(double dt);

    /// Admit the job arriving now.  In event mode the service requirement is
    /// the draw keyed by the arrival index, so coupled systems admitting the
    /// same arrival agree on it without sharing generator state.
    /// Throws std::logic_error if all servers are busy.
    void admit(int64_t arrival_index);

    /// Admit with an explicitly given completion epoch and identity; used by
    /// coupled runs to link a job to a busy server of the partner system.
    void admit_linked(double completion, int64_t id);

    int busy() const;
    double now() const { return now_; }
    SimMode mode() const { return mode_; }
    const ModelParams& params() const { return params_; }

    /// Busy servers ordered by completion epoch (event mode only).
    const std::vector<BusyJob>& jobs() const;

private:
    const ModelParams params_;
    SimMode mode_;
    const RandomStreams* streams_;
    double now_ = 0.0;
    std::vector<BusyJob> jobs_;        // event mode, ascending completion
    int busy_count_ = 0;               // thinning mode
    std::mt19937_64 departure_engine_; // thinning mode binomial draws
};

/// Departure count over an interval of length dt with `busy` servers running,
/// resolved by independent Bernoulli thinning.  Exposed separately so the
/// distributional contract is testable in isolation.
int thinning_departures(std::mt19937_64& engine, int busy, double mu, double dt);

/// Records produced while waiting for one arrival under periodic sampling:
/// the system is inspected every `interval` units until the arrival lands,
/// and each inspection yields a record with the departures of its
/// sub-interval (prev_action is 0 for all but the first sub-interval, since
/// no admission happens at an inspection).
struct SampleBatch {
    std::vector<ArrivalRecord> intermediate;
    ArrivalRecord arrival;
};

/// Two systems driven by one arrival process, for paired policy comparison.
///
/// Service draws are keyed by arrival index, so when only one side admits an
/// arrival the other side's future draws are unaffected, and when both admit
/// they receive the identical duration.  If one side admits while the other
/// is full, the admitted job is linked to a busy server of the full side that
/// no job on the admitting side is already linked to (lowest arrival index
/// first): it completes exactly when that server does.  The linked remaining
/// time is again Exp(mu) by memorylessness, so each side's marginal law is
/// untouched, and with an admit-everything partner the linkage keeps that
/// partner's occupancy pointwise dominant.  Linking can be disabled for
/// policies that must know an admitted job's duration immediately.
class CoupledSystems {
public:
    CoupledSystems(const ModelParams& params, uint64_t seed, bool link_on_full = true);

    struct Observation {
        ArrivalRecord first;
        ArrivalRecord second;
    };

    /// Advance both systems to the next arrival; records share the
    /// inter-arrival time but carry each side's own busy/departure counts.
    Observation advance();

    /// Like advance(), but the first side is additionally inspected every
    /// `interval` time units while waiting (periodic-sampling runs).  The
    /// second side jumps straight to the arrival.
    struct SampledObservation {
        SampleBatch first;
        ArrivalRecord second;
    };
    SampledObservation advance_sampled(double interval);

    /// Apply this arrival's admission decisions to both sides.
    void apply(int first_action, int second_action);

    const LossSystem& first() const { return first_; }
    const LossSystem& second() const { return second_; }

    /// Duration drawn for the first side's admission at the current arrival;
    /// NaN if it blocked or its job was linked (duration not yet known).
    double first_service_duration() const { return first_duration_; }

    int64_t arrival_index() const { return index_; }

private:
    void admit_side(LossSystem& self, LossSystem& other);

    ModelParams params_;
    RandomStreams streams_;
    bool link_on_full_;
    LossSystem first_;
    LossSystem second_;
    std::mt19937_64 arrival_engine_;
    int64_t index_ = 0;  // arrival being decided
    int prev_first_action_ = 0;
    int prev_second_action_ = 0;
    double first_duration_ = 0;
    bool applied_ = true;
};

/// Advance a solo system to its next arrival while sampling every `interval`
/// time units.  `interval` = +infinity yields no intermediate records and
/// reduces to a plain arrival step.  Requires event mode.
SampleBatch advance_with_sampling(LossSystem& system, std::mt19937_64& arrival_engine,
                                  double interval, int64_t arrival_index, int prev_action);

/// Trajectory dump: header `index,T,N,A_prev,M`, one record per line, LF
/// endings, full floating precision for T.
void write_trajectory_csv(std::ostream& out, const std::vector<ArrivalRecord>& records);

/// Inverse of write_trajectory_csv; throws std::runtime_error with line
/// context on malformed input.
std::vector<ArrivalRecord> read_trajectory_csv(std::istream& in);

/// Conservation check across consecutive records:
/// departures = previous busy + prev_action - busy, busy within [0, servers].
bool trajectory_consistent(const std::vector<ArrivalRecord>& records, int servers,
                           int initial_busy = 0);

}  // namespace admission
