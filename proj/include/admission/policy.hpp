#pragma once

#include <cstdint>
#include <random>

#include "admission/exploration.hpp"
#include "admission/params.hpp"

namespace admission {

// Per-record statistics behind the admit test.  Write d for the number of
// departures seen over an interval of length t and b for the busy count found
// at its end.  The score weights each departure by t * e^{-r t}/(1 - e^{-r t})
// evaluated at a reference rate r; the exposure is the certain busy time b*t.
// At the true service rate both accumulate at the same expected rate, and the
// score sum is strictly decreasing in r, so comparing the two sums at the
// break-even rate reveals on which side of it the true rate lies -- no
// explicit rate estimate needed.

// t*d*e^{-rate*t}/(1 - e^{-rate*t}), evaluated as t*d/expm1(rate*t) which is
// stable for tiny rate*t (limit d/rate) and for huge rate*t (limit 0).
double departure_score(double t, int departures, double rate);

// busy * t; kept as a named operation for symmetry with departure_score.
double busy_exposure(double t, int busy);

struct PolicyState {
    double score_sum = 0;           // over every ingested record
    double exposure_sum = 0;
    double snapshot_score = 0;      // sums frozen at the last reference epoch
    double snapshot_exposure = 0;
    int64_t explore_count = 0;      // empty-system exploration acceptances so far
    double last_margin = 0;         // score_sum - exposure_sum at the latest one
};

// Decision interface the run harness drives.  Per arrival the harness first
// feeds the record closing the previous interval (observe), then asks for the
// admission decision (decide).  Arrival 0 has no preceding record, so its
// decision comes from the initial state.
class Dispatcher {
public:
    virtual ~Dispatcher() = default;
    virtual void observe(const ArrivalRecord& record) = 0;
    // Intermediate inspection between arrivals (periodic-sampling runs).
    virtual void observe_sample(const ArrivalRecord& record) { (void)record; }
    virtual int decide(int busy, std::mt19937_64& coin_engine) = 0;
    // Duration of the job just admitted, when the simulation can reveal it.
    virtual void reveal_service(double duration) { (void)duration; }
};

// Which epochs refresh the frozen sums used by decide:
//   empty_system  - refresh only at arrivals finding an empty system, so
//                   decisions use data up to the last such arrival;
//   every_arrival - refresh at each arrival, and count every exploration
//                   acceptance (not just empty-system ones).
// With a single server the two coincide: an admission is only possible at an
// empty system, and whenever the system is non-empty the decision is a forced
// block either way.
enum class UpdateVariant { empty_system, every_arrival };

// Admission policy that learns the admit/block side of the break-even rate
// from censored observations.
//
// Per arrival: ingest the record (sums), refresh the snapshot per the
// variant, and bump explore_count if the previous arrival was an
// exploration-branch acceptance at an empty system (every_arrival drops the
// empty-system requirement).  Decide then blocks when full, admits when the
// frozen score exceeds the frozen exposure, and otherwise admits with
// probability 1/f(explore_count) -- strict-less comparison of one uniform
// coin against that probability.
//
// With periodic sampling, intermediate records enter the sums and snapshot
// but never the exploration counter: the counter tracks arrival-time
// acceptances only.
class MlePolicy : public Dispatcher {
public:
    MlePolicy(const ModelParams& params, ExplorationSchedule schedule, UpdateVariant variant);

    void observe(const ArrivalRecord& record) override;
    void observe_sample(const ArrivalRecord& record) override;
    int decide(int busy, std::mt19937_64& coin_engine) override;

    const PolicyState& state() const { return state_; }
    UpdateVariant variant() const { return variant_; }

private:
    void ingest(const ArrivalRecord& record);

    ExplorationSchedule schedule_;
    UpdateVariant variant_;
    double break_even_;
    int servers_;
    PolicyState state_;
    // latched at the previous arrival's decision
    bool prev_explore_branch_ = true;  // empty sums compare <=, so branch is explore
    int prev_busy_ = 0;
    int prev_action_ = 0;
};

}  // namespace admission
