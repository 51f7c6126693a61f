#include "admission/policy.hpp"

#include <cmath>
#include <stdexcept>

#include "admission/rng.hpp"

namespace admission {

double departure_score(double t, int departures, double rate) {
    if (!(t > 0.0)) throw std::invalid_argument("interval length must be > 0");
    if (departures < 0) throw std::invalid_argument("departure count must be >= 0");
    if (!(rate > 0.0)) throw std::invalid_argument("reference rate must be > 0");
    if (departures == 0) return 0.0;
    return static_cast<double>(departures) * t / std::expm1(rate * t);
}

double busy_exposure(double t, int busy) {
    if (!(t > 0.0)) throw std::invalid_argument("interval length must be > 0");
    if (busy < 0) throw std::invalid_argument("busy count must be >= 0");
    return static_cast<double>(busy) * t;
}

MlePolicy::MlePolicy(const ModelParams& params, ExplorationSchedule schedule,
                     UpdateVariant variant)
    : schedule_(schedule),
      variant_(variant),
      break_even_(params.break_even_rate()),
      servers_(params.servers()) {
    schedule_.validate();
}

void MlePolicy::ingest(const ArrivalRecord& record) {
    state_.score_sum += departure_score(record.inter_arrival, record.departures, break_even_);
    state_.exposure_sum += busy_exposure(record.inter_arrival, record.busy);
    if (variant_ == UpdateVariant::every_arrival || record.busy == 0) {
        state_.snapshot_score = state_.score_sum;
        state_.snapshot_exposure = state_.exposure_sum;
    }
}

void MlePolicy::observe(const ArrivalRecord& record) {
    // The previous arrival contributes to the exploration counter iff its
    // decision came from the exploration branch, it admitted, and (for the
    // empty-system variant) it found the system empty.
    if (prev_explore_branch_ && prev_action_ == 1 &&
        (variant_ == UpdateVariant::every_arrival || prev_busy_ == 0)) {
        ++state_.explore_count;
    }
    ingest(record);
    prev_explore_branch_ = state_.score_sum <= state_.exposure_sum;
    prev_busy_ = record.busy;
}

void MlePolicy::observe_sample(const ArrivalRecord& record) {
    // Sums and snapshot move, the exploration bookkeeping stays latched at
    // the last arrival: inspections admit nothing and count for nothing.
    ingest(record);
}

int MlePolicy::decide(int busy, std::mt19937_64& coin_engine) {
    int action;
    if (busy >= servers_) {
        action = 0;
    } else if (state_.snapshot_score > state_.snapshot_exposure) {
        action = 1;
    } else {
        double admit_p = schedule_.admit_probability(state_.explore_count);
        action = bits_to_unit(coin_engine()) < admit_p ? 1 : 0;
    }
    prev_action_ = action;
    if (action == 1 && busy == 0) {
        state_.last_margin = state_.score_sum - state_.exposure_sum;
    }
    return action;
}

}  // namespace admission
