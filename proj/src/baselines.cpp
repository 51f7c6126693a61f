#include "admission/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace admission {

namespace {

double log1mexp(double x) {
    if (x > 0.6931471805599453) return std::log1p(-std::exp(-x));
    return std::log(-std::expm1(-x));
}

}  // namespace

TwoPointPosterior::TwoPointPosterior(double rate_low, double rate_high)
    : rate_low_(rate_low),
      rate_high_(rate_high),
      log_w_low_(std::log(0.5)),
      log_w_high_(std::log(0.5)) {
    if (!(rate_low > 0.0) || !(rate_high > rate_low))
        throw std::invalid_argument("support rates must satisfy 0 < low < high");
}

void TwoPointPosterior::update(const ArrivalRecord& record) {
    double t = record.inter_arrival;
    if (!(t > 0.0)) throw std::invalid_argument("record interval must be > 0");
    double m = static_cast<double>(record.departures);
    double n = static_cast<double>(record.busy);
    if (record.departures > 0) {
        log_w_low_ += m * log1mexp(rate_low_ * t);
        log_w_high_ += m * log1mexp(rate_high_ * t);
    }
    log_w_low_ -= rate_low_ * n * t;
    log_w_high_ -= rate_high_ * n * t;
    // renormalize against the larger weight so both stay representable
    double top = std::max(log_w_low_, log_w_high_);
    double norm = top + std::log(std::exp(log_w_low_ - top) + std::exp(log_w_high_ - top));
    log_w_low_ -= norm;
    log_w_high_ -= norm;
}

double TwoPointPosterior::weight_low() const { return std::exp(log_w_low_); }

double TwoPointPosterior::weight_high() const { return std::exp(log_w_high_); }

double TwoPointPosterior::sample(std::mt19937_64& engine) const {
    return bits_to_unit(engine()) < weight_low() ? rate_low_ : rate_high_;
}

ThompsonPolicy::ThompsonPolicy(const ModelParams& params, uint64_t internal_seed)
    : posterior_(0.5 * params.break_even_rate(), 1.5 * params.break_even_rate()),
      break_even_(params.break_even_rate()),
      servers_(params.servers()),
      internal_(internal_seed) {}

void ThompsonPolicy::observe(const ArrivalRecord& record) { posterior_.update(record); }

int ThompsonPolicy::decide(int busy, std::mt19937_64& /*coin_engine*/) {
    double drawn = posterior_.sample(internal_);
    return (busy < servers_ && drawn > break_even_) ? 1 : 0;
}

RLearningPolicy::RLearningPolicy(const ModelParams& params, RLearningOptions options,
                                 uint64_t internal_seed)
    : options_(options),
      reward_(params.reward()),
      cost_(params.cost()),
      servers_(params.servers()),
      values_(static_cast<size_t>(params.servers()) + 1, {0.0, 0.0}),
      internal_(internal_seed) {}

double RLearningPolicy::action_value(int busy, int action) const {
    return values_[static_cast<size_t>(busy)][static_cast<size_t>(action)];
}

double RLearningPolicy::best_value(int busy) const {
    if (busy >= servers_) return action_value(busy, 0);
    return std::max(action_value(busy, 0), action_value(busy, 1));
}

int RLearningPolicy::greedy_action(int busy) const {
    if (busy >= servers_) return 0;
    return action_value(busy, 1) >= action_value(busy, 0) ? 1 : 0;
}

void RLearningPolicy::observe(const ArrivalRecord& record) {
    if (!have_pending_) return;
    // finish the pending transition: its end state is this arrival's busy count
    double target = pending_reward_ - average_reward_ + best_value(record.busy);
    double& q = values_[static_cast<size_t>(pending_state_)][static_cast<size_t>(pending_action_)];
    double old_best = best_value(pending_state_);
    q += options_.step_q * (target - q);
    if (pending_greedy_) {
        average_reward_ += options_.step_avg *
                           (pending_reward_ + best_value(record.busy) - old_best - average_reward_);
    }
    have_pending_ = false;
}

int RLearningPolicy::decide(int busy, std::mt19937_64& /*coin_engine*/) {
    ++decisions_;
    int greedy = greedy_action(busy);
    int action = greedy;
    if (busy < servers_) {
        double eps = options_.epsilon0 / std::sqrt(static_cast<double>(decisions_));
        if (bits_to_unit(internal_()) < eps) {
            action = bits_to_unit(internal_()) < 0.5 ? 1 : 0;
        }
    }
    have_pending_ = true;
    pending_state_ = busy;
    pending_action_ = action;
    // greedy in the value sense: an exploratory draw that lands on an
    // equally-valued action still counts
    pending_greedy_ = action_value(busy, action) == best_value(busy);
    pending_reward_ = 0.0;  // blocking pays nothing; admission filled in by reveal_service
    return action;
}

void RLearningPolicy::reveal_service(double duration) {
    if (!have_pending_ || pending_action_ != 1)
        throw std::logic_error("service duration revealed without a pending admission");
    pending_reward_ = reward_ - cost_ * duration;
}

StaticPolicy::StaticPolicy(const ModelParams& params, StaticPolicyKind kind)
    : kind_(kind),
      oracle_admits_(params.mu() > params.break_even_rate()),
      servers_(params.servers()) {}

int StaticPolicy::decide(int busy, std::mt19937_64& /*coin_engine*/) {
    switch (kind_) {
        case StaticPolicyKind::never_admit:
            return 0;
        case StaticPolicyKind::always_admit:
            return busy < servers_ ? 1 : 0;
        case StaticPolicyKind::oracle:
            return (oracle_admits_ && busy < servers_) ? 1 : 0;
    }
    return 0;
}

}  // namespace admission
