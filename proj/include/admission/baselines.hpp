#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "admission/params.hpp"
#include "admission/policy.hpp"
#include "admission/rng.hpp"

namespace admission {

// Two-point Thompson sampling over candidate service rates placed on either
// side of the break-even rate (half of it and one-and-a-half times it),
// uniform prior.  Each record multiplies both weights by its likelihood; the
// update runs in log space and renormalizes, so weights never underflow.
class TwoPointPosterior {
public:
    TwoPointPosterior(double rate_low, double rate_high);

    void update(const ArrivalRecord& record);

    double rate_low() const { return rate_low_; }
    double rate_high() const { return rate_high_; }
    double weight_low() const;   // posterior mass on the low rate
    double weight_high() const;
    double log_weight_gap() const { return log_w_high_ - log_w_low_; }

    // One posterior draw of the service rate.
    double sample(std::mt19937_64& engine) const;

private:
    double rate_low_;
    double rate_high_;
    double log_w_low_;
    double log_w_high_;
};

class ThompsonPolicy : public Dispatcher {
public:
    ThompsonPolicy(const ModelParams& params, uint64_t internal_seed);

    void observe(const ArrivalRecord& record) override;
    // Admit iff there is room and the sampled rate clears break-even.
    int decide(int busy, std::mt19937_64& coin_engine) override;

    const TwoPointPosterior& posterior() const { return posterior_; }

private:
    TwoPointPosterior posterior_;
    double break_even_;
    int servers_;
    std::mt19937_64 internal_;
};

struct RLearningOptions {
    double step_q = 0.05;       // action-value step size
    double step_avg = 0.01;     // average-reward step size
    double epsilon0 = 0.1;      // exploration rate, decayed as epsilon0/sqrt(t)
};

// Tabular average-reward R-learning on the busy count observed at arrivals,
// with the admitted job's realized duration revealed for the reward
// (admission pays reward - cost*duration, blocking pays 0).  Greedy updates
// move the average-reward estimate; ties between equal action values admit.
class RLearningPolicy : public Dispatcher {
public:
    RLearningPolicy(const ModelParams& params, RLearningOptions options, uint64_t internal_seed);

    void observe(const ArrivalRecord& record) override;
    int decide(int busy, std::mt19937_64& coin_engine) override;
    void reveal_service(double duration) override;

    double action_value(int busy, int action) const;
    double average_reward_estimate() const { return average_reward_; }
    int greedy_action(int busy) const;

private:
    double best_value(int busy) const;

    RLearningOptions options_;
    double reward_;
    double cost_;
    int servers_;
    std::vector<std::array<double, 2>> values_;
    double average_reward_ = 0;
    int64_t decisions_ = 0;
    std::mt19937_64 internal_;
    // pending transition, completed when the next arrival shows its end state
    bool have_pending_ = false;
    int pending_state_ = 0;
    int pending_action_ = 0;
    bool pending_greedy_ = false;
    double pending_reward_ = 0;
};

enum class StaticPolicyKind { oracle, always_admit, never_admit };

// Fixed decision rules: the oracle admits-if-room exactly when the true rate
// clears break-even, the other two ignore the parameters entirely.
class StaticPolicy : public Dispatcher {
public:
    StaticPolicy(const ModelParams& params, StaticPolicyKind kind);

    void observe(const ArrivalRecord& record) override { (void)record; }
    int decide(int busy, std::mt19937_64& coin_engine) override;

private:
    StaticPolicyKind kind_;
    bool oracle_admits_;
    int servers_;
};

}  // namespace admission
