#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "admission/exploration.hpp"
#include "admission/params.hpp"

namespace admission {

/// How a service-rate estimate degenerated, if it did.  The likelihood has no
/// interior maximizer when the data contain no departures at all (rate 0
/// explains them best) or no busy time at all (every admitted job vanished
/// before the next look, pushing the estimate to infinity).
enum class RateEstimateKind { zero, finite, infinite };

struct ServiceRateEstimate {
    RateEstimateKind kind = RateEstimateKind::finite;
    double value = 0;  ///< the rate when finite; 0 / +inf for the degenerate kinds
};

/// Log-likelihood of a service rate given interval records (T, N, M), up to
/// the rate-free combinatorial constant:
///   sum_i [ M_i * log(1 - e^{-rate*T_i}) - rate * N_i * T_i ].
/// Strictly concave in the rate whenever a departure was observed.
double censored_log_likelihood(const std::vector<ArrivalRecord>& records, double rate);

/// Maximum-likelihood service rate from interval records.  The finite case
/// solves the stationarity condition (score sum equals exposure sum, see
/// policy.hpp) by bracketed bisection: the left bracket is 1e-9, the right
/// bracket doubles from 1 until the score falls below the exposure, and
/// bisection runs to relative width `rel_tol`.
ServiceRateEstimate solve_service_rate(const std::vector<ArrivalRecord>& records,
                                       double rel_tol = 1e-10);

/// Maximum-likelihood arrival rate: record count / total observed time.
double arrival_rate_estimate(const std::vector<ArrivalRecord>& records);

/// Stationary distribution of the busy count seen by arrivals when every job
/// is admitted below `threshold` and blocked at or above it: the Erlang
/// weights (lambda/mu)^i / i! normalized over 0..threshold, zero above.
/// Returned vector has servers+1 entries.
std::vector<double> stationary_distribution(double lambda, double mu, int threshold,
                                            int servers);

/// Per-arrival reward r(busy, action) as a closure over the rate estimates,
/// so rewards can be re-evaluated as estimates move.  r(servers, 1) is never
/// queried.
struct RewardModel {
    std::function<double(int busy, int action, double lambda, double mu)> rate_reward;
};

/// r(i,1) = R - c*(i+1)/(lambda+mu), r(i,0) = -c*i/(lambda+mu).
RewardModel linear_reward_model(double reward, double cost);

/// Long-run average reward of the threshold policy under its stationary
/// distribution: admissions below the threshold, the block term at it.
double average_reward(const RewardModel& model, double lambda, double mu,
                      const std::vector<double>& stationary, int threshold);

/// Best admission threshold in 0..servers by exhaustive evaluation of
/// average_reward; ties resolved toward the smaller threshold.
int optimal_threshold(const RewardModel& model, double lambda, double mu, int servers);

/// One decision of the certainty-equivalent loop: with probability
/// 1/f(arrival_count) explore by admitting if there is room; otherwise
/// estimate both rates from the history, pick the optimal threshold for the
/// estimates, and play it (degenerate rate estimates collapse to threshold 0
/// resp. servers; above the threshold, admit-if-room).
struct GeneralPolicyDecision {
    int action = 0;
    int threshold = 0;
    bool explored = false;
};

GeneralPolicyDecision general_policy_step(const std::vector<ArrivalRecord>& history,
                                          const RewardModel& model, int servers,
                                          const ExplorationSchedule& schedule,
                                          int64_t arrival_count, int busy,
                                          std::mt19937_64& coin_engine);

}  // namespace admission
