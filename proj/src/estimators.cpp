#include "admission/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "admission/policy.hpp"
#include "admission/rng.hpp"

namespace admission {

namespace {

// log(1 - e^{-x}) for x > 0 without cancellation on either end
double log1mexp(double x) {
    if (x > 0.6931471805599453) return std::log1p(-std::exp(-x));
    return std::log(-std::expm1(-x));
}

constexpr double kRateFloor = 1e-9;

double score_minus_exposure(const std::vector<ArrivalRecord>& records, double rate) {
    double score = 0.0;
    double exposure = 0.0;
    for (const ArrivalRecord& r : records) {
        score += departure_score(r.inter_arrival, r.departures, rate);
        exposure += busy_exposure(r.inter_arrival, r.busy);
    }
    return score - exposure;
}

}  // namespace

double censored_log_likelihood(const std::vector<ArrivalRecord>& records, double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw std::invalid_argument("rate must be finite and > 0");
    double total = 0.0;
    for (const ArrivalRecord& r : records) {
        if (!(r.inter_arrival > 0.0))
            throw std::invalid_argument("records must have positive interval lengths");
        double x = rate * r.inter_arrival;
        if (r.departures > 0) total += static_cast<double>(r.departures) * log1mexp(x);
        total -= x * static_cast<double>(r.busy);
    }
    return total;
}

ServiceRateEstimate solve_service_rate(const std::vector<ArrivalRecord>& records,
                                       double rel_tol) {
    bool any_departure = false;
    bool any_busy = false;
    for (const ArrivalRecord& r : records) {
        if (r.departures > 0) any_departure = true;
        if (r.busy > 0) any_busy = true;
    }
    if (!any_departure) return {RateEstimateKind::zero, 0.0};
    if (!any_busy) return {RateEstimateKind::infinite, std::numeric_limits<double>::infinity()};

    // The score sum is strictly decreasing in the rate and diverges as the
    // rate falls to 0, the exposure sum is constant: there is exactly one
    // crossing, bracketed below by the floor and above by doubling.
    double lo = kRateFloor;
    if (score_minus_exposure(records, lo) <= 0.0) return {RateEstimateKind::finite, lo};
    double hi = 1.0;
    while (score_minus_exposure(records, hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) return {RateEstimateKind::infinite, std::numeric_limits<double>::infinity()};
    }
    for (int iter = 0; iter < 200 && (hi - lo) > rel_tol * hi; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (score_minus_exposure(records, mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {RateEstimateKind::finite, 0.5 * (lo + hi)};
}

double arrival_rate_estimate(const std::vector<ArrivalRecord>& records) {
    if (records.empty()) throw std::invalid_argument("cannot estimate a rate from no records");
    double total_time = 0.0;
    for (const ArrivalRecord& r : records) {
        if (!(r.inter_arrival > 0.0))
            throw std::invalid_argument("records must have positive interval lengths");
        total_time += r.inter_arrival;
    }
    return static_cast<double>(records.size()) / total_time;
}

std::vector<double> stationary_distribution(double lambda, double mu, int threshold,
                                            int servers) {
    if (!(lambda > 0.0) || !(mu > 0.0))
        throw std::invalid_argument("rates must be > 0");
    if (servers < 1) throw std::invalid_argument("server count must be >= 1");
    if (threshold < 0 || threshold > servers)
        throw std::invalid_argument("threshold must lie in 0..servers");
    std::vector<double> weights(static_cast<size_t>(servers) + 1, 0.0);
    double load = lambda / mu;
    double w = 1.0;
    double total = 1.0;
    weights[0] = 1.0;
    for (int i = 1; i <= threshold; ++i) {
        w *= load / static_cast<double>(i);
        weights[static_cast<size_t>(i)] = w;
        total += w;
    }
    for (int i = 0; i <= threshold; ++i) weights[static_cast<size_t>(i)] /= total;
    return weights;
}

RewardModel linear_reward_model(double reward, double cost) {
    RewardModel model;
    model.rate_reward = [reward, cost](int busy, int action, double lambda, double mu) {
        double uniformized = lambda + mu;
        if (action == 1) return reward - cost * static_cast<double>(busy + 1) / uniformized;
        return -cost * static_cast<double>(busy) / uniformized;
    };
    return model;
}

double average_reward(const RewardModel& model, double lambda, double mu,
                      const std::vector<double>& stationary, int threshold) {
    if (threshold < 0 || static_cast<size_t>(threshold) >= stationary.size())
        throw std::invalid_argument("threshold out of range for the given distribution");
    double total = 0.0;
    for (int i = 0; i < threshold; ++i) {
        total += model.rate_reward(i, 1, lambda, mu) * stationary[static_cast<size_t>(i)];
    }
    total += model.rate_reward(threshold, 0, lambda, mu) * stationary[static_cast<size_t>(threshold)];
    return total;
}

int optimal_threshold(const RewardModel& model, double lambda, double mu, int servers) {
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int threshold = 0; threshold <= servers; ++threshold) {
        std::vector<double> pi = stationary_distribution(lambda, mu, threshold, servers);
        double value = average_reward(model, lambda, mu, pi, threshold);
        if (value > best_value) {  // strict: ties stay with the smaller threshold
            best_value = value;
            best = threshold;
        }
    }
    return best;
}

GeneralPolicyDecision general_policy_step(const std::vector<ArrivalRecord>& history,
                                          const RewardModel& model, int servers,
                                          const ExplorationSchedule& schedule,
                                          int64_t arrival_count, int busy,
                                          std::mt19937_64& coin_engine) {
    GeneralPolicyDecision decision;
    double explore_p = schedule.admit_probability(arrival_count);
    if (bits_to_unit(coin_engine()) < explore_p || history.empty()) {
        decision.explored = true;
        decision.threshold = servers;
        decision.action = busy < servers ? 1 : 0;
        return decision;
    }
    double lambda_est = arrival_rate_estimate(history);
    ServiceRateEstimate mu_est = solve_service_rate(history);
    switch (mu_est.kind) {
        case RateEstimateKind::zero:
            decision.threshold = 0;
            break;
        case RateEstimateKind::infinite:
            decision.threshold = servers;
            break;
        case RateEstimateKind::finite:
            decision.threshold = optimal_threshold(model, lambda_est, mu_est.value, servers);
            break;
    }
    if (busy < decision.threshold) {
        decision.action = 1;
    } else if (busy == decision.threshold) {
        decision.action = 0;
    } else {
        decision.action = busy < servers ? 1 : 0;
    }
    return decision;
}

}  // namespace admission
