#pragma once

#include <cstdint>

namespace admission {

/// Parameters of the k-server loss system with linear admission rewards:
/// Poisson arrivals at rate `lambda`, exponential service at rate `mu`,
/// `servers` identical servers and no waiting room.  An admitted job pays
/// `reward` up front and `cost` per unit of its service duration.
///
/// Immutable value object; derived quantities are computed at construction.
/// The constructor throws std::invalid_argument naming the first violated
/// constraint (all rates and prices strictly positive, at least one server).
class ModelParams {
public:
    ModelParams(double lambda, double mu, int servers, double reward, double cost);

    double lambda() const { return lambda_; }
    double mu() const { return mu_; }
    int servers() const { return servers_; }
    double reward() const { return reward_; }
    double cost() const { return cost_; }

    /// Service-rate level at which admitting breaks even (cost/reward):
    /// admitting is profitable in the long run iff mu exceeds this.
    double break_even_rate() const { return break_even_rate_; }

    /// lambda / mu, the classic offered load.
    double offered_load() const { return offered_load_; }

private:
    double lambda_;
    double mu_;
    int servers_;
    double reward_;
    double cost_;
    double break_even_rate_;
    double offered_load_;
};

/// Convenience wrapper mirroring the constructor; throws on invalid input.
ModelParams validate_params(double lambda, double mu, int servers, double reward, double cost);

/// One observation at a sampling epoch (normally an arrival): time since the
/// previous epoch, the admission decision taken at the previous epoch, the
/// service completions seen in between, and the busy-server count found now
/// (before any admission at this epoch).
///
/// Departures are never observed directly; they are recovered from the
/// conservation identity  departures = busy_prev + prev_action - busy.
struct ArrivalRecord {
    int64_t index = 0;         ///< arrival ordinal; intermediate samples carry the upcoming one
    double inter_arrival = 0;  ///< time since the previous observation epoch
    int busy = 0;              ///< busy servers immediately before this epoch's decision
    int prev_action = 0;       ///< 1 if the job at the previous epoch was admitted
    int departures = 0;        ///< completions during the interval
};

}  // namespace admission
