#include "admission/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace admission {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

}  // namespace

ModelParams::ModelParams(double lambda, double mu, int servers, double reward, double cost)
    : lambda_(lambda), mu_(mu), servers_(servers), reward_(reward), cost_(cost) {
    require(std::isfinite(lambda) && lambda > 0.0, "arrival rate must be finite and > 0");
    require(std::isfinite(mu) && mu > 0.0, "service rate must be finite and > 0");
    require(servers >= 1, "server count must be >= 1");
    require(std::isfinite(reward) && reward > 0.0, "admission reward must be finite and > 0");
    require(std::isfinite(cost) && cost > 0.0, "holding cost must be finite and > 0");
    break_even_rate_ = cost_ / reward_;
    offered_load_ = lambda_ / mu_;
}

ModelParams validate_params(double lambda, double mu, int servers, double reward, double cost) {
    return ModelParams(lambda, mu, servers, reward, cost);
}

}  // namespace admission
