#include "admission/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace admission {

namespace {

void check_rates(double lambda, double mu, double break_even_rate) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("arrival rate must be finite and > 0");
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw std::invalid_argument("service rate must be finite and > 0");
    if (!(break_even_rate > 0.0) || !std::isfinite(break_even_rate))
        throw std::invalid_argument("break-even rate must be finite and > 0");
}

// sum_{s>=1} [ lambda/(lambda + s*theta)^2 - lambda/(lambda + mu + s*theta)^2 ]
//
// Summed as a difference: individual sums decay like 1/s (millions of terms
// for any useful accuracy), the differenced terms like 1/s^3.  Compensated
// accumulation keeps rounding error below the truncation bound; the stopping
// rule compares the integral tail bound
//   sum_{s'>s} term(s')  <=  lambda*mu / (theta*(lambda+s*theta)*(lambda+mu+s*theta))
// against the requested cutoff.
double differenced_series(double lambda, double mu, double theta, SeriesTolerance tol) {
    double sum = 0.0;
    double comp = 0.0;
    for (int64_t s = 1; s <= tol.max_terms; ++s) {
        double near = lambda + static_cast<double>(s) * theta;
        double far = near + mu;
        double term = lambda / (near * near) - lambda / (far * far);
        double y = term - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (lambda * mu / (theta * near * far) <= tol.term_cutoff) break;
    }
    return sum;
}

}  // namespace

double single_server_drift(double lambda, double mu, double break_even_rate,
                           SeriesTolerance tol) {
    check_rates(lambda, mu, break_even_rate);
    double diff = differenced_series(lambda, mu, break_even_rate, tol);
    return -lambda / (mu * (lambda + mu)) + (lambda + mu) / mu * diff;
}

double score_drift_limit(double lambda, double mu, double break_even_rate,
                         SeriesTolerance tol) {
    check_rates(lambda, mu, break_even_rate);
    double diff = differenced_series(lambda, mu, break_even_rate, tol);
    double direct = lambda / ((lambda + mu) * (lambda + mu));
    return diff - direct;
}

double erlang_b(double offered_load, int servers) {
    if (!(offered_load > 0.0) || !std::isfinite(offered_load))
        throw std::invalid_argument("offered load must be finite and > 0");
    if (servers < 0) throw std::invalid_argument("server count must be >= 0");
    double blocking = 1.0;
    for (int j = 1; j <= servers; ++j) {
        blocking = offered_load * blocking / (static_cast<double>(j) + offered_load * blocking);
    }
    return blocking;
}

}  // namespace admission
