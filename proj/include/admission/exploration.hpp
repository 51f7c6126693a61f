#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace admission {

enum class ScheduleKind {
    poly_power,           // f(n) = max(1, n^power)
    exp_power,            // f(n) = exp(n^(1 - epsilon))
    exp_linear,           // f(n) = exp(n)
    exp_power_decaying,   // f(n) = exp(n^(1 - e_n)), e_n = epsilon_bar / sqrt(1 + log(n+1))
};

// Exploration schedule: in the explore branch an arrival is admitted with
// probability 1/f(n), where n counts the empty-system exploration acceptances
// so far.  Every schedule is clamped below at 1, so the probability lies in
// (0, 1] and equals 1 before any exploration has happened.
struct ExplorationSchedule {
    ScheduleKind kind = ScheduleKind::exp_power;
    double power = 2.5;        // poly_power exponent, > 0
    double epsilon = 0.4;      // exp_power shape, in (0,1)
    double epsilon_bar = 0.2;  // exp_power_decaying shape, in (0,1)

    static ExplorationSchedule polynomial(double power) {
        ExplorationSchedule s;
        s.kind = ScheduleKind::poly_power;
        s.power = power;
        return s;
    }
    static ExplorationSchedule exponential_power(double epsilon) {
        ExplorationSchedule s;
        s.kind = ScheduleKind::exp_power;
        s.epsilon = epsilon;
        return s;
    }
    static ExplorationSchedule exponential_linear() {
        ExplorationSchedule s;
        s.kind = ScheduleKind::exp_linear;
        return s;
    }
    static ExplorationSchedule exponential_decaying(double epsilon_bar) {
        ExplorationSchedule s;
        s.kind = ScheduleKind::exp_power_decaying;
        s.epsilon_bar = epsilon_bar;
        return s;
    }

    void validate() const {
        switch (kind) {
            case ScheduleKind::poly_power:
                if (!(power > 0.0) || !std::isfinite(power))
                    throw std::invalid_argument("poly-power exponent must be finite and > 0");
                break;
            case ScheduleKind::exp_power:
                if (!(epsilon > 0.0 && epsilon < 1.0))
                    throw std::invalid_argument("epsilon must lie in (0,1)");
                break;
            case ScheduleKind::exp_linear:
                break;
            case ScheduleKind::exp_power_decaying:
                if (!(epsilon_bar > 0.0 && epsilon_bar < 1.0))
                    throw std::invalid_argument("epsilon-bar must lie in (0,1)");
                break;
        }
    }

    // exponent such that f(n) = exp(exponent) for the exponential family
    double shape_exponent(int64_t n) const {
        double nd = static_cast<double>(n);
        switch (kind) {
            case ScheduleKind::exp_power:
                return std::pow(nd, 1.0 - epsilon);
            case ScheduleKind::exp_linear:
                return nd;
            case ScheduleKind::exp_power_decaying: {
                double e_n = epsilon_bar / std::sqrt(1.0 + std::log(nd + 1.0));
                return std::pow(nd, 1.0 - e_n);
            }
            default:
                return 0.0;
        }
    }

    // f(n); may legitimately overflow to +inf for large n (admit prob 0)
    double value(int64_t n) const {
        if (kind == ScheduleKind::poly_power) {
            double f = std::pow(static_cast<double>(n), power);
            return f < 1.0 ? 1.0 : f;
        }
        double f = std::exp(shape_exponent(n));
        return f < 1.0 ? 1.0 : f;
    }

    // 1/f(n), evaluated without forming f so it underflows cleanly to 0
    double admit_probability(int64_t n) const {
        if (kind == ScheduleKind::poly_power) {
            if (n <= 1) return 1.0;
            return std::pow(static_cast<double>(n), -power);
        }
        double p = std::exp(-shape_exponent(n));
        return p > 1.0 ? 1.0 : p;
    }
};

}  // namespace admission
