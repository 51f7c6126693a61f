#pragma once

#include <cstdint>

namespace admission {

/// Truncation control for the infinite series inside the drift formulas.
/// Summation stops once an integral comparison bounds the remaining tail
/// below `term_cutoff`, or after `max_terms` terms as a safety cap; either
/// way the returned value is within the bound of the true limit.
struct SeriesTolerance {
    double term_cutoff = 1e-14;
    int64_t max_terms = 10'000'000;
};

/// Expected one-busy-cycle change of the score-minus-exposure margin for a
/// single-server system that admits every job arriving to an empty system.
/// Positive iff mu > break_even_rate, so the margin drifts toward the
/// correct admit/block side.
double single_server_drift(double lambda, double mu, double break_even_rate,
                           SeriesTolerance tol = {});

/// Limiting per-step drift of the same margin in the many-server regime.
/// Shares the sign of (mu - break_even_rate) and vanishes exactly at
/// mu == break_even_rate (the defining series telescopes there).
double score_drift_limit(double lambda, double mu, double break_even_rate,
                         SeriesTolerance tol = {});

/// Erlang-B blocking probability for `servers` servers at the given offered
/// load, via the standard numerically stable recursion.
double erlang_b(double offered_load, int servers);

}  // namespace admission
