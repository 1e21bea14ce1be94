// Closed-form randomness upper bounds for black-box scenarios and the
// min-entropy conversion.

#pragma once

#include "qbound/common.hpp"

namespace qbound {

struct PMScenario {
    int preparations = 1;  // k
    int measurements = 1;  // m (the bound is independent of it)
    int outcomes = 1;      // l
};

struct BellScenario {
    int alice_inputs = 1;   // |x|
    int alice_outputs = 1;  // |a|
    int bob_outputs = 1;    // |b|
};

// log2(min{l, k+1}) bits per round; the integer min is taken first so the
// result is exact at representable points.  (The cruder 2 log2(k) count from
// extremal POVMs on C^k having at most k^2 outcomes is dominated by the
// k + 1 term and is not exposed.)
double pm_bound(const PMScenario& s);

// log2(min{|b|, |x|*|a| + 1}) bits per round for Bob's measurement.
double bell_bound(const BellScenario& s);

// H_min = -log2(p_guess); requires 0 < p_guess <= 1.
double min_entropy(double p_guess);

}  // namespace qbound
