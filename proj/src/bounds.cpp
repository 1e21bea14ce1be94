#include "qbound/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace qbound {

double pm_bound(const PMScenario& s) {
    if (s.preparations < 1 || s.measurements < 1 || s.outcomes < 1) {
        throw DomainError("pm_bound: scenario counts must be >= 1");
    }
    const long long m = std::min<long long>(s.outcomes, s.preparations + 1LL);
    return std::log2(static_cast<double>(m));
}

double bell_bound(const BellScenario& s) {
    if (s.alice_inputs < 1 || s.alice_outputs < 1 || s.bob_outputs < 1) {
        throw DomainError("bell_bound: scenario counts must be >= 1");
    }
    const long long m = std::min<long long>(
        s.bob_outputs,
        static_cast<long long>(s.alice_inputs) * s.alice_outputs + 1LL);
    return std::log2(static_cast<double>(m));
}

double min_entropy(double p_guess) {
    if (!(p_guess > 0.0 && p_guess <= 1.0)) {
        throw DomainError("min_entropy: p_guess must lie in (0, 1]");
    }
    return -std::log2(p_guess);
}

}  // namespace qbound
