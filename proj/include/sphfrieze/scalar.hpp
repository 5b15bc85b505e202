#pragma once

#include <algorithm>
#include <cmath>

#include "sphfrieze/rational.hpp"

namespace sphf {

// Comparison tolerances for the float64 scalar model. The exact model
// ignores both epsilons (they are treated as zero).
struct TolerancePolicy {
    double relative_epsilon = 1e-9;
    double absolute_epsilon = 1e-12;
};

inline bool near_equal(const Rat& a, const Rat& b, const TolerancePolicy& = {}) {
    return a == b;
}

inline bool near_equal(double a, double b, const TolerancePolicy& policy = {}) {
    const double diff = std::fabs(a - b);
    const double scale = std::max(std::fabs(a), std::fabs(b));
    return diff <= std::max(policy.absolute_epsilon, policy.relative_epsilon * scale);
}

// Mixing the exact and float scalar models in one comparison is a usage
// error; with distinct overloads above it cannot even compile, which is the
// strictest enforcement available.

template <class S>
inline bool scalar_is_zero(const S& v) {
    return v == S(0);
}

inline bool scalar_is_zero(double v) { return v == 0.0; }

}  // namespace sphf
