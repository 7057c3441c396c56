#pragma once

#include "dpt/model.hpp"
#include "dpt/policy.hpp"

#include <utility>
#include <vector>

namespace dpt {

struct ValueFunction {
    PolicyDims dims;
    std::vector<double> nu; ///< flattened like SystemConfig::index
    double mu = 0.0;        ///< slots per watt
    double gain = 0.0;      ///< optimal D + mu P estimate (value increment per sweep)
    int sweeps = 0;

    double operator()(int q, int a, int iota) const { return nu[dims.index(q, a, iota)]; }
};

struct ValueIterationOptions {
    int max_sweeps = 100000;
    int stable_sweeps = 2;      ///< consecutive sweeps with an unchanged greedy policy
    double span_tol = 1e-12;    ///< relative span of the value increment
};

/// Relative value iteration on D + mu P, referenced to state (0,0,0), started from nu = 0.
/// Argmin ties go to the smaller rate. Throws NumericalError after max_sweeps.
std::pair<DeterministicPolicy, ValueFunction> value_iterate(const SystemConfig& cfg, double mu,
                                                            const ValueIterationOptions& opt = {});

/// Largest violation of nu(q-1)+nu(q+1) >= 2 nu(q) over all (a, iota), as a nonnegative number.
double convexity_violation(const ValueFunction& v);

/// Throws NotThresholdForm when the rate is not nondecreasing in q.
ThresholdPolicy extract_thresholds(const DeterministicPolicy& dp, const SystemConfig& cfg);

struct OrderCheck {
    bool holds = true;
    bool condition_satisfied = true; ///< false means the result is vacuous
};

/// Thresholds nonincreasing in the channel index for every (s, a), provided the power table
/// satisfies the difference condition; L = 1 is vacuously true.
OrderCheck check_threshold_order(const ThresholdPolicy& tp, const SystemConfig& cfg);

} // namespace dpt
