#pragma once

#include "dpt/model.hpp"
#include "dpt/policy.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dpt {

struct PowerDelay {
    double power = 0.0; ///< watts
    double delay = 0.0; ///< slots
};

/// Returns nothing when the policy cannot be evaluated (e.g. a multichain policy).
using Evaluator = std::function<std::optional<PowerDelay>(const Policy&)>;

/// Exact evaluation through the balance equations; multichain policies yield nothing.
Evaluator analytic_evaluator(const SystemConfig& cfg);

struct CurveVertex {
    double power = 0.0;
    double delay = 0.0;
    ThresholdPolicy policy;       ///< deterministic vertex policy
    ThresholdPolicy predecessor;  ///< co-optimal with the next higher-power vertex; one rate change away before completion
    std::vector<ThresholdPolicy> co_optimal; ///< candidate set retained when the vertex was accepted
};

enum class Provenance { Analytic, Sampled };

struct TradeoffCurve {
    std::vector<CurveVertex> vertices; ///< corners of the curve, increasing power
    std::vector<CurveVertex> walk;     ///< every point the walk accepted, collinear ones included
    Provenance provenance = Provenance::Analytic;
    std::size_t evaluations = 0;       ///< distinct policies evaluated
    std::size_t skipped = 0;           ///< neighbors the evaluator rejected
    std::size_t largest_plateau = 0;   ///< most co-optimal policies explored at one vertex
    bool plateau_truncated = false;
    std::vector<std::string> log;
};

struct TraceOptions {
    /// Upper bound on co-optimal policies explored per vertex; 0 means unbounded.
    std::size_t plateau_limit = 0;
    /// Relative tolerance for declaring two (P, D) pairs equal.
    double equal_tol = 1e-12;
};

/// Keeps the rates of the recurrent states and of every state reachable from them after a
/// single one-step rate change; all other rates are raised to min(max feasible rate, rate at q+1),
/// scanning q downward. Every neighbor evaluation is unchanged by this rewrite.
ThresholdPolicy canonical_thresholds(const ThresholdPolicy& tp, const SystemConfig& cfg);

/// Vertex walk from the greedy drain policy toward lower power over adjacent threshold policies.
TradeoffCurve trace_curve(const SystemConfig& cfg, const Evaluator& evaluator, const TraceOptions& opt = {});
TradeoffCurve trace_curve(const SystemConfig& cfg);

/// Throws NumericalError unless power strictly increases, delay strictly decreases and segment
/// slopes dD/dP strictly increase, each slope comparison allowing slope_tol times the largest |slope|.
void check_curve_shape(const std::vector<PowerDelay>& pts, double slope_tol = 1e-10);
void check_curve_shape(const TradeoffCurve& curve, double slope_tol = 1e-10);

struct BudgetPolicy {
    Policy policy;
    ThresholdPolicy thresholds; ///< with a boundary record when randomized
    double power = 0.0;
    double delay = 0.0;
    double eps = 1.0;           ///< weight on the higher-power endpoint
    int segment = -1;           ///< walk index of the lower-power end of the bracket, -1 at a walk point
};

/// Mixture of the two walk policies bracketing p_th, which differ in one state; eps by bisection.
/// Throws InfeasibleBudget below the minimum power.
BudgetPolicy policy_for_budget(const TradeoffCurve& curve, double p_th, const SystemConfig& cfg);

struct FrontierPoint {
    double power = 0.0;
    double delay = 0.0;
    DeterministicPolicy policy;
};

/// Number of nondecreasing feasible rate maps q -> s for one (a, iota) block.
std::size_t count_rate_maps(const SystemConfig& cfg);

/// Lower convex Pareto envelope of every unichain deterministic threshold policy.
/// Throws GuardError when more than `guard` tensors would be enumerated.
std::vector<FrontierPoint> brute_force_frontier(const SystemConfig& cfg, double guard = 1e6);

/// All unichain deterministic threshold policies' (P, D) points.
std::vector<PowerDelay> all_deterministic_points(const SystemConfig& cfg, double guard = 1e6);

/// Lower-left convex envelope of a point set, increasing power, collinear interior points removed.
std::vector<std::size_t> lower_envelope(const std::vector<PowerDelay>& pts);

} // namespace dpt
