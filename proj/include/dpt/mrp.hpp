#pragma once

#include "dpt/model.hpp"
#include "dpt/policy.hpp"

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace dpt {

struct SteadyStateReport {
    Eigen::VectorXd pi;
    double avg_power = 0.0;  ///< watts
    double avg_delay = 0.0;  ///< slots
    double mean_queue = 0.0; ///< packets
    std::vector<std::vector<int>> recurrent_classes;
    bool is_unichain = true;
    int initial_class = 0;
    double residual = 0.0; ///< max |pi^T P - pi|
};

/// Row-stochastic matrix over flattened states (see SystemConfig::index).
Eigen::MatrixXd transition_matrix(const Policy& policy, const SystemConfig& cfg);

/// Solves the balance equations on the closed class that applies. With several closed classes
/// the class reachable from `initial` is used; MultichainAmbiguity if that is not unique.
/// With alpha = 0 the delay is reported as 0 when the mean queue is 0 and +inf otherwise.
SteadyStateReport steady_state(const Policy& policy, const SystemConfig& cfg,
                               std::optional<State> initial = std::nullopt);

/// x[state*(S+1)+s] = pi(state) f(state, s).
std::vector<double> occupation_measure(const Policy& policy, const SteadyStateReport& report);

/// Expected visits to (state, s) per excursion from `anchor`, divided by the mean excursion length.
/// Throws ContractViolation when the anchor is transient.
std::vector<double> renewal_frequencies(const Policy& policy, const SystemConfig& cfg, const State& anchor);

} // namespace dpt
