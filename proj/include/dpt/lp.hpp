#pragma once

#include "dpt/model.hpp"
#include "dpt/policy.hpp"
#include "dpt/simplex.hpp"

#include <string>
#include <vector>

namespace dpt {

/// Occupation-measure LP over x[state][s]. Only feasible (state, s) pairs become columns.
struct OccupationLP {
    PolicyDims dims;
    double p_th = 0.0;          ///< watts
    double power_scale = 1.0;   ///< watts per unit of the scaled power row
    double delay_weight = 1.0;  ///< 1/alpha (1 when alpha = 0)
    std::vector<int> var_state; ///< column -> flattened state
    std::vector<int> var_rate;  ///< column -> rate
    std::vector<int> balance_state; ///< balance row -> flattened state
    int dropped_state = 0;      ///< state whose balance row was dropped
    int power_row = 0;
    int norm_row = 0;
    LinearProgram program;      ///< power row stored in units of power_scale
    Eigen::MatrixXd balance_all;   ///< every balance row, including the dropped one
    std::vector<double> raw_power; ///< watts, per column
    std::vector<double> raw_cost;  ///< q/alpha, per column
    bool alpha_zero = false;
};

enum class LPStatus { Optimal, Infeasible };

struct LPSolution {
    LPStatus status = LPStatus::Infeasible;
    std::vector<double> x;       ///< tensor layout state*(S+1)+s
    PolicyDims dims;
    double objective = 0.0;      ///< average delay, slots
    double power = 0.0;          ///< sum P x, watts
    bool binding_power = false;
    double power_multiplier = 0.0; ///< slots per watt (>= 0)
    double balance_residual = 0.0; ///< max over all balance rows, including the dropped one
    int randomized_states = 0;
    bool canonicalized = false;    ///< re-solved with a perturbed power row
};

OccupationLP build_lp(const SystemConfig& cfg, double p_th);
LPSolution solve_lp(const OccupationLP& lp);

/// f = x / pi where pi > 1e-12, otherwise the greedy rate min(q, S).
Policy recover_policy(const LPSolution& sol, const SystemConfig& cfg);

/// Maximum violation of the balance and normalization equations for a tensor x.
double occupation_residual(const std::vector<double>& x, const SystemConfig& cfg);

/// CPLEX-style LP text (unscaled watts).
std::string to_lp_format(const OccupationLP& lp, const SystemConfig& cfg);

} // namespace dpt
