#pragma once

#include <Eigen/Dense>
#include <vector>

namespace dpt::markov {

/// Strongly connected components of the graph {i -> j : P(i,j) > 0}, in reverse topological order.
std::vector<std::vector<int>> strongly_connected_components(const Eigen::MatrixXd& P);

/// SCCs with no edge leaving them, each sorted ascending; classes ordered by smallest member.
std::vector<std::vector<int>> closed_classes(const Eigen::MatrixXd& P);

/// Indicator of the states reachable from `start` (including `start`).
std::vector<char> reachable_from(const Eigen::MatrixXd& P, int start);

/// Stationary distribution of the chain restricted to the closed class `cls`,
/// returned as a full-length vector that is exactly zero off the class.
Eigen::VectorXd stationary_on(const Eigen::MatrixXd& P, const std::vector<int>& cls);

/// max_j |(pi^T P)_j - pi_j|
double balance_residual(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi);

} // namespace dpt::markov
