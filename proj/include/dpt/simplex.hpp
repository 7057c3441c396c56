#pragma once

#include <Eigen/Dense>
#include <vector>

namespace dpt {

enum class RowKind { Equal, LessEqual };

/// minimize c^T x  subject to  A x (= or <=) b,  x >= 0.
struct LinearProgram {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::VectorXd c;
    std::vector<RowKind> kinds;
};

enum class SimplexStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct SimplexOptions {
    double pivot_tol = 1e-10;   ///< smallest admissible pivot magnitude
    double cost_tol = 1e-11;    ///< reduced costs above -cost_tol count as nonnegative
    double feas_tol = 1e-9;     ///< phase-one objective treated as zero below this
    int max_iterations = 200000;
    int bland_after = 2000;      ///< consecutive degenerate pivots before switching to Bland's rule
};

struct SimplexResult {
    SimplexStatus status = SimplexStatus::Infeasible;
    Eigen::VectorXd x;      ///< original variables only
    Eigen::VectorXd slack;  ///< one entry per LessEqual row (0 for Equal rows)
    Eigen::VectorXd duals;  ///< y with c - A^T y >= 0 at optimum (rows as given)
    double objective = 0.0;
    int iterations = 0;
    std::vector<int> basis; ///< column indices of the final basis (slacks follow the originals)
};

/// Two-phase dense tableau simplex: Dantzig pricing, lexicographic ratio test, Bland fallback. The final primal
/// and dual values are recomputed from the optimal basis with a fresh LU factorization.
SimplexResult solve_simplex(const LinearProgram& lp, const SimplexOptions& opt = {});

} // namespace dpt
