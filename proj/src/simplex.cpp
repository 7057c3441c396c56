#include "dpt/simplex.hpp"

#include "dpt/errors.hpp"

#include <cmath>
#include <limits>

namespace dpt {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Tableau {
    RowMatrix T;              // m x (cols + 1); last column is the right-hand side
    Eigen::VectorXd d;        // reduced costs, length cols + 1 (last entry = -objective)
    std::vector<int> basis;   // basic column per row
    int cols = 0;
    RowMatrix original;       // untransformed rows with the right-hand side, for reinversion
    std::vector<int> identity_cols; // columns forming the starting identity basis
    Eigen::VectorXd cost;

    void pivot(int r, int j) {
        T.row(r) /= T(r, j);
        for (int i = 0; i < T.rows(); ++i) {
            if (i == r) continue;
            const double f = T(i, j);
            if (f != 0.0) T.row(i) -= f * T.row(r);
        }
        const double f = d(j);
        if (f != 0.0) d -= f * T.row(r).transpose();
        basis[r] = j;
    }

    void price() {
        d = Eigen::VectorXd::Zero(cols + 1);
        d.head(cols) = cost;
        for (int r = 0; r < T.rows(); ++r) {
            const double cb = cost(basis[r]);
            if (cb != 0.0) d -= cb * T.row(r).transpose();
        }
        for (int j = 0; j < cols; ++j)
            if (std::abs(d(j)) < 1e-14) d(j) = 0.0;
    }

    // Rebuilds the tableau from the original rows to stop round-off from accumulating.
    void reinvert() {
        const int m = static_cast<int>(T.rows());
        Eigen::MatrixXd B(m, m);
        for (int c = 0; c < m; ++c) B.col(c) = original.col(basis[c]);
        T = B.partialPivLu().solve(Eigen::MatrixXd(original));
        for (int r = 0; r < m; ++r) {
            for (int j = 0; j <= cols; ++j)
                if (std::abs(T(r, j)) < 1e-13) T(r, j) = 0.0;
            for (int c = 0; c < m; ++c) T(r, basis[c]) = r == c ? 1.0 : 0.0;
        }
        price();
    }

    // Lexicographic tie-break on the rows of B^-1 (the initial identity columns) scaled by the pivot.
    bool lex_less(int r1, int r2, int enter) const {
        const double a1 = T(r1, enter), a2 = T(r2, enter);
        for (int c : identity_cols) {
            const double v1 = T(r1, c) / a1, v2 = T(r2, c) / a2;
            const double tol = 1e-11 * (1.0 + std::max(std::abs(v1), std::abs(v2)));
            if (v1 < v2 - tol) return true;
            if (v1 > v2 + tol) return false;
        }
        return a1 > a2;
    }

    // Dantzig pricing with a lexicographic ratio test. After `bland_after` consecutive degenerate
    // pivots, Bland's rule (smallest eligible index entering, smallest basic index leaving among
    // ratio ties) until progress resumes.
    SimplexStatus run(const std::vector<char>& allowed, const SimplexOptions& opt, int& iterations) {
        const int rhs = cols;
        int since = 0, degenerate = 0;
        while (true) {
            const bool bland = degenerate >= opt.bland_after;
            int enter = -1;
            for (int j = 0; j < cols; ++j) {
                if (!allowed[j] || d(j) >= -opt.cost_tol) continue;
                if (enter < 0 || (!bland && d(j) < d(enter))) enter = j;
                if (bland) break;
            }
            if (enter < 0) {
                if (since == 0) return SimplexStatus::Optimal;
                reinvert();
                since = 0;
                continue;
            }
            if (++iterations > opt.max_iterations) return SimplexStatus::IterationLimit;

            double colmax = 0.0;
            for (int r = 0; r < T.rows(); ++r) colmax = std::max(colmax, T(r, enter));
            const double tol = std::max(opt.pivot_tol, 1e-9 * colmax);
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < T.rows(); ++r) {
                const double a = T(r, enter);
                if (a <= tol) continue;
                const double ratio = std::max(T(r, rhs), 0.0) / a;
                const double slack = 1e-12 * (1.0 + std::abs(best));
                if (leave < 0 || ratio < best - slack) {
                    best = ratio;
                    leave = r;
                } else if (std::abs(ratio - best) <= slack) {
                    if (bland ? basis[r] < basis[leave] : lex_less(r, leave, enter)) leave = r;
                }
            }
            if (leave < 0) return SimplexStatus::Unbounded;
            degenerate = best <= 1e-12 ? degenerate + 1 : 0;
            pivot(leave, enter);
            if (++since >= 32) {
                reinvert();
                since = 0;
            }
        }
    }
};

} // namespace

SimplexResult solve_simplex(const LinearProgram& lp, const SimplexOptions& opt) {
    const int m = static_cast<int>(lp.A.rows());
    const int n = static_cast<int>(lp.A.cols());
    if (lp.b.size() != m || lp.c.size() != n || static_cast<int>(lp.kinds.size()) != m)
        throw ValidationError("simplex: inconsistent problem dimensions");

    std::vector<int> slack_of(m, -1);
    int k = 0;
    for (int r = 0; r < m; ++r)
        if (lp.kinds[r] == RowKind::LessEqual) slack_of[r] = n + k++;

    // Columns: originals, slacks, artificials.
    const int structural = n + k;
    std::vector<int> art_of(m, -1);
    std::vector<double> sign(m, 1.0);
    int na = 0;
    for (int r = 0; r < m; ++r) {
        if (lp.b(r) < 0.0) sign[r] = -1.0;
        if (!(slack_of[r] >= 0 && sign[r] > 0.0)) art_of[r] = structural + na++;
    }

    Tableau tab;
    tab.cols = structural + na;
    tab.T = RowMatrix::Zero(m, tab.cols + 1);
    tab.basis.assign(m, -1);
    RowMatrix M = RowMatrix::Zero(m, structural);
    Eigen::VectorXd rhs(m);
    for (int r = 0; r < m; ++r) {
        M.row(r).head(n) = sign[r] * lp.A.row(r);
        if (slack_of[r] >= 0) M(r, slack_of[r]) = sign[r];
        rhs(r) = sign[r] * lp.b(r);
        tab.T.row(r).head(structural) = M.row(r);
        tab.T(r, tab.cols) = rhs(r);
        if (art_of[r] >= 0) {
            tab.T(r, art_of[r]) = 1.0;
            tab.basis[r] = art_of[r];
        } else {
            tab.basis[r] = slack_of[r];
        }
    }

    tab.original = tab.T;
    tab.identity_cols = tab.basis;
    SimplexResult res;
    std::vector<char> allowed(tab.cols, 1);

    // Phase one.
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(tab.cols);
    for (int j = structural; j < tab.cols; ++j) phase1(j) = 1.0;
    tab.cost = phase1;
    tab.price();
    SimplexStatus st = tab.run(allowed, opt, res.iterations);
    if (st == SimplexStatus::IterationLimit) {
        res.status = st;
        return res;
    }
    if (-tab.d(tab.cols) > opt.feas_tol) {
        res.status = SimplexStatus::Infeasible;
        return res;
    }

    // Drive artificials out of the basis; rows where that is impossible are redundant.
    std::vector<char> keep(m, 1);
    for (int r = 0; r < m; ++r) {
        if (tab.basis[r] < structural) continue;
        int j_best = -1;
        for (int j = 0; j < structural; ++j)
            if (std::abs(tab.T(r, j)) > opt.pivot_tol && (j_best < 0 || std::abs(tab.T(r, j)) > std::abs(tab.T(r, j_best))))
                j_best = j;
        if (j_best >= 0) tab.pivot(r, j_best);
        else keep[r] = 0;
    }
    for (int j = structural; j < tab.cols; ++j) allowed[j] = 0;

    // Phase two on the surviving rows.
    {
        int kept = 0;
        for (int r = 0; r < m; ++r) kept += keep[r];
        if (kept < m) {
            RowMatrix T2(kept, tab.cols + 1);
            std::vector<int> b2;
            int i = 0;
            for (int r = 0; r < m; ++r)
                if (keep[r]) {
                    T2.row(i++) = tab.T.row(r);
                    b2.push_back(tab.basis[r]);
                }
            RowMatrix O2(kept, tab.cols + 1);
            i = 0;
            for (int r = 0; r < m; ++r)
                if (keep[r]) O2.row(i++) = tab.original.row(r);
            tab.T = T2;
            tab.basis = b2;
            tab.original = O2;
        }
    }
    Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(tab.cols);
    phase2.head(n) = lp.c;
    tab.cost = phase2;
    tab.reinvert();
    st = tab.run(allowed, opt, res.iterations);
    if (st != SimplexStatus::Optimal) {
        res.status = st;
        return res;
    }

    // Recompute the basic solution and duals from the original data.
    std::vector<int> rows;
    for (int r = 0; r < m; ++r)
        if (keep[r]) rows.push_back(r);
    const int mb = static_cast<int>(rows.size());
    Eigen::MatrixXd B(mb, mb);
    Eigen::VectorXd bb(mb), cb(mb);
    for (int i = 0; i < mb; ++i) {
        bb(i) = rhs(rows[i]);
        for (int c = 0; c < mb; ++c) B(i, c) = M(rows[i], tab.basis[c]);
        cb(i) = tab.basis[i] < n ? lp.c(tab.basis[i]) : 0.0;
    }
    auto lu = B.partialPivLu();
    Eigen::VectorXd xb = lu.solve(bb);
    Eigen::VectorXd y = lu.transpose().solve(cb);

    Eigen::VectorXd full = Eigen::VectorXd::Zero(structural);
    for (int i = 0; i < mb; ++i) full(tab.basis[i]) = std::max(xb(i), 0.0);
    res.x = full.head(n);
    res.slack = Eigen::VectorXd::Zero(m);
    for (int r = 0; r < m; ++r)
        if (slack_of[r] >= 0) res.slack(r) = full(slack_of[r]);
    res.duals = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < mb; ++i) res.duals(rows[i]) = sign[rows[i]] * y(i);
    res.objective = lp.c.dot(res.x);
    res.basis = tab.basis;
    res.status = SimplexStatus::Optimal;
    return res;
}

} // namespace dpt
