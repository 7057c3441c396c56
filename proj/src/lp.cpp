#include "dpt/lp.hpp"

#include "dpt/errors.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace dpt {

namespace {

constexpr double kZeroPi = 1e-12;

std::vector<int> randomized(const std::vector<double>& x, const PolicyDims& d) {
    std::vector<int> out;
    for (int st = 0; st < d.num_states(); ++st) {
        int support = 0;
        for (int s = 0; s <= d.S; ++s)
            if (x[static_cast<size_t>(st) * (d.S + 1) + s] > kZeroPi) ++support;
        if (support > 1) out.push_back(st);
    }
    return out;
}

Eigen::MatrixXd balance_rows(const SystemConfig& cfg, const std::vector<int>& var_state, const std::vector<int>& var_rate) {
    const int n = static_cast<int>(var_state.size());
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(cfg.num_states(), n);
    for (int j = 0; j < n; ++j) {
        const State x = cfg.state(var_state[j]);
        const int s = var_rate[j];
        B(var_state[j], j) -= 1.0;
        for (int an = 0; an <= cfg.A(); ++an) {
            const double g = cfg.arrival().gamma(x.a, an);
            if (g == 0.0) continue;
            const int qn = queue_step(x.q, s, an, cfg);
            for (int in = 0; in < cfg.L(); ++in) B(cfg.index(qn, an, in), j) += g * cfg.channel().eta(in);
        }
    }
    return B;
}

} // namespace

OccupationLP build_lp(const SystemConfig& cfg, double p_th) {
    if (cfg.arrival().reducible()) throw ValidationError("build_lp: arrival chain is reducible (flagged)");
    if (std::isnan(p_th)) throw DomainError("build_lp: power budget is NaN");

    OccupationLP lp;
    lp.dims = PolicyDims::of(cfg);
    lp.p_th = p_th;
    lp.power_scale = cfg.power().max_entry() > 0.0 ? cfg.power().max_entry() : 1.0;
    lp.alpha_zero = !(cfg.arrival().alpha() > 0.0);
    lp.delay_weight = lp.alpha_zero ? 1.0 : 1.0 / cfg.arrival().alpha();

    for (int x = 0; x < cfg.num_states(); ++x) {
        const int q = cfg.state(x).q;
        for (int s = cfg.min_rate(q); s <= cfg.max_rate(q); ++s) {
            lp.var_state.push_back(x);
            lp.var_rate.push_back(s);
            lp.raw_power.push_back(cfg.power()(cfg.state(x).iota, s));
            lp.raw_cost.push_back(q * lp.delay_weight);
        }
    }
    const int n = static_cast<int>(lp.var_state.size());
    lp.balance_all = balance_rows(cfg, lp.var_state, lp.var_rate);
    lp.dropped_state = cfg.index(0, 0, 0);

    for (int y = 0; y < cfg.num_states(); ++y)
        if (y != lp.dropped_state) lp.balance_state.push_back(y);
    const int nb = static_cast<int>(lp.balance_state.size());
    const int m = nb + 2;
    lp.norm_row = nb;
    lp.power_row = nb + 1;

    LinearProgram& P = lp.program;
    P.A = Eigen::MatrixXd::Zero(m, n);
    P.b = Eigen::VectorXd::Zero(m);
    P.c = Eigen::VectorXd::Zero(n);
    P.kinds.assign(m, RowKind::Equal);
    for (int r = 0; r < nb; ++r) P.A.row(r) = lp.balance_all.row(lp.balance_state[r]);
    P.A.row(lp.norm_row).setOnes();
    P.b(lp.norm_row) = 1.0;
    for (int j = 0; j < n; ++j) {
        P.A(lp.power_row, j) = lp.raw_power[j] / lp.power_scale;
        P.c(j) = lp.raw_cost[j];
    }
    // Every policy spends at most the largest table entry, so larger budgets are equivalent.
    P.b(lp.power_row) = std::min(p_th / lp.power_scale, 2.0);
    P.kinds[lp.power_row] = RowKind::LessEqual;
    return lp;
}

namespace {

LPSolution finish(const OccupationLP& lp, const SimplexResult& r) {
    LPSolution sol;
    sol.dims = lp.dims;
    if (r.status == SimplexStatus::Infeasible) {
        sol.status = LPStatus::Infeasible;
        return sol;
    }
    if (r.status != SimplexStatus::Optimal) throw NumericalError("solve_lp: simplex did not reach an optimal basis");
    sol.status = LPStatus::Optimal;
    const int S = lp.dims.S;
    sol.x.assign(static_cast<size_t>(lp.dims.num_states()) * (S + 1), 0.0);
    double cost = 0.0;
    for (size_t j = 0; j < lp.var_state.size(); ++j) {
        const double v = r.x(static_cast<int>(j));
        sol.x[static_cast<size_t>(lp.var_state[j]) * (S + 1) + lp.var_rate[j]] = v;
        cost += lp.raw_cost[j] * v;
        sol.power += lp.raw_power[j] * v;
    }
    if (lp.alpha_zero) sol.objective = cost <= kZeroPi ? 0.0 : std::numeric_limits<double>::infinity();
    else sol.objective = cost;
    sol.binding_power = r.slack(lp.power_row) <= 1e-9;
    sol.power_multiplier = std::max(0.0, -r.duals(lp.power_row)) / lp.power_scale;

    Eigen::VectorXd xv = r.x;
    sol.balance_residual = (lp.balance_all * xv).cwiseAbs().maxCoeff();
    sol.randomized_states = static_cast<int>(randomized(sol.x, lp.dims).size());
    return sol;
}

} // namespace

LPSolution solve_lp(const OccupationLP& lp) {
    SimplexResult r = solve_simplex(lp.program);
    LPSolution sol = finish(lp, r);
    if (sol.status == LPStatus::Optimal && sol.randomized_states > 1) {
        // Lexicographic drift of the power row toward higher rates, then re-solve.
        OccupationLP perturbed = lp;
        for (size_t j = 0; j < lp.var_state.size(); ++j)
            perturbed.program.A(lp.power_row, static_cast<int>(j)) *= 1.0 + 1e-9 * lp.var_rate[j];
        SimplexResult r2 = solve_simplex(perturbed.program);
        LPSolution alt = finish(lp, r2);
        if (alt.status == LPStatus::Optimal && alt.randomized_states < sol.randomized_states) {
            alt.canonicalized = true;
            return alt;
        }
    }
    return sol;
}

Policy recover_policy(const LPSolution& sol, const SystemConfig& cfg) {
    if (sol.status != LPStatus::Optimal) throw ContractViolation("recover_policy: solution is not optimal");
    const PolicyDims d = PolicyDims::of(cfg);
    Policy f(d);
    for (int st = 0; st < d.num_states(); ++st) {
        double pi = 0.0;
        for (int s = 0; s <= d.S; ++s) pi += sol.x[static_cast<size_t>(st) * (d.S + 1) + s];
        if (pi > kZeroPi) {
            for (int s = 0; s <= d.S; ++s) f.at(st, s) = sol.x[static_cast<size_t>(st) * (d.S + 1) + s] / pi;
        } else {
            f.at(st, std::min(cfg.state(st).q, d.S)) = 1.0;
        }
    }
    return f;
}

double occupation_residual(const std::vector<double>& x, const SystemConfig& cfg) {
    std::vector<int> vs, vr;
    Eigen::VectorXd xv;
    std::vector<double> vals;
    double total = 0.0, off = 0.0;
    const int S = cfg.S();
    for (int st = 0; st < cfg.num_states(); ++st) {
        const int q = cfg.state(st).q;
        for (int s = 0; s <= S; ++s) {
            const double v = x[static_cast<size_t>(st) * (S + 1) + s];
            total += v;
            if (s < cfg.min_rate(q) || s > cfg.max_rate(q)) {
                off = std::max(off, std::abs(v));
                continue;
            }
            vs.push_back(st);
            vr.push_back(s);
            vals.push_back(v);
        }
    }
    xv = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<int>(vals.size()));
    const double bal = (balance_rows(cfg, vs, vr) * xv).cwiseAbs().maxCoeff();
    return std::max({bal, std::abs(total - 1.0), off});
}

std::string to_lp_format(const OccupationLP& lp, const SystemConfig& cfg) {
    std::ostringstream os;
    os << std::setprecision(17);
    auto name = [&](int j) {
        const State x = cfg.state(lp.var_state[j]);
        std::ostringstream v;
        v << "x_" << x.q << "_" << x.a << "_" << x.iota << "_" << lp.var_rate[j];
        return v.str();
    };
    auto row = [&](const Eigen::RowVectorXd& coef, double scale) {
        bool first = true;
        for (int j = 0; j < coef.size(); ++j) {
            const double c = coef(j) * scale;
            if (c == 0.0) continue;
            os << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + ")) << std::abs(c) << " " << name(j);
            first = false;
        }
        if (first) os << "0 " << name(0);
    };
    const int n = static_cast<int>(lp.var_state.size());
    os << "\\ average-delay minimization over state-action frequencies\n";
    os << "Minimize\n obj: ";
    row(Eigen::Map<const Eigen::RowVectorXd>(lp.raw_cost.data(), n), 1.0);
    os << "\nSubject To\n";
    for (size_t r = 0; r < lp.balance_state.size(); ++r) {
        const State y = cfg.state(lp.balance_state[r]);
        os << " bal_" << y.q << "_" << y.a << "_" << y.iota << ": ";
        row(lp.program.A.row(static_cast<int>(r)), 1.0);
        os << " = 0\n";
    }
    os << " norm: ";
    row(lp.program.A.row(lp.norm_row), 1.0);
    os << " = 1\n power: ";
    row(Eigen::Map<const Eigen::RowVectorXd>(lp.raw_power.data(), n), 1.0);
    os << " <= " << lp.p_th << "\nBounds\n";
    for (int j = 0; j < n; ++j) os << " " << name(j) << " >= 0\n";
    os << "End\n";
    return os.str();
}

} // namespace dpt
