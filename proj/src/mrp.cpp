#include "dpt/mrp.hpp"

#include "dpt/errors.hpp"
#include "dpt/markov.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace dpt {

Eigen::MatrixXd transition_matrix(const Policy& policy, const SystemConfig& cfg) {
    if (!(policy.dims() == PolicyDims::of(cfg))) throw ValidationError("transition_matrix: policy does not match config");
    const int n = cfg.num_states();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (int x = 0; x < n; ++x) {
        const State st = cfg.state(x);
        for (int s = 0; s <= cfg.S(); ++s) {
            const double f = policy(x, s);
            if (f == 0.0) continue;
            for (int an = 0; an <= cfg.A(); ++an) {
                const double g = cfg.arrival().gamma(st.a, an);
                if (g == 0.0) continue;
                const int qn = queue_step(st.q, s, an, cfg);
                for (int in = 0; in < cfg.L(); ++in) P(x, cfg.index(qn, an, in)) += f * g * cfg.channel().eta(in);
            }
        }
    }
    return P;
}

SteadyStateReport steady_state(const Policy& policy, const SystemConfig& cfg, std::optional<State> initial) {
    const Eigen::MatrixXd P = transition_matrix(policy, cfg);
    SteadyStateReport r;
    r.recurrent_classes = markov::closed_classes(P);
    r.is_unichain = r.recurrent_classes.size() == 1;

    int chosen = 0;
    if (!r.is_unichain) {
        if (!initial) throw MultichainAmbiguity("steady_state: multichain policy and no initial state", r.recurrent_classes);
        const auto reach = markov::reachable_from(P, cfg.index(*initial));
        std::vector<int> hit;
        for (size_t k = 0; k < r.recurrent_classes.size(); ++k)
            if (reach[r.recurrent_classes[k].front()]) hit.push_back(static_cast<int>(k));
        if (hit.size() != 1)
            throw MultichainAmbiguity("steady_state: initial state reaches several closed classes", r.recurrent_classes);
        chosen = hit.front();
    }
    r.initial_class = chosen;

    r.pi = markov::stationary_on(P, r.recurrent_classes[chosen]);
    for (int x = 0; x < r.pi.size(); ++x)
        if (r.pi(x) < 0.0) r.pi(x) = 0.0;
    r.residual = markov::balance_residual(P, r.pi);
    if (!(r.residual <= 1e-8)) {
        std::ostringstream os;
        os << "steady_state: balance residual " << r.residual << " too large";
        throw NumericalError(os.str());
    }

    for (int x = 0; x < cfg.num_states(); ++x) {
        const double p = r.pi(x);
        if (p == 0.0) continue;
        const State st = cfg.state(x);
        r.mean_queue += st.q * p;
        for (int s = 0; s <= cfg.S(); ++s) r.avg_power += p * policy(x, s) * cfg.power()(st.iota, s);
    }
    const double alpha = cfg.arrival().alpha();
    if (alpha > 0.0) r.avg_delay = r.mean_queue / alpha;
    else r.avg_delay = r.mean_queue == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return r;
}

std::vector<double> occupation_measure(const Policy& policy, const SteadyStateReport& report) {
    const int S = policy.dims().S;
    std::vector<double> x(static_cast<size_t>(policy.dims().num_states()) * (S + 1), 0.0);
    for (int st = 0; st < policy.dims().num_states(); ++st)
        for (int s = 0; s <= S; ++s) x[static_cast<size_t>(st) * (S + 1) + s] = report.pi(st) * policy(st, s);
    return x;
}

std::vector<double> renewal_frequencies(const Policy& policy, const SystemConfig& cfg, const State& anchor) {
    const Eigen::MatrixXd P = transition_matrix(policy, cfg);
    const int z = cfg.index(anchor);
    const auto reach = markov::reachable_from(P, z);
    std::vector<int> others;
    for (int y = 0; y < cfg.num_states(); ++y) {
        if (!reach[y] || y == z) continue;
        if (!markov::reachable_from(P, y)[z]) throw ContractViolation("renewal_frequencies: anchor state is transient");
        others.push_back(y);
    }

    // v(y) = P(z,y) + sum_{x != z} v(x) P(x,y): expected visits to y before the return to z.
    const int m = static_cast<int>(others.size());
    Eigen::VectorXd visits = Eigen::VectorXd::Zero(cfg.num_states());
    visits(z) = 1.0;
    if (m > 0) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Identity(m, m);
        Eigen::VectorXd rhs(m);
        for (int r = 0; r < m; ++r) {
            rhs(r) = P(z, others[r]);
            for (int c = 0; c < m; ++c) M(r, c) -= P(others[c], others[r]);
        }
        Eigen::VectorXd v = M.partialPivLu().solve(rhs);
        for (int r = 0; r < m; ++r) visits(others[r]) = v(r);
    }
    const double cycle = visits.sum();

    const int S = cfg.S();
    std::vector<double> x(static_cast<size_t>(cfg.num_states()) * (S + 1), 0.0);
    for (int y = 0; y < cfg.num_states(); ++y)
        for (int s = 0; s <= S; ++s) x[static_cast<size_t>(y) * (S + 1) + s] = visits(y) * policy(y, s) / cycle;
    return x;
}

} // namespace dpt
