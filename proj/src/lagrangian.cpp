#include "dpt/lagrangian.hpp"

#include "dpt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dpt {

std::pair<DeterministicPolicy, ValueFunction> value_iterate(const SystemConfig& cfg, double mu,
                                                            const ValueIterationOptions& opt) {
    cfg.require_solvable("value_iterate");
    if (!(mu >= 0.0) || std::isinf(mu)) throw DomainError("value_iterate: mu must be finite and nonnegative");

    const int Q = cfg.Q(), A = cfg.A(), L = cfg.L(), S = cfg.S();
    const int B = Q - A; // largest backlog left after a feasible transmission
    const int n = cfg.num_states();
    const double inv_alpha = 1.0 / cfg.arrival().alpha();
    const int ref = cfg.index(0, 0, 0);

    double cost_scale = Q * inv_alpha;
    for (int i = 0; i < L; ++i) cost_scale = std::max(cost_scale, mu * cfg.power()(i, S));
    const double tie = 1e-12 * std::max(1.0, cost_scale);

    ValueFunction v;
    v.dims = PolicyDims::of(cfg);
    v.mu = mu;
    v.nu.assign(n, 0.0);
    std::vector<double> next(n, 0.0), expect((B + 1) * (A + 1), 0.0);
    DeterministicPolicy pol{v.dims, std::vector<int>(n, -1)};
    std::vector<int> prev(n, -1);
    int stable = 0;

    for (int m = 1; m <= opt.max_sweeps; ++m) {
        // expect[b][a] = E nu(b + a', a', iota') given the current arrival count a.
        for (int b = 0; b <= B; ++b)
            for (int a = 0; a <= A; ++a) {
                double e = 0.0;
                for (int an = 0; an <= A; ++an) {
                    const double g = cfg.arrival().gamma(a, an);
                    if (g == 0.0) continue;
                    double inner = 0.0;
                    for (int in = 0; in < L; ++in) inner += cfg.channel().eta(in) * v.nu[cfg.index(b + an, an, in)];
                    e += g * inner;
                }
                expect[b * (A + 1) + a] = e;
            }

        for (int x = 0; x < n; ++x) {
            const State st = cfg.state(x);
            double best = 0.0;
            int arg = -1;
            for (int s = cfg.min_rate(st.q); s <= cfg.max_rate(st.q); ++s) {
                const double w = st.q * inv_alpha + mu * cfg.power()(st.iota, s) + expect[(st.q - s) * (A + 1) + st.a];
                if (arg < 0 || w < best - tie) {
                    best = w;
                    arg = s;
                }
            }
            next[x] = best;
            pol.rate[x] = arg;
        }

        const double shift = next[ref];
        double lo = 0.0, hi = 0.0;
        for (int x = 0; x < n; ++x) {
            const double d = next[x] - v.nu[x];
            if (x == 0 || d < lo) lo = d;
            if (x == 0 || d > hi) hi = d;
        }
        for (int x = 0; x < n; ++x) v.nu[x] = next[x] - shift;
        v.gain = 0.5 * (lo + hi);
        v.sweeps = m;

        stable = pol.rate == prev ? stable + 1 : 0;
        prev = pol.rate;
        if (stable >= opt.stable_sweeps - 1 && hi - lo <= opt.span_tol * std::max(1.0, cost_scale))
            return {pol, v};
    }
    std::ostringstream os;
    os << "value_iterate: no convergence after " << opt.max_sweeps << " sweeps at mu=" << mu;
    throw NumericalError(os.str());
}

double convexity_violation(const ValueFunction& v) {
    double worst = 0.0;
    const PolicyDims& d = v.dims;
    for (int i = 0; i < d.L; ++i)
        for (int a = 0; a <= d.A; ++a)
            for (int q = 1; q < d.Q; ++q) {
                const double gap = v(q - 1, a, i) + v(q + 1, a, i) - 2.0 * v(q, a, i);
                worst = std::max(worst, -gap);
            }
    return worst;
}

ThresholdPolicy extract_thresholds(const DeterministicPolicy& dp, const SystemConfig& cfg) {
    if (!(dp.dims == PolicyDims::of(cfg))) throw ValidationError("extract_thresholds: dimensions do not match");
    auto tp = thresholds_from_rates(dp);
    if (!tp) throw NotThresholdForm("extract_thresholds: rate decreases in q for some (a, iota)");
    return *tp;
}

OrderCheck check_threshold_order(const ThresholdPolicy& tp, const SystemConfig& cfg) {
    OrderCheck out;
    if (cfg.L() < 2) return out;
    if (!cfg.power().satisfies_order_condition()) {
        out.condition_satisfied = false;
        return out;
    }
    const PolicyDims& d = tp.dims;
    for (int s = 0; s <= d.S; ++s)
        for (int a = 0; a <= d.A; ++a)
            for (int lo = 0; lo < d.L; ++lo)
                for (int hi = lo + 1; hi < d.L; ++hi)
                    if (tp.at(s, a, hi) > tp.at(s, a, lo)) out.holds = false;
    return out;
}

} // namespace dpt
