#include "dpt/policy.hpp"

#include "dpt/errors.hpp"

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <string>

namespace dpt {

Policy::Policy(PolicyDims dims) : dims_(dims), f_(static_cast<size_t>(dims.num_states()) * (dims.S + 1), 0.0) {}

void Policy::validate(const SystemConfig& cfg) const {
    if (!(dims_ == PolicyDims::of(cfg))) throw ValidationError("policy: dimensions do not match the configuration");
    for (int x = 0; x < dims_.num_states(); ++x) {
        const int q = cfg.state(x).q;
        double sum = 0.0;
        for (int s = 0; s <= dims_.S; ++s) {
            const double v = (*this)(x, s);
            if (!(v >= 0.0 && v <= 1.0 + 1e-12)) throw ValidationError("policy: probability outside [0,1]");
            if (v != 0.0 && (s < cfg.min_rate(q) || s > cfg.max_rate(q)))
                throw ValidationError("policy: mass on an infeasible rate at state " + std::to_string(x));
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("policy: row " + std::to_string(x) + " does not sum to 1");
    }
}

std::vector<int> Policy::randomized_states(double tol) const {
    std::vector<int> out;
    for (int x = 0; x < dims_.num_states(); ++x) {
        int support = 0;
        for (int s = 0; s <= dims_.S; ++s)
            if ((*this)(x, s) > tol) ++support;
        if (support > 1) out.push_back(x);
    }
    return out;
}

Policy DeterministicPolicy::to_policy() const {
    Policy p(dims);
    for (int x = 0; x < dims.num_states(); ++x) p.at(x, rate[x]) = 1.0;
    return p;
}

std::optional<DeterministicPolicy> as_deterministic(const Policy& p, double tol) {
    DeterministicPolicy dp{p.dims(), std::vector<int>(p.dims().num_states(), 0)};
    for (int x = 0; x < p.dims().num_states(); ++x) {
        int chosen = -1;
        for (int s = 0; s <= p.dims().S; ++s) {
            const double v = p(x, s);
            if (v > 1.0 - tol) chosen = s;
            else if (v > tol) return std::nullopt;
        }
        if (chosen < 0) return std::nullopt;
        dp.rate[x] = chosen;
    }
    return dp;
}

size_t ThresholdHash::operator()(const ThresholdPolicy& tp) const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ULL;
    };
    for (int t : tp.thresholds) mix(static_cast<std::uint64_t>(t + 1));
    if (tp.boundary) {
        mix(static_cast<std::uint64_t>(tp.boundary->s));
        mix(static_cast<std::uint64_t>(tp.boundary->a));
        mix(static_cast<std::uint64_t>(tp.boundary->iota));
    }
    return static_cast<size_t>(h);
}

ThresholdPolicy greedy_threshold_policy(const SystemConfig& cfg) {
    ThresholdPolicy tp{PolicyDims::of(cfg), std::vector<int>((cfg.S() + 1) * (cfg.A() + 1) * cfg.L()), std::nullopt};
    for (int s = 0; s <= cfg.S(); ++s)
        for (int a = 0; a <= cfg.A(); ++a)
            for (int i = 0; i < cfg.L(); ++i) tp.at(s, a, i) = s < cfg.S() ? std::min(s, cfg.Q()) : cfg.Q();
    return tp;
}

namespace {

void check_threshold_shape(const ThresholdPolicy& tp, const SystemConfig& cfg) {
    const PolicyDims& d = tp.dims;
    if (!(d == PolicyDims::of(cfg))) throw ValidationError("threshold policy: dimensions do not match the configuration");
    if (static_cast<int>(tp.thresholds.size()) != (d.S + 1) * (d.A + 1) * d.L)
        throw ValidationError("threshold policy: wrong tensor size");
    for (int a = 0; a <= d.A; ++a)
        for (int i = 0; i < d.L; ++i) {
            if (tp.at(d.S, a, i) != d.Q) throw ValidationError("threshold policy: q_F(S) must equal Q");
            for (int s = 0; s <= d.S; ++s) {
                const int t = tp.at(s, a, i);
                if (t < 0 || t > d.Q) throw ValidationError("threshold policy: threshold outside [0, Q]");
                if (s > 0 && t < tp.at(s - 1, a, i)) throw ValidationError("threshold policy: thresholds not monotone in s");
            }
        }
}

} // namespace

DeterministicPolicy threshold_rates(const ThresholdPolicy& tp, const SystemConfig& cfg) {
    check_threshold_shape(tp, cfg);
    const PolicyDims& d = tp.dims;
    DeterministicPolicy dp{d, std::vector<int>(d.num_states(), 0)};
    for (int i = 0; i < d.L; ++i)
        for (int a = 0; a <= d.A; ++a) {
            int s = 0;
            for (int q = 0; q <= d.Q; ++q) {
                while (q > tp.at(s, a, i)) ++s;
                if (s < cfg.min_rate(q) || s > cfg.max_rate(q))
                    throw ValidationError("threshold policy: implied rate infeasible at q=" + std::to_string(q) +
                                          ", a=" + std::to_string(a) + ", iota=" + std::to_string(i));
                dp.rate[d.index(q, a, i)] = s;
            }
        }
    return dp;
}

Policy expand_threshold(const ThresholdPolicy& tp, const SystemConfig& cfg) {
    Policy p = threshold_rates(tp, cfg).to_policy();
    if (tp.boundary) {
        const BoundaryRecord& b = *tp.boundary;
        const PolicyDims& d = tp.dims;
        if (b.s < 1 || b.s > d.S || b.a < 0 || b.a > d.A || b.iota < 0 || b.iota >= d.L)
            throw ValidationError("threshold policy: boundary record out of range");
        if (!(b.p >= 0.0 && b.p <= 1.0)) throw ValidationError("threshold policy: boundary probability outside [0,1]");
        const int q = tp.at(b.s - 1, b.a, b.iota) + 1;
        if (q > tp.at(b.s, b.a, b.iota)) throw ValidationError("threshold policy: boundary rate interval is empty");
        if (b.s - 1 < cfg.min_rate(q)) throw ValidationError("threshold policy: boundary fallback rate infeasible");
        const int x = d.index(q, b.a, b.iota);
        p.at(x, b.s) = b.p;
        p.at(x, b.s - 1) = 1.0 - b.p;
    }
    return p;
}

std::optional<ThresholdPolicy> thresholds_from_rates(const DeterministicPolicy& dp) {
    const PolicyDims& d = dp.dims;
    ThresholdPolicy tp{d, std::vector<int>((d.S + 1) * (d.A + 1) * d.L, -1), std::nullopt};
    for (int i = 0; i < d.L; ++i)
        for (int a = 0; a <= d.A; ++a) {
            for (int q = 1; q <= d.Q; ++q)
                if (dp(q, a, i) < dp(q - 1, a, i)) return std::nullopt;
            for (int s = 0; s <= d.S; ++s) {
                int t = -1;
                for (int q = 0; q <= d.Q; ++q)
                    if (dp(q, a, i) <= s) t = q;
                tp.at(s, a, i) = t;
            }
        }
    return tp;
}

std::vector<int> differing_states(const Policy& f1, const Policy& f2, double tol) {
    if (!(f1.dims() == f2.dims())) throw ValidationError("policies have different dimensions");
    std::vector<int> out;
    for (int x = 0; x < f1.dims().num_states(); ++x)
        for (int s = 0; s <= f1.dims().S; ++s)
            if (std::abs(f1(x, s) - f2(x, s)) > tol) {
                out.push_back(x);
                break;
            }
    return out;
}

Policy convex_combine(const Policy& f1, const Policy& f2, double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("convex_combine: eps outside [0,1]");
    if (differing_states(f1, f2).size() > 1)
        throw HypothesisViolation("convex_combine: policies differ on more than one state");
    if (eps == 1.0) return f1;
    if (eps == 0.0) return f2;
    Policy out(f1.dims());
    for (int x = 0; x < f1.dims().num_states(); ++x)
        for (int s = 0; s <= f1.dims().S; ++s) out.at(x, s) = eps * f1(x, s) + (1.0 - eps) * f2(x, s);
    return out;
}

std::vector<ThresholdPolicy> adjacent_threshold_policies(const ThresholdPolicy& tp, const SystemConfig& cfg) {
    if (tp.boundary) throw ContractViolation("adjacent_threshold_policies: policy must be deterministic");
    check_threshold_shape(tp, cfg);
    const PolicyDims& d = tp.dims;
    std::vector<ThresholdPolicy> out;
    for (int i = 0; i < d.L; ++i)
        for (int a = 0; a <= d.A; ++a)
            for (int s = 0; s < d.S; ++s) {
                const int t = tp.at(s, a, i);
                const int lo = s > 0 ? tp.at(s - 1, a, i) : 0;
                const int hi = tp.at(s + 1, a, i);
                // Raising q_F(s) hands state t+1 the lower rate s.
                if (t + 1 <= hi && s >= cfg.min_rate(t + 1)) {
                    ThresholdPolicy n = tp;
                    n.at(s, a, i) = t + 1;
                    out.push_back(std::move(n));
                }
                // Lowering q_F(s) hands state t the higher rate s+1.
                if (t - 1 >= lo && s + 1 <= cfg.max_rate(t)) {
                    ThresholdPolicy n = tp;
                    n.at(s, a, i) = t - 1;
                    out.push_back(std::move(n));
                }
            }
    return out;
}

} // namespace dpt
