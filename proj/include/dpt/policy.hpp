#pragma once

#include "dpt/model.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace dpt {

struct PolicyDims {
    int Q = 0;
    int A = 0;
    int L = 1;
    int S = 0;
    static PolicyDims of(const SystemConfig& cfg) { return {cfg.Q(), cfg.A(), cfg.L(), cfg.S()}; }
    int num_states() const { return (Q + 1) * (A + 1) * L; }
    int index(int q, int a, int iota) const { return (iota * (A + 1) + a) * (Q + 1) + q; }
    bool operator==(const PolicyDims&) const = default;
};

/// Stationary randomized policy f[q][a][iota][s], stored per flattened state.
class Policy {
public:
    Policy() = default;
    explicit Policy(PolicyDims dims);

    const PolicyDims& dims() const { return dims_; }
    double operator()(int state, int s) const { return f_[static_cast<size_t>(state) * (dims_.S + 1) + s]; }
    double& at(int state, int s) { return f_[static_cast<size_t>(state) * (dims_.S + 1) + s]; }
    double operator()(int q, int a, int iota, int s) const { return (*this)(dims_.index(q, a, iota), s); }
    const std::vector<double>& data() const { return f_; }

    /// Throws ValidationError when a row does not sum to 1 or mass sits on an infeasible rate.
    void validate(const SystemConfig& cfg) const;
    /// States whose row is not a point mass.
    std::vector<int> randomized_states(double tol = 1e-12) const;

private:
    PolicyDims dims_;
    std::vector<double> f_;
};

/// rate[state] for every flattened state.
struct DeterministicPolicy {
    PolicyDims dims;
    std::vector<int> rate;

    int operator()(int q, int a, int iota) const { return rate[dims.index(q, a, iota)]; }
    Policy to_policy() const;
    bool operator==(const DeterministicPolicy&) const = default;
};

/// Returns the point-mass rates when every row is deterministic within `tol`.
std::optional<DeterministicPolicy> as_deterministic(const Policy& p, double tol = 1e-12);

struct BoundaryRecord {
    int s = 0;
    int a = 0;
    int iota = 0;
    double p = 1.0;
    bool operator==(const BoundaryRecord&) const = default;
};

/// thresholds[(s*(A+1)+a)*L+iota] = q_F(s,a,iota); rate s is used on (q_F(s-1), q_F(s)].
/// The optional boundary randomizes the lowest queue length mapped to s*, i.e.
/// q = q_F(s*-1,a*,iota*) + 1, sending s* with probability p and s*-1 otherwise.
struct ThresholdPolicy {
    PolicyDims dims;
    std::vector<int> thresholds;
    std::optional<BoundaryRecord> boundary;

    int at(int s, int a, int iota) const { return thresholds[(static_cast<size_t>(s) * (dims.A + 1) + a) * dims.L + iota]; }
    int& at(int s, int a, int iota) { return thresholds[(static_cast<size_t>(s) * (dims.A + 1) + a) * dims.L + iota]; }
    bool operator==(const ThresholdPolicy&) const = default;
};

struct ThresholdHash {
    size_t operator()(const ThresholdPolicy& tp) const;
};

/// Greedy drain policy: rate min(q, S) everywhere.
ThresholdPolicy greedy_threshold_policy(const SystemConfig& cfg);

/// Deterministic part of a threshold policy (the boundary record is ignored).
DeterministicPolicy threshold_rates(const ThresholdPolicy& tp, const SystemConfig& cfg);

/// Full expansion including the randomized boundary state.
Policy expand_threshold(const ThresholdPolicy& tp, const SystemConfig& cfg);

/// Inverse of threshold_rates: q_F(s) = max{q : rate(q) <= s}. Returns nothing when the rate
/// tensor decreases somewhere in q.
std::optional<ThresholdPolicy> thresholds_from_rates(const DeterministicPolicy& dp);

/// Flattened states on which the two rows differ by more than `tol` in some entry.
std::vector<int> differing_states(const Policy& f1, const Policy& f2, double tol = 1e-12);

/// eps*F1 + (1-eps)*F2. Throws HypothesisViolation when the inputs differ on two or more states.
Policy convex_combine(const Policy& f1, const Policy& f2, double eps);

/// All tensors reached by a +-1 change of one entry that keeps monotonicity, the q_F(S)=Q anchor
/// and feasibility of the implied rates.
std::vector<ThresholdPolicy> adjacent_threshold_policies(const ThresholdPolicy& tp, const SystemConfig& cfg);

} // namespace dpt
