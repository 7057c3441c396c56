#pragma once

#include <vector>

namespace dpt {

/// Markov chain on per-slot arrival counts 0..A.
class ArrivalChain {
public:
    /// Validates `gamma` (square, row-stochastic within 1e-12) and solves the steady state.
    /// When the chain has several closed classes, phi is the Cesaro limit started from the
    /// uniform distribution and the chain is flagged reducible.
    explicit ArrivalChain(std::vector<std::vector<double>> gamma);

    int A() const { return static_cast<int>(gamma_.size()) - 1; }
    double gamma(int a, int a_next) const { return gamma_[a][a_next]; }
    const std::vector<std::vector<double>>& matrix() const { return gamma_; }
    const std::vector<double>& phi() const { return phi_; }
    double alpha() const { return alpha_; }

    /// Warning flag: some phi[a] = 0 or more than one recurrent class.
    bool reducible() const { return reducible_; }
    /// Exactly one closed class (phi may still vanish on transient arrival states).
    bool single_recurrent_class() const { return single_class_; }

private:
    std::vector<std::vector<double>> gamma_;
    std::vector<double> phi_;
    double alpha_ = 0.0;
    bool reducible_ = false;
    bool single_class_ = true;
};

/// L i.i.d. block-fading states. AWGN is L = 1 with |h| = 1.
class ChannelModel {
public:
    ChannelModel(std::vector<double> amplitudes, std::vector<double> eta);
    static ChannelModel awgn() { return ChannelModel({1.0}, {1.0}); }

    int L() const { return static_cast<int>(amplitudes_.size()); }
    const std::vector<double>& amplitudes() const { return amplitudes_; }
    const std::vector<double>& eta() const { return eta_; }
    double eta(int iota) const { return eta_[iota]; }

private:
    std::vector<double> amplitudes_;
    std::vector<double> eta_;
};

/// table[iota][s] = power in watts for rate s in channel state iota.
class PowerTable {
public:
    explicit PowerTable(std::vector<std::vector<double>> table);
    /// Row `base` divided by |h|^2 for each amplitude.
    static PowerTable awgn_scaled(const std::vector<double>& base, const std::vector<double>& amplitudes);

    int rows() const { return static_cast<int>(table_.size()); }
    int S() const { return static_cast<int>(table_.front().size()) - 1; }
    double operator()(int iota, int s) const { return table_[iota][s]; }
    const std::vector<std::vector<double>>& table() const { return table_; }
    double max_entry() const;

    /// P_{i+}(s+) - P_{i+}(s-) <= P_{i-}(s+) - P_{i-}(s-) for all i- < i+, s- < s+.
    bool satisfies_order_condition() const;

private:
    std::vector<std::vector<double>> table_;
};

struct State {
    int q = 0;
    int a = 0;
    int iota = 0;
    bool operator==(const State&) const = default;
};

class SystemConfig {
public:
    SystemConfig(int Q, int S, ArrivalChain arrival, ChannelModel channel, PowerTable power);

    int Q() const { return Q_; }
    int S() const { return S_; }
    int A() const { return arrival_.A(); }
    int L() const { return channel_.L(); }
    const ArrivalChain& arrival() const { return arrival_; }
    const ChannelModel& channel() const { return channel_; }
    const PowerTable& power() const { return power_; }

    int num_states() const { return (Q_ + 1) * (A() + 1) * L(); }
    /// Flattening iota*(A+1)*(Q+1) + a*(Q+1) + q.
    int index(int q, int a, int iota) const { return (iota * (A() + 1) + a) * (Q_ + 1) + q; }
    int index(const State& x) const { return index(x.q, x.a, x.iota); }
    State state(int idx) const;

    int min_rate(int q) const;
    int max_rate(int q) const;
    /// A state can be entered after the first slot only if 0 <= q - a <= Q - A.
    bool reachable(int q, int a) const { return q - a >= 0 && q - a <= Q_ - A(); }

    /// Throws ValidationError unless the arrival chain has no warning flag and alpha > 0.
    void require_solvable(const char* who) const;

private:
    int Q_;
    int S_;
    ArrivalChain arrival_;
    ChannelModel channel_;
    PowerTable power_;
};

/// Contiguous range [max(q-Q+A, 0), min(q, S)]. Throws DomainError for q outside [0, Q].
std::vector<int> feasible_rates(int q, const SystemConfig& cfg);

/// min(max(q-s, 0) + a_next, Q). Throws ContractViolation for an infeasible s.
int queue_step(int q, int s, int a_next, const SystemConfig& cfg);

/// gamma[a][a'] = (1-zeta_a)/A + ((A+1)zeta_a - 1)/A * 1{a' = (a+psi) mod (A+1)}.
ArrivalChain make_zeta_psi_chain(const std::vector<double>& zeta, int psi, int A);

/// Covariance-matched patterns on A = 3: pattern 1 is (kappa*1, 1), pattern 2 is
/// ((3-2kappa)/10 * 1, 0), pattern 3 is (kappa*1, -1).
ArrivalChain make_kappa_pattern(int pattern, double kappa, int A = 3);

double lag1_covariance(const ArrivalChain& chain);

/// zeta vectors of the three reference arrival processes (index 1..3, A = 3).
std::vector<double> reference_zeta(int i);

/// Q = 7, S = A = 3, L = 1, power row [0, 9.0, 18.2, 59.5] pW.
SystemConfig awgn_default_config();
SystemConfig awgn_default_config(const ArrivalChain& arrival);

/// Four fading states, powers scaled by 1/|h|^2 from the AWGN row.
SystemConfig fading_default_config();
SystemConfig fading_default_config(const ArrivalChain& arrival);

/// Q = 4, S = A = 2, zeta = 0.6 on every arrival count, psi = 1.
SystemConfig compact_example_config();

} // namespace dpt
