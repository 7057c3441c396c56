#include "dpt/model.hpp"

#include "dpt/errors.hpp"
#include "dpt/markov.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

namespace dpt {

namespace {

constexpr double kStochasticTol = 1e-12;
constexpr double kResidualTol = 1e-10;

void check_distribution(const std::vector<double>& p, const char* what) {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(std::string(what) + ": entry outside [0,1]");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kStochasticTol) {
        std::ostringstream os;
        os << what << ": sums to " << sum << ", expected 1";
        throw ValidationError(os.str());
    }
}

} // namespace

ArrivalChain::ArrivalChain(std::vector<std::vector<double>> gamma) : gamma_(std::move(gamma)) {
    const int n = static_cast<int>(gamma_.size());
    if (n == 0) throw ValidationError("arrival chain: empty transition matrix");
    for (const auto& row : gamma_) {
        if (static_cast<int>(row.size()) != n) throw ValidationError("arrival chain: matrix is not square");
        check_distribution(row, "arrival chain row");
    }

    Eigen::MatrixXd P(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) P(i, j) = gamma_[i][j];

    auto closed = markov::closed_classes(P);
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
    single_class_ = closed.size() == 1;
    if (single_class_) {
        phi = markov::stationary_on(P, closed.front());
    } else {
        // Cesaro limit from the uniform start: weight each class by its absorption probability.
        std::vector<int> cls_of(n, -1);
        for (size_t k = 0; k < closed.size(); ++k)
            for (int v : closed[k]) cls_of[v] = static_cast<int>(k);
        std::vector<int> transient;
        for (int i = 0; i < n; ++i)
            if (cls_of[i] < 0) transient.push_back(i);
        const int t = static_cast<int>(transient.size());
        Eigen::MatrixXd I_minus_T = Eigen::MatrixXd::Identity(t, t);
        for (int r = 0; r < t; ++r)
            for (int c = 0; c < t; ++c) I_minus_T(r, c) -= P(transient[r], transient[c]);
        auto lu = I_minus_T.partialPivLu();
        for (size_t k = 0; k < closed.size(); ++k) {
            double weight = static_cast<double>(closed[k].size());
            if (t > 0) {
                Eigen::VectorXd into = Eigen::VectorXd::Zero(t);
                for (int r = 0; r < t; ++r)
                    for (int v : closed[k]) into(r) += P(transient[r], v);
                weight += lu.solve(into).sum();
            }
            phi += (weight / n) * markov::stationary_on(P, closed[k]);
        }
    }

    if (markov::balance_residual(P, phi) > kResidualTol)
        throw NumericalError("arrival chain: steady-state residual above tolerance");

    phi_.assign(phi.data(), phi.data() + n);
    alpha_ = 0.0;
    reducible_ = !single_class_;
    for (int a = 0; a < n; ++a) {
        if (phi_[a] < 0.0) phi_[a] = 0.0;
        if (phi_[a] == 0.0) reducible_ = true;
        alpha_ += a * phi_[a];
    }
}

ChannelModel::ChannelModel(std::vector<double> amplitudes, std::vector<double> eta)
    : amplitudes_(std::move(amplitudes)), eta_(std::move(eta)) {
    if (amplitudes_.empty()) throw ValidationError("channel: at least one fading state required");
    if (amplitudes_.size() != eta_.size()) throw ValidationError("channel: amplitudes and eta differ in length");
    for (size_t i = 0; i < amplitudes_.size(); ++i) {
        if (!(amplitudes_[i] > 0.0)) throw ValidationError("channel: amplitudes must be positive");
        if (i > 0 && !(amplitudes_[i] > amplitudes_[i - 1]))
            throw ValidationError("channel: amplitudes must be strictly increasing");
        if (!(eta_[i] > 0.0)) throw ValidationError("channel: every fading state needs positive probability");
    }
    check_distribution(eta_, "channel eta");
}

PowerTable::PowerTable(std::vector<std::vector<double>> table) : table_(std::move(table)) {
    if (table_.empty() || table_.front().empty()) throw ValidationError("power table: empty");
    const size_t width = table_.front().size();
    for (const auto& row : table_) {
        if (row.size() != width) throw ValidationError("power table: ragged rows");
        if (row[0] != 0.0) throw ValidationError("power table: P(0) must be 0");
        for (size_t s = 1; s < width; ++s) {
            if (!(row[s] > row[s - 1])) throw ValidationError("power table: row not strictly increasing");
            if (s >= 2 && row[s] - row[s - 1] < row[s - 1] - row[s - 2])
                throw ValidationError("power table: row not convex");
        }
    }
}

PowerTable PowerTable::awgn_scaled(const std::vector<double>& base, const std::vector<double>& amplitudes) {
    std::vector<std::vector<double>> rows;
    for (double h : amplitudes) {
        std::vector<double> row(base.size());
        for (size_t s = 0; s < base.size(); ++s) row[s] = base[s] / (h * h);
        rows.push_back(std::move(row));
    }
    return PowerTable(std::move(rows));
}

double PowerTable::max_entry() const {
    double m = 0.0;
    for (const auto& row : table_)
        for (double v : row) m = std::max(m, v);
    return m;
}

bool PowerTable::satisfies_order_condition() const {
    const int L = rows();
    const int S = this->S();
    for (int lo = 0; lo < L; ++lo)
        for (int hi = lo + 1; hi < L; ++hi)
            for (int sm = 0; sm <= S; ++sm)
                for (int sp = sm + 1; sp <= S; ++sp) {
                    double d_hi = table_[hi][sp] - table_[hi][sm];
                    double d_lo = table_[lo][sp] - table_[lo][sm];
                    if (d_hi > d_lo) return false;
                }
    return true;
}

SystemConfig::SystemConfig(int Q, int S, ArrivalChain arrival, ChannelModel channel, PowerTable power)
    : Q_(Q), S_(S), arrival_(std::move(arrival)), channel_(std::move(channel)), power_(std::move(power)) {
    if (S_ < 0 || Q_ < 0) throw ValidationError("config: Q and S must be nonnegative");
    if (S_ < A()) throw ValidationError("config: S must be at least A");
    if (Q_ < A()) throw ValidationError("config: Q must be at least A");
    if (power_.rows() != L()) throw ValidationError("config: power table needs one row per fading state");
    if (power_.S() != S_) throw ValidationError("config: power table needs S+1 columns");
}

State SystemConfig::state(int idx) const {
    State x;
    x.q = idx % (Q_ + 1);
    idx /= (Q_ + 1);
    x.a = idx % (A() + 1);
    x.iota = idx / (A() + 1);
    return x;
}

int SystemConfig::min_rate(int q) const { return std::max(q - Q_ + A(), 0); }
int SystemConfig::max_rate(int q) const { return std::min(q, S_); }

void SystemConfig::require_solvable(const char* who) const {
    if (arrival_.reducible())
        throw ValidationError(std::string(who) + ": arrival chain is reducible (flagged); refusing to solve");
    if (!(arrival_.alpha() > 0.0))
        throw ValidationError(std::string(who) + ": mean arrival rate is zero; delay is undefined");
}

std::vector<int> feasible_rates(int q, const SystemConfig& cfg) {
    if (q < 0 || q > cfg.Q()) throw DomainError("feasible_rates: queue length outside [0, Q]");
    std::vector<int> out;
    for (int s = cfg.min_rate(q); s <= cfg.max_rate(q); ++s) out.push_back(s);
    return out;
}

int queue_step(int q, int s, int a_next, const SystemConfig& cfg) {
    if (q < 0 || q > cfg.Q()) throw DomainError("queue_step: queue length outside [0, Q]");
    if (s < cfg.min_rate(q) || s > cfg.max_rate(q)) throw ContractViolation("queue_step: rate not feasible");
    if (a_next < 0 || a_next > cfg.A()) throw ContractViolation("queue_step: arrival count outside [0, A]");
    return std::min(std::max(q - s, 0) + a_next, cfg.Q());
}

ArrivalChain make_zeta_psi_chain(const std::vector<double>& zeta, int psi, int A) {
    if (A < 0) throw ValidationError("zeta-psi chain: A must be nonnegative");
    if (static_cast<int>(zeta.size()) != A + 1) throw ValidationError("zeta-psi chain: zeta needs A+1 entries");
    for (double z : zeta)
        if (!(z >= 0.0 && z <= 1.0)) throw ValidationError("zeta-psi chain: zeta entries must lie in [0,1]");
    if (A == 0) return ArrivalChain(std::vector<std::vector<double>>{{1.0}});
    if (psi < -A || psi > A) throw ValidationError("zeta-psi chain: psi outside [-A, A]");

    const int n = A + 1;
    std::vector<std::vector<double>> g(n, std::vector<double>(n));
    for (int a = 0; a < n; ++a) {
        const int target = ((a + psi) % n + n) % n;
        for (int b = 0; b < n; ++b) {
            double v = (1.0 - zeta[a]) / A;
            if (b == target) v += (n * zeta[a] - 1.0) / A;
            g[a][b] = v;
        }
        // Row sums are exact in real arithmetic; pin the target entry so they are in floating point too.
        double off = 0.0;
        for (int b = 0; b < n; ++b)
            if (b != target) off += g[a][b];
        g[a][target] = 1.0 - off;
    }
    return ArrivalChain(std::move(g));
}

ArrivalChain make_kappa_pattern(int pattern, double kappa, int A) {
    switch (pattern) {
    case 1: return make_zeta_psi_chain(std::vector<double>(A + 1, kappa), 1, A);
    case 2: return make_zeta_psi_chain(std::vector<double>(A + 1, (3.0 - 2.0 * kappa) / 10.0), 0, A);
    case 3: return make_zeta_psi_chain(std::vector<double>(A + 1, kappa), -1, A);
    default: throw ValidationError("kappa pattern: expected 1, 2 or 3");
    }
}

double lag1_covariance(const ArrivalChain& chain) {
    double m = 0.0;
    for (int a = 0; a <= chain.A(); ++a)
        for (int b = 0; b <= chain.A(); ++b) m += a * b * chain.phi()[a] * chain.gamma(a, b);
    return m - chain.alpha() * chain.alpha();
}

std::vector<double> reference_zeta(int i) {
    switch (i) {
    case 1: return {0.7, 0.7, 0.5, 0.5};
    case 2: return {0.5, 0.5, 0.5, 0.5};
    case 3: return {0.3, 0.3, 0.5, 0.5};
    default: throw ValidationError("reference_zeta: index must be 1, 2 or 3");
    }
}

namespace {
const std::vector<double> kAwgnPower{0.0, 9.0e-12, 18.2e-12, 59.5e-12};
const std::vector<double> kFadingAmplitudes{0.314, 2.50, 3.54, 5.00};
const std::vector<double> kFadingEta{0.394, 0.232, 0.239, 0.135};
} // namespace

SystemConfig awgn_default_config() { return awgn_default_config(make_zeta_psi_chain(reference_zeta(2), 0, 3)); }

SystemConfig awgn_default_config(const ArrivalChain& arrival) {
    return SystemConfig(7, 3, arrival, ChannelModel::awgn(), PowerTable({kAwgnPower}));
}

SystemConfig fading_default_config() { return fading_default_config(make_zeta_psi_chain(reference_zeta(2), 0, 3)); }

SystemConfig fading_default_config(const ArrivalChain& arrival) {
    return SystemConfig(7, 3, arrival, ChannelModel(kFadingAmplitudes, kFadingEta),
                        PowerTable::awgn_scaled(kAwgnPower, kFadingAmplitudes));
}

SystemConfig compact_example_config() {
    return SystemConfig(4, 2, make_zeta_psi_chain({0.6, 0.6, 0.6}, 1, 2), ChannelModel::awgn(),
                        PowerTable({{0.0, 9.0e-12, 18.2e-12}}));
}

} // namespace dpt
