#include "support.hpp"

#include "dpt/errors.hpp"
#include "dpt/markov.hpp"
#include "dpt/mrp.hpp"

#include <gtest/gtest.h>

using namespace dpt;

namespace {

// Stationary law by repeated squaring of the (aperiodic, lazy) chain.
Eigen::VectorXd power_iteration(const Eigen::MatrixXd& P, int start) {
    const int n = static_cast<int>(P.rows());
    Eigen::MatrixXd M = 0.5 * (P + Eigen::MatrixXd::Identity(n, n));
    for (int k = 0; k < 60; ++k) {
        M = M * M;
        M = M.array().colwise() / M.rowwise().sum().array();
    }
    return M.row(start).transpose();
}

Policy walk(const SystemConfig& cfg, std::mt19937_64& rng, int steps) {
    ThresholdPolicy tp = greedy_threshold_policy(cfg);
    for (int i = 0; i < steps; ++i) {
        const auto nb = adjacent_threshold_policies(tp, cfg);
        if (nb.empty()) break;
        tp = nb[rng() % nb.size()];
    }
    return expand_threshold(tp, cfg);
}

} // namespace

TEST(TransitionMatrix, RowsAreStochastic) {
    const SystemConfig cfg = fading_default_config();
    const Eigen::MatrixXd P = transition_matrix(expand_threshold(greedy_threshold_policy(cfg), cfg), cfg);
    for (int i = 0; i < P.rows(); ++i) {
        EXPECT_NEAR(P.row(i).sum(), 1.0, 1e-14);
        EXPECT_GE(P.row(i).minCoeff(), 0.0);
    }
}

TEST(SteadyState, MatchesPowerIteration) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 25; ++i) {
        const SystemConfig cfg = dpt::testing::random_instance(rng, 1e9);
        const Policy f = walk(cfg, rng, 8);
        SteadyStateReport r;
        try {
            r = steady_state(f, cfg);
        } catch (const MultichainAmbiguity&) {
            continue;
        }
        const Eigen::VectorXd oracle = power_iteration(transition_matrix(f, cfg), r.recurrent_classes[0][0]);
        EXPECT_LE((r.pi - oracle).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE(r.residual, 1e-10);
        double power = 0.0, queue = 0.0;
        for (int x = 0; x < cfg.num_states(); ++x) {
            const State st = cfg.state(x);
            queue += r.pi[x] * st.q;
            for (int s = 0; s <= cfg.S(); ++s) power += r.pi[x] * f(x, s) * cfg.power()(st.iota, s);
            if (!cfg.reachable(st.q, st.a)) {
                EXPECT_EQ(r.pi[x], 0.0);
            }
        }
        EXPECT_NEAR(r.avg_power, power, 1e-12 * power + 1e-300);
        EXPECT_NEAR(r.avg_delay, queue / cfg.arrival().alpha(), 1e-12 * r.avg_delay);
    }
}

TEST(SteadyState, GreedyDrainOnAwgnDefault) {
    const SystemConfig cfg = awgn_default_config();
    const SteadyStateReport r = steady_state(expand_threshold(greedy_threshold_policy(cfg), cfg), cfg);
    // greedy keeps q = a, so D = 1 and P = sum_a phi_a P(a)
    double p = 0.0;
    for (int a = 0; a <= 3; ++a) p += cfg.arrival().phi()[a] * cfg.power()(0, a);
    EXPECT_NEAR(r.avg_delay, 1.0, 1e-13);
    EXPECT_NEAR(r.avg_power, p, 1e-24);
    EXPECT_NEAR(r.avg_power, 2.1675e-11, 1e-24);
    EXPECT_TRUE(r.is_unichain);
}

TEST(SteadyState, MultichainNeedsAnInitialState) {
    const SystemConfig cfg(2, 1, ArrivalChain({{1.0, 0.0}, {0.0, 1.0}}), ChannelModel::awgn(), PowerTable({{0.0, 1.0}}));
    const Policy f = expand_threshold(greedy_threshold_policy(cfg), cfg);
    EXPECT_THROW(steady_state(f, cfg), MultichainAmbiguity);
    const SteadyStateReport r0 = steady_state(f, cfg, State{0, 0, 0});
    EXPECT_EQ(r0.mean_queue, 0.0);
    EXPECT_FALSE(r0.is_unichain);
    const SteadyStateReport r1 = steady_state(f, cfg, State{1, 1, 0});
    EXPECT_NEAR(r1.mean_queue, 1.0, 1e-14);
    EXPECT_NEAR(r1.avg_power, 1.0, 1e-14);
}

TEST(SteadyState, NoArrivalsGivesZeroDelay) {
    const SystemConfig cfg(2, 1, make_zeta_psi_chain({1.0}, 0, 0), ChannelModel::awgn(), PowerTable({{0.0, 1.0}}));
    const SteadyStateReport r = steady_state(expand_threshold(greedy_threshold_policy(cfg), cfg), cfg);
    EXPECT_EQ(r.avg_delay, 0.0);
    EXPECT_EQ(r.avg_power, 0.0);
}

TEST(Renewal, FrequenciesEqualOccupationMeasure) {
    std::mt19937_64 rng(5);
    int checked = 0;
    while (checked < 10) {
        const SystemConfig cfg = dpt::testing::random_instance(rng, 1e9);
        const Policy f = walk(cfg, rng, 6);
        SteadyStateReport r;
        try {
            r = steady_state(f, cfg);
        } catch (const MultichainAmbiguity&) {
            continue;
        }
        const auto x = occupation_measure(f, r);
        const auto y = renewal_frequencies(f, cfg, cfg.state(r.recurrent_classes[0][0]));
        ASSERT_EQ(x.size(), y.size());
        for (size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(x[k], y[k], 1e-11);
        ++checked;
    }
}

TEST(Renewal, TransientAnchorIsRejected) {
    const SystemConfig cfg = awgn_default_config();
    const Policy f = expand_threshold(greedy_threshold_policy(cfg), cfg);
    EXPECT_THROW(renewal_frequencies(f, cfg, State{5, 0, 0}), ContractViolation);
}

TEST(Markov, ClosedClassesOfABlockMatrix) {
    Eigen::MatrixXd P(4, 4);
    P << 0.5, 0.5, 0, 0, 0.5, 0.5, 0, 0, 0.2, 0.2, 0.2, 0.4, 0, 0, 0, 1;
    const auto cls = markov::closed_classes(P);
    ASSERT_EQ(cls.size(), 2u);
    EXPECT_EQ(cls[0], (std::vector<int>{0, 1}));
    EXPECT_EQ(cls[1], (std::vector<int>{3}));
    const Eigen::VectorXd pi = markov::stationary_on(P, cls[0]);
    EXPECT_NEAR(pi[0], 0.5, 1e-15);
    EXPECT_EQ(pi[2], 0.0);
    EXPECT_LE(markov::balance_residual(P, pi), 1e-15);
}
