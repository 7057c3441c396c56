#include "dpt/errors.hpp"
#include "dpt/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace dpt;

namespace {

// Brute-force lag-1 covariance from gamma and phi.
double covariance_oracle(const ArrivalChain& c) {
    double m = 0.0, m2 = 0.0;
    for (int a = 0; a <= c.A(); ++a) {
        m += a * c.phi()[a];
        for (int b = 0; b <= c.A(); ++b) m2 += a * b * c.phi()[a] * c.gamma(a, b);
    }
    return m2 - m * m;
}

} // namespace

TEST(FeasibleRates, MatchesDefinitionOnEveryQueueLength) {
    const SystemConfig cfg = awgn_default_config();
    for (int q = 0; q <= cfg.Q(); ++q) {
        std::vector<int> expected;
        for (int s = 0; s <= cfg.S(); ++s)
            if (s <= q && q - s + cfg.A() <= cfg.Q()) expected.push_back(s);
        EXPECT_EQ(feasible_rates(q, cfg), expected) << "q=" << q;
    }
    EXPECT_EQ(feasible_rates(7, cfg), (std::vector<int>{3}));
    EXPECT_EQ(feasible_rates(0, cfg), (std::vector<int>{0}));
    EXPECT_THROW(feasible_rates(8, cfg), DomainError);
    EXPECT_THROW(feasible_rates(-1, cfg), DomainError);
}

TEST(QueueStep, ExhaustiveNeverOverflows) {
    for (const SystemConfig& cfg : {awgn_default_config(), compact_example_config()}) {
        for (int q = 0; q <= cfg.Q(); ++q)
            for (int s = 0; s <= cfg.S(); ++s)
                for (int a = 0; a <= cfg.A(); ++a) {
                    const bool feasible = s <= q && q - s + cfg.A() <= cfg.Q();
                    if (!feasible) {
                        EXPECT_THROW(queue_step(q, s, a, cfg), ContractViolation);
                        continue;
                    }
                    const int next = queue_step(q, s, a, cfg);
                    EXPECT_EQ(next, q - s + a);
                    EXPECT_TRUE(cfg.reachable(next, a));
                }
    }
}

TEST(ZetaPsiChain, EntriesFollowTheDefinition) {
    const std::vector<double> zeta{0.7, 0.2, 0.5, 0.9};
    for (int psi = -3; psi <= 3; ++psi) {
        const ArrivalChain c = make_zeta_psi_chain(zeta, psi, 3);
        for (int a = 0; a <= 3; ++a) {
            const int target = ((a + psi) % 4 + 4) % 4;
            double row = 0.0;
            for (int b = 0; b <= 3; ++b) {
                row += c.gamma(a, b);
                EXPECT_NEAR(c.gamma(a, b), b == target ? zeta[a] : (1.0 - zeta[a]) / 3.0, 1e-15);
            }
            EXPECT_NEAR(row, 1.0, 1e-15);
        }
    }
    EXPECT_THROW(make_zeta_psi_chain({0.5, 0.5}, 0, 3), ValidationError);
    EXPECT_THROW(make_zeta_psi_chain({0.5, 0.5, 0.5, 1.2}, 0, 3), ValidationError);
    EXPECT_THROW(make_zeta_psi_chain({0.5, 0.5, 0.5, 0.5}, 4, 3), ValidationError);
}

TEST(ZetaPsiChain, StationaryLawSolvesBalance) {
    const ArrivalChain c = make_zeta_psi_chain({0.9, 0.1, 0.4, 0.6}, 1, 3);
    double total = 0.0;
    for (int b = 0; b <= 3; ++b) {
        double in = 0.0;
        for (int a = 0; a <= 3; ++a) in += c.phi()[a] * c.gamma(a, b);
        EXPECT_NEAR(in, c.phi()[b], 1e-14);
        total += c.phi()[b];
    }
    EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(ReferenceArrivals, AverageRates) {
    const double expected[] = {1.25, 1.50, 1.67};
    for (int i = 1; i <= 3; ++i)
        EXPECT_NEAR(make_zeta_psi_chain(reference_zeta(i), 0, 3).alpha(), expected[i - 1], 5e-3) << "zeta" << i;
    EXPECT_NEAR(make_zeta_psi_chain(reference_zeta(3), 0, 3).alpha(), 5.0 / 3.0, 1e-12);
    EXPECT_THROW(reference_zeta(4), ValidationError);
}

TEST(KappaPattern, CovarianceMatchesBruteForce) {
    for (int pattern = 1; pattern <= 3; ++pattern)
        for (double kappa : {0.0, 0.1, 0.25, 0.5, 0.7, 1.0}) {
            const ArrivalChain c = make_kappa_pattern(pattern, kappa);
            EXPECT_NEAR(c.alpha(), 1.5, 1e-12);
            EXPECT_NEAR(lag1_covariance(c), covariance_oracle(c), 1e-12);
            EXPECT_NEAR(lag1_covariance(c), (1.0 - 4.0 * kappa) / 12.0, 1e-12) << "pattern " << pattern << " kappa " << kappa;
        }
    EXPECT_NEAR(lag1_covariance(make_kappa_pattern(1, 0.7)), -0.15, 1e-12);
}

TEST(KappaPattern, QuarterGivesTheSameChain) {
    const ArrivalChain c1 = make_kappa_pattern(1, 0.25), c2 = make_kappa_pattern(2, 0.25), c3 = make_kappa_pattern(3, 0.25);
    for (int a = 0; a <= 3; ++a)
        for (int b = 0; b <= 3; ++b) {
            EXPECT_NEAR(c1.gamma(a, b), 0.25, 1e-15);
            EXPECT_NEAR(c2.gamma(a, b), 0.25, 1e-15);
            EXPECT_NEAR(c3.gamma(a, b), 0.25, 1e-15);
        }
}

TEST(ArrivalChain, RejectsMalformedMatrices) {
    EXPECT_THROW(ArrivalChain({{0.5, 0.4}, {0.5, 0.5}}), ValidationError);
    EXPECT_THROW(ArrivalChain({{1.0, 0.0}}), ValidationError);
    EXPECT_THROW(ArrivalChain({{1.5, -0.5}, {0.5, 0.5}}), ValidationError);
    EXPECT_THROW(ArrivalChain(std::vector<std::vector<double>>{}), ValidationError);
}

TEST(ArrivalChain, ReducibleChainIsFlagged) {
    const ArrivalChain c({{1.0, 0.0}, {0.0, 1.0}});
    EXPECT_TRUE(c.reducible());
    EXPECT_FALSE(c.single_recurrent_class());
    EXPECT_NEAR(c.phi()[0] + c.phi()[1], 1.0, 1e-14);
    const ArrivalChain d({{0.0, 1.0}, {0.0, 1.0}});
    EXPECT_TRUE(d.reducible());
    EXPECT_TRUE(d.single_recurrent_class());
    EXPECT_NEAR(d.alpha(), 1.0, 1e-14);
}

TEST(ArrivalChain, NoArrivals) {
    const ArrivalChain c = make_zeta_psi_chain({1.0}, 0, 0);
    EXPECT_EQ(c.A(), 0);
    EXPECT_EQ(c.alpha(), 0.0);
}

TEST(PowerTable, ValidatesRows) {
    EXPECT_THROW(PowerTable({{1.0, 2.0}}), ValidationError);
    EXPECT_THROW(PowerTable({{0.0, 2.0, 3.0}}), ValidationError);
    EXPECT_THROW(PowerTable({{0.0, 2.0, 2.0}}), ValidationError);
    EXPECT_THROW(PowerTable({{0.0, 1.0}, {0.0, 1.0, 3.0}}), ValidationError);
    EXPECT_NO_THROW(PowerTable({{0.0, 1.0, 3.0}}));
}

TEST(PowerTable, AwgnScaledDividesBySquaredAmplitude) {
    const PowerTable t = PowerTable::awgn_scaled({0.0, 1.0, 3.0}, {0.5, 2.0});
    EXPECT_DOUBLE_EQ(t(0, 2), 12.0);
    EXPECT_DOUBLE_EQ(t(1, 1), 0.25);
    EXPECT_TRUE(t.satisfies_order_condition());
    EXPECT_FALSE(PowerTable({{0.0, 1.0, 3.0}, {0.0, 2.0, 5.0}}).satisfies_order_condition());
}

TEST(ChannelModel, Validates) {
    EXPECT_THROW(ChannelModel({1.0, 0.5}, {0.5, 0.5}), ValidationError);
    EXPECT_THROW(ChannelModel({1.0}, {0.5, 0.5}), ValidationError);
    EXPECT_THROW(ChannelModel({1.0, 2.0}, {1.0, 0.0}), ValidationError);
    EXPECT_THROW(ChannelModel({-1.0}, {1.0}), ValidationError);
}

TEST(DefaultConfigs, Shapes) {
    const SystemConfig awgn = awgn_default_config();
    EXPECT_EQ(awgn.Q(), 7);
    EXPECT_EQ(awgn.S(), 3);
    EXPECT_EQ(awgn.A(), 3);
    EXPECT_EQ(awgn.L(), 1);
    EXPECT_DOUBLE_EQ(awgn.power()(0, 3), 59.5e-12);
    EXPECT_NEAR(awgn.arrival().alpha(), 1.5, 1e-12);

    const SystemConfig fading = fading_default_config();
    EXPECT_EQ(fading.L(), 4);
    const double eta_sum = std::accumulate(fading.channel().eta().begin(), fading.channel().eta().end(), 0.0);
    EXPECT_NEAR(eta_sum, 1.0, 1e-12);
    for (int i = 0; i < 4; ++i) {
        const double h = fading.channel().amplitudes()[i];
        for (int s = 0; s <= 3; ++s) EXPECT_NEAR(fading.power()(i, s), awgn.power()(0, s) / (h * h), 1e-24);
    }
    EXPECT_TRUE(fading.power().satisfies_order_condition());

    const SystemConfig compact = compact_example_config();
    EXPECT_EQ(compact.Q(), 4);
    EXPECT_EQ(compact.S(), 2);
    EXPECT_EQ(compact.A(), 2);
}

TEST(SystemConfig, IndexRoundTrip) {
    const SystemConfig cfg = fading_default_config();
    for (int x = 0; x < cfg.num_states(); ++x) EXPECT_EQ(cfg.index(cfg.state(x)), x);
    EXPECT_EQ(cfg.index(1, 2, 3), (3 * 4 + 2) * 8 + 1);
}

TEST(SystemConfig, RejectsInconsistentDimensions) {
    const ArrivalChain arr = make_zeta_psi_chain(reference_zeta(2), 0, 3);
    EXPECT_THROW(SystemConfig(7, 2, arr, ChannelModel::awgn(), PowerTable({{0.0, 1.0, 3.0}})), ValidationError);
    EXPECT_THROW(SystemConfig(2, 3, arr, ChannelModel::awgn(), PowerTable({{0.0, 1.0, 3.0, 6.0}})), ValidationError);
    EXPECT_THROW(SystemConfig(7, 3, arr, ChannelModel::awgn(), PowerTable({{0.0, 1.0, 3.0}})), ValidationError);
}

TEST(SystemConfig, Reachability) {
    const SystemConfig cfg = awgn_default_config();
    EXPECT_TRUE(cfg.reachable(3, 3));
    EXPECT_FALSE(cfg.reachable(2, 3));
    EXPECT_TRUE(cfg.reachable(4, 0));
    EXPECT_FALSE(cfg.reachable(5, 0));
}
