#include "support.hpp"

#include "dpt/curve.hpp"
#include "dpt/errors.hpp"
#include "dpt/lagrangian.hpp"
#include "dpt/mrp.hpp"

#include <gtest/gtest.h>

using namespace dpt;

namespace {

PowerDelay evaluate(const DeterministicPolicy& dp, const SystemConfig& cfg) {
    const SteadyStateReport r = steady_state(dp.to_policy(), cfg, State{0, 0, 0});
    return {r.avg_power, r.avg_delay};
}

double scaled_violation(const ValueFunction& v) {
    double scale = 1.0;
    for (double x : v.nu) scale = std::max(scale, std::abs(x));
    return convexity_violation(v) / scale;
}

} // namespace

TEST(ValueIteration, ZeroMultiplierIsDelayOptimal) {
    const SystemConfig cfg = awgn_default_config();
    const auto [dp, v] = value_iterate(cfg, 0.0);
    EXPECT_NEAR(evaluate(dp, cfg).delay, 1.0, 1e-12);
    EXPECT_NEAR(v.gain, 1.0, 1e-9);
}

TEST(ValueIteration, LargeMultiplierGivesMinimumPower) {
    const SystemConfig cfg = compact_example_config();
    const auto frontier = brute_force_frontier(cfg);
    double max_slope = 0.0;
    for (size_t k = 0; k + 1 < frontier.size(); ++k)
        max_slope = std::max(max_slope, (frontier[k].delay - frontier[k + 1].delay) / (frontier[k + 1].power - frontier[k].power));
    const auto [dp, v] = value_iterate(cfg, 1e3 * max_slope);
    const PowerDelay pd = evaluate(dp, cfg);
    EXPECT_NEAR(pd.power, frontier.front().power, 1e-10 * pd.power);
    EXPECT_NEAR(pd.delay, frontier.front().delay, 1e-10 * pd.delay);
}

TEST(ValueIteration, InteriorMultiplierHitsTheVertex) {
    const SystemConfig cfg = compact_example_config();
    const TradeoffCurve c = trace_curve(cfg);
    const auto& v = c.vertices;
    for (size_t k = 1; k + 1 < v.size(); ++k) {
        const double mu_lo = (v[k].delay - v[k + 1].delay) / (v[k + 1].power - v[k].power);
        const double mu_hi = (v[k - 1].delay - v[k].delay) / (v[k].power - v[k - 1].power);
        const auto [dp, vf] = value_iterate(cfg, 0.5 * (mu_lo + mu_hi));
        const PowerDelay pd = evaluate(dp, cfg);
        EXPECT_NEAR(pd.power, v[k].power, 1e-8 * v[k].power) << "vertex " << k;
        EXPECT_NEAR(pd.delay, v[k].delay, 1e-8 * v[k].delay) << "vertex " << k;
        EXPECT_LE(scaled_violation(vf), 1e-9);
    }
}

TEST(ValueIteration, ValueFunctionConvexAndPolicyThresholdOnAGrid) {
    const SystemConfig cfg = awgn_default_config();
    for (double mu : {0.0, 1e9, 1e10, 5e10, 7.5e10, 1e11, 1.4e11, 2e11, 1e12, 1e13}) {
        const auto [dp, v] = value_iterate(cfg, mu);
        EXPECT_LE(scaled_violation(v), 1e-9) << "mu " << mu;
        EXPECT_NO_THROW(extract_thresholds(dp, cfg)) << "mu " << mu;
    }
}

TEST(ValueIteration, RandomInstancesGiveThresholdPolicies) {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 15; ++i) {
        const SystemConfig cfg = dpt::testing::random_instance(rng, 1e9);
        const double scale = 1.0 / cfg.power().max_entry();
        for (double mu : {0.1 * scale, scale, 10.0 * scale}) {
            const auto [dp, v] = value_iterate(cfg, mu);
            EXPECT_LE(scaled_violation(v), 1e-9);
            EXPECT_NO_THROW(extract_thresholds(dp, cfg));
        }
    }
}

TEST(ValueIteration, RejectsNegativeMultiplier) {
    EXPECT_THROW(value_iterate(awgn_default_config(), -1.0), DomainError);
    const SystemConfig cfg(2, 1, make_zeta_psi_chain({1.0}, 0, 0), ChannelModel::awgn(), PowerTable({{0.0, 1.0}}));
    EXPECT_THROW(value_iterate(cfg, 1.0), ValidationError);
}

TEST(ExtractThresholds, RejectsDecreasingRates) {
    const SystemConfig cfg = awgn_default_config();
    DeterministicPolicy dp = threshold_rates(greedy_threshold_policy(cfg), cfg);
    dp.rate[cfg.index(3, 0, 0)] = 3;
    dp.rate[cfg.index(4, 0, 0)] = 1;
    EXPECT_THROW(extract_thresholds(dp, cfg), NotThresholdForm);
}

TEST(ThresholdOrder, HoldsAcrossFadingVertices) {
    const SystemConfig cfg = fading_default_config();
    for (double mu : {2e10, 5e10, 1e11, 3e11}) {
        const auto [dp, v] = value_iterate(cfg, mu);
        const OrderCheck oc = check_threshold_order(extract_thresholds(dp, cfg), cfg);
        EXPECT_TRUE(oc.condition_satisfied);
        EXPECT_TRUE(oc.holds) << "mu " << mu;
    }
}

TEST(ThresholdOrder, VacuousWithoutFading) {
    const SystemConfig cfg = awgn_default_config();
    const OrderCheck oc = check_threshold_order(greedy_threshold_policy(cfg), cfg);
    EXPECT_TRUE(oc.holds);
    EXPECT_TRUE(oc.condition_satisfied);
}

TEST(ThresholdOrder, DetectsAViolation) {
    const SystemConfig cfg = fading_default_config();
    ThresholdPolicy tp = greedy_threshold_policy(cfg);
    // better channel (iota = 3) with a higher threshold for rate 0 than a worse one
    tp.at(0, 0, 0) = 0;
    tp.at(0, 0, 3) = 1;
    EXPECT_FALSE(check_threshold_order(tp, cfg).holds);
}
