#include "dpt/config_io.hpp"
#include "dpt/errors.hpp"

#include <gtest/gtest.h>

#include <string>

using namespace dpt;

namespace {

std::string config_path(const std::string& name) { return std::string(DPT_SOURCE_DIR) + "/configs/" + name; }

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

const char* kValid = R"({
  "Q": 4, "S": 2,
  "arrival": {"A": 2, "mode": "zeta_psi", "zeta": [0.6, 0.6, 0.6], "psi": 1},
  "channel": {"amplitudes": [1.0], "eta": [1.0]},
  "power": {"mode": "table", "table": [[0.0, 9.0e-12, 18.2e-12]]}
})";

} // namespace

TEST(Config, ShippedConfigsMatchTheBuiltInDefaults) {
    const SystemConfig awgn = load_config(config_path("awgn_default.json"));
    const SystemConfig ref = awgn_default_config();
    EXPECT_EQ(awgn.Q(), ref.Q());
    EXPECT_EQ(awgn.arrival().matrix(), ref.arrival().matrix());
    EXPECT_EQ(awgn.power().table(), ref.power().table());

    const SystemConfig fading = load_config(config_path("fading_default.json"));
    const SystemConfig fref = fading_default_config();
    EXPECT_EQ(fading.channel().amplitudes(), fref.channel().amplitudes());
    for (int i = 0; i < 4; ++i)
        for (int s = 0; s <= 3; ++s) EXPECT_NEAR(fading.power()(i, s), fref.power()(i, s), 1e-24);

    const SystemConfig compact = load_config(config_path("compact.json"));
    EXPECT_EQ(compact.arrival().matrix(), compact_example_config().arrival().matrix());

    for (const char* name : {"awgn_zeta1.json", "awgn_zeta2.json", "awgn_zeta3.json", "kappa_a1_0.7.json"})
        EXPECT_NO_THROW(load_config(config_path(name))) << name;
}

TEST(Config, ParsesAllArrivalModes) {
    EXPECT_NO_THROW(parse_config(kValid));
    const SystemConfig m = parse_config(R"({"Q": 2, "S": 1,
        "arrival": {"A": 1, "mode": "matrix", "gamma": [[0.3, 0.7], [0.6, 0.4]]},
        "channel": {"amplitudes": [1.0], "eta": [1.0]},
        "power": {"mode": "table", "table": [[0, 1]]}})");
    EXPECT_DOUBLE_EQ(m.arrival().gamma(0, 1), 0.7);
    const SystemConfig k = parse_config(R"({"Q": 7, "S": 3,
        "arrival": {"A": 3, "mode": "kappa_pattern", "pattern": 2, "kappa": 0.1},
        "channel": {"amplitudes": [0.5, 1.0], "eta": [0.5, 0.5]},
        "power": {"mode": "awgn_scaled", "base": [0, 1, 3, 6]}})");
    EXPECT_DOUBLE_EQ(k.power()(0, 1), 4.0);
    EXPECT_EQ(k.L(), 2);
}

TEST(Config, SyntaxErrorsNameTheLine) {
    const std::string msg = error_of("{\n  \"Q\": 4,\n  \"S\": ,\n}");
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Config, FieldErrorsNameTheField) {
    std::string bad = kValid;
    bad.replace(bad.find("0.6, 0.6, 0.6"), 13, "0.6, 1.6, 0.6");
    EXPECT_NE(error_of(bad).find("arrival"), std::string::npos);

    bad = kValid;
    bad.replace(bad.find("\"Q\": 4"), 6, "\"Q\": \"x\"");
    EXPECT_NE(error_of(bad).find("'Q'"), std::string::npos) << error_of(bad);

    bad = kValid;
    bad.replace(bad.find("\"psi\": 1"), 8, "\"psi\": 1.5");
    EXPECT_NE(error_of(bad).find("arrival.psi"), std::string::npos);

    bad = kValid;
    bad.replace(bad.find("9.0e-12"), 7, "\"big\"");
    EXPECT_NE(error_of(bad).find("power.table[0][1]"), std::string::npos) << error_of(bad);

    bad = kValid;
    bad.replace(bad.find("\"mode\": \"table\""), 15, "\"mode\": \"log\"");
    EXPECT_NE(error_of(bad).find("power.mode"), std::string::npos);

    bad = kValid;
    bad.replace(bad.find("\"eta\": [1.0]"), 12, "\"eta\": [0.5]");
    EXPECT_NE(error_of(bad).find("channel"), std::string::npos);

    EXPECT_NE(error_of(R"({"Q": 4})").find("'S'"), std::string::npos);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(PolicyJson, RoundTripWithBoundary) {
    const SystemConfig cfg = parse_config(kValid);
    ThresholdPolicy tp = greedy_threshold_policy(cfg);
    tp.boundary = BoundaryRecord{2, 1, 0, 0.25};
    const nlohmann::json j = policy_to_json(tp);
    EXPECT_EQ(j["order"], "s-major");
    EXPECT_EQ(policy_from_json(j, cfg), tp);
    tp.boundary.reset();
    EXPECT_TRUE(policy_to_json(tp)["boundary"].is_null());
    EXPECT_EQ(policy_from_json(policy_to_json(tp), cfg), tp);
}

TEST(PolicyJson, RejectsMismatchAndInvalidThresholds) {
    const SystemConfig cfg = parse_config(kValid);
    nlohmann::json j = policy_to_json(greedy_threshold_policy(cfg));
    nlohmann::json wrong = j;
    wrong["Q"] = 5;
    EXPECT_THROW(policy_from_json(wrong, cfg), ConfigError);
    nlohmann::json invalid = j;
    invalid["thresholds"][0] = 3;
    EXPECT_THROW(policy_from_json(invalid, cfg), ConfigError);
}
