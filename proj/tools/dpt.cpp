// dpt: delay-power tradeoff command line.
//
//   dpt curve          --config c.json [--budget W] [--emit-policy f.json] [--emit-all-deterministic]
//                      [--sampled N --seed S] --out DIR
//   dpt lp             --config c.json --budget W [--lp-dump f.lp] --out DIR
//   dpt simulate       --config c.json [--policy f.json] --seed S --N N [--statistics-free] [--trajectory] --out DIR
//   dpt value-iterate  --config c.json --mu MU --out DIR
//
// Exit codes: 0 ok, 2 configuration or usage error, 3 infeasible budget, 4 numerical failure.

#include "dpt/config_io.hpp"
#include "dpt/curve.hpp"
#include "dpt/errors.hpp"
#include "dpt/lagrangian.hpp"
#include "dpt/lp.hpp"
#include "dpt/mrp.hpp"
#include "dpt/simulate.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dpt;

namespace {

enum Exit { kOk = 0, kConfig = 2, kInfeasible = 3, kNumerical = 4 };

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(num(v)); }

struct Run {
    std::string command;
    std::string config_path;
    fs::path out;
    std::optional<std::uint64_t> seed;
    std::vector<std::pair<std::string, std::string>> files; // name, content

    void emit(const std::string& name, const std::string& content) {
        std::ofstream f(out / name, std::ios::binary);
        if (!f) throw ConfigError("cannot write '" + (out / name).string() + "'");
        f << content;
        files.emplace_back(name, content);
    }

    void manifest() {
        json m;
        m["command"] = command;
        m["config"] = config_path;
        m["config_sha256"] = sha256_hex(read_file(config_path));
        m["output_dir"] = out.string();
        m["seed"] = seed ? json(*seed) : json(nullptr);
        m["files"] = json::array();
        for (const auto& [name, content] : files)
            m["files"].push_back({{"name", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
        std::ofstream(out / "manifest.json", std::ios::binary) << m.dump(2) << '\n';
    }
};

std::string curve_csv(const std::vector<PowerDelay>& pts) {
    std::ostringstream os;
    os << "P_watts,D_slots,vertex_index\n";
    for (size_t k = 0; k < pts.size(); ++k) os << num(pts[k].power) << ',' << num(pts[k].delay) << ',' << k << '\n';
    return os.str();
}

int cmd_curve(Run& run, const SystemConfig& cfg, std::optional<double> budget, const std::string& emit_policy,
              bool all_deterministic, std::int64_t sampled) {
    TradeoffCurve curve;
    if (sampled > 0) {
        curve = trace_curve(cfg, sampled_evaluator(cfg, run.seed.value_or(1), sampled));
        curve.provenance = Provenance::Sampled;
    } else {
        curve = trace_curve(cfg);
    }
    std::vector<PowerDelay> pts;
    for (const auto& v : curve.vertices) pts.push_back({v.power, v.delay});
    check_curve_shape(pts);
    run.emit("curve.csv", curve_csv(pts));

    json pj;
    pj["provenance"] = curve.provenance == Provenance::Analytic ? "analytic" : "sampled";
    pj["evaluations"] = curve.evaluations;
    pj["skipped_multichain"] = curve.skipped;
    pj["vertices"] = json::array();
    for (size_t k = 0; k < curve.vertices.size(); ++k) {
        const auto& v = curve.vertices[k];
        pj["vertices"].push_back({{"index", k}, {"P_watts", v.power}, {"D_slots", v.delay}, {"policy", policy_to_json(v.policy)},
                                  {"co_optimal", v.co_optimal.size()}});
    }
    run.emit("policies.json", pj.dump(2) + "\n");

    if (all_deterministic) {
        const auto all = all_deterministic_points(cfg);
        std::ostringstream os;
        os << "P_watts,D_slots\n";
        for (const auto& p : all) os << num(p.power) << ',' << num(p.delay) << '\n';
        run.emit("deterministic.csv", os.str());
    }

    ThresholdPolicy chosen = curve.vertices.back().policy;
    if (budget) {
        BudgetPolicy bp;
        try {
            bp = policy_for_budget(curve, *budget, cfg);
        } catch (const InfeasibleBudget& e) {
            run.manifest();
            std::cerr << "dpt: " << e.what() << '\n';
            return kInfeasible;
        }
        json bj{{"budget_watts", *budget}, {"P_watts", bp.power}, {"D_slots", bp.delay}, {"eps", bp.eps},
                {"segment", bp.segment}, {"policy", policy_to_json(bp.thresholds)}};
        run.emit("budget.json", bj.dump(2) + "\n");
        std::cout << "budget " << num(*budget) << " W: P=" << num(bp.power) << " W, D=" << num(bp.delay) << " slots\n";
        chosen = bp.thresholds;
    }
    if (!emit_policy.empty()) run.emit(emit_policy, policy_to_json(chosen).dump(2) + "\n");
    std::cout << curve.vertices.size() << " vertices, P in [" << num(pts.front().power) << ", " << num(pts.back().power) << "] W\n";
    return kOk;
}

int cmd_lp(Run& run, const SystemConfig& cfg, double budget, const std::string& lp_dump) {
    const OccupationLP lp = build_lp(cfg, budget);
    if (!lp_dump.empty()) run.emit(lp_dump, to_lp_format(lp, cfg));
    const LPSolution sol = solve_lp(lp);
    json j;
    j["budget_watts"] = budget;
    if (sol.status == LPStatus::Infeasible) {
        j["status"] = "infeasible";
        run.emit("lp.json", j.dump(2) + "\n");
        std::cerr << "dpt: budget " << num(budget) << " W is below the minimum achievable power\n";
        return kInfeasible;
    }
    j["status"] = "optimal";
    j["D_slots"] = jnum(sol.objective);
    j["P_watts"] = sol.power;
    j["power_binding"] = sol.binding_power;
    j["multiplier_slots_per_watt"] = sol.power_multiplier;
    j["balance_residual"] = sol.balance_residual;
    j["randomized_states"] = sol.randomized_states;
    j["canonicalized"] = sol.canonicalized;
    const Policy f = recover_policy(sol, cfg);
    j["policy"] = json::array();
    for (int x = 0; x < cfg.num_states(); ++x) {
        const State st = cfg.state(x);
        std::vector<double> row(cfg.S() + 1);
        for (int s = 0; s <= cfg.S(); ++s) row[s] = f(x, s);
        j["policy"].push_back({{"q", st.q}, {"a", st.a}, {"iota", st.iota}, {"f", row}});
    }
    run.emit("lp.json", j.dump(2) + "\n");
    std::cout << "budget " << num(budget) << " W: D=" << num(sol.objective) << " slots, P=" << num(sol.power) << " W\n";
    return kOk;
}

int cmd_simulate(Run& run, const SystemConfig& cfg, const std::string& policy_path, std::int64_t N, bool stats_free,
                 bool trajectory) {
    const ThresholdPolicy tp = policy_path.empty() ? greedy_threshold_policy(cfg) : load_policy(policy_path, cfg);
    const Policy f = expand_threshold(tp, cfg);
    SimOptions opt;
    opt.statistics_free = stats_free;
    std::ostringstream traj;
    if (trajectory) opt.trajectory = &traj;
    const SimReport r = dpt::run(f, cfg, *run.seed, N, opt);
    if (trajectory) run.emit("trajectory.csv", traj.str());

    double ap = std::numeric_limits<double>::quiet_NaN(), ad = ap;
    try {
        const SteadyStateReport a = steady_state(f, cfg, State{0, 0, 0});
        ap = a.avg_power;
        ad = a.avg_delay;
    } catch (const MultichainAmbiguity&) {
    }
    auto z = [](double x, double y, double se) { return std::abs(x - y) / se; };
    std::ostringstream os;
    os << "metric,analytic,sampled,stderr,z\n";
    os << "P_watts," << num(ap) << ',' << num(r.power) << ',' << num(r.power_stderr) << ',' << num(z(ap, r.power, r.power_stderr)) << '\n';
    os << "D_slots," << num(ad) << ',' << num(r.delay) << ',' << num(r.delay_stderr) << ',' << num(z(ad, r.delay, r.delay_stderr)) << '\n';
    os << "alpha," << num(cfg.arrival().alpha()) << ',' << num(r.arrival_mean) << ",nan,nan\n";
    run.emit("simulate.csv", os.str());
    std::cout << os.str();
    return kOk;
}

int cmd_value_iterate(Run& run, const SystemConfig& cfg, double mu) {
    const auto [dp, v] = value_iterate(cfg, mu);
    const SteadyStateReport r = steady_state(dp.to_policy(), cfg, State{0, 0, 0});
    const double viol = convexity_violation(v);
    double scale = 0.0;
    for (double x : v.nu) scale = std::max(scale, std::abs(x));
    json j;
    j["mu_slots_per_watt"] = mu;
    j["gain"] = v.gain;
    j["sweeps"] = v.sweeps;
    j["P_watts"] = r.avg_power;
    j["D_slots"] = jnum(r.avg_delay);
    j["convexity_violation"] = viol;
    j["convex_in_q"] = viol <= 1e-9 * std::max(1.0, scale);
    try {
        const ThresholdPolicy tp = extract_thresholds(dp, cfg);
        j["policy"] = policy_to_json(tp);
        const OrderCheck oc = check_threshold_order(tp, cfg);
        j["threshold_order_holds"] = oc.holds;
        j["order_condition_satisfied"] = oc.condition_satisfied;
    } catch (const NotThresholdForm&) {
        j["policy"] = nullptr;
        j["rates"] = dp.rate;
    }
    run.emit("value_iteration.json", j.dump(2) + "\n");
    std::cout << "mu=" << num(mu) << ": P=" << num(r.avg_power) << " W, D=" << num(r.avg_delay) << " slots, " << v.sweeps
              << " sweeps\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal delay-power tradeoff for a Markov-modulated single link"};
    app.require_subcommand(1);

    std::string config, out = "out", emit_policy, lp_dump, policy_path;
    double budget = 0.0, mu = 0.0;
    std::int64_t N = 1000000, sampled = 0;
    std::uint64_t seed = 1;
    bool all_det = false, stats_free = false, trajectory = false;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
        c->add_option("--out", out, "output directory");
    };
    auto* curve = app.add_subcommand("curve", "trace the optimal tradeoff curve");
    add_common(curve);
    auto* curve_budget = curve->add_option("--budget", budget, "power budget in watts");
    curve->add_option("--emit-policy", emit_policy, "write the budget (or delay-optimal) policy to this file in the output directory");
    curve->add_flag("--emit-all-deterministic", all_det, "write (P, D) of every deterministic threshold policy");
    curve->add_option("--sampled", sampled, "trace with the trajectory-sampling evaluator over this many slots")->check(CLI::PositiveNumber);
    auto* curve_seed = curve->add_option("--seed", seed, "simulation seed for --sampled");

    auto* lp = app.add_subcommand("lp", "solve the occupation-measure linear program");
    add_common(lp);
    lp->add_option("--budget", budget, "power budget in watts")->required();
    lp->add_option("--lp-dump", lp_dump, "also write the LP in CPLEX LP format to this file");

    auto* sim = app.add_subcommand("simulate", "Monte-Carlo validation of a policy");
    add_common(sim);
    sim->add_option("--policy", policy_path, "threshold policy JSON (default: greedy drain)");
    sim->add_option("--seed", seed, "simulation seed");
    sim->add_option("--N", N, "number of slots")->check(CLI::PositiveNumber);
    sim->add_flag("--statistics-free", stats_free, "use the empirical arrival mean in the delay estimate");
    sim->add_flag("--trajectory", trajectory, "write trajectory.csv");

    auto* vi = app.add_subcommand("value-iterate", "relative value iteration on D + mu P");
    add_common(vi);
    vi->add_option("--mu", mu, "Lagrange multiplier in slots per watt")->required()->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    Run run;
    run.config_path = config;
    run.out = out;
    try {
        const SystemConfig cfg = load_config(config);
        fs::create_directories(run.out);
        int code = kOk;
        if (*curve) {
            run.command = "curve";
            if (sampled > 0 || *curve_seed) run.seed = seed;
            code = cmd_curve(run, cfg, *curve_budget ? std::optional<double>(budget) : std::nullopt, emit_policy, all_det, sampled);
            if (code != kOk) return code;
        } else if (*lp) {
            run.command = "lp";
            code = cmd_lp(run, cfg, budget, lp_dump);
        } else if (*sim) {
            run.command = "simulate";
            run.seed = seed;
            code = cmd_simulate(run, cfg, policy_path, N, stats_free, trajectory);
        } else {
            run.command = "value-iterate";
            code = cmd_value_iterate(run, cfg, mu);
        }
        run.manifest();
        return code;
    } catch (const InfeasibleBudget& e) {
        std::cerr << "dpt: " << e.what() << '\n';
        return kInfeasible;
    } catch (const GuardError& e) {
        std::cerr << "dpt: " << e.what() << '\n';
        return kConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "dpt: " << e.what() << '\n';
        return kConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "dpt: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "dpt: numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
}
