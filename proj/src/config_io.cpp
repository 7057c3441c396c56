#include "dpt/config_io.hpp"

#include "dpt/errors.hpp"

#include <fstream>
#include <sstream>

namespace dpt {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError("config field '" + field + "': " + what);
}

const json& member(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing");
    return *it;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
}

double as_real(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

std::vector<double> as_reals(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (size_t k = 0; k < v.size(); ++k) out.push_back(as_real(v[k], path + "[" + std::to_string(k) + "]"));
    return out;
}

std::vector<std::vector<double>> as_matrix(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of rows");
    std::vector<std::vector<double>> out;
    for (size_t k = 0; k < v.size(); ++k) out.push_back(as_reals(v[k], path + "[" + std::to_string(k) + "]"));
    return out;
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

template <class F>
auto wrap(const std::string& path, F&& build) {
    try {
        return build();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    } catch (const std::domain_error& e) {
        fail(path, e.what());
    }
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        size_t line = 1, col = 1;
        for (size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream os;
        os << what << " parse error at line " << line << ", column " << col << ": " << e.what();
        throw ConfigError(os.str());
    }
}

ArrivalChain arrival_from(const json& j) {
    const std::string path = "arrival";
    const int A = as_int(member(j, "A", path), join(path, "A"));
    const std::string mode = as_string(member(j, "mode", path), join(path, "mode"));
    if (mode == "matrix") {
        auto g = as_matrix(member(j, "gamma", path), join(path, "gamma"));
        if (static_cast<int>(g.size()) != A + 1) fail(join(path, "gamma"), "needs A+1 rows");
        return wrap(join(path, "gamma"), [&] { return ArrivalChain(g); });
    }
    if (mode == "zeta_psi") {
        auto zeta = as_reals(member(j, "zeta", path), join(path, "zeta"));
        const int psi = as_int(member(j, "psi", path), join(path, "psi"));
        return wrap(path, [&] { return make_zeta_psi_chain(zeta, psi, A); });
    }
    if (mode == "kappa_pattern") {
        const int pattern = as_int(member(j, "pattern", path), join(path, "pattern"));
        const double kappa = as_real(member(j, "kappa", path), join(path, "kappa"));
        return wrap(path, [&] { return make_kappa_pattern(pattern, kappa, A); });
    }
    fail(join(path, "mode"), "unknown mode '" + mode + "' (matrix, zeta_psi, kappa_pattern)");
}

} // namespace

SystemConfig parse_config(const std::string& text) {
    const json j = parse_json(text, "config");
    if (!j.is_object()) fail("", "top level must be an object");
    const int Q = as_int(member(j, "Q", ""), "Q");
    const int S = as_int(member(j, "S", ""), "S");
    ArrivalChain arrival = arrival_from(member(j, "arrival", ""));

    const json& ch = member(j, "channel", "");
    auto amps = as_reals(member(ch, "amplitudes", "channel"), "channel.amplitudes");
    auto eta = as_reals(member(ch, "eta", "channel"), "channel.eta");
    ChannelModel channel = wrap("channel", [&] { return ChannelModel(amps, eta); });

    const json& pw = member(j, "power", "");
    const std::string mode = as_string(member(pw, "mode", "power"), "power.mode");
    auto power = [&] {
        if (mode == "table") {
            auto t = as_matrix(member(pw, "table", "power"), "power.table");
            return wrap("power.table", [&] { return PowerTable(t); });
        }
        if (mode == "awgn_scaled") {
            auto base = as_reals(member(pw, "base", "power"), "power.base");
            return wrap("power.base", [&] { return PowerTable::awgn_scaled(base, amps); });
        }
        fail("power.mode", "unknown mode '" + mode + "' (table, awgn_scaled)");
    }();
    return wrap("", [&] { return SystemConfig(Q, S, arrival, channel, power); });
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

SystemConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

json policy_to_json(const ThresholdPolicy& tp) {
    json j;
    j["Q"] = tp.dims.Q;
    j["A"] = tp.dims.A;
    j["L"] = tp.dims.L;
    j["S"] = tp.dims.S;
    j["order"] = "s-major";
    j["thresholds"] = tp.thresholds;
    if (tp.boundary)
        j["boundary"] = {{"s", tp.boundary->s}, {"a", tp.boundary->a}, {"iota", tp.boundary->iota}, {"p", tp.boundary->p}};
    else
        j["boundary"] = nullptr;
    return j;
}

ThresholdPolicy policy_from_json(const json& j, const SystemConfig& cfg) {
    ThresholdPolicy tp;
    tp.dims = {as_int(member(j, "Q", ""), "Q"), as_int(member(j, "A", ""), "A"), as_int(member(j, "L", ""), "L"),
               as_int(member(j, "S", ""), "S")};
    if (!(tp.dims == PolicyDims::of(cfg))) fail("Q/A/L/S", "policy dimensions do not match the configuration");
    auto it = j.find("order");
    if (it != j.end() && as_string(*it, "order") != "s-major") fail("order", "only s-major is supported");
    const json& th = member(j, "thresholds", "");
    if (!th.is_array()) fail("thresholds", "expected an array");
    for (size_t k = 0; k < th.size(); ++k) tp.thresholds.push_back(as_int(th[k], "thresholds[" + std::to_string(k) + "]"));
    auto b = j.find("boundary");
    if (b != j.end() && !b->is_null()) {
        tp.boundary = BoundaryRecord{as_int(member(*b, "s", "boundary"), "boundary.s"), as_int(member(*b, "a", "boundary"), "boundary.a"),
                                     as_int(member(*b, "iota", "boundary"), "boundary.iota"),
                                     as_real(member(*b, "p", "boundary"), "boundary.p")};
    }
    wrap("thresholds", [&] { return expand_threshold(tp, cfg); });
    return tp;
}

ThresholdPolicy load_policy(const std::string& path, const SystemConfig& cfg) {
    return policy_from_json(parse_json(read_file(path), "policy"), cfg);
}

} // namespace dpt
