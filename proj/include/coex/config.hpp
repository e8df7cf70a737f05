#pragma once
#include <fstream>
#include <sstream>
#include <string>

#include "coex/errors.hpp"
#include "coex/types.hpp"
#include "json.hpp"

namespace coex {

// Named channel-width conveniences: each maps to a PHY rate and a feedback
// tone count. Width enters the model only through these two numbers.
struct BandwidthPreset {
    double rate_R;
    int n_sc;
};

inline BandwidthPreset bandwidth_preset(int mhz) {
    switch (mhz) {
        case 20: return {60.0, 242};
        case 80: return {120.0, 996};
        case 160: return {160.0, 1992};
        default: break;
    }
    throw ConfigError("bandwidth_mhz", "supported presets are 20, 80 and 160");
}

namespace detail {

inline void expect_object(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
}

inline double as_number(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    return j.get<double>();
}

inline int as_int(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
    return j.get<int>();
}

inline bool as_bool(const nlohmann::json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError(path, "expected a boolean");
    return j.get<bool>();
}

inline std::string as_string(const nlohmann::json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

inline void parse_edca(const nlohmann::json& j, EdcaClass& e, const std::string& path) {
    if (j.is_string()) {
        try {
            e = edca_by_name(j.get<std::string>());
        } catch (const InvalidParameter& err) {
            throw ConfigError(path, err.what());
        }
        return;
    }
    expect_object(j, path);
    for (const auto& [key, value] : j.items()) {
        if (key == "cw_min")
            e.cw_min = as_int(value, path + ".cw_min");
        else if (key == "cw_max")
            e.cw_max = as_int(value, path + ".cw_max");
        else if (key == "aifs")
            e.aifs = as_int(value, path + ".aifs");
        else if (key == "retry_limit")
            e.retry_limit_L = as_int(value, path + ".retry_limit");
        else
            throw ConfigError(path + "." + key, "unknown field");
    }
}

inline void parse_antenna(const nlohmann::json& j, SensingProfile& s, const std::string& path) {
    if (j.is_string()) {
        const std::string v = j.get<std::string>();
        const size_t x = v.find('x');
        if (x == std::string::npos)
            throw ConfigError(path, "expected \"TXxRX\", e.g. \"4x4\"");
        try {
            s.n_tx = std::stoi(v.substr(0, x));
            s.n_rx = std::stoi(v.substr(x + 1));
        } catch (const std::exception&) {
            throw ConfigError(path, "expected \"TXxRX\", e.g. \"4x4\"");
        }
        return;
    }
    if (j.is_array() && j.size() == 2) {
        s.n_tx = as_int(j[0], path + "[0]");
        s.n_rx = as_int(j[1], path + "[1]");
        return;
    }
    throw ConfigError(path, "expected \"TXxRX\" or [tx, rx]");
}

inline void parse_population(const nlohmann::json& j, PopulationMix& p, const std::string& path) {
    expect_object(j, path);
    for (const auto& [key, value] : j.items()) {
        if (key == "n_bf_aps")
            p.n_bf_aps = as_int(value, path + ".n_bf_aps");
        else if (key == "n_ax_aps")
            p.n_ax_aps = as_int(value, path + ".n_ax_aps");
        else if (key == "stas_per_bf")
            p.stas_per_bf = as_int(value, path + ".stas_per_bf");
        else if (key == "stas_per_ax")
            p.stas_per_ax = as_int(value, path + ".stas_per_ax");
        else if (key == "edca_bf")
            parse_edca(value, p.edca_bf, path + ".edca_bf");
        else if (key == "edca_ax")
            parse_edca(value, p.edca_ax, path + ".edca_ax");
        else
            throw ConfigError(path + "." + key, "unknown field");
    }
}

inline void parse_timing(const nlohmann::json& j, MacTiming& t, const std::string& path) {
    expect_object(j, path);
    for (const auto& [key, value] : j.items()) {
        if (key == "sigma")
            t.sigma = as_number(value, path + ".sigma");
        else if (key == "sifs")
            t.sifs = as_number(value, path + ".sifs");
        else if (key == "difs")
            t.difs = as_number(value, path + ".difs");
        else if (key == "phy_header")
            t.phy_header = as_number(value, path + ".phy_header");
        else if (key == "ack_bits")
            t.ack_bits = as_number(value, path + ".ack_bits");
        else if (key == "rate_R" || key == "rate")
            t.rate_R = as_number(value, path + "." + key);
        else if (key == "rate_Rmin")
            t.rate_Rmin = as_number(value, path + ".rate_Rmin");
        else if (key == "txop_limit")
            t.txop_limit = as_number(value, path + ".txop_limit");
        else
            throw ConfigError(path + "." + key, "unknown field");
    }
}

inline void parse_traffic(const nlohmann::json& j, AxTrafficProfile& t, const std::string& path) {
    expect_object(j, path);
    for (const auto& [key, value] : j.items()) {
        if (key == "msdu_bytes")
            t.msdu_bits = 8 * as_int(value, path + ".msdu_bytes");
        else if (key == "msdu_bits")
            t.msdu_bits = as_int(value, path + ".msdu_bits");
        else if (key == "mac_header_bytes")
            t.mac_header_bits = 8 * as_int(value, path + ".mac_header_bytes");
        else if (key == "mac_header_bits")
            t.mac_header_bits = as_int(value, path + ".mac_header_bits");
        else if (key == "ampdu_count")
            t.ampdu_count = as_int(value, path + ".ampdu_count");
        else
            throw ConfigError(path + "." + key, "unknown field");
    }
}

inline void parse_sensing(const nlohmann::json& j, SensingProfile& s, const std::string& path) {
    expect_object(j, path);
    for (const auto& [key, value] : j.items()) {
        if (key == "n_tx")
            s.n_tx = as_int(value, path + ".n_tx");
        else if (key == "n_rx")
            s.n_rx = as_int(value, path + ".n_rx");
        else if (key == "antenna")
            parse_antenna(value, s, path + ".antenna");
        else if (key == "n_sc")
            s.n_sc = as_int(value, path + ".n_sc");
        else if (key == "n_b")
            s.n_b = as_int(value, path + ".n_b");
        else if (key == "n_sta")
            s.n_sta_participants_N = as_int(value, path + ".n_sta");
        else if (key == "t_polling")
            s.t_polling = as_number(value, path + ".t_polling");
        else if (key == "t_cts")
            s.t_cts = as_number(value, path + ".t_cts");
        else if (key == "t_ndpa")
            s.t_ndpa = as_number(value, path + ".t_ndpa");
        else if (key == "t_ndp")
            s.t_ndp = as_number(value, path + ".t_ndp");
        else if (key == "t_frame") {
            const double v = as_number(value, path + ".t_frame");
            s.t_polling = s.t_cts = s.t_ndpa = s.t_ndp = v;
        } else if (key == "report_phy_header")
            s.report_phy_header = as_bool(value, path + ".report_phy_header");
        else if (key == "uplink_sounding")
            s.uplink_sounding = as_bool(value, path + ".uplink_sounding");
        else if (key == "t_tf")
            s.t_tf = as_number(value, path + ".t_tf");
        else
            throw ConfigError(path + "." + key, "unknown field");
    }
}

}  // namespace detail

// Build a ScenarioConfig from a JSON document. Omitted fields keep the
// documented defaults; unknown fields are rejected with their path.
inline ScenarioConfig config_from_json(const nlohmann::json& root) {
    detail::expect_object(root, "config");
    ScenarioConfig cfg;

    // Apply the bandwidth preset first so explicit rate/tone fields override.
    if (root.contains("bandwidth_mhz")) {
        const BandwidthPreset bw =
            bandwidth_preset(detail::as_int(root["bandwidth_mhz"], "bandwidth_mhz"));
        cfg.timing.rate_R = bw.rate_R;
        cfg.sensing.n_sc = bw.n_sc;
    }

    bool have_interval = false, have_seeds = false;
    for (const auto& [key, value] : root.items()) {
        if (key == "bandwidth_mhz") {
            continue;  // handled above
        } else if (key == "population") {
            detail::parse_population(value, cfg.population, "population");
        } else if (key == "timing") {
            detail::parse_timing(value, cfg.timing, "timing");
        } else if (key == "traffic") {
            detail::parse_traffic(value, cfg.traffic, "traffic");
        } else if (key == "sensing") {
            detail::parse_sensing(value, cfg.sensing, "sensing");
        } else if (key == "arrival_mode") {
            const std::string v = detail::as_string(value, "arrival_mode");
            if (v == "continuous")
                cfg.arrival_mode = ArrivalMode::continuous;
            else if (v == "periodic")
                cfg.arrival_mode = ArrivalMode::periodic;
            else if (v == "poisson")
                cfg.arrival_mode = ArrivalMode::poisson;
            else
                throw ConfigError("arrival_mode", "expected continuous, periodic or poisson");
        } else if (key == "interval_ms" || key == "interval_us") {
            if (have_interval)
                throw ConfigError(key, "interval given twice (interval_ms and interval_us)");
            have_interval = true;
            const double v = detail::as_number(value, key);
            cfg.interval_us = key == "interval_ms" ? v * 1e3 : v;
        } else if (key == "startup_jitter_us") {
            cfg.startup_jitter_us = detail::as_number(value, "startup_jitter_us");
        } else if (key == "duration_s") {
            cfg.duration_s = detail::as_number(value, "duration_s");
        } else if (key == "seeds") {
            if (have_seeds) throw ConfigError("seeds", "seeds given twice (seeds and seed_count)");
            have_seeds = true;
            if (!value.is_array()) throw ConfigError("seeds", "expected an array of integers");
            cfg.seeds.clear();
            for (size_t i = 0; i < value.size(); ++i)
                cfg.seeds.push_back(static_cast<std::uint64_t>(
                    detail::as_int(value[i], "seeds[" + std::to_string(i) + "]")));
        } else if (key == "seed_count") {
            if (have_seeds)
                throw ConfigError("seed_count", "seeds given twice (seeds and seed_count)");
            have_seeds = true;
            const int n = detail::as_int(value, "seed_count");
            if (n < 1) throw ConfigError("seed_count", "must be >= 1");
            cfg.seeds.clear();
            for (int i = 1; i <= n; ++i) cfg.seeds.push_back(static_cast<std::uint64_t>(i));
        } else if (key == "mode") {
            const std::string v = detail::as_string(value, "mode");
            if (v == "analytic")
                cfg.mode = RunMode::analytic;
            else if (v == "sim")
                cfg.mode = RunMode::sim;
            else if (v == "both")
                cfg.mode = RunMode::both;
            else
                throw ConfigError("mode", "expected analytic, sim or both");
        } else {
            throw ConfigError(key, "unknown field");
        }
    }
    cfg.validate();
    return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path, std::string("JSON parse error: ") + e.what());
    }
    return config_from_json(root);
}

// Serialize the fully resolved configuration (embedded in JSON outputs so a
// result file identifies the exact experiment that produced it).
inline nlohmann::json config_to_json(const ScenarioConfig& cfg) {
    nlohmann::json j;
    j["population"] = {{"n_bf_aps", cfg.population.n_bf_aps},
                       {"n_ax_aps", cfg.population.n_ax_aps},
                       {"stas_per_bf", cfg.population.stas_per_bf},
                       {"stas_per_ax", cfg.population.stas_per_ax},
                       {"edca_bf",
                        {{"cw_min", cfg.population.edca_bf.cw_min},
                         {"cw_max", cfg.population.edca_bf.cw_max},
                         {"aifs", cfg.population.edca_bf.aifs},
                         {"retry_limit", cfg.population.edca_bf.retry_limit_L}}},
                       {"edca_ax",
                        {{"cw_min", cfg.population.edca_ax.cw_min},
                         {"cw_max", cfg.population.edca_ax.cw_max},
                         {"aifs", cfg.population.edca_ax.aifs},
                         {"retry_limit", cfg.population.edca_ax.retry_limit_L}}}};
    j["timing"] = {{"sigma", cfg.timing.sigma},
                   {"sifs", cfg.timing.sifs},
                   {"difs", cfg.timing.difs},
                   {"phy_header", cfg.timing.phy_header},
                   {"ack_bits", cfg.timing.ack_bits},
                   {"rate_R", cfg.timing.rate_R},
                   {"rate_Rmin", cfg.timing.rate_Rmin},
                   {"txop_limit", cfg.timing.txop_limit}};
    j["traffic"] = {{"msdu_bits", cfg.traffic.msdu_bits},
                    {"mac_header_bits", cfg.traffic.mac_header_bits},
                    {"ampdu_count", cfg.traffic.ampdu_count}};
    j["sensing"] = {{"n_tx", cfg.sensing.n_tx},
                    {"n_rx", cfg.sensing.n_rx},
                    {"n_sc", cfg.sensing.n_sc},
                    {"n_b", cfg.sensing.n_b},
                    {"n_sta", cfg.sensing.n_sta_participants_N},
                    {"t_polling", cfg.sensing.t_polling},
                    {"t_cts", cfg.sensing.t_cts},
                    {"t_ndpa", cfg.sensing.t_ndpa},
                    {"t_ndp", cfg.sensing.t_ndp},
                    {"report_phy_header", cfg.sensing.report_phy_header},
                    {"uplink_sounding", cfg.sensing.uplink_sounding},
                    {"t_tf", cfg.sensing.t_tf}};
    j["arrival_mode"] = to_string(cfg.arrival_mode);
    j["interval_us"] = cfg.interval_us;
    j["startup_jitter_us"] = cfg.startup_jitter_us;
    j["duration_s"] = cfg.duration_s;
    j["seeds"] = cfg.seeds;
    j["mode"] = to_string(cfg.mode);
    return j;
}

}  // namespace coex
