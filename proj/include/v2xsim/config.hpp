#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace v2xsim {

/// Full scenario parameterization. All values are plain scalars loaded from a
/// flat JSON object; keys match the field names exactly.
struct ScenarioConfig {
    double p_b_max = 0.0;              ///< MBS downlink power budget [W]
    double p_k_max = 0.0;              ///< per-DBS downlink power budget [W]
    int num_vehicles = 0;              ///< U
    double n0_dbm_hz = 0.0;            ///< noise density [dBm/Hz]
    double r_b = 0.0;                  ///< MBS coverage radius [m]
    double r_k = 0.0;                  ///< DBS coverage radius [m]
    double fc_ghz = 0.0;               ///< carrier frequency [GHz]
    int num_channels = 0;              ///< N
    double channel_bandwidth_hz = 180000.0;
    double epsilon_m = 0.0;            ///< DBSCAN distance threshold [m]
    int min_points = 0;                ///< DBSCAN MinPoints
    double theta_kmh = 10.0;           ///< max pairwise speed difference [km/h]
    double alpha_f = 0.8;              ///< far-user power coefficient
    double alpha_n = 0.2;              ///< near-user power coefficient
    double p_tol = 1.0;                ///< SIC margin threshold (linear SINR difference)
    double dbs_altitude_m = 10.0;
    double speed_min_kmh = 0.0;
    double speed_max_kmh = 0.0;
    double arena_side_m = 1000.0;
    double prediction_horizon_s = 5.0;
    double prediction_cell_m = 50.0;
    std::uint64_t seed = 0;
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& msg) {
    throw std::invalid_argument("config: " + msg);
}

} // namespace detail

inline void validate(const ScenarioConfig& c) {
    using detail::config_error;
    auto require_positive = [](const char* key, double v) {
        if (!(v > 0.0)) {
            std::ostringstream os;
            os << "config: " << key << " = " << v << " violates '" << key
               << " must be strictly positive'";
            throw std::invalid_argument(os.str());
        }
    };
    require_positive("p_b_max", c.p_b_max);
    require_positive("p_k_max", c.p_k_max);
    require_positive("r_b", c.r_b);
    require_positive("r_k", c.r_k);
    require_positive("fc_ghz", c.fc_ghz);
    require_positive("channel_bandwidth_hz", c.channel_bandwidth_hz);
    require_positive("epsilon_m", c.epsilon_m);
    require_positive("theta_kmh", c.theta_kmh);
    require_positive("alpha_f", c.alpha_f);
    require_positive("alpha_n", c.alpha_n);
    require_positive("dbs_altitude_m", c.dbs_altitude_m);
    require_positive("speed_min_kmh", c.speed_min_kmh);
    require_positive("speed_max_kmh", c.speed_max_kmh);
    require_positive("arena_side_m", c.arena_side_m);
    require_positive("prediction_cell_m", c.prediction_cell_m);
    if (c.num_vehicles < 0)
        config_error("num_vehicles must be nonnegative");
    if (c.num_channels < 1)
        config_error("num_channels must be at least 1");
    if (c.min_points < 1)
        config_error("min_points must be at least 1");
    if (c.p_tol < 0.0)
        config_error("p_tol must be nonnegative");
    if (c.prediction_horizon_s < 0.0)
        config_error("prediction_horizon_s must be nonnegative");
    if (std::abs(c.alpha_f + c.alpha_n - 1.0) > 1e-12)
        config_error("alpha_f + alpha_n must equal 1");
    if (!(c.alpha_f > c.alpha_n))
        config_error("alpha_f must exceed alpha_n");
    if (!(c.speed_min_kmh <= c.speed_max_kmh))
        config_error("speed_min_kmh must not exceed speed_max_kmh");
    if (!(c.r_k <= c.r_b))
        config_error("r_k must not exceed r_b");
}

/// Parses a flat JSON object of scalars into a validated config.
/// Unknown keys are rejected; defaults exist only for the documented
/// gap-filling constants, every other key is required.
inline ScenarioConfig load_config(const std::string& text) {
    using detail::config_error;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        config_error(std::string("parse failure: ") + e.what());
    }
    if (!doc.is_object())
        config_error("document must be a JSON object");

    static const std::set<std::string> known = {
        "p_b_max", "p_k_max", "num_vehicles", "n0_dbm_hz", "r_b", "r_k",
        "fc_ghz", "num_channels", "channel_bandwidth_hz", "epsilon_m",
        "min_points", "theta_kmh", "alpha_f", "alpha_n", "p_tol",
        "dbs_altitude_m", "speed_min_kmh", "speed_max_kmh", "arena_side_m",
        "prediction_horizon_s", "prediction_cell_m", "seed"};
    for (const auto& [key, value] : doc.items()) {
        if (!known.count(key))
            config_error("unknown key '" + key + "'");
        (void)value;
    }

    ScenarioConfig c;
    auto required = [&](const char* key) -> const nlohmann::json& {
        if (!doc.contains(key))
            config_error(std::string("missing required key '") + key + "'");
        return doc.at(key);
    };
    auto optional_num = [&](const char* key, double fallback) {
        return doc.contains(key) ? doc.at(key).get<double>() : fallback;
    };

    try {
        c.p_b_max = required("p_b_max").get<double>();
        c.p_k_max = required("p_k_max").get<double>();
        c.num_vehicles = required("num_vehicles").get<int>();
        c.n0_dbm_hz = required("n0_dbm_hz").get<double>();
        c.r_b = required("r_b").get<double>();
        c.r_k = required("r_k").get<double>();
        c.fc_ghz = required("fc_ghz").get<double>();
        c.num_channels = required("num_channels").get<int>();
        c.epsilon_m = required("epsilon_m").get<double>();
        c.min_points = required("min_points").get<int>();
        c.speed_min_kmh = required("speed_min_kmh").get<double>();
        c.speed_max_kmh = required("speed_max_kmh").get<double>();
        c.seed = required("seed").get<std::uint64_t>();

        c.channel_bandwidth_hz = optional_num("channel_bandwidth_hz", c.channel_bandwidth_hz);
        c.theta_kmh = optional_num("theta_kmh", c.theta_kmh);
        c.alpha_f = optional_num("alpha_f", c.alpha_f);
        c.alpha_n = optional_num("alpha_n", c.alpha_n);
        c.p_tol = optional_num("p_tol", c.p_tol);
        c.dbs_altitude_m = optional_num("dbs_altitude_m", c.dbs_altitude_m);
        c.arena_side_m = optional_num("arena_side_m", c.arena_side_m);
        c.prediction_horizon_s = optional_num("prediction_horizon_s", c.prediction_horizon_s);
        c.prediction_cell_m = optional_num("prediction_cell_m", c.prediction_cell_m);
    } catch (const nlohmann::json::type_error& e) {
        config_error(std::string("type error: ") + e.what());
    }

    validate(c);
    return c;
}

inline std::string to_json(const ScenarioConfig& c) {
    nlohmann::json doc;
    doc["p_b_max"] = c.p_b_max;
    doc["p_k_max"] = c.p_k_max;
    doc["num_vehicles"] = c.num_vehicles;
    doc["n0_dbm_hz"] = c.n0_dbm_hz;
    doc["r_b"] = c.r_b;
    doc["r_k"] = c.r_k;
    doc["fc_ghz"] = c.fc_ghz;
    doc["num_channels"] = c.num_channels;
    doc["channel_bandwidth_hz"] = c.channel_bandwidth_hz;
    doc["epsilon_m"] = c.epsilon_m;
    doc["min_points"] = c.min_points;
    doc["theta_kmh"] = c.theta_kmh;
    doc["alpha_f"] = c.alpha_f;
    doc["alpha_n"] = c.alpha_n;
    doc["p_tol"] = c.p_tol;
    doc["dbs_altitude_m"] = c.dbs_altitude_m;
    doc["speed_min_kmh"] = c.speed_min_kmh;
    doc["speed_max_kmh"] = c.speed_max_kmh;
    doc["arena_side_m"] = c.arena_side_m;
    doc["prediction_horizon_s"] = c.prediction_horizon_s;
    doc["prediction_cell_m"] = c.prediction_cell_m;
    doc["seed"] = c.seed;
    return doc.dump(2);
}

} // namespace v2xsim
