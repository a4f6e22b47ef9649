#include "dbsim/config.hpp"

#include <cmath>

#include <json.hpp>

namespace dbsim {

const char* to_string(DmaKind dma) {
    switch (dma) {
    case DmaKind::Hov: return "HOV";
    case DmaKind::Snr: return "SNR";
    case DmaKind::Slr: return "SLR";
    case DmaKind::Gt: return "GT";
    case DmaKind::Opt: return "OPT";
    }
    return "?";
}

const char* to_string(SchedulerKind sched) {
    return sched == SchedulerKind::EqualShare ? "EqualShare" : "CQBased";
}

DmaKind dma_from_string(const std::string& name) {
    if (name == "HOV") return DmaKind::Hov;
    if (name == "SNR") return DmaKind::Snr;
    if (name == "SLR") return DmaKind::Slr;
    if (name == "GT") return DmaKind::Gt;
    if (name == "OPT") return DmaKind::Opt;
    throw ConfigError("dma", "unknown algorithm '" + name + "' (expected HOV|SNR|SLR|GT|OPT)");
}

SchedulerKind scheduler_from_string(const std::string& name) {
    if (name == "EqualShare") return SchedulerKind::EqualShare;
    if (name == "CQBased") return SchedulerKind::CqBased;
    throw ConfigError("scheduler", "unknown scheduler '" + name + "' (expected EqualShare|CQBased)");
}

ScenarioConfig validate(const ScenarioConfig& config) {
    std::vector<ConfigViolation> violations;
    auto fail = [&](const char* field, const std::string& rule) {
        violations.push_back({field, rule});
    };
    auto positive = [&](const char* field, double value) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            fail(field, "must be strictly positive");
        }
    };

    if (config.grid_side <= 0) {
        fail("grid_side", "must be strictly positive");
    } else if (config.grid_side % 2 == 0) {
        fail("grid_side", "must be odd");
    }
    if (config.users_per_cell <= 0) fail("users_per_cell", "must be strictly positive");
    positive("cell_edge", config.cell_edge);
    positive("bandwidth_hz", config.bandwidth_hz);
    positive("carrier_hz", config.carrier_hz);
    positive("tx_power_watt", config.tx_power_watt);
    positive("drone_height", config.drone_height);
    positive("drone_speed", config.drone_speed);
    positive("max_accel", config.max_accel);
    positive("direction_update_s", config.direction_update_s);
    positive("ras_s", config.ras_s);
    positive("interference_range", config.interference_range);
    positive("mean_reading_s", config.mean_reading_s);
    positive("packet_bits", config.packet_bits);
    positive("los_alpha", config.los_alpha);
    positive("los_beta", config.los_beta);
    positive("gamma_los", config.gamma_los);
    positive("gamma_nlos", config.gamma_nlos);
    positive("duration_s", config.duration_s);
    positive("theta_cap_rad", config.theta_cap_rad);
    positive("opt_profile_budget", config.opt_profile_budget);

    if (config.ras_s > 0.0 && config.direction_update_s > 0.0) {
        const double ratio = config.direction_update_s / config.ras_s;
        const double rounded = std::round(ratio);
        if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
            fail("ras_s", "ras must divide t_m");
        }
    }
    if (config.n_candidates < 3) {
        fail("n_candidates", "must be at least 3");
    } else if (config.n_candidates % 2 == 0) {
        fail("n_candidates", "must be odd");
    }
    if (config.rwp_speed_range[0] <= 0.0) fail("rwp_speed_range", "low end must be strictly positive");
    if (config.rwp_speed_range[0] > config.rwp_speed_range[1]) {
        fail("rwp_speed_range", "range must be ordered low <= high");
    }
    if (config.rwp_pause_range[0] < 0.0) fail("rwp_pause_range", "low end must be nonnegative");
    if (config.rwp_pause_range[0] > config.rwp_pause_range[1]) {
        fail("rwp_pause_range", "range must be ordered low <= high");
    }
    if (config.warmup_discard_s < 0.0 || config.warmup_discard_s >= config.duration_s) {
        fail("warmup_discard_s", "must lie in [0, duration_s)");
    }
    if (config.gt_max_sweeps < 1) fail("gt_max_sweeps", "must be at least 1");
    if (config.path_samples < 1) fail("path_samples", "must be at least 1");

    if (!violations.empty()) {
        throw ConfigError(std::move(violations));
    }
    return config;
}

namespace {

using nlohmann::json;

json config_to_json(const ScenarioConfig& c) {
    return json{
        {"grid_side", c.grid_side},
        {"cell_edge", c.cell_edge},
        {"users_per_cell", c.users_per_cell},
        {"bandwidth_hz", c.bandwidth_hz},
        {"carrier_hz", c.carrier_hz},
        {"tx_power_watt", c.tx_power_watt},
        {"drone_height", c.drone_height},
        {"drone_speed", c.drone_speed},
        {"max_accel", c.max_accel},
        {"direction_update_s", c.direction_update_s},
        {"ras_s", c.ras_s},
        {"interference_range", c.interference_range},
        {"mean_reading_s", c.mean_reading_s},
        {"packet_bits", c.packet_bits},
        {"n_candidates", c.n_candidates},
        {"los_alpha", c.los_alpha},
        {"los_beta", c.los_beta},
        {"a_los_db", c.a_los_db},
        {"a_nlos_db", c.a_nlos_db},
        {"gamma_los", c.gamma_los},
        {"gamma_nlos", c.gamma_nlos},
        {"ue_noise_figure_db", c.ue_noise_figure_db},
        {"rwp_speed_range", c.rwp_speed_range},
        {"rwp_pause_range", c.rwp_pause_range},
        {"duration_s", c.duration_s},
        {"warmup_discard_s", c.warmup_discard_s},
        {"scheduler", to_string(c.scheduler)},
        {"dma", to_string(c.dma)},
        {"gt_max_sweeps", c.gt_max_sweeps},
        {"gt_sequential", c.gt_sequential},
        {"path_samples", c.path_samples},
        {"theta_cap_rad", c.theta_cap_rad},
        {"opt_profile_budget", c.opt_profile_budget},
        {"seed", c.seed},
    };
}

ScenarioConfig config_from_json(const json& j) {
    ScenarioConfig c;
    const json reference = config_to_json(c);
    for (const auto& [key, value] : j.items()) {
        if (!reference.contains(key)) {
            throw ConfigError(key, "unknown configuration key");
        }
        (void)value;
    }
    auto get = [&](const char* key, auto& out) {
        if (j.contains(key)) {
            j.at(key).get_to(out);
        }
    };
    get("grid_side", c.grid_side);
    get("cell_edge", c.cell_edge);
    get("users_per_cell", c.users_per_cell);
    get("bandwidth_hz", c.bandwidth_hz);
    get("carrier_hz", c.carrier_hz);
    get("tx_power_watt", c.tx_power_watt);
    get("drone_height", c.drone_height);
    get("drone_speed", c.drone_speed);
    get("max_accel", c.max_accel);
    get("direction_update_s", c.direction_update_s);
    get("ras_s", c.ras_s);
    get("interference_range", c.interference_range);
    get("mean_reading_s", c.mean_reading_s);
    get("packet_bits", c.packet_bits);
    get("n_candidates", c.n_candidates);
    get("los_alpha", c.los_alpha);
    get("los_beta", c.los_beta);
    get("a_los_db", c.a_los_db);
    get("a_nlos_db", c.a_nlos_db);
    get("gamma_los", c.gamma_los);
    get("gamma_nlos", c.gamma_nlos);
    get("ue_noise_figure_db", c.ue_noise_figure_db);
    get("rwp_speed_range", c.rwp_speed_range);
    get("rwp_pause_range", c.rwp_pause_range);
    get("duration_s", c.duration_s);
    get("warmup_discard_s", c.warmup_discard_s);
    if (j.contains("scheduler")) c.scheduler = scheduler_from_string(j.at("scheduler").get<std::string>());
    if (j.contains("dma")) c.dma = dma_from_string(j.at("dma").get<std::string>());
    get("gt_max_sweeps", c.gt_max_sweeps);
    get("gt_sequential", c.gt_sequential);
    get("path_samples", c.path_samples);
    get("theta_cap_rad", c.theta_cap_rad);
    get("opt_profile_budget", c.opt_profile_budget);
    get("seed", c.seed);
    return c;
}

} // namespace

ScenarioConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("<file>", "top level must be a JSON object");
    }
    return config_from_json(j);
}

std::string config_to_json_text(const ScenarioConfig& config) {
    return config_to_json(config).dump(2) + "\n";
}

} // namespace dbsim
