#include "dbsim/channel.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>

namespace dbsim {

namespace {
std::atomic<std::uint64_t> g_clamp_count{0};
}

std::uint64_t channel_clamp_count() { return g_clamp_count.load(std::memory_order_relaxed); }
void reset_channel_clamp_count() { g_clamp_count.store(0, std::memory_order_relaxed); }

double los_probability(double omega_deg, double alpha, double beta) {
    return 1.0 / (1.0 + alpha * std::exp(-beta * (omega_deg - alpha)));
}

double path_loss_db(double distance_m, PathType path, const ScenarioConfig& config) {
    if (distance_m < 1.0) {
        distance_m = 1.0; // reference distance; never extrapolated below
        g_clamp_count.fetch_add(1, std::memory_order_relaxed);
    }
    const double a = path == PathType::Los ? config.a_los_db : config.a_nlos_db;
    const double gamma = path == PathType::Los ? config.gamma_los : config.gamma_nlos;
    return a + 10.0 * gamma * std::log10(distance_m);
}

double received_power_watt(double allocated_hz, double distance_m, PathType path,
                           const ScenarioConfig& config) {
    if (allocated_hz <= 0.0) {
        return 0.0;
    }
    const double loss_db = path_loss_db(distance_m, path, config);
    return (allocated_hz / config.bandwidth_hz) * config.tx_power_watt *
           std::pow(10.0, -loss_db / 10.0);
}

double noise_power_watt(double allocated_hz, double ue_noise_figure_db) {
    return std::pow(10.0, (-174.0 + ue_noise_figure_db) / 10.0) * allocated_hz * 1e-3;
}

ChannelConsts::ChannelConsts(const ScenarioConfig& config)
    : alpha(config.los_alpha),
      beta(config.los_beta),
      c_los(config.tx_power_watt * std::pow(10.0, -config.a_los_db / 10.0)),
      c_nlos(config.tx_power_watt * std::pow(10.0, -config.a_nlos_db / 10.0)),
      gamma_los(config.gamma_los),
      gamma_nlos(config.gamma_nlos),
      height(config.drone_height),
      height_sq(config.drone_height * config.drone_height),
      range_sq(config.interference_range * config.interference_range),
      bandwidth_hz(config.bandwidth_hz),
      noise_fullband_watt(noise_power_watt(config.bandwidth_hz, config.ue_noise_figure_db)),
      noise_per_hz_watt(noise_power_watt(1.0, config.ue_noise_figure_db)) {}

double ChannelConsts::p_los(double ground_sq) const {
    const double omega = ground_sq == 0.0
                             ? 90.0
                             : std::atan(height / std::sqrt(ground_sq)) * (180.0 / std::numbers::pi);
    return 1.0 / (1.0 + alpha * std::exp(-beta * (omega - alpha)));
}

LinkBudget link_budget(const GroundPoint& user, int serving, std::span<const DronePose> drones,
                       std::span<const char> transmitting, double allocated_hz,
                       const ScenarioConfig& config) {
    const ChannelConsts consts(config);
    LinkBudget budget;

    const double share = allocated_hz / config.bandwidth_hz;
    const double serving_sq = ground_distance_sq(user, drones[serving].position);
    budget.p_los = consts.p_los(serving_sq);
    budget.s_los_watt = share * consts.power_los(serving_sq);
    budget.s_nlos_watt = share * consts.power_nlos(serving_sq);
    budget.noise_watt = noise_power_watt(allocated_hz, config.ue_noise_figure_db);

    double interference = 0.0;
    for (std::size_t i = 0; i < drones.size(); ++i) {
        if (static_cast<int>(i) == serving || !transmitting[i]) {
            continue;
        }
        const double d_sq = ground_distance_sq(user, drones[i].position);
        if (d_sq > consts.range_sq) {
            continue;
        }
        interference += consts.expected_power(d_sq);
    }
    budget.interference_watt = share * interference;
    return budget;
}

double expected_user_se(const LinkBudget& budget) {
    const double denom = budget.interference_watt + budget.noise_watt;
    const double se_los = std::log2(1.0 + budget.s_los_watt / denom);
    const double se_nlos = std::log2(1.0 + budget.s_nlos_watt / denom);
    return budget.p_los * se_los + (1.0 - budget.p_los) * se_nlos;
}

double cell_se(std::span<const double> user_se) {
    double sum = 0.0;
    for (double se : user_se) {
        sum += se;
    }
    return sum / static_cast<double>(user_se.size());
}

double system_se(std::span<const double> active_cell_se) {
    if (active_cell_se.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double sum = 0.0;
    for (double se : active_cell_se) {
        sum += se;
    }
    return sum / static_cast<double>(active_cell_se.size());
}

} // namespace dbsim
