#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "dbsim/errors.hpp"

namespace dbsim {

enum class DmaKind { Hov, Snr, Slr, Gt, Opt };
enum class SchedulerKind { EqualShare, CqBased };

const char* to_string(DmaKind dma);
const char* to_string(SchedulerKind sched);
DmaKind dma_from_string(const std::string& name);
SchedulerKind scheduler_from_string(const std::string& name);

/// Every model parameter shared by the simulation modules. Immutable after
/// validation; safe to share across concurrent runs.
///
/// Units are SI base units throughout: meters, seconds, Hz, watt, bits.
/// Packet size is stored in bits so that all rate arithmetic stays in
/// bits and Hz.
struct ScenarioConfig {
    int grid_side = 7;               // cells per side; odd so a center cell exists
    double cell_edge = 80.0;         // m, square cell edge
    int users_per_cell = 5;
    double bandwidth_hz = 5e6;       // B, shared per cell
    double carrier_hz = 2e9;         // documentation only; folded into a_los_db/a_nlos_db
    double tx_power_watt = 0.2512;   // 24 dBm
    double drone_height = 10.0;      // m, fixed
    double drone_speed = 2.0;        // m/s, constant linear speed
    double max_accel = 4.0;          // m/s^2, centripetal limit
    double direction_update_s = 1.0; // direction update interval
    double ras_s = 0.02;             // resource allocation slot
    double interference_range = 200.0; // m, interference ignored beyond this
    double mean_reading_s = 40.0;    // exponential reading-time mean
    double packet_bits = 3.2e8;      // 40 MByte
    int n_candidates = 21;           // turning options per update, odd >= 3
    double los_alpha = 9.61;
    double los_beta = 0.16;
    double a_los_db = 41.1;          // path loss at the 1 m reference
    double a_nlos_db = 32.9;
    double gamma_los = 2.09;
    double gamma_nlos = 3.75;
    double ue_noise_figure_db = 9.0;
    std::array<double, 2> rwp_speed_range{1.0, 3.0}; // m/s
    std::array<double, 2> rwp_pause_range{0.0, 10.0}; // s
    double duration_s = 800.0;
    double warmup_discard_s = 0.0;   // record from this time on
    SchedulerKind scheduler = SchedulerKind::EqualShare;
    DmaKind dma = DmaKind::Hov;
    int gt_max_sweeps = 50;
    bool gt_sequential = false;      // sequential instead of synchronous best-response sweeps
    int path_samples = 5;            // K points evaluated per candidate arc
    double theta_cap_rad = 3.14159265358979323846; // cap on the per-interval turn
    double opt_profile_budget = 1e6; // refuse exhaustive searches larger than this
    std::uint64_t seed = 1;

    int cell_count() const { return grid_side * grid_side; }
    int total_users() const { return cell_count() * users_per_cell; }
    int ticks_per_epoch() const { return static_cast<int>(direction_update_s / ras_s + 0.5); }
    long long total_ticks() const { return static_cast<long long>(duration_s / ras_s + 0.5); }
};

/// Returns the config iff every invariant holds; otherwise throws a
/// ConfigError listing all violations. Idempotent.
ScenarioConfig validate(const ScenarioConfig& config);

/// JSON round trip with the exact field names above. Parsing rejects
/// unknown keys; missing keys fall back to defaults.
ScenarioConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ScenarioConfig& config);

} // namespace dbsim
