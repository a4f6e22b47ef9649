#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dbsim/config.hpp"
#include "dbsim/geometry.hpp"

namespace dbsim {

enum class PathType { Los, Nlos };

/// Everything needed to evaluate one user's SINR: LoS probability, the
/// serving powers for both propagation states, and the aggregate
/// interference and noise.
struct LinkBudget {
    double p_los = 0.0;
    double s_los_watt = 0.0;
    double s_nlos_watt = 0.0;
    double interference_watt = 0.0;
    double noise_watt = 0.0;
};

/// Probability of a line-of-sight link at elevation angle omega (degrees).
double los_probability(double omega_deg, double alpha, double beta);

/// A_path + 10 * gamma_path * log10(d). Distances below the 1 m reference
/// are clamped to 1 m; clamps are counted (see channel_clamp_count).
double path_loss_db(double distance_m, PathType path, const ScenarioConfig& config);

std::uint64_t channel_clamp_count();
void reset_channel_clamp_count();

/// (b_u / B) * p_tx * 10^(-eta_path / 10).
double received_power_watt(double allocated_hz, double distance_m, PathType path,
                           const ScenarioConfig& config);

/// Thermal noise plus UE noise figure over the allocated bandwidth.
double noise_power_watt(double allocated_hz, double ue_noise_figure_db);

/// Precomputed constants for the hot path. expected_power folds the LoS
/// probability mix into a single received-power figure, which is how
/// interfering links enter the SINR.
struct ChannelConsts {
    double alpha, beta;
    double c_los, c_nlos;       // p_tx * 10^(-A/10)
    double gamma_los, gamma_nlos;
    double height, height_sq;
    double range_sq;            // interference gate, squared
    double bandwidth_hz;
    double noise_fullband_watt; // noise at b_u = B
    double noise_per_hz_watt;

    explicit ChannelConsts(const ScenarioConfig& config);

    /// LoS probability at squared ground distance.
    double p_los(double ground_sq) const;

    /// Full-band received power for one propagation state.
    double power(double ground_sq, double c_path, double gamma_path) const {
        const double d_sq = ground_sq + height_sq;
        return c_path * std::pow(d_sq, -0.5 * gamma_path);
    }

    double power_los(double ground_sq) const { return power(ground_sq, c_los, gamma_los); }
    double power_nlos(double ground_sq) const { return power(ground_sq, c_nlos, gamma_nlos); }

    /// P_LoS * S_LoS + P_NLoS * S_NLoS at full band.
    double expected_power(double ground_sq) const {
        const double p = p_los(ground_sq);
        return p * power_los(ground_sq) + (1.0 - p) * power_nlos(ground_sq);
    }
};

/// Builds the budget for one user: serving powers for both path states plus
/// the expected interference from every other transmitting drone within the
/// interference range, all evaluated at the victim's allocation.
LinkBudget link_budget(const GroundPoint& user, int serving, std::span<const DronePose> drones,
                       std::span<const char> transmitting, double allocated_hz,
                       const ScenarioConfig& config);

/// Average spectral efficiency of one user (bps/Hz): the LoS/NLoS
/// expectation of log2(1 + SINR_path).
double expected_user_se(const LinkBudget& budget);

/// Mean SE over a cell's active users. Undefined for an empty set; callers
/// skip idle cells.
double cell_se(std::span<const double> user_se);

/// Mean over cells that had active users; empty input means no sample.
/// Returns NaN for the absent sample.
double system_se(std::span<const double> active_cell_se);

} // namespace dbsim
