#pragma once

#include <cstdint>
#include <vector>

#include "dbsim/config.hpp"
#include "dbsim/dma.hpp"
#include "dbsim/traffic.hpp"

namespace dbsim {

/// Per-tick observation of the center cell plus the grid-wide SE sample.
/// SE fields are NaN when no cell (or the center cell) had active users.
struct TickRecord {
    double time_s = 0.0;
    double system_se = 0.0;  // mean over all cells with active users
    double cell_se = 0.0;    // center cell
    int active_count = 0;    // center cell
    double allocated_hz = 0.0;
    double drone_x = 0.0;
    double drone_y = 0.0;
    bool outside = false;    // center drone outside its cell rectangle
};

/// Everything collected from one run. Per-tick records, packet records and
/// per-user accumulators cover the center cell only; outside-cell time is
/// kept per drone.
struct RunResult {
    ScenarioConfig config;

    std::vector<TickRecord> ticks;
    std::vector<PacketRecord> packets; // center cell

    // center-cell geometry samples, one per active user per tick
    std::vector<double> ground_distance_samples;
    std::vector<double> elevation_samples_deg;
    std::vector<double> p_los_samples;

    // center-cell per-user accumulators (index = user slot within the cell)
    std::vector<double> user_rate_sum_bps;       // sum of SE * b_u over active ticks
    std::vector<long long> user_active_ticks;
    std::vector<double> user_delivered_bits;
    std::vector<long long> user_completed;
    std::vector<double> user_inflight_bits;      // progress on unfinished packets at run end

    std::vector<long long> outside_ticks; // per drone
    long long recorded_ticks = 0;
    long long center_completions = 0;
    double center_delivered_bits = 0.0;

    int epochs = 0;
    long long gt_sweeps_total = 0;
    int gt_converged_epochs = 0;
    double opt_profiles_total = 0.0;
    std::uint64_t signalling_reads = 0;
    std::uint64_t clamp_events = 0;
};

/// Runs one deterministic simulation. The tick pipeline is fixed:
/// decide (at t_m boundaries) -> move drones -> move users -> schedule ->
/// deliver -> step traffic -> record.
RunResult run(const ScenarioConfig& config);

/// Independent runs of the same scenario under different seeds, optionally
/// in parallel. Results come back in seed order regardless of thread count.
std::vector<RunResult> run_batch(const ScenarioConfig& config,
                                 const std::vector<std::uint64_t>& seeds, int threads = 1);

} // namespace dbsim
