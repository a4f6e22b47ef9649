#pragma once

#include <cstdint>
#include <vector>

#include "dbsim/channel.hpp"
#include "dbsim/config.hpp"
#include "dbsim/geometry.hpp"
#include "dbsim/rng.hpp"

namespace dbsim {

/// Frozen view of the system handed to the deciders at a direction-update
/// epoch. Users stay at these positions for the whole decision.
struct SystemSnapshot {
    double time_s = 0.0;
    const ScenarioConfig* config = nullptr;
    CellGrid grid;
    std::vector<DronePose> drones;              // one per cell
    std::vector<GroundPoint> user_positions;    // all users, flat by global id
    std::vector<std::vector<int>> active_users; // per cell, global user ids
    std::vector<std::vector<int>> all_users;    // per cell, global user ids
    std::vector<char> transmitting;             // per cell: has at least one active user
};

struct DecisionDiagnostics {
    int gt_sweeps = 0;
    bool gt_converged = true;
    double opt_profiles = 0.0;
    std::uint64_t position_reads = 0; // signalling cost: positions the algorithm consulted
};

/// Turning angle committed per drone, all drawn from the candidate set.
struct DecisionOutcome {
    std::vector<double> angles;
    DecisionDiagnostics diag;
};

/// Mean over the K path-sample times of the drone's cell SE, with every
/// drone placed on its own candidate arc at the same offset and users frozen.
/// profile_angles has one entry per drone; only transmitting drones
/// contribute interference. Throws DomainError if the drone has no active
/// users (callers apply the center fallback instead).
double path_utility_se(int drone, const std::vector<double>& profile_angles,
                       const SystemSnapshot& snapshot);

/// Candidate angle whose arc endpoint gets closest to the cell center;
/// ties prefer the smallest |theta|, then the negative sign.
double center_fallback(const DronePose& pose, const GroundPoint& cell_center,
                       const std::vector<double>& angles, double update_interval_s);

DecisionOutcome decide_hov(const SystemSnapshot& snapshot);
DecisionOutcome decide_snr(const SystemSnapshot& snapshot);
DecisionOutcome decide_slr(const SystemSnapshot& snapshot);
DecisionOutcome decide_gt(const SystemSnapshot& snapshot, Rng& rng);
DecisionOutcome decide_opt(const SystemSnapshot& snapshot);

DecisionOutcome decide(DmaKind dma, const SystemSnapshot& snapshot, Rng& gt_rng);

} // namespace dbsim
