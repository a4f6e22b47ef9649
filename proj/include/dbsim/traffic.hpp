#pragma once

#include <array>
#include <vector>

#include "dbsim/geometry.hpp"
#include "dbsim/rng.hpp"

namespace dbsim {

enum class TrafficMode { Reading, Active };

/// Reading/transmission alternation state of one user. While Reading,
/// remaining_s counts down to the next request; while Active, remaining_bits
/// counts down to packet completion and elapsed_s accumulates the
/// transmission time tau.
struct TrafficState {
    TrafficMode mode = TrafficMode::Reading;
    double remaining_s = 0.0;
    double remaining_bits = 0.0;
    double elapsed_s = 0.0;
};

struct UserState {
    GroundPoint position;
    GroundPoint waypoint;
    double move_speed = 1.0;
    double pause_remaining_s = 0.0;
    TrafficState traffic;
    int home_cell = 0;

    bool active() const { return traffic.mode == TrafficMode::Active; }
};

/// One completed download. tau_s = end_s - start_s is the transmission time.
struct PacketRecord {
    int user = 0;
    double start_s = 0.0;
    double end_s = 0.0;
    double tau_s = 0.0;
    double bits = 0.0;
};

struct TrafficEvents {
    bool request_started = false;
    bool request_completed = false;
    double consumed_bits = 0.0; // min(offered, remaining); keeps the bit ledger exact
    PacketRecord record;        // valid when request_completed
};

/// Exponential reading time with mean lambda_s.
double draw_reading_time(Rng& rng, double lambda_s);

/// Advances the traffic state machine by dt. offered_bits must be zero
/// while Reading. A packet finishing inside the step is charged the whole
/// step in tau (allocation is slot-quantized, so no partial-slot credit).
TrafficEvents step_traffic(UserState& user, double dt, double offered_bits, double now_s,
                           double packet_bits, double mean_reading_s, Rng& rng);

/// Random-waypoint step inside the home cell: move toward the waypoint,
/// pause on arrival, then redraw pause, waypoint, speed (in that order).
/// Arrival consumes only the sub-interval needed to reach the waypoint.
void step_user_motion(UserState& user, double dt, const CellRect& bounds, Rng& rng,
                      const std::array<double, 2>& speed_range,
                      const std::array<double, 2>& pause_range);

} // namespace dbsim
