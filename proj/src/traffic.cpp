#include "dbsim/traffic.hpp"

#include <algorithm>
#include <cmath>

namespace dbsim {

double draw_reading_time(Rng& rng, double lambda_s) { return rng.exponential(lambda_s); }

TrafficEvents step_traffic(UserState& user, double dt, double offered_bits, double now_s,
                           double packet_bits, double mean_reading_s, Rng& rng) {
    TrafficEvents events;
    TrafficState& t = user.traffic;

    if (t.mode == TrafficMode::Reading) {
        if (offered_bits > 0.0) {
            throw ContractViolation("bits delivered to a user in reading state");
        }
        t.remaining_s -= dt;
        if (t.remaining_s <= 0.0) {
            // request starts now; transmission begins at the next slot boundary
            t.mode = TrafficMode::Active;
            t.remaining_bits = packet_bits;
            t.elapsed_s = 0.0;
            t.remaining_s = 0.0;
            events.request_started = true;
        }
        return events;
    }

    t.elapsed_s += dt;
    events.consumed_bits = std::min(offered_bits, t.remaining_bits);
    t.remaining_bits -= events.consumed_bits;
    if (t.remaining_bits <= 0.0) {
        const double end = now_s + dt;
        events.request_completed = true;
        events.record = PacketRecord{0, end - t.elapsed_s, end, t.elapsed_s, packet_bits};
        t.mode = TrafficMode::Reading;
        t.remaining_s = draw_reading_time(rng, mean_reading_s);
        t.remaining_bits = 0.0;
        t.elapsed_s = 0.0;
    }
    return events;
}

void step_user_motion(UserState& user, double dt, const CellRect& bounds, Rng& rng,
                      const std::array<double, 2>& speed_range,
                      const std::array<double, 2>& pause_range) {
    double remaining = dt;
    while (remaining > 0.0) {
        if (user.pause_remaining_s > 0.0) {
            const double pause = std::min(user.pause_remaining_s, remaining);
            user.pause_remaining_s -= pause;
            remaining -= pause;
            continue;
        }
        const double dist = ground_distance(user.position, user.waypoint);
        const double reach = user.move_speed * remaining;
        if (reach < dist) {
            const double frac = reach / dist;
            user.position.x += (user.waypoint.x - user.position.x) * frac;
            user.position.y += (user.waypoint.y - user.position.y) * frac;
            return;
        }
        // arrive exactly on the waypoint, then redraw pause, waypoint, speed
        const double used = user.move_speed > 0.0 ? dist / user.move_speed : remaining;
        user.position = user.waypoint;
        remaining -= used;
        user.pause_remaining_s = rng.uniform(pause_range[0], pause_range[1]);
        user.waypoint.x = rng.uniform(bounds.x0, bounds.x1);
        user.waypoint.y = rng.uniform(bounds.y0, bounds.y1);
        user.move_speed = rng.uniform(speed_range[0], speed_range[1]);
    }
}

} // namespace dbsim
