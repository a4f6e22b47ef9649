#include "dbsim/geometry.hpp"

#include <cmath>
#include <numbers>

namespace dbsim {

double euclidean_distance(double ground_m, double height_m) {
    return std::sqrt(ground_m * ground_m + height_m * height_m);
}

double elevation_angle_deg(double ground_m, double height_m) {
    if (ground_m == 0.0) {
        return 90.0;
    }
    return std::atan(height_m / ground_m) * (180.0 / std::numbers::pi);
}

double max_turn_angle(double speed, double max_accel, double update_interval_s, double cap_rad) {
    return std::min(max_accel * update_interval_s / speed, cap_rad);
}

std::vector<double> candidate_angles(double theta_max, int n_candidates) {
    if (n_candidates < 3 || n_candidates % 2 == 0) {
        throw ConfigError("n_candidates", "must be odd and at least 3");
    }
    const int half = (n_candidates - 1) / 2;
    const double step = 2.0 * theta_max / (n_candidates - 1);
    std::vector<double> angles(n_candidates);
    for (int k = -half; k <= half; ++k) {
        angles[k + half] = step * k;
    }
    // pin the endpoints and the middle exactly
    angles.front() = -theta_max;
    angles[half] = 0.0;
    angles.back() = theta_max;
    return angles;
}

double wrap_angle(double rad) {
    const double two_pi = 2.0 * std::numbers::pi;
    double wrapped = std::fmod(rad, two_pi);
    if (wrapped <= -std::numbers::pi) {
        wrapped += two_pi;
    } else if (wrapped > std::numbers::pi) {
        wrapped -= two_pi;
    }
    return wrapped;
}

DronePose arc_advance(const DronePose& pose, double theta, double dt, double update_interval_s) {
    if (dt < 0.0 || dt > update_interval_s) {
        throw DomainError("arc_advance: dt outside [0, t_m]");
    }
    DronePose next = pose;
    if (theta == 0.0) {
        next.position.x += pose.speed * dt * std::cos(pose.heading);
        next.position.y += pose.speed * dt * std::sin(pose.heading);
        return next;
    }
    // circle center sits at perpendicular offset r_c = v t_m / |theta|,
    // to the left of the heading for a positive turn
    const double radius = pose.speed * update_interval_s / std::abs(theta);
    const double side = theta > 0.0 ? 1.0 : -1.0;
    const double cx = pose.position.x - side * radius * std::sin(pose.heading);
    const double cy = pose.position.y + side * radius * std::cos(pose.heading);
    const double turn = theta * dt / update_interval_s;
    const double c = std::cos(turn);
    const double s = std::sin(turn);
    const double rx = pose.position.x - cx;
    const double ry = pose.position.y - cy;
    next.position.x = cx + c * rx - s * ry;
    next.position.y = cy + s * rx + c * ry;
    next.heading = wrap_angle(pose.heading + turn);
    return next;
}

CandidatePath build_candidate_path(const DronePose& pose, double theta, double update_interval_s,
                                   int n_samples) {
    CandidatePath path;
    path.theta = theta;
    path.samples.reserve(n_samples);
    for (int j = 1; j <= n_samples; ++j) {
        const double offset = update_interval_s * j / n_samples;
        const DronePose at = arc_advance(pose, theta, offset, update_interval_s);
        path.samples.push_back({offset, at.position});
    }
    path.end_pose = arc_advance(pose, theta, update_interval_s, update_interval_s);
    return path;
}

} // namespace dbsim
