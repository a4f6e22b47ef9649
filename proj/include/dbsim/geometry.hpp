#pragma once

#include <cmath>
#include <vector>

#include "dbsim/errors.hpp"

namespace dbsim {

struct GroundPoint {
    double x = 0.0;
    double y = 0.0;
};

inline double ground_distance(const GroundPoint& a, const GroundPoint& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

inline double ground_distance_sq(const GroundPoint& a, const GroundPoint& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

/// Axis-aligned cell rectangle, boundary inclusive.
struct CellRect {
    double x0, y0, x1, y1;

    bool contains(const GroundPoint& p) const {
        return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    }
};

/// Square grid of side x side cells with the given edge length. Cell index
/// runs row-major from origin; for odd side the center cell is
/// (side^2 - 1) / 2.
struct CellGrid {
    int side = 7;
    double edge = 80.0;
    GroundPoint origin{0.0, 0.0};

    int cell_count() const { return side * side; }
    int center_cell() const { return (side * side - 1) / 2; }
    int row(int cell) const { return cell / side; }
    int col(int cell) const { return cell % side; }
    int cell_at(int row, int col) const { return row * side + col; }

    GroundPoint center(int cell) const {
        return {origin.x + (col(cell) + 0.5) * edge, origin.y + (row(cell) + 0.5) * edge};
    }

    CellRect bounds(int cell) const {
        const double x0 = origin.x + col(cell) * edge;
        const double y0 = origin.y + row(cell) * edge;
        return {x0, y0, x0 + edge, y0 + edge};
    }
};

/// 2D drone state at fixed height. Heading is in (-pi, pi].
struct DronePose {
    GroundPoint position;
    double heading = 0.0;
    double speed = 0.0;
    double height = 10.0;
};

struct PathSample {
    double time_offset_s;
    GroundPoint point;
};

/// A constant-speed circular-arc candidate over one direction update
/// interval, with the sampled waypoints used for utility evaluation.
struct CandidatePath {
    double theta = 0.0;
    std::vector<PathSample> samples;
    DronePose end_pose;
};

inline double ground_distance(const GroundPoint& u, const DronePose& p) {
    return ground_distance(u, p.position);
}

/// sqrt(r^2 + h^2).
double euclidean_distance(double ground_m, double height_m);

/// Elevation angle in degrees seen from the ground; exactly 90 overhead.
double elevation_angle_deg(double ground_m, double height_m);

/// min(a_max * t_m / v, cap): the largest turn completable in one interval.
double max_turn_angle(double speed, double max_accel, double update_interval_s, double cap_rad);

/// Symmetric turning options {-theta_max, ..., -g, 0, g, ..., theta_max}
/// with g = 2 theta_max / (G - 1). G must be odd and >= 3.
std::vector<double> candidate_angles(double theta_max, int n_candidates);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double rad);

/// Moves a pose dt seconds along the arc that turns `theta` over a full
/// interval of t_m. theta == 0 is the straight line. Path length is
/// exactly speed * dt.
DronePose arc_advance(const DronePose& pose, double theta, double dt, double update_interval_s);

/// Samples the arc at offsets j * t_m / K for j = 1..K (endpoint included,
/// start excluded).
CandidatePath build_candidate_path(const DronePose& pose, double theta, double update_interval_s,
                                   int n_samples);

} // namespace dbsim
