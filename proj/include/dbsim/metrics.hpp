#pragma once

#include <span>
#include <vector>

#include "dbsim/engine.hpp"

namespace dbsim {

/// Empirical CDF over the stored (sorted) samples.
struct EmpiricalCdf {
    std::vector<double> sorted;

    std::size_t size() const { return sorted.size(); }
    /// F(x) at the i-th order statistic: (i + 1) / n.
    double f_at(std::size_t i) const {
        return static_cast<double>(i + 1) / static_cast<double>(sorted.size());
    }
};

struct ThroughputStats {
    std::vector<double> per_packet_bps;
    double mean_bps = 0.0;
    double p5_bps = 0.0;
};

struct GeometryCdfs {
    EmpiricalCdf ground_distance_m;
    EmpiricalCdf elevation_deg;
    EmpiricalCdf p_los;
};

/// Headline numbers of one run, all center-cell based except the grid-wide
/// SE average kept alongside for reference.
struct MetricsSummary {
    double time_avg_se = 0.0;        // center cell, ticks with active users
    double time_avg_se_system = 0.0; // grid-wide sample
    double jain = 0.0;
    double mean_thp_bps = 0.0;
    double p5_thp_bps = 0.0;
    double completed_per_user = 0.0;
    double tx_time_frac = 0.0;       // mean per-user active-time fraction
    double outside_frac = 0.0;       // center drone
    double mean_tau_s = 0.0;
};

/// Mean of the values with NaN samples excluded; throws NoDataError if none
/// remain.
double time_avg_se(std::span<const double> per_tick_se);

/// (sum r)^2 / (U * sum r^2). Throws NoDataError on an all-zero input.
double jain_index(std::span<const double> rates_bps);

/// Linear interpolation between closest order statistics (the numpy/R-7
/// convention); q in [0, 1]. Input need not be sorted.
double percentile(std::vector<double> values, double q);

/// Per-packet throughput bits/tau with the mean and the 5th percentile.
ThroughputStats packet_throughputs(std::span<const PacketRecord> packets);

double completed_per_user(const RunResult& result);

GeometryCdfs geometry_statistics(const RunResult& result);

/// Fraction of recorded ticks the center drone spent outside its cell.
double outside_cell_fraction(const RunResult& result);

MetricsSummary summarize(const RunResult& result);

/// Per-field mean and standard deviation over runs of one scenario.
struct BatchSummary {
    MetricsSummary mean;
    MetricsSummary stddev;
    int runs = 0;
};

BatchSummary summarize_batch(std::span<const MetricsSummary> summaries);

} // namespace dbsim
