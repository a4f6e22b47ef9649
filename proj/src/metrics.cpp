#include "dbsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dbsim {

double time_avg_se(std::span<const double> per_tick_se) {
    double sum = 0.0;
    std::size_t n = 0;
    for (double se : per_tick_se) {
        if (!std::isnan(se)) {
            sum += se;
            ++n;
        }
    }
    if (n == 0) {
        throw NoDataError("time_avg_se: no tick carried a defined sample");
    }
    return sum / static_cast<double>(n);
}

double jain_index(std::span<const double> rates_bps) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double r : rates_bps) {
        sum += r;
        sum_sq += r * r;
    }
    if (sum_sq == 0.0) {
        throw NoDataError("jain_index: all rates are zero");
    }
    return sum * sum / (static_cast<double>(rates_bps.size()) * sum_sq);
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw NoDataError("percentile: empty sample");
    }
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) {
        return values.back();
    }
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

ThroughputStats packet_throughputs(std::span<const PacketRecord> packets) {
    if (packets.empty()) {
        throw NoDataError("packet_throughputs: no completed packets");
    }
    ThroughputStats stats;
    stats.per_packet_bps.reserve(packets.size());
    double sum = 0.0;
    for (const auto& p : packets) {
        const double thp = p.bits / p.tau_s;
        stats.per_packet_bps.push_back(thp);
        sum += thp;
    }
    stats.mean_bps = sum / static_cast<double>(packets.size());
    stats.p5_bps = percentile(stats.per_packet_bps, 0.05);
    return stats;
}

double completed_per_user(const RunResult& result) {
    return static_cast<double>(result.center_completions) /
           static_cast<double>(result.config.users_per_cell);
}

GeometryCdfs geometry_statistics(const RunResult& result) {
    GeometryCdfs cdfs;
    cdfs.ground_distance_m.sorted = result.ground_distance_samples;
    cdfs.elevation_deg.sorted = result.elevation_samples_deg;
    cdfs.p_los.sorted = result.p_los_samples;
    std::sort(cdfs.ground_distance_m.sorted.begin(), cdfs.ground_distance_m.sorted.end());
    std::sort(cdfs.elevation_deg.sorted.begin(), cdfs.elevation_deg.sorted.end());
    std::sort(cdfs.p_los.sorted.begin(), cdfs.p_los.sorted.end());
    return cdfs;
}

double outside_cell_fraction(const RunResult& result) {
    if (result.recorded_ticks == 0) {
        return 0.0;
    }
    return static_cast<double>(result.outside_ticks[result.config.cell_count() / 2]) /
           static_cast<double>(result.recorded_ticks);
}

MetricsSummary summarize(const RunResult& result) {
    MetricsSummary s;
    std::vector<double> center_se;
    std::vector<double> system_se;
    center_se.reserve(result.ticks.size());
    system_se.reserve(result.ticks.size());
    for (const auto& t : result.ticks) {
        center_se.push_back(t.cell_se);
        system_se.push_back(t.system_se);
    }
    auto safe = [](auto&& fn) {
        try {
            return fn();
        } catch (const NoDataError&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    s.time_avg_se = safe([&] { return time_avg_se(center_se); });
    s.time_avg_se_system = safe([&] { return time_avg_se(system_se); });

    std::vector<double> rates(result.user_rate_sum_bps.size(), 0.0);
    for (std::size_t u = 0; u < rates.size(); ++u) {
        if (result.user_active_ticks[u] > 0) {
            rates[u] = result.user_rate_sum_bps[u] / static_cast<double>(result.user_active_ticks[u]);
        }
    }
    s.jain = safe([&] { return jain_index(rates); });

    s.mean_thp_bps = std::numeric_limits<double>::quiet_NaN();
    s.p5_thp_bps = std::numeric_limits<double>::quiet_NaN();
    s.mean_tau_s = std::numeric_limits<double>::quiet_NaN();
    if (!result.packets.empty()) {
        const ThroughputStats thp = packet_throughputs(result.packets);
        s.mean_thp_bps = thp.mean_bps;
        s.p5_thp_bps = thp.p5_bps;
        double tau = 0.0;
        for (const auto& p : result.packets) {
            tau += p.tau_s;
        }
        s.mean_tau_s = tau / static_cast<double>(result.packets.size());
    }

    s.completed_per_user = completed_per_user(result);

    double active_frac = 0.0;
    for (long long ticks : result.user_active_ticks) {
        active_frac += static_cast<double>(ticks);
    }
    s.tx_time_frac = result.recorded_ticks == 0
                         ? 0.0
                         : active_frac / (static_cast<double>(result.recorded_ticks) *
                                          static_cast<double>(result.user_active_ticks.size()));

    s.outside_frac = outside_cell_fraction(result);
    return s;
}

namespace {

void fold(MetricsSummary& mean, MetricsSummary& stddev, std::span<const MetricsSummary> all,
          double MetricsSummary::* member) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : all) {
        const double v = s.*member;
        if (!std::isnan(v)) {
            sum += v;
            ++n;
        }
    }
    const double mu = n > 0 ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
    double var = 0.0;
    for (const auto& s : all) {
        const double v = s.*member;
        if (!std::isnan(v)) {
            var += (v - mu) * (v - mu);
        }
    }
    mean.*member = mu;
    stddev.*member = n > 1 ? std::sqrt(var / static_cast<double>(n - 1))
                           : (n == 1 ? 0.0 : std::numeric_limits<double>::quiet_NaN());
}

} // namespace

BatchSummary summarize_batch(std::span<const MetricsSummary> summaries) {
    BatchSummary batch;
    batch.runs = static_cast<int>(summaries.size());
    for (double MetricsSummary::* member :
         {&MetricsSummary::time_avg_se, &MetricsSummary::time_avg_se_system, &MetricsSummary::jain,
          &MetricsSummary::mean_thp_bps, &MetricsSummary::p5_thp_bps,
          &MetricsSummary::completed_per_user, &MetricsSummary::tx_time_frac,
          &MetricsSummary::outside_frac, &MetricsSummary::mean_tau_s}) {
        fold(batch.mean, batch.stddev, summaries, member);
    }
    return batch;
}

} // namespace dbsim
