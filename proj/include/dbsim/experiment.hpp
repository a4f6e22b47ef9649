#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dbsim/config.hpp"
#include "dbsim/metrics.hpp"

namespace dbsim {

/// Cartesian sweep over dma x speed x accel x users x scheduler, every cell
/// run with the same seed list. Enumeration order is fixed so outputs are
/// reproducible byte for byte.
struct ExperimentPlan {
    ScenarioConfig base;
    std::vector<DmaKind> dmas;
    std::vector<double> speeds;
    std::vector<double> accels;
    std::vector<int> users;
    std::vector<SchedulerKind> schedulers;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> emit{"summary"}; // summary | ticks | packets | cdfs
    std::string out_dir = "out";
    int threads = 1;

    /// Plan with every axis defaulted from one base config.
    static ExperimentPlan from_config(const ScenarioConfig& base);
};

struct SweepCellResult {
    ScenarioConfig config; // resolved, seed excluded
    std::vector<MetricsSummary> per_seed;
    BatchSummary aggregate;
    std::vector<PacketRecord> packets;           // pooled, tagged per seed below
    std::vector<std::uint64_t> packet_seeds;
    GeometryCdfs pooled_geometry;
    std::vector<double> pooled_packet_thp;
    std::vector<TickRecord> ticks;               // only kept when "ticks" is emitted
    std::vector<std::uint64_t> tick_seeds;
};

struct ExperimentResult {
    ExperimentPlan plan;
    std::vector<SweepCellResult> cells;
};

/// Runs every (cell, seed) pair, parallel across pairs, deterministic in
/// output regardless of thread count.
ExperimentResult run_plan(const ExperimentPlan& plan);

/// Writes summary.csv / packets.csv / cdfs.csv / ticks.csv per the plan's
/// emit list, plus run.json with the resolved plan. Numeric fields use
/// shortest round-trip formatting.
void emit_outputs(const ExperimentResult& result, const std::string& out_dir);

/// run.json round trip: the emitted file parses back into an equivalent plan.
std::string plan_to_json_text(const ExperimentPlan& plan);
ExperimentPlan plan_from_json_text(const std::string& text);

/// Loads either a bare ScenarioConfig JSON file or a previously emitted
/// run.json (detected by its "base_config" key).
ExperimentPlan load_plan_file(const std::string& path);

} // namespace dbsim
