#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dbsim/experiment.hpp"
#include "dbsim/version.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(text.substr(start));
            break;
        }
        out.push_back(text.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dbsim: multi-cell drone base station network simulator"};
    app.set_version_flag("--version", dbsim::kVersion);

    std::string config_path;
    std::string dma_csv, scheduler_csv, speed_csv, accel_csv, users_csv, seeds_csv, emit_csv;
    std::string out_dir = "out";
    int runs = 0;
    int grid_side = 0;
    int candidates = 0;
    double duration = 0.0;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) {
        threads = 1;
    }

    app.add_option("--config", config_path, "JSON scenario file or a previously emitted run.json");
    app.add_option("--dma", dma_csv, "mobility algorithm(s): HOV|SNR|SLR|GT|OPT, comma separated");
    app.add_option("--speed", speed_csv, "drone speed(s) in m/s, comma separated");
    app.add_option("--accel", accel_csv, "max acceleration(s) in m/s^2, comma separated");
    app.add_option("--users", users_csv, "users per cell, comma separated");
    app.add_option("--scheduler", scheduler_csv, "EqualShare|CQBased, comma separated");
    app.add_option("--seeds", seeds_csv, "explicit seed list, comma separated");
    app.add_option("--runs", runs, "number of runs; generates seeds 1..N unless --seeds is given")
        ->check(CLI::PositiveNumber);
    app.add_option("--duration", duration, "simulated seconds per run")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--emit", emit_csv, "outputs to write: summary,ticks,packets,cdfs");
    app.add_option("--grid-side", grid_side, "cells per grid side (odd)")
        ->check(CLI::PositiveNumber);
    app.add_option("--candidates", candidates, "number of candidate turning angles (odd)")
        ->check(CLI::PositiveNumber);
    app.add_option("--threads", threads, "worker threads for the run pool")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    dbsim::ExperimentPlan plan;
    try {
        if (!config_path.empty()) {
            plan = dbsim::load_plan_file(config_path);
        } else {
            plan = dbsim::ExperimentPlan::from_config(dbsim::ScenarioConfig{});
        }

        if (!dma_csv.empty()) {
            plan.dmas.clear();
            for (const auto& name : split_csv(dma_csv)) {
                plan.dmas.push_back(dbsim::dma_from_string(name));
            }
        }
        if (!scheduler_csv.empty()) {
            plan.schedulers.clear();
            for (const auto& name : split_csv(scheduler_csv)) {
                plan.schedulers.push_back(dbsim::scheduler_from_string(name));
            }
        }
        if (!speed_csv.empty()) {
            plan.speeds.clear();
            for (const auto& v : split_csv(speed_csv)) {
                plan.speeds.push_back(std::stod(v));
            }
        }
        if (!accel_csv.empty()) {
            plan.accels.clear();
            for (const auto& v : split_csv(accel_csv)) {
                plan.accels.push_back(std::stod(v));
            }
        }
        if (!users_csv.empty()) {
            plan.users.clear();
            for (const auto& v : split_csv(users_csv)) {
                plan.users.push_back(std::stoi(v));
            }
        }
        if (!seeds_csv.empty()) {
            plan.seeds.clear();
            for (const auto& v : split_csv(seeds_csv)) {
                plan.seeds.push_back(std::stoull(v));
            }
        } else if (runs > 0) {
            plan.seeds.clear();
            for (int i = 1; i <= runs; ++i) {
                plan.seeds.push_back(static_cast<std::uint64_t>(i));
            }
        }
        if (duration > 0.0) {
            plan.base.duration_s = duration;
        }
        if (grid_side > 0) {
            plan.base.grid_side = grid_side;
        }
        if (candidates > 0) {
            plan.base.n_candidates = candidates;
        }
        if (!emit_csv.empty()) {
            plan.emit = split_csv(emit_csv);
            for (const auto& e : plan.emit) {
                if (e != "summary" && e != "ticks" && e != "packets" && e != "cdfs") {
                    throw dbsim::ConfigError("emit", "unknown output '" + e + "'");
                }
            }
        }
        plan.out_dir = out_dir;
        plan.threads = threads;

        // validate every sweep cell up front so config errors exit with 1
        for (dbsim::DmaKind dma : plan.dmas) {
            for (double speed : plan.speeds) {
                for (double accel : plan.accels) {
                    for (int users : plan.users) {
                        for (dbsim::SchedulerKind sched : plan.schedulers) {
                            dbsim::ScenarioConfig cfg = plan.base;
                            cfg.dma = dma;
                            cfg.drone_speed = speed;
                            cfg.max_accel = accel;
                            cfg.users_per_cell = users;
                            cfg.scheduler = sched;
                            dbsim::validate(cfg);
                        }
                    }
                }
            }
        }
    } catch (const dbsim::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "invalid arguments: %s\n", e.what());
        return 1;
    }

    try {
        const dbsim::ExperimentResult result = dbsim::run_plan(plan);
        dbsim::emit_outputs(result, plan.out_dir);
        std::size_t n_runs = plan.seeds.size() * result.cells.size();
        std::printf("wrote %s (%zu sweep cells x %zu seeds = %zu runs)\n", plan.out_dir.c_str(),
                    result.cells.size(), plan.seeds.size(), n_runs);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "run failed: %s\n", e.what());
        return 2;
    }
    return 0;
}
