#include "dbsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "dbsim/version.hpp"

namespace dbsim {

namespace {

using nlohmann::json;

/// Shortest decimal that round-trips the double, so re-running a plan
/// reproduces output files byte for byte.
std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string row;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) {
            row += ',';
        }
        row += fields[i];
    }
    row += '\n';
    return row;
}

bool emits(const ExperimentPlan& plan, const std::string& what) {
    return std::find(plan.emit.begin(), plan.emit.end(), what) != plan.emit.end();
}

std::vector<std::string> cell_key(const ScenarioConfig& cfg) {
    return {to_string(cfg.dma), format_number(cfg.drone_speed), format_number(cfg.max_accel),
            std::to_string(cfg.users_per_cell), to_string(cfg.scheduler)};
}

void write_cdf_rows(std::string& out, const std::vector<std::string>& key,
                    const std::string& metric, std::vector<double> samples) {
    if (samples.empty()) {
        return;
    }
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    const std::size_t max_points = 512;
    const std::size_t stride = n <= max_points ? 1 : n / max_points;
    for (std::size_t i = stride - 1; i < n; i += stride) {
        auto fields = key;
        fields.push_back(metric);
        fields.push_back(format_number(samples[i]));
        fields.push_back(format_number(static_cast<double>(i + 1) / static_cast<double>(n)));
        out += csv_row(fields);
    }
    if ((n - 1) % stride != stride - 1) {
        auto fields = key;
        fields.push_back(metric);
        fields.push_back(format_number(samples[n - 1]));
        fields.push_back("1");
        out += csv_row(fields);
    }
}

} // namespace

ExperimentPlan ExperimentPlan::from_config(const ScenarioConfig& base) {
    ExperimentPlan plan;
    plan.base = base;
    plan.dmas = {base.dma};
    plan.speeds = {base.drone_speed};
    plan.accels = {base.max_accel};
    plan.users = {base.users_per_cell};
    plan.schedulers = {base.scheduler};
    plan.seeds = {base.seed};
    return plan;
}

ExperimentResult run_plan(const ExperimentPlan& plan) {
    ExperimentResult result;
    result.plan = plan;

    // enumerate sweep cells in the fixed dma x speed x accel x users x
    // scheduler order
    std::vector<ScenarioConfig> cells;
    for (DmaKind dma : plan.dmas) {
        for (double speed : plan.speeds) {
            for (double accel : plan.accels) {
                for (int users : plan.users) {
                    for (SchedulerKind sched : plan.schedulers) {
                        ScenarioConfig cfg = plan.base;
                        cfg.dma = dma;
                        cfg.drone_speed = speed;
                        cfg.max_accel = accel;
                        cfg.users_per_cell = users;
                        cfg.scheduler = sched;
                        cells.push_back(validate(cfg));
                    }
                }
            }
        }
    }

    const std::size_t n_jobs = cells.size() * plan.seeds.size();
    std::vector<RunResult> runs(n_jobs);
    std::vector<std::exception_ptr> failures(n_jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t job = next.fetch_add(1);
            if (job >= n_jobs) {
                return;
            }
            try {
                ScenarioConfig cfg = cells[job / plan.seeds.size()];
                cfg.seed = plan.seeds[job % plan.seeds.size()];
                runs[job] = run(cfg);
            } catch (...) {
                failures[job] = std::current_exception();
            }
        }
    };
    const int n_workers = std::max(1, std::min<int>(plan.threads, static_cast<int>(n_jobs)));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_workers; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (std::size_t job = 0; job < n_jobs; ++job) {
        if (failures[job]) {
            std::rethrow_exception(failures[job]);
        }
    }

    const bool keep_ticks = emits(plan, "ticks");
    for (std::size_t c = 0; c < cells.size(); ++c) {
        SweepCellResult cell;
        cell.config = cells[c];
        for (std::size_t s = 0; s < plan.seeds.size(); ++s) {
            RunResult& r = runs[c * plan.seeds.size() + s];
            cell.per_seed.push_back(summarize(r));
            for (const auto& p : r.packets) {
                cell.packets.push_back(p);
                cell.packet_seeds.push_back(plan.seeds[s]);
                cell.pooled_packet_thp.push_back(p.bits / p.tau_s);
            }
            auto pool_into = [](std::vector<double>& dst, const std::vector<double>& src) {
                dst.insert(dst.end(), src.begin(), src.end());
            };
            pool_into(cell.pooled_geometry.ground_distance_m.sorted, r.ground_distance_samples);
            pool_into(cell.pooled_geometry.elevation_deg.sorted, r.elevation_samples_deg);
            pool_into(cell.pooled_geometry.p_los.sorted, r.p_los_samples);
            if (keep_ticks) {
                for (const auto& t : r.ticks) {
                    cell.ticks.push_back(t);
                    cell.tick_seeds.push_back(plan.seeds[s]);
                }
            }
            r = RunResult{}; // release run memory as we fold it in
        }
        cell.aggregate = summarize_batch(cell.per_seed);
        std::sort(cell.pooled_geometry.ground_distance_m.sorted.begin(),
                  cell.pooled_geometry.ground_distance_m.sorted.end());
        std::sort(cell.pooled_geometry.elevation_deg.sorted.begin(),
                  cell.pooled_geometry.elevation_deg.sorted.end());
        std::sort(cell.pooled_geometry.p_los.sorted.begin(), cell.pooled_geometry.p_los.sorted.end());
        result.cells.push_back(std::move(cell));
    }
    return result;
}

std::string plan_to_json_text(const ExperimentPlan& plan) {
    json j;
    j["version"] = kVersion;
    j["base_config"] = json::parse(config_to_json_text(plan.base));
    json sweep;
    sweep["dma"] = json::array();
    for (DmaKind d : plan.dmas) sweep["dma"].push_back(to_string(d));
    sweep["speed"] = plan.speeds;
    sweep["accel"] = plan.accels;
    sweep["users"] = plan.users;
    sweep["scheduler"] = json::array();
    for (SchedulerKind s : plan.schedulers) sweep["scheduler"].push_back(to_string(s));
    j["sweep"] = sweep;
    j["seeds"] = plan.seeds;
    j["emit"] = plan.emit;
    return j.dump(2) + "\n";
}

ExperimentPlan plan_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("not valid JSON: ") + e.what());
    }
    ExperimentPlan plan;
    plan.base = config_from_json_text(j.at("base_config").dump());
    plan = ExperimentPlan::from_config(plan.base);
    if (j.contains("sweep")) {
        const json& sweep = j.at("sweep");
        if (sweep.contains("dma")) {
            plan.dmas.clear();
            for (const auto& name : sweep.at("dma")) plan.dmas.push_back(dma_from_string(name));
        }
        if (sweep.contains("speed")) sweep.at("speed").get_to(plan.speeds);
        if (sweep.contains("accel")) sweep.at("accel").get_to(plan.accels);
        if (sweep.contains("users")) sweep.at("users").get_to(plan.users);
        if (sweep.contains("scheduler")) {
            plan.schedulers.clear();
            for (const auto& name : sweep.at("scheduler")) {
                plan.schedulers.push_back(scheduler_from_string(name));
            }
        }
    }
    if (j.contains("seeds")) j.at("seeds").get_to(plan.seeds);
    if (j.contains("emit")) j.at("emit").get_to(plan.emit);
    return plan;
}

ExperimentPlan load_plan_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("<file>", "cannot open '" + path + "'");
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("not valid JSON: ") + e.what());
    }
    if (j.is_object() && j.contains("base_config")) {
        return plan_from_json_text(text);
    }
    return ExperimentPlan::from_config(config_from_json_text(text));
}

void emit_outputs(const ExperimentResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    auto open = [&](const std::string& name) {
        std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write to '" + out_dir + "/" + name + "'");
        }
        return out;
    };
    const ExperimentPlan& plan = result.plan;

    if (emits(plan, "summary")) {
        std::string text = csv_row({"dma", "speed", "accel", "users", "scheduler", "seed",
                                    "time_avg_se", "jain", "mean_thp_bps", "p5_thp_bps",
                                    "completed_per_user", "tx_time_frac", "outside_frac"});
        for (const auto& cell : result.cells) {
            const auto key = cell_key(cell.config);
            auto metric_fields = [&](const MetricsSummary& m) {
                return std::vector<std::string>{
                    format_number(m.time_avg_se),       format_number(m.jain),
                    format_number(m.mean_thp_bps),      format_number(m.p5_thp_bps),
                    format_number(m.completed_per_user), format_number(m.tx_time_frac),
                    format_number(m.outside_frac)};
            };
            for (std::size_t s = 0; s < plan.seeds.size(); ++s) {
                auto fields = key;
                fields.push_back(std::to_string(plan.seeds[s]));
                for (auto& f : metric_fields(cell.per_seed[s])) {
                    fields.push_back(std::move(f));
                }
                text += csv_row(fields);
            }
            for (const char* label : {"mean", "std"}) {
                auto fields = key;
                fields.emplace_back(label);
                const MetricsSummary& m =
                    label == std::string("mean") ? cell.aggregate.mean : cell.aggregate.stddev;
                for (auto& f : metric_fields(m)) {
                    fields.push_back(std::move(f));
                }
                text += csv_row(fields);
            }
        }
        open("summary.csv") << text;
    }

    if (emits(plan, "packets")) {
        std::string text = csv_row({"dma", "speed", "accel", "users", "scheduler", "seed", "user",
                                    "start_s", "end_s", "tau_s", "bits", "thp_bps"});
        for (const auto& cell : result.cells) {
            const auto key = cell_key(cell.config);
            for (std::size_t i = 0; i < cell.packets.size(); ++i) {
                const PacketRecord& p = cell.packets[i];
                auto fields = key;
                fields.push_back(std::to_string(cell.packet_seeds[i]));
                fields.push_back(std::to_string(p.user));
                fields.push_back(format_number(p.start_s));
                fields.push_back(format_number(p.end_s));
                fields.push_back(format_number(p.tau_s));
                fields.push_back(format_number(p.bits));
                fields.push_back(format_number(p.bits / p.tau_s));
                text += csv_row(fields);
            }
        }
        open("packets.csv") << text;
    }

    if (emits(plan, "cdfs")) {
        std::string text =
            csv_row({"dma", "speed", "accel", "users", "scheduler", "metric", "x", "F"});
        for (const auto& cell : result.cells) {
            const auto key = cell_key(cell.config);
            write_cdf_rows(text, key, "ground_distance_m", cell.pooled_geometry.ground_distance_m.sorted);
            write_cdf_rows(text, key, "elevation_deg", cell.pooled_geometry.elevation_deg.sorted);
            write_cdf_rows(text, key, "p_los", cell.pooled_geometry.p_los.sorted);
            write_cdf_rows(text, key, "packet_throughput_bps", cell.pooled_packet_thp);
        }
        open("cdfs.csv") << text;
    }

    if (emits(plan, "ticks")) {
        std::string text = csv_row({"dma", "speed", "accel", "users", "scheduler", "seed", "time_s",
                                    "system_se", "cell_se", "active_count", "allocated_hz",
                                    "drone_x", "drone_y", "outside"});
        for (const auto& cell : result.cells) {
            const auto key = cell_key(cell.config);
            for (std::size_t i = 0; i < cell.ticks.size(); ++i) {
                const TickRecord& t = cell.ticks[i];
                auto fields = key;
                fields.push_back(std::to_string(cell.tick_seeds[i]));
                fields.push_back(format_number(t.time_s));
                fields.push_back(format_number(t.system_se));
                fields.push_back(format_number(t.cell_se));
                fields.push_back(std::to_string(t.active_count));
                fields.push_back(format_number(t.allocated_hz));
                fields.push_back(format_number(t.drone_x));
                fields.push_back(format_number(t.drone_y));
                fields.push_back(t.outside ? "1" : "0");
                text += csv_row(fields);
            }
        }
        open("ticks.csv") << text;
    }

    open("run.json") << plan_to_json_text(plan);
}

} // namespace dbsim
