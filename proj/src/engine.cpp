#include "dbsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "dbsim/channel.hpp"
#include "dbsim/metrics.hpp"
#include "dbsim/scheduler.hpp"

namespace dbsim {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct World {
    CellGrid grid;
    std::vector<DronePose> drones;
    std::vector<CellRect> cell_bounds;
    std::vector<UserState> users;
    std::vector<Rng> traffic_rng;
    std::vector<Rng> motion_rng;
    Rng gt_rng;

    explicit World(const ScenarioConfig& cfg)
        : grid{cfg.grid_side, cfg.cell_edge, {0.0, 0.0}},
          gt_rng(make_stream(cfg.seed, RngStream::GtInit, 0)) {
        const int n_cells = cfg.cell_count();
        Rng drone_init = make_stream(cfg.seed, RngStream::DroneInit, 0);
        drones.reserve(n_cells);
        cell_bounds.reserve(n_cells);
        const double speed = cfg.dma == DmaKind::Hov ? 0.0 : cfg.drone_speed;
        for (int cell = 0; cell < n_cells; ++cell) {
            DronePose pose;
            pose.position = grid.center(cell);
            pose.heading = wrap_angle(drone_init.uniform(0.0, 2.0 * 3.14159265358979323846));
            pose.speed = speed;
            pose.height = cfg.drone_height;
            drones.push_back(pose);
            cell_bounds.push_back(grid.bounds(cell));
        }

        const int n_users = cfg.total_users();
        users.reserve(n_users);
        traffic_rng.reserve(n_users);
        motion_rng.reserve(n_users);
        for (int u = 0; u < n_users; ++u) {
            traffic_rng.push_back(make_stream(cfg.seed, RngStream::UserTraffic, u));
            motion_rng.push_back(make_stream(cfg.seed, RngStream::UserMotion, u));
            UserState user;
            user.home_cell = u / cfg.users_per_cell;
            const CellRect& b = cell_bounds[user.home_cell];
            Rng& mrng = motion_rng.back();
            user.position = {mrng.uniform(b.x0, b.x1), mrng.uniform(b.y0, b.y1)};
            user.waypoint = {mrng.uniform(b.x0, b.x1), mrng.uniform(b.y0, b.y1)};
            user.move_speed = mrng.uniform(cfg.rwp_speed_range[0], cfg.rwp_speed_range[1]);
            user.pause_remaining_s = 0.0;
            user.traffic.mode = TrafficMode::Reading;
            user.traffic.remaining_s = draw_reading_time(traffic_rng.back(), cfg.mean_reading_s);
            users.push_back(user);
        }
    }
};

SystemSnapshot make_snapshot(const ScenarioConfig& cfg, const World& world, double now_s,
                             const std::vector<std::vector<int>>& actives) {
    SystemSnapshot snap;
    snap.time_s = now_s;
    snap.config = &cfg;
    snap.grid = world.grid;
    snap.drones = world.drones;
    snap.user_positions.reserve(world.users.size());
    for (const auto& u : world.users) {
        snap.user_positions.push_back(u.position);
    }
    snap.active_users = actives;
    snap.all_users.resize(world.grid.cell_count());
    for (int u = 0; u < static_cast<int>(world.users.size()); ++u) {
        snap.all_users[world.users[u].home_cell].push_back(u);
    }
    snap.transmitting.resize(actives.size());
    for (std::size_t c = 0; c < actives.size(); ++c) {
        snap.transmitting[c] = actives[c].empty() ? 0 : 1;
    }
    return snap;
}

} // namespace

RunResult run(const ScenarioConfig& raw_config) {
    const ScenarioConfig cfg = validate(raw_config);
    const ChannelConsts consts(cfg);
    World world(cfg);

    const int n_cells = cfg.cell_count();
    const int users_per_cell = cfg.users_per_cell;
    const int center = world.grid.center_cell();
    const int center_user0 = center * users_per_cell;
    const long long total_ticks = cfg.total_ticks();
    const int ticks_per_epoch = cfg.ticks_per_epoch();
    const double t_r = cfg.ras_s;
    const double bandwidth = cfg.bandwidth_hz;

    RunResult result;
    result.config = cfg;
    result.ticks.reserve(static_cast<std::size_t>(total_ticks));
    result.user_rate_sum_bps.assign(users_per_cell, 0.0);
    result.user_active_ticks.assign(users_per_cell, 0);
    result.user_delivered_bits.assign(users_per_cell, 0.0);
    result.user_completed.assign(users_per_cell, 0);
    result.outside_ticks.assign(n_cells, 0);

    std::vector<double> committed(n_cells, 0.0);
    std::vector<std::vector<int>> actives(n_cells);
    std::vector<std::vector<double>> user_se(n_cells);
    std::vector<int> tx_cells;
    std::vector<double> cell_means;
    std::vector<double> offered(world.users.size(), 0.0);
    std::vector<double> alloc_hz(world.users.size(), 0.0);

    for (long long tick = 0; tick < total_ticks; ++tick) {
        const double now = static_cast<double>(tick) * t_r;
        const bool record = now >= cfg.warmup_discard_s;

        // (1) direction update epoch: freeze a snapshot, commit new angles
        if (tick % ticks_per_epoch == 0) {
            for (int c = 0; c < n_cells; ++c) {
                actives[c].clear();
            }
            for (int u = 0; u < static_cast<int>(world.users.size()); ++u) {
                if (world.users[u].active()) {
                    actives[world.users[u].home_cell].push_back(u);
                }
            }
            const SystemSnapshot snap = make_snapshot(cfg, world, now, actives);
            const DecisionOutcome outcome = decide(cfg.dma, snap, world.gt_rng);
            committed = outcome.angles;
            result.epochs += 1;
            result.gt_sweeps_total += outcome.diag.gt_sweeps;
            result.gt_converged_epochs += outcome.diag.gt_converged ? 1 : 0;
            result.opt_profiles_total += outcome.diag.opt_profiles;
            result.signalling_reads += outcome.diag.position_reads;
        }

        // (2) drones advance along their committed arcs (HOV stays pinned)
        if (cfg.dma != DmaKind::Hov) {
            for (int c = 0; c < n_cells; ++c) {
                world.drones[c] =
                    arc_advance(world.drones[c], committed[c], t_r, cfg.direction_update_s);
            }
        }

        // (3) users move inside their home cells
        for (int u = 0; u < static_cast<int>(world.users.size()); ++u) {
            UserState& user = world.users[u];
            step_user_motion(user, t_r, world.cell_bounds[user.home_cell], world.motion_rng[u],
                             cfg.rwp_speed_range, cfg.rwp_pause_range);
        }

        // (4) active sets for this slot
        tx_cells.clear();
        for (int c = 0; c < n_cells; ++c) {
            actives[c].clear();
        }
        for (int u = 0; u < static_cast<int>(world.users.size()); ++u) {
            if (world.users[u].active()) {
                actives[world.users[u].home_cell].push_back(u);
            }
        }
        for (int c = 0; c < n_cells; ++c) {
            if (!actives[c].empty()) {
                tx_cells.push_back(c);
            }
        }

        // (5) expected SE per active user at the full-band convention
        // (SINR is invariant to proportional b_u scaling, so this one number
        // serves the metric, the CQ quality and the delivery rate alike)
        for (int c : tx_cells) {
            auto& se = user_se[c];
            se.assign(actives[c].size(), 0.0);
            for (std::size_t i = 0; i < actives[c].size(); ++i) {
                const GroundPoint& upos = world.users[actives[c][i]].position;
                const double serv_sq = ground_distance_sq(upos, world.drones[c].position);
                const double p_los = consts.p_los(serv_sq);
                const double s_los = consts.power_los(serv_sq);
                const double s_nlos = consts.power_nlos(serv_sq);
                double interf = 0.0;
                for (int j : tx_cells) {
                    if (j == c) {
                        continue;
                    }
                    const double d_sq = ground_distance_sq(upos, world.drones[j].position);
                    if (d_sq > consts.range_sq) {
                        continue;
                    }
                    interf += consts.expected_power(d_sq);
                }
                const double denom = interf + consts.noise_fullband_watt;
                se[i] = p_los * std::log2(1.0 + s_los / denom) +
                        (1.0 - p_los) * std::log2(1.0 + s_nlos / denom);

                if (record && c == center) {
                    const double r = std::sqrt(serv_sq);
                    result.ground_distance_samples.push_back(r);
                    result.elevation_samples_deg.push_back(elevation_angle_deg(r, cfg.drone_height));
                    result.p_los_samples.push_back(p_los);
                }
            }
        }

        // bandwidth allocation; the cell's SE sample averages the users the
        // band actually went to (everyone under equal share, the winner under
        // CQ -- a zero-allocation SINR is not defined)
        cell_means.clear();
        double center_mean = kNan;
        double center_alloc_hz = 0.0;
        for (int c : tx_cells) {
            Allocation alloc;
            if (cfg.scheduler == SchedulerKind::EqualShare) {
                alloc = allocate_equal(actives[c], bandwidth);
            } else {
                alloc = allocate_cq(actives[c], bandwidth, user_se[c]);
            }
            double sum = 0.0;
            int served = 0;
            for (std::size_t i = 0; i < alloc.shares.size(); ++i) {
                const auto& [u, hz] = alloc.shares[i];
                alloc_hz[u] = hz;
                offered[u] = hz * user_se[c][i] * t_r;
                if (hz > 0.0) {
                    sum += user_se[c][i];
                    ++served;
                }
            }
            const double mean = sum / static_cast<double>(served);
            cell_means.push_back(mean);
            if (c == center) {
                center_mean = mean;
                center_alloc_hz = alloc.total_hz();
            }
        }

        // per-user rate samples for the fairness metric (active ticks only)
        if (record) {
            for (int c : tx_cells) {
                if (c != center) {
                    continue;
                }
                for (std::size_t i = 0; i < actives[c].size(); ++i) {
                    const int slot = actives[c][i] - center_user0;
                    result.user_rate_sum_bps[slot] += user_se[c][i] * alloc_hz[actives[c][i]];
                    result.user_active_ticks[slot] += 1;
                }
            }
        }

        // (6)+(7) deliver and step every user's traffic machine
        for (int u = 0; u < static_cast<int>(world.users.size()); ++u) {
            UserState& user = world.users[u];
            const TrafficEvents events = step_traffic(user, t_r, offered[u], now, cfg.packet_bits,
                                                      cfg.mean_reading_s, world.traffic_rng[u]);
            offered[u] = 0.0;
            alloc_hz[u] = 0.0;
            if (user.home_cell == center) {
                const int slot = u - center_user0;
                if (record) {
                    result.center_delivered_bits += events.consumed_bits;
                    result.user_delivered_bits[slot] += events.consumed_bits;
                }
                if (events.request_completed && record) {
                    PacketRecord packet = events.record;
                    packet.user = u;
                    result.packets.push_back(packet);
                    result.user_completed[slot] += 1;
                    result.center_completions += 1;
                }
            }
        }

        // (8) per-tick record, center-cell collection
        if (record) {
            TickRecord tick_record;
            tick_record.time_s = now;
            tick_record.system_se = system_se(cell_means);
            tick_record.cell_se = center_mean;
            tick_record.active_count = static_cast<int>(actives[center].size());
            tick_record.allocated_hz = center_alloc_hz;
            tick_record.drone_x = world.drones[center].position.x;
            tick_record.drone_y = world.drones[center].position.y;
            tick_record.outside = !world.cell_bounds[center].contains(world.drones[center].position);
            result.ticks.push_back(tick_record);
            result.recorded_ticks += 1;
            for (int c = 0; c < n_cells; ++c) {
                if (!world.cell_bounds[c].contains(world.drones[c].position)) {
                    result.outside_ticks[c] += 1;
                }
            }
        }
    }

    // final in-flight bits close the delivered-bits ledger
    result.user_inflight_bits.assign(users_per_cell, 0.0);
    for (int slot = 0; slot < users_per_cell; ++slot) {
        const UserState& user = world.users[center_user0 + slot];
        if (user.active()) {
            result.user_inflight_bits[slot] = cfg.packet_bits - user.traffic.remaining_bits;
        }
    }
    return result;
}

std::vector<RunResult> run_batch(const ScenarioConfig& config,
                                 const std::vector<std::uint64_t>& seeds, int threads) {
    std::vector<RunResult> results(seeds.size());
    std::vector<std::exception_ptr> failures(seeds.size());
    std::atomic<std::size_t> next{0};

    const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(seeds.size())));
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= seeds.size()) {
                return;
            }
            try {
                ScenarioConfig cfg = config;
                cfg.seed = seeds[i];
                results[i] = run(cfg);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int t = 0; t < n_workers; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (failures[i]) {
            try {
                std::rethrow_exception(failures[i]);
            } catch (const std::exception& e) {
                throw std::runtime_error("run with seed " + std::to_string(seeds[i]) +
                                         " failed: " + e.what());
            }
        }
    }
    return results;
}

} // namespace dbsim
