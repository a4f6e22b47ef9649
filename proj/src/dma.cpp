#include "dbsim/dma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dbsim {

namespace {

constexpr double kLeakageFloor = 1e-30; // keeps SLR finite with zero leakage

/// Candidate-path positions plus lazily filled expected-power caches shared
/// by the deciders. All caches are keyed so that repeated best-response
/// sweeps reduce to table lookups.
class Workspace {
  public:
    explicit Workspace(const SystemSnapshot& snap)
        : snap_(snap), cfg_(*snap.config), consts_(cfg_),
          angles_(candidate_angles(
              max_turn_angle(cfg_.drone_speed, cfg_.max_accel, cfg_.direction_update_s,
                             cfg_.theta_cap_rad),
              cfg_.n_candidates)),
          n_cells_(static_cast<int>(snap.drones.size())), n_cand_(cfg_.n_candidates),
          n_samples_(cfg_.path_samples) {
        tie_order_.resize(angles_.size());
        for (std::size_t i = 0; i < angles_.size(); ++i) {
            tie_order_[i] = static_cast<int>(i);
        }
        std::stable_sort(tie_order_.begin(), tie_order_.end(), [&](int a, int b) {
            const double fa = std::abs(angles_[a]);
            const double fb = std::abs(angles_[b]);
            if (fa != fb) return fa < fb;
            return angles_[a] < angles_[b]; // negative before positive
        });

        positions_.resize(static_cast<std::size_t>(n_cells_) * n_cand_ * n_samples_);
        has_positions_.assign(n_cells_, 0);

        for (int cell = 0; cell < n_cells_; ++cell) {
            const auto& act = snap.active_users[cell];
            cell_span_.emplace_back(static_cast<int>(active_pos_.size()),
                                    static_cast<int>(active_pos_.size() + act.size()));
            for (int user : act) {
                active_pos_.push_back(snap.user_positions[user]);
                active_cell_.push_back(cell);
            }
        }
        n_active_ = static_cast<int>(active_pos_.size());

        // a candidate position deviates from the epoch-start pose by at most
        // the arc length, so gate potential interferers with that margin
        const double reach = cfg_.drone_speed * cfg_.direction_update_s;
        const double gate = cfg_.interference_range + reach;
        const double gate_sq = gate * gate;
        neighbors_.resize(n_active_);
        interference_base_.resize(n_active_ + 1);
        std::size_t slots = 0;
        for (int a = 0; a < n_active_; ++a) {
            interference_base_[a] = slots;
            for (int j = 0; j < n_cells_; ++j) {
                if (ground_distance_sq(active_pos_[a], snap.drones[j].position) <= gate_sq) {
                    neighbors_[a].push_back(j);
                }
            }
            slots += neighbors_[a].size() * n_cand_;
        }
        interference_base_[n_active_] = slots;
        interference_.assign(slots * n_samples_, 0.0);
        interference_filled_.assign(slots, 0);

        serving_.resize(static_cast<std::size_t>(n_active_) * n_cand_ * n_samples_);
        serving_filled_.assign(static_cast<std::size_t>(n_active_) * n_cand_, 0);
    }

    const std::vector<double>& angles() const { return angles_; }
    const std::vector<int>& tie_order() const { return tie_order_; }
    int candidates() const { return n_cand_; }
    int cells() const { return n_cells_; }
    bool has_actives(int cell) const {
        return cell_span_[cell].second > cell_span_[cell].first;
    }
    const ChannelConsts& consts() const { return consts_; }

    const GroundPoint& position(int cell, int cand, int sample) {
        if (!has_positions_[cell]) {
            fill_positions(cell);
        }
        return positions_[(static_cast<std::size_t>(cell) * n_cand_ + cand) * n_samples_ + sample];
    }

    struct ServingPowers {
        double p_los, s_los, s_nlos;
    };

    const ServingPowers& serving(int active, int cand, int sample) {
        const std::size_t key = static_cast<std::size_t>(active) * n_cand_ + cand;
        if (!serving_filled_[key]) {
            const int cell = active_cell_[active];
            for (int s = 0; s < n_samples_; ++s) {
                const GroundPoint& pos = position(cell, cand, s);
                const double d_sq = ground_distance_sq(active_pos_[active], pos);
                ServingPowers& out = serving_[key * n_samples_ + s];
                out.p_los = consts_.p_los(d_sq);
                out.s_los = consts_.power_los(d_sq);
                out.s_nlos = consts_.power_nlos(d_sq);
            }
            serving_filled_[key] = 1;
        }
        return serving_[key * n_samples_ + sample];
    }

    /// Expected interference power from drone `cell` (on candidate `cand` at
    /// `sample`) at active user `active`; zero beyond the interference range.
    double interference(int active, int local_neighbor, int cand, int sample) {
        const std::size_t slot =
            interference_base_[active] + static_cast<std::size_t>(local_neighbor) * n_cand_ + cand;
        if (!interference_filled_[slot]) {
            const int cell = neighbors_[active][local_neighbor];
            for (int s = 0; s < n_samples_; ++s) {
                const GroundPoint& pos = position(cell, cand, s);
                const double d_sq = ground_distance_sq(active_pos_[active], pos);
                interference_[slot * n_samples_ + s] =
                    d_sq > consts_.range_sq ? 0.0 : consts_.expected_power(d_sq);
            }
            interference_filled_[slot] = 1;
        }
        return interference_[slot * n_samples_ + sample];
    }

    /// Eq-style path utility: mean over samples of the cell's mean user SE,
    /// with drone `cell` on candidate `own_cand` and every other transmitting
    /// drone on its profile candidate.
    double utility(int cell, const std::vector<int>& profile, int own_cand) {
        const auto [a0, a1] = cell_span_[cell];
        double sample_sum = 0.0;
        for (int s = 0; s < n_samples_; ++s) {
            double se_sum = 0.0;
            for (int a = a0; a < a1; ++a) {
                const ServingPowers& sv = serving(a, own_cand, s);
                double interf = 0.0;
                const auto& nbr = neighbors_[a];
                for (std::size_t ln = 0; ln < nbr.size(); ++ln) {
                    const int j = nbr[ln];
                    if (j == cell || !snap_.transmitting[j]) {
                        continue;
                    }
                    interf += interference(a, static_cast<int>(ln), profile[j], s);
                }
                const double denom = interf + consts_.noise_fullband_watt;
                se_sum += sv.p_los * std::log2(1.0 + sv.s_los / denom) +
                          (1.0 - sv.p_los) * std::log2(1.0 + sv.s_nlos / denom);
            }
            sample_sum += se_sum / static_cast<double>(a1 - a0);
        }
        return sample_sum / static_cast<double>(n_samples_);
    }

    /// Mean expected serving power over samples and own actives, per noise:
    /// the SNR decision metric.
    double snr_score(int cell, int cand) {
        const auto [a0, a1] = cell_span_[cell];
        double sum = 0.0;
        for (int s = 0; s < n_samples_; ++s) {
            for (int a = a0; a < a1; ++a) {
                const ServingPowers& sv = serving(a, cand, s);
                sum += sv.p_los * sv.s_los + (1.0 - sv.p_los) * sv.s_nlos;
            }
        }
        const double n = static_cast<double>(n_samples_) * (a1 - a0);
        return sum / n / consts_.noise_fullband_watt;
    }

    /// Mean over samples of (mean own serving power) / leakage, where the
    /// leakage is the power this drone lands on active users of other cells
    /// whose drones sit within the interference range.
    double slr_score(int cell, int cand) {
        const auto [a0, a1] = cell_span_[cell];
        double sum = 0.0;
        for (int s = 0; s < n_samples_; ++s) {
            double own = 0.0;
            for (int a = a0; a < a1; ++a) {
                const ServingPowers& sv = serving(a, cand, s);
                own += sv.p_los * sv.s_los + (1.0 - sv.p_los) * sv.s_nlos;
            }
            own /= static_cast<double>(a1 - a0);
            sum += own / std::max(leakage(cell, cand, s), kLeakageFloor);
        }
        return sum / static_cast<double>(n_samples_);
    }

    double leakage(int cell, int cand, int sample) {
        const std::size_t key = static_cast<std::size_t>(cell) * n_cand_ + cand;
        if (leakage_filled_.empty()) {
            leakage_filled_.assign(static_cast<std::size_t>(n_cells_) * n_cand_, 0);
            leakage_.assign(static_cast<std::size_t>(n_cells_) * n_cand_ * n_samples_, 0.0);
        }
        if (!leakage_filled_[key]) {
            for (int s = 0; s < n_samples_; ++s) {
                const GroundPoint& pos = position(cell, cand, s);
                double total = 0.0;
                for (int j = 0; j < n_cells_; ++j) {
                    if (j == cell || !has_actives(j)) {
                        continue;
                    }
                    // drone-to-drone gate at the victims' epoch-start poses
                    if (ground_distance_sq(pos, snap_.drones[j].position) > consts_.range_sq) {
                        continue;
                    }
                    const auto [b0, b1] = cell_span_[j];
                    for (int a = b0; a < b1; ++a) {
                        total += consts_.expected_power(ground_distance_sq(active_pos_[a], pos));
                    }
                }
                leakage_[key * n_samples_ + s] = total;
            }
            leakage_filled_[key] = 1;
        }
        return leakage_[key * n_samples_ + sample];
    }

    int actives_in(int cell) const { return cell_span_[cell].second - cell_span_[cell].first; }

  private:
    void fill_positions(int cell) {
        for (int c = 0; c < n_cand_; ++c) {
            const CandidatePath path = build_candidate_path(
                snap_.drones[cell], angles_[c], cfg_.direction_update_s, n_samples_);
            for (int s = 0; s < n_samples_; ++s) {
                positions_[(static_cast<std::size_t>(cell) * n_cand_ + c) * n_samples_ + s] =
                    path.samples[s].point;
            }
        }
        has_positions_[cell] = 1;
    }

    const SystemSnapshot& snap_;
    const ScenarioConfig& cfg_;
    ChannelConsts consts_;
    std::vector<double> angles_;
    std::vector<int> tie_order_;
    int n_cells_, n_cand_, n_samples_;
    int n_active_ = 0;

    std::vector<GroundPoint> positions_;
    std::vector<std::uint8_t> has_positions_;
    std::vector<std::pair<int, int>> cell_span_;
    std::vector<GroundPoint> active_pos_;
    std::vector<int> active_cell_;
    std::vector<std::vector<int>> neighbors_;

    std::vector<ServingPowers> serving_;
    std::vector<std::uint8_t> serving_filled_;
    std::vector<std::size_t> interference_base_;
    std::vector<double> interference_;
    std::vector<std::uint8_t> interference_filled_;
    std::vector<double> leakage_;
    std::vector<std::uint8_t> leakage_filled_;
};

std::vector<int> player_cells(const SystemSnapshot& snap) {
    std::vector<int> players;
    for (std::size_t cell = 0; cell < snap.active_users.size(); ++cell) {
        if (!snap.active_users[cell].empty()) {
            players.push_back(static_cast<int>(cell));
        }
    }
    return players;
}

int fallback_candidate(Workspace& ws, const SystemSnapshot& snap, int cell) {
    const GroundPoint center = snap.grid.center(cell);
    const auto& angles = ws.angles();
    int best = ws.tie_order().front();
    double best_d = std::numeric_limits<double>::infinity();
    for (int c : ws.tie_order()) {
        const DronePose end = arc_advance(snap.drones[cell], angles[c],
                                          snap.config->direction_update_s,
                                          snap.config->direction_update_s);
        const double d = ground_distance_sq(end.position, center);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

std::uint64_t total_actives(const SystemSnapshot& snap) {
    std::uint64_t n = 0;
    for (const auto& cell : snap.active_users) {
        n += cell.size();
    }
    return n;
}

} // namespace

double center_fallback(const DronePose& pose, const GroundPoint& cell_center,
                       const std::vector<double>& angles, double update_interval_s) {
    std::vector<int> order(angles.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = static_cast<int>(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const double fa = std::abs(angles[a]);
        const double fb = std::abs(angles[b]);
        if (fa != fb) return fa < fb;
        return angles[a] < angles[b];
    });
    double best_angle = angles[order.front()];
    double best_d = std::numeric_limits<double>::infinity();
    for (int c : order) {
        const DronePose end = arc_advance(pose, angles[c], update_interval_s, update_interval_s);
        const double d = ground_distance_sq(end.position, cell_center);
        if (d < best_d) {
            best_d = d;
            best_angle = angles[c];
        }
    }
    return best_angle;
}

double path_utility_se(int drone, const std::vector<double>& profile_angles,
                       const SystemSnapshot& snapshot) {
    const ScenarioConfig& cfg = *snapshot.config;
    if (snapshot.active_users[drone].empty()) {
        throw DomainError("path_utility_se: drone has no active users");
    }
    const ChannelConsts consts(cfg);
    const int n_cells = static_cast<int>(snapshot.drones.size());
    const int n_samples = cfg.path_samples;

    std::vector<CandidatePath> paths(n_cells);
    for (int j = 0; j < n_cells; ++j) {
        if (j == drone || snapshot.transmitting[j]) {
            paths[j] = build_candidate_path(snapshot.drones[j], profile_angles[j],
                                            cfg.direction_update_s, n_samples);
        }
    }

    const auto& actives = snapshot.active_users[drone];
    double sample_sum = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        double se_sum = 0.0;
        for (int user : actives) {
            const GroundPoint& upos = snapshot.user_positions[user];
            const double d_sq = ground_distance_sq(upos, paths[drone].samples[s].point);
            const double p_los = consts.p_los(d_sq);
            const double s_los = consts.power_los(d_sq);
            const double s_nlos = consts.power_nlos(d_sq);
            double interf = 0.0;
            for (int j = 0; j < n_cells; ++j) {
                if (j == drone || !snapshot.transmitting[j]) {
                    continue;
                }
                const double i_sq = ground_distance_sq(upos, paths[j].samples[s].point);
                if (i_sq > consts.range_sq) {
                    continue;
                }
                interf += consts.expected_power(i_sq);
            }
            const double denom = interf + consts.noise_fullband_watt;
            se_sum += p_los * std::log2(1.0 + s_los / denom) +
                      (1.0 - p_los) * std::log2(1.0 + s_nlos / denom);
        }
        sample_sum += se_sum / static_cast<double>(actives.size());
    }
    return sample_sum / static_cast<double>(n_samples);
}

DecisionOutcome decide_hov(const SystemSnapshot& snapshot) {
    DecisionOutcome outcome;
    outcome.angles.assign(snapshot.drones.size(), 0.0);
    return outcome;
}

DecisionOutcome decide_snr(const SystemSnapshot& snapshot) {
    Workspace ws(snapshot);
    DecisionOutcome outcome;
    outcome.angles.assign(snapshot.drones.size(), 0.0);
    for (int cell = 0; cell < ws.cells(); ++cell) {
        if (!ws.has_actives(cell)) {
            outcome.angles[cell] = ws.angles()[fallback_candidate(ws, snapshot, cell)];
            outcome.diag.position_reads += 1;
            continue;
        }
        outcome.diag.position_reads += 1 + ws.actives_in(cell);
        int best = ws.tie_order().front();
        double best_score = -std::numeric_limits<double>::infinity();
        for (int c : ws.tie_order()) {
            const double score = ws.snr_score(cell, c);
            if (score > best_score) {
                best_score = score;
                best = c;
            }
        }
        outcome.angles[cell] = ws.angles()[best];
    }
    return outcome;
}

DecisionOutcome decide_slr(const SystemSnapshot& snapshot) {
    Workspace ws(snapshot);
    DecisionOutcome outcome;
    outcome.angles.assign(snapshot.drones.size(), 0.0);
    const double range_sq = ws.consts().range_sq;
    for (int cell = 0; cell < ws.cells(); ++cell) {
        if (!ws.has_actives(cell)) {
            outcome.angles[cell] = ws.angles()[fallback_candidate(ws, snapshot, cell)];
            outcome.diag.position_reads += 1;
            continue;
        }
        outcome.diag.position_reads += ws.cells() + ws.actives_in(cell);
        for (int j = 0; j < ws.cells(); ++j) {
            if (j == cell || !ws.has_actives(j)) {
                continue;
            }
            if (ground_distance_sq(snapshot.drones[cell].position,
                                   snapshot.drones[j].position) <= range_sq) {
                outcome.diag.position_reads += ws.actives_in(j);
            }
        }
        int best = ws.tie_order().front();
        double best_score = -std::numeric_limits<double>::infinity();
        for (int c : ws.tie_order()) {
            const double score = ws.slr_score(cell, c);
            if (score > best_score) {
                best_score = score;
                best = c;
            }
        }
        outcome.angles[cell] = ws.angles()[best];
    }
    return outcome;
}

DecisionOutcome decide_gt(const SystemSnapshot& snapshot, Rng& rng) {
    Workspace ws(snapshot);
    const std::vector<int> players = player_cells(snapshot);
    DecisionOutcome outcome;
    outcome.angles.assign(snapshot.drones.size(), 0.0);

    const std::uint64_t actives = total_actives(snapshot);
    outcome.diag.position_reads =
        static_cast<std::uint64_t>(players.size()) * (players.size() + actives);

    for (int cell = 0; cell < ws.cells(); ++cell) {
        if (!ws.has_actives(cell)) {
            outcome.angles[cell] = ws.angles()[fallback_candidate(ws, snapshot, cell)];
            outcome.diag.position_reads += 1;
        }
    }
    if (players.empty()) {
        outcome.diag.gt_converged = true;
        return outcome;
    }

    std::vector<int> profile(ws.cells(), (ws.candidates() - 1) / 2);
    for (int p : players) {
        profile[p] = static_cast<int>(rng.uniform_int(ws.candidates()));
    }

    const bool sequential = snapshot.config->gt_sequential;
    bool converged = false;
    int sweeps = 0;
    std::vector<int> next = profile;
    while (sweeps < snapshot.config->gt_max_sweeps) {
        ++sweeps;
        bool changed = false;
        for (int p : players) {
            // synchronous sweeps respond to the previous profile (mutating
            // only `next`); sequential mode responds to the evolving one
            int best = profile[p];
            double best_u = -std::numeric_limits<double>::infinity();
            for (int c : ws.tie_order()) {
                const double u = ws.utility(p, profile, c);
                if (u > best_u) {
                    best_u = u;
                    best = c;
                }
            }
            if (sequential) {
                if (best != profile[p]) {
                    changed = true;
                }
                profile[p] = best;
            } else {
                next[p] = best;
            }
        }
        if (!sequential) {
            changed = next != profile;
            profile = next;
        }
        if (!changed) {
            converged = true;
            break;
        }
    }

    outcome.diag.gt_sweeps = sweeps;
    outcome.diag.gt_converged = converged;
    for (int p : players) {
        outcome.angles[p] = ws.angles()[profile[p]];
    }
    return outcome;
}

DecisionOutcome decide_opt(const SystemSnapshot& snapshot) {
    Workspace ws(snapshot);
    const std::vector<int> players = player_cells(snapshot);
    DecisionOutcome outcome;
    outcome.angles.assign(snapshot.drones.size(), 0.0);

    const std::uint64_t actives = total_actives(snapshot);
    outcome.diag.position_reads =
        static_cast<std::uint64_t>(players.size()) * (players.size() + actives);

    for (int cell = 0; cell < ws.cells(); ++cell) {
        if (!ws.has_actives(cell)) {
            outcome.angles[cell] = ws.angles()[fallback_candidate(ws, snapshot, cell)];
            outcome.diag.position_reads += 1;
        }
    }
    if (players.empty()) {
        return outcome;
    }

    const double required = std::pow(static_cast<double>(ws.candidates()),
                                     static_cast<double>(players.size()));
    if (required > snapshot.config->opt_profile_budget) {
        throw InfeasibleSearch(required, snapshot.config->opt_profile_budget);
    }

    // odometer over tie-break order: the first maximum found is the
    // lexicographically smallest profile by (|theta|, sign)
    std::vector<int> digits(players.size(), 0);
    std::vector<int> profile(ws.cells(), (ws.candidates() - 1) / 2);
    std::vector<int> best_profile;
    double best_u = -std::numeric_limits<double>::infinity();
    double evaluated = 0.0;
    while (true) {
        for (std::size_t i = 0; i < players.size(); ++i) {
            profile[players[i]] = ws.tie_order()[digits[i]];
        }
        double total = 0.0;
        for (int p : players) {
            total += ws.utility(p, profile, profile[p]);
        }
        const double u = total / static_cast<double>(players.size());
        evaluated += 1.0;
        if (u > best_u) {
            best_u = u;
            best_profile.assign(players.size(), 0);
            for (std::size_t i = 0; i < players.size(); ++i) {
                best_profile[i] = profile[players[i]];
            }
        }
        // advance the odometer, most-significant digit first so enumeration
        // order matches lexicographic order over players
        int pos = static_cast<int>(players.size()) - 1;
        while (pos >= 0 && digits[pos] == ws.candidates() - 1) {
            digits[pos] = 0;
            --pos;
        }
        if (pos < 0) {
            break;
        }
        ++digits[pos];
    }

    outcome.diag.opt_profiles = evaluated;
    for (std::size_t i = 0; i < players.size(); ++i) {
        outcome.angles[players[i]] = ws.angles()[best_profile[i]];
    }
    return outcome;
}

DecisionOutcome decide(DmaKind dma, const SystemSnapshot& snapshot, Rng& gt_rng) {
    switch (dma) {
    case DmaKind::Hov: return decide_hov(snapshot);
    case DmaKind::Snr: return decide_snr(snapshot);
    case DmaKind::Slr: return decide_slr(snapshot);
    case DmaKind::Gt: return decide_gt(snapshot, gt_rng);
    case DmaKind::Opt: return decide_opt(snapshot);
    }
    return decide_hov(snapshot);
}

} // namespace dbsim
