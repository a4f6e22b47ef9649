#pragma once

#include <span>
#include <vector>

namespace dbsim {

/// Per-slot bandwidth shares, ordered by user id. Sum of shares is either 0
/// (idle cell) or the full cell bandwidth.
struct Allocation {
    std::vector<std::pair<int, double>> shares; // (user id, b_u in Hz)

    double total_hz() const {
        double sum = 0.0;
        for (const auto& [user, hz] : shares) {
            sum += hz;
        }
        return sum;
    }
};

/// Equal share: B / |active| each.
Allocation allocate_equal(std::span<const int> active_users, double bandwidth_hz);

/// Channel-quality based: the single best user takes the whole band.
/// quality[i] belongs to active_users[i]; exact ties go to the lowest id.
Allocation allocate_cq(std::span<const int> active_users, double bandwidth_hz,
                       std::span<const double> quality);

} // namespace dbsim
