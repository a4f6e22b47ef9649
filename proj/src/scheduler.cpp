#include "dbsim/scheduler.hpp"

namespace dbsim {

Allocation allocate_equal(std::span<const int> active_users, double bandwidth_hz) {
    Allocation alloc;
    if (active_users.empty()) {
        return alloc;
    }
    const double share = bandwidth_hz / static_cast<double>(active_users.size());
    alloc.shares.reserve(active_users.size());
    for (int user : active_users) {
        alloc.shares.emplace_back(user, share);
    }
    return alloc;
}

Allocation allocate_cq(std::span<const int> active_users, double bandwidth_hz,
                       std::span<const double> quality) {
    Allocation alloc;
    if (active_users.empty()) {
        return alloc;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < active_users.size(); ++i) {
        // ties resolve to the lowest user id
        const bool better = quality[i] > quality[best] ||
                            (quality[i] == quality[best] && active_users[i] < active_users[best]);
        if (better) {
            best = i;
        }
    }
    alloc.shares.reserve(active_users.size());
    for (std::size_t i = 0; i < active_users.size(); ++i) {
        alloc.shares.emplace_back(active_users[i], i == best ? bandwidth_hz : 0.0);
    }
    return alloc;
}

} // namespace dbsim
