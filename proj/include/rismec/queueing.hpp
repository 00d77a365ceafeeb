#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "rismec/decision.hpp"
#include "rismec/scenario.hpp"

namespace rismec {

/// Per-direction bit rates realized in a slot.
struct RealizedRates {
    std::vector<double> uplink_bps;
    std::vector<double> downlink_bps;
};

/// Physical backlogs (device-local, edge-server remote, AP downlink) plus the
/// virtual queue tracking the long-term backlog constraint. Queues are
/// real-valued bits: service terms (rate x time) are generally fractional.
struct QueueState {
    std::vector<double> local_bits;
    std::vector<double> remote_bits;
    std::vector<double> ap_bits;
    std::vector<double> virt_bits;

    static QueueState zeros(std::size_t num_users) {
        QueueState s;
        s.local_bits.assign(num_users, 0.0);
        s.remote_bits.assign(num_users, 0.0);
        s.ap_bits.assign(num_users, 0.0);
        s.virt_bits.assign(num_users, 0.0);
        return s;
    }
    std::size_t size() const { return local_bits.size(); }
};

/// Sum of the communication and computation backlogs for one user.
inline double total_backlog(const QueueState& state, std::size_t user) {
    return state.local_bits[user] + state.remote_bits[user] + state.ap_bits[user];
}

/// One-slot update of the three physical queues. All three recursions read
/// slot-start values: the carry terms min(Q^l, tau*R) and min(Q^r, tau*f*J)
/// use the state at the start of the slot, not the freshly updated one.
inline QueueState advance_physical(const QueueState& state, const AllocationDecision& decision,
                                   const RealizedRates& rates,
                                   const std::vector<std::int64_t>& arrivals_bits,
                                   const TimingSpec& timing,
                                   const std::vector<UserSpec>& users) {
    QueueState next = state;
    const double tau = timing.payload_s;
    for (std::size_t k = 0; k < state.size(); ++k) {
        const double up_served = tau * rates.uplink_bps[k];
        const double dn_served = tau * rates.downlink_bps[k];
        const double cycles_bits = tau * decision.cpu_split_hz[k] * users[k].bits_per_cycle;

        const double local_old = state.local_bits[k];
        const double remote_old = state.remote_bits[k];
        const double ap_old = state.ap_bits[k];

        next.local_bits[k] =
            std::max(0.0, local_old - up_served) + static_cast<double>(arrivals_bits[k]);
        next.remote_bits[k] =
            std::max(0.0, remote_old - cycles_bits) + std::min(local_old, up_served);
        next.ap_bits[k] = std::max(0.0, ap_old - dn_served) +
                          users[k].output_ratio * std::min(remote_old, cycles_bits);
    }
    return next;
}

/// Virtual-queue step, run after the physical queues have advanced to t+1:
/// Z <- max(0, Z + eps * (Q_tot(t+1) - Q_avg)).
inline QueueState advance_virtual(const QueueState& state,
                                  const std::vector<UserSpec>& users) {
    QueueState next = state;
    for (std::size_t k = 0; k < state.size(); ++k) {
        const double excess = total_backlog(state, k) - users[k].queue_bound_bits;
        next.virt_bits[k] = std::max(0.0, state.virt_bits[k] + users[k].step_size * excess);
    }
    return next;
}

} // namespace rismec
