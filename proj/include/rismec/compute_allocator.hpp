#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rismec/errors.hpp"
#include "rismec/queueing.hpp"
#include "rismec/scenario.hpp"

namespace rismec {

/// Queue-pressure weights for CPU scheduling. Only users with positive weight
/// are eligible for server cycles.
struct ComputeWeights {
    std::vector<double> y; // (-c * Q_ap + Q_remote + Z) * J * tau

    bool eligible(std::size_t k) const { return y[k] > 0.0; }
};

inline ComputeWeights compute_cpu_weights(const QueueState& state,
                                          const std::vector<UserSpec>& users,
                                          const TimingSpec& timing) {
    ComputeWeights w;
    w.y.resize(state.size());
    for (std::size_t k = 0; k < state.size(); ++k) {
        w.y[k] = (-users[k].output_ratio * state.ap_bits[k] + state.remote_bits[k] +
                  state.virt_bits[k]) *
                 users[k].bits_per_cycle * timing.payload_s;
    }
    return w;
}

namespace detail {

/// Eligible users in decreasing weight order, ties by lower index.
inline std::vector<std::size_t> cpu_priority_order(const ComputeWeights& weights) {
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < weights.y.size(); ++k)
        if (weights.eligible(k)) order.push_back(k);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return weights.y[a] > weights.y[b]; });
    return order;
}

inline std::vector<double> fill_cpu(const std::vector<std::size_t>& order,
                                    const std::vector<double>& remote_bits,
                                    const std::vector<UserSpec>& users, double f_total,
                                    const TimingSpec& timing) {
    std::vector<double> f(users.size(), 0.0);
    double available = f_total;
    for (std::size_t k : order) {
        if (available <= 0.0) break;
        const double cap =
            remote_bits[k] / (timing.payload_s * users[k].bits_per_cycle);
        f[k] = std::min(cap, available);
        available -= f[k];
    }
    return f;
}

} // namespace detail

/// Greedy split of one ES frequency across users: largest weights first, each
/// capped at what empties its remote queue. At most K steps.
inline std::vector<double> schedule_cpu(const ComputeWeights& weights,
                                        const std::vector<double>& remote_bits,
                                        const std::vector<UserSpec>& users, double f_total,
                                        const TimingSpec& timing) {
    return detail::fill_cpu(detail::cpu_priority_order(weights), remote_bits, users, f_total,
                            timing);
}

struct CpuAllocation {
    double es_freq_hz = 0.0;
    std::vector<double> split_hz;
};

/// Evaluates the greedy split for every admissible ES frequency and keeps the
/// one minimizing -sum Y_k f_k + V (1-sigma) tau gamma f^3. One shared
/// priority sort serves all frequencies; objective ties pick the slower
/// (cheaper) frequency.
inline CpuAllocation choose_es_frequency(const ComputeWeights& weights,
                                         const std::vector<double>& remote_bits,
                                         const std::vector<UserSpec>& users,
                                         const ServerSpec& server, double v_param,
                                         double sigma, const TimingSpec& timing) {
    if (server.freq_set_hz.empty())
        throw ContractViolation("choose_es_frequency: empty frequency set");
    const auto order = detail::cpu_priority_order(weights);
    const double energy_scale =
        v_param * (1.0 - sigma) * timing.payload_s * server.switched_capacitance_ws3;

    CpuAllocation best;
    double best_objective = std::numeric_limits<double>::infinity();
    for (double f : server.freq_set_hz) {
        auto split = detail::fill_cpu(order, remote_bits, users, f, timing);
        double reward = 0.0;
        for (std::size_t k = 0; k < split.size(); ++k) reward += weights.y[k] * split[k];
        const double objective = -reward + energy_scale * f * f * f;
        if (objective < best_objective) {
            best_objective = objective;
            best.es_freq_hz = f;
            best.split_hz = std::move(split);
        }
    }
    return best;
}

} // namespace rismec
