#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rismec/channel.hpp"
#include "rismec/decision.hpp"
#include "rismec/errors.hpp"
#include "rismec/queueing.hpp"
#include "rismec/ris_allocator.hpp"
#include "rismec/scenario.hpp"

namespace rismec {

/// Queue-pressure weights driving the radio subproblem. A user transmits
/// uplink only while its up-weight is positive.
struct RadioWeights {
    std::vector<double> up;   // (Q_local - Q_remote + Z) * B_up * tau, may be negative
    std::vector<double> down; // (Q_ap + Z) * B_down * tau, never negative

    bool transmits(std::size_t k) const { return up[k] > 0.0; }
};

inline RadioWeights compute_radio_weights(const QueueState& state,
                                          const std::vector<UserSpec>& users,
                                          const TimingSpec& timing) {
    RadioWeights w;
    const double tau = timing.payload_s;
    w.up.resize(state.size());
    w.down.resize(state.size());
    for (std::size_t k = 0; k < state.size(); ++k) {
        w.up[k] = (state.local_bits[k] - state.remote_bits[k] + state.virt_bits[k]) *
                  users[k].uplink_bandwidth_hz * tau;
        w.down[k] =
            (state.ap_bits[k] + state.virt_bits[k]) * users[k].downlink_bandwidth_hz * tau;
    }
    return w;
}

/// Per-slot power ceilings: uplink capped by both the device limit and the
/// queue-emptying power, downlink by the queue-emptying power and the shared
/// AP budget.
struct PowerCaps {
    std::vector<double> uplink_w;
    std::vector<double> downlink_w;
    double ap_budget_w = 0.0;
};

/// Power that empties `queue` bits within the payload period at the given
/// normalized gain: the rate equation inverted at tau * R = queue. Zero gain
/// yields +inf; callers fall back to the device cap or the AP budget.
inline double drain_power(double queue_bits, double alpha, double bandwidth_hz,
                          const TimingSpec& timing) {
    if (queue_bits <= 0.0) return 0.0;
    if (alpha <= 0.0) return std::numeric_limits<double>::infinity();
    return (std::exp2(queue_bits / (timing.payload_s * bandwidth_hz)) - 1.0) / alpha;
}

/// Closed-form uplink powers. Strict KKT stationarity of the per-user scalar
/// objective, clamped to [0, cap]; sigma = 0 removes the energy term, so
/// transmitting users fill their cap.
inline std::vector<double> uplink_powers(const RadioWeights& weights,
                                         const std::vector<double>& gains,
                                         const PowerCaps& caps, double v_param,
                                         double sigma, const TimingSpec& timing) {
    std::vector<double> p(weights.up.size(), 0.0);
    const double scale = v_param * sigma * timing.payload_s * std::numbers::ln2;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (!weights.transmits(k) || gains[k] <= 0.0) continue;
        if (sigma == 0.0) {
            p[k] = caps.uplink_w[k];
        } else {
            const double level = weights.up[k] / scale - 1.0 / gains[k];
            p[k] = std::clamp(level, 0.0, caps.uplink_w[k]);
        }
    }
    return p;
}

namespace detail {

inline double waterfill_power(double weight, double gain, double cap, double denom) {
    if (weight <= 0.0 || gain <= 0.0) return 0.0;
    const double level = weight / (denom * std::numbers::ln2) - 1.0 / gain;
    return std::clamp(level, 0.0, cap);
}

} // namespace detail

/// Downlink powers per the KKT system: clamped stationary candidates first;
/// if they overrun the AP budget, a monotone bisection on the budget
/// multiplier nu enforces sum = P_a (residual within 1e-9 * P_a).
inline std::vector<double> downlink_powers(const RadioWeights& weights,
                                           const std::vector<double>& gains,
                                           const PowerCaps& caps, double v_param,
                                           double sigma, const TimingSpec& timing) {
    const std::size_t num_users = weights.down.size();
    const double base = v_param * (1.0 - sigma) * timing.payload_s;

    std::vector<double> cand(num_users, 0.0);
    for (std::size_t k = 0; k < num_users; ++k) {
        if (weights.down[k] <= 0.0 || gains[k] <= 0.0) continue;
        cand[k] = (sigma == 1.0)
                      ? caps.downlink_w[k]
                      : detail::waterfill_power(weights.down[k], gains[k],
                                                caps.downlink_w[k], base);
    }

    double total = 0.0;
    for (double c : cand) total += c;
    if (total <= caps.ap_budget_w) return cand;

    // Bisection driven well past the 1e-9 * P_a residual tolerance; the extra
    // iterations are cheap and keep nu * residual slackness products tiny.
    const double tol = 1e-9 * caps.ap_budget_w;
    auto residual = [&](double nu) {
        double sum = 0.0;
        for (std::size_t k = 0; k < num_users; ++k)
            sum += detail::waterfill_power(weights.down[k], gains[k], caps.downlink_w[k],
                                           base + nu);
        return sum - caps.ap_budget_w;
    };

    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 2000 && residual(hi) > 0.0; ++i) hi *= 2.0;
    double mid = hi;
    for (int i = 0; i < 200; ++i) {
        mid = 0.5 * (lo + hi);
        const double r = residual(mid);
        if (std::abs(r) <= tol && i >= 100) break;
        (r > 0.0 ? lo : hi) = mid;
    }
    std::vector<double> p(num_users, 0.0);
    for (std::size_t k = 0; k < num_users; ++k)
        p[k] = detail::waterfill_power(weights.down[k], gains[k], caps.downlink_w[k],
                                       base + mid);
    return p;
}

/// Radio part of the per-slot decision plus the two objective values the
/// sleep comparison was made from.
struct RadioAllocation {
    bool ap_active = false;
    std::vector<CVector> ris_vectors;
    std::vector<double> uplink_power_w;
    std::vector<double> downlink_power_w;
    double surrogate_value = 0.0;
    double omega_sleep = 0.0;
    double omega_active = 0.0;
};

/// Full radio allocation for one slot: greedy RIS configuration on the
/// surrogate, queue-emptying caps under the chosen configuration, closed-form
/// uplink and water-filled downlink powers, then the sleep/active comparison.
/// Ties go to sleep. Sleeping zeroes every power and RIS coefficient.
inline RadioAllocation decide_ap_state(const RadioWeights& weights,
                                       const QueueState& state,
                                       const ChannelRealization& channels,
                                       const ScenarioConfig& cfg) {
    const double tau = cfg.timing.payload_s;
    const double v = cfg.v_param;
    const double sigma = cfg.sigma;
    const std::size_t num_users = cfg.num_users();

    RadioAllocation sleep;
    sleep.ap_active = false;
    for (const auto& r : cfg.riss) sleep.ris_vectors.push_back(CVector::Zero(r.num_elements));
    sleep.uplink_power_w.assign(num_users, 0.0);
    sleep.downlink_power_w.assign(num_users, 0.0);
    const double omega_sleep = v * (1.0 - sigma) * tau * cfg.ap.sleep_power_w;

    // Active case: RIS first, then powers under the resulting gains.
    const SurrogateMatrix m =
        build_surrogate_matrix(channels, weights.up, weights.down, cfg.users,
                               cfg.events.noise_psd_w_hz, v, sigma, cfg.timing, cfg.riss);
    std::vector<PhaseAlphabet> alphabets;
    std::vector<int> blocks;
    for (const auto& r : cfg.riss) {
        alphabets.push_back(phase_alphabet(r.phase_bits));
        blocks.push_back(r.num_blocks);
    }
    RisDecision ris = greedy_optimize(m, alphabets, blocks);

    std::vector<double> up_gain(num_users), dn_gain(num_users);
    PowerCaps caps;
    caps.uplink_w.resize(num_users);
    caps.downlink_w.resize(num_users);
    caps.ap_budget_w = cfg.ap.max_tx_power_w;
    for (std::size_t k = 0; k < num_users; ++k) {
        up_gain[k] = effective_gain(LinkDirection::uplink, k, ris.vectors, channels,
                                    cfg.users[k].uplink_bandwidth_hz,
                                    cfg.events.noise_psd_w_hz);
        dn_gain[k] = effective_gain(LinkDirection::downlink, k, ris.vectors, channels,
                                    cfg.users[k].downlink_bandwidth_hz,
                                    cfg.events.noise_psd_w_hz);
        caps.uplink_w[k] = std::min(
            cfg.users[k].max_power_w,
            drain_power(state.local_bits[k], up_gain[k], cfg.users[k].uplink_bandwidth_hz,
                        cfg.timing));
        caps.downlink_w[k] = drain_power(state.ap_bits[k], dn_gain[k],
                                         cfg.users[k].downlink_bandwidth_hz, cfg.timing);
    }

    const auto up = uplink_powers(weights, up_gain, caps, v, sigma, cfg.timing);
    const auto dn = downlink_powers(weights, dn_gain, caps, v, sigma, cfg.timing);

    double omega_active = 0.0;
    double power_term = 0.0;
    for (std::size_t k = 0; k < num_users; ++k) {
        omega_active -= weights.up[k] * std::log2(1.0 + up_gain[k] * up[k]);
        omega_active -= weights.down[k] * std::log2(1.0 + dn_gain[k] * dn[k]);
        power_term += sigma * up[k] + (1.0 - sigma) * dn[k];
    }
    double ris_power = 0.0;
    for (std::size_t i = 0; i < cfg.num_riss(); ++i) {
        double on = 0.0;
        for (Eigen::Index l = 0; l < ris.vectors[i].size(); ++l)
            on += std::norm(ris.vectors[i][l]);
        ris_power += cfg.riss[i].element_power_w * on;
    }
    omega_active +=
        v * tau * (power_term + (1.0 - sigma) * (cfg.ap.active_power_w + ris_power));

    if (omega_sleep <= omega_active) {
        sleep.surrogate_value = ris.surrogate_value;
        sleep.omega_sleep = omega_sleep;
        sleep.omega_active = omega_active;
        return sleep;
    }
    RadioAllocation active;
    active.ap_active = true;
    active.ris_vectors = std::move(ris.vectors);
    active.uplink_power_w = up;
    active.downlink_power_w = dn;
    active.surrogate_value = ris.surrogate_value;
    active.omega_sleep = omega_sleep;
    active.omega_active = omega_active;
    return active;
}

} // namespace rismec
