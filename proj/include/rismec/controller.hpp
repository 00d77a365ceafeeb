#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "rismec/channel.hpp"
#include "rismec/compute_allocator.hpp"
#include "rismec/decision.hpp"
#include "rismec/energy.hpp"
#include "rismec/queueing.hpp"
#include "rismec/radio_allocator.hpp"
#include "rismec/rng.hpp"
#include "rismec/scenario.hpp"

namespace rismec {

/// Per-slot observables. Queue fields are end-of-slot values (the state
/// carried into the next slot); the delay estimate is backlog over arrival
/// rate, per Little's law.
struct SlotMetrics {
    EnergyBreakdown energy;
    std::vector<double> backlog_bits;
    std::vector<double> virtual_bits;
    std::vector<double> delay_estimate_s;
    std::vector<double> up_rate_bps;
    std::vector<double> down_rate_bps;
    bool ap_active = false;
    double surrogate = 0.0;
    double es_freq_hz = 0.0;
};

struct EpisodeSummary {
    double avg_weighted_j = 0.0;
    double avg_user_j = 0.0;
    double avg_ap_j = 0.0;
    double avg_es_j = 0.0;
    double avg_ris_j = 0.0;
    std::vector<double> avg_backlog_bits; // per user
    std::vector<double> avg_delay_s;      // per user, avg backlog / arrival rate
    double mean_delay_s = 0.0;            // across users
    double duty_cycle = 0.0;
};

struct EpisodeResult {
    std::vector<SlotMetrics> slots;
    EpisodeSummary summary;
    int ma_window = 100;
    std::vector<double> ma_user_energy_j;     // trailing-window moving averages
    std::vector<double> ma_weighted_energy_j;
    std::vector<double> ma_delay_s; // mean over users of the per-user estimate
    QueueState final_state;
};

/// Channels for a slot. The default generates them stochastically; tests and
/// trace replay substitute their own source.
using ChannelProvider =
    std::function<ChannelRealization(const ScenarioConfig&, std::int64_t)>;

inline ChannelProvider default_channel_provider() {
    return [](const ScenarioConfig& cfg, std::int64_t slot) {
        return generate_channels(cfg, slot);
    };
}

/// One control slot: draw channels, decide radio and compute allocations from
/// slot-start queues (on CSI estimates when configured), realize rates on the
/// true channels, then advance physical and virtual queues.
inline std::pair<QueueState, SlotMetrics> run_slot(const QueueState& state,
                                                   const ScenarioConfig& cfg,
                                                   std::int64_t slot,
                                                   const ChannelProvider& channels) {
    const std::size_t num_users = cfg.num_users();
    const ChannelRealization truth = channels(cfg, slot);

    ChannelRealization estimate = truth;
    if (cfg.events.csi_snr) {
        auto rng = make_engine(cfg.rng_seed, static_cast<std::uint64_t>(slot),
                               StreamTag::csi_noise);
        estimate = corrupt_csi(truth, *cfg.events.csi_snr, rng);
    }

    const RadioWeights rweights = compute_radio_weights(state, cfg.users, cfg.timing);
    const ComputeWeights cweights = compute_cpu_weights(state, cfg.users, cfg.timing);

    const RadioAllocation radio = decide_ap_state(rweights, state, estimate, cfg);
    const CpuAllocation cpu = choose_es_frequency(cweights, state.remote_bits, cfg.users,
                                                  cfg.server, cfg.v_param, cfg.sigma,
                                                  cfg.timing);

    AllocationDecision decision;
    decision.ap_active = radio.ap_active;
    decision.ris_vectors = radio.ris_vectors;
    decision.uplink_power_w = radio.uplink_power_w;
    decision.downlink_power_w = radio.downlink_power_w;
    decision.cpu_split_hz = cpu.split_hz;
    decision.es_freq_hz = cpu.es_freq_hz;

    RealizedRates rates;
    rates.uplink_bps.assign(num_users, 0.0);
    rates.downlink_bps.assign(num_users, 0.0);
    if (decision.ap_active) {
        for (std::size_t k = 0; k < num_users; ++k) {
            const double up_gain =
                effective_gain(LinkDirection::uplink, k, decision.ris_vectors, truth,
                               cfg.users[k].uplink_bandwidth_hz, cfg.events.noise_psd_w_hz);
            const double dn_gain =
                effective_gain(LinkDirection::downlink, k, decision.ris_vectors, truth,
                               cfg.users[k].downlink_bandwidth_hz,
                               cfg.events.noise_psd_w_hz);
            rates.uplink_bps[k] = cfg.users[k].uplink_bandwidth_hz *
                                  std::log2(1.0 + up_gain * decision.uplink_power_w[k]);
            rates.downlink_bps[k] = cfg.users[k].downlink_bandwidth_hz *
                                    std::log2(1.0 + dn_gain * decision.downlink_power_w[k]);
        }
    }

    auto arrivals_rng =
        make_engine(cfg.rng_seed, static_cast<std::uint64_t>(slot), StreamTag::arrivals);
    std::vector<std::int64_t> arrivals(num_users, 0);
    for (std::size_t k = 0; k < num_users; ++k)
        arrivals[k] = poisson_arrivals(cfg.users[k], cfg.timing, arrivals_rng);

    QueueState next = advance_physical(state, decision, rates, arrivals, cfg.timing, cfg.users);
    next = advance_virtual(next, cfg.users);

    SlotMetrics metrics;
    metrics.energy = slot_energy(decision, cfg);
    metrics.backlog_bits.resize(num_users);
    metrics.virtual_bits.resize(num_users);
    metrics.delay_estimate_s.resize(num_users);
    for (std::size_t k = 0; k < num_users; ++k) {
        metrics.backlog_bits[k] = total_backlog(next, k);
        metrics.virtual_bits[k] = next.virt_bits[k];
        metrics.delay_estimate_s[k] =
            cfg.users[k].arrival_rate_bps > 0.0
                ? metrics.backlog_bits[k] / cfg.users[k].arrival_rate_bps
                : 0.0;
    }
    metrics.up_rate_bps = rates.uplink_bps;
    metrics.down_rate_bps = rates.downlink_bps;
    metrics.ap_active = decision.ap_active;
    metrics.surrogate = radio.surrogate_value;
    metrics.es_freq_hz = decision.es_freq_hz;
    return {std::move(next), std::move(metrics)};
}

namespace detail {

/// Trailing moving average over at most `window` samples.
inline std::vector<double> moving_average(const std::vector<double>& x, int window) {
    std::vector<double> out(x.size(), 0.0);
    double acc = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        acc += x[t];
        if (t >= static_cast<std::size_t>(window)) acc -= x[t - window];
        const double n = std::min<std::size_t>(t + 1, static_cast<std::size_t>(window));
        out[t] = acc / static_cast<double>(n);
    }
    return out;
}

} // namespace detail

/// Runs the whole control loop from empty queues. Every long-run figure in
/// the summary is recomputable from the per-slot sequence.
inline EpisodeResult run_episode(const ScenarioConfig& cfg,
                                 const ChannelProvider& channels, int ma_window) {
    const std::size_t num_users = cfg.num_users();
    EpisodeResult result;
    result.ma_window = ma_window;
    result.slots.reserve(static_cast<std::size_t>(cfg.horizon));

    QueueState state = QueueState::zeros(num_users);
    for (std::int64_t t = 0; t < cfg.horizon; ++t) {
        auto [next, metrics] = run_slot(state, cfg, t, channels);
        state = std::move(next);
        result.slots.push_back(std::move(metrics));
    }
    result.final_state = state;

    const double slots = static_cast<double>(result.slots.size());
    auto& s = result.summary;
    s.avg_backlog_bits.assign(num_users, 0.0);
    s.avg_delay_s.assign(num_users, 0.0);
    std::vector<double> user_energy(result.slots.size());
    std::vector<double> weighted_energy(result.slots.size());
    std::vector<double> delay_series(result.slots.size());
    for (std::size_t t = 0; t < result.slots.size(); ++t) {
        const auto& m = result.slots[t];
        s.avg_weighted_j += m.energy.weighted_j;
        s.avg_user_j += m.energy.user_sum_j();
        s.avg_ap_j += m.energy.ap_j;
        s.avg_es_j += m.energy.server_j;
        s.avg_ris_j += m.energy.ris_sum_j();
        s.duty_cycle += m.ap_active ? 1.0 : 0.0;
        double delay_mean = 0.0;
        for (std::size_t k = 0; k < num_users; ++k) {
            s.avg_backlog_bits[k] += m.backlog_bits[k];
            delay_mean += m.delay_estimate_s[k];
        }
        user_energy[t] = m.energy.user_sum_j();
        weighted_energy[t] = m.energy.weighted_j;
        delay_series[t] = delay_mean / static_cast<double>(num_users);
    }
    s.avg_weighted_j /= slots;
    s.avg_user_j /= slots;
    s.avg_ap_j /= slots;
    s.avg_es_j /= slots;
    s.avg_ris_j /= slots;
    s.duty_cycle /= slots;
    for (std::size_t k = 0; k < num_users; ++k) {
        s.avg_backlog_bits[k] /= slots;
        s.avg_delay_s[k] = cfg.users[k].arrival_rate_bps > 0.0
                               ? s.avg_backlog_bits[k] / cfg.users[k].arrival_rate_bps
                               : 0.0;
        s.mean_delay_s += s.avg_delay_s[k];
    }
    s.mean_delay_s /= static_cast<double>(num_users);

    result.ma_user_energy_j = detail::moving_average(user_energy, ma_window);
    result.ma_weighted_energy_j = detail::moving_average(weighted_energy, ma_window);
    result.ma_delay_s = detail::moving_average(delay_series, ma_window);
    return result;
}

inline EpisodeResult run_episode(const ScenarioConfig& cfg) {
    return run_episode(cfg, default_channel_provider(), 100);
}

} // namespace rismec
