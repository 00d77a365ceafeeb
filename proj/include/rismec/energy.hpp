#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "rismec/decision.hpp"
#include "rismec/errors.hpp"
#include "rismec/scenario.hpp"

namespace rismec {

struct EnergyBreakdown {
    std::vector<double> per_user_j;
    double ap_j = 0.0;
    double server_j = 0.0;
    std::vector<double> per_ris_j;
    double weighted_j = 0.0;

    double user_sum_j() const {
        return std::accumulate(per_user_j.begin(), per_user_j.end(), 0.0);
    }
    double ris_sum_j() const {
        return std::accumulate(per_ris_j.begin(), per_ris_j.end(), 0.0);
    }
};

namespace detail {

inline bool in_freq_set(double f, const std::vector<double>& set) {
    for (double g : set) {
        const double tol = 1e-9 * std::max(1.0, std::abs(g));
        if (std::abs(f - g) <= tol) return true;
    }
    return false;
}

/// Cheap feasibility audit of a decision against the per-slot constraint set.
inline void check_feasible(const AllocationDecision& d, const ScenarioConfig& cfg) {
    const double ia = d.ap_active ? 1.0 : 0.0;
    const double ptol = 1e-9;
    double dn_sum = 0.0;
    for (std::size_t k = 0; k < cfg.num_users(); ++k) {
        const double up = d.uplink_power_w[k];
        const double dn = d.downlink_power_w[k];
        if (up < -ptol || up > cfg.users[k].max_power_w * ia * (1.0 + ptol) + ptol)
            throw ContractViolation("slot_energy: uplink power outside [0, P_k * I_a]");
        if (dn < -ptol) throw ContractViolation("slot_energy: negative downlink power");
        dn_sum += dn;
    }
    if (dn_sum > cfg.ap.max_tx_power_w * ia * (1.0 + 1e-8) + ptol)
        throw ContractViolation("slot_energy: downlink sum exceeds AP budget");
    for (std::size_t i = 0; i < cfg.num_riss(); ++i) {
        for (Eigen::Index l = 0; l < d.ris_vectors[i].size(); ++l) {
            const double m = std::abs(d.ris_vectors[i][l]);
            if (m > ia + 1e-9 || (m > 1e-9 && std::abs(m - 1.0) > 1e-9))
                throw ContractViolation("slot_energy: RIS coefficient modulus not in {0, I_a}");
        }
    }
    double f_sum = 0.0;
    for (double f : d.cpu_split_hz) {
        if (f < -1e-6) throw ContractViolation("slot_energy: negative CPU share");
        f_sum += f;
    }
    if (f_sum > d.es_freq_hz * (1.0 + 1e-9) + 1e-6)
        throw ContractViolation("slot_energy: CPU shares exceed the ES frequency");
    if (!in_freq_set(d.es_freq_hz, cfg.server.freq_set_hz))
        throw ContractViolation("slot_energy: es_freq_hz not a member of the frequency set");
}

} // namespace detail

/// All per-slot energy terms plus the sigma-weighted total.
/// Signaling-period terms are charged on every slot, sleep slots included.
inline EnergyBreakdown slot_energy(const AllocationDecision& decision,
                                   const ScenarioConfig& cfg) {
    detail::check_feasible(decision, cfg);

    const double tau = cfg.timing.payload_s;
    const double tau_s = cfg.timing.signaling_s;
    const double ia = decision.ap_active ? 1.0 : 0.0;
    const double gamma = cfg.server.switched_capacitance_ws3;

    EnergyBreakdown e;
    e.server_j = tau * gamma * std::pow(decision.es_freq_hz, 3) +
                 tau_s * gamma * std::pow(cfg.server.signaling_freq_hz, 3);

    double dn_sum = 0.0;
    for (double p : decision.downlink_power_w) dn_sum += p;
    e.ap_j = tau * (ia * cfg.ap.active_power_w + ia * dn_sum +
                    (1.0 - ia) * cfg.ap.sleep_power_w) +
             tau_s * (cfg.ap.active_power_w + cfg.ap.signaling_power_w);

    e.per_user_j.resize(cfg.num_users());
    for (std::size_t k = 0; k < cfg.num_users(); ++k) {
        e.per_user_j[k] =
            tau * decision.uplink_power_w[k] * ia + tau_s * cfg.users[k].signaling_power_w;
    }

    e.per_ris_j.resize(cfg.num_riss());
    for (std::size_t i = 0; i < cfg.num_riss(); ++i) {
        const auto& r = cfg.riss[i];
        e.per_ris_j[i] = ia * tau * r.element_power_w * decision.active_elements(i) +
                         tau_s * r.num_elements * r.element_power_w;
    }

    e.weighted_j = cfg.sigma * e.user_sum_j() +
                   (1.0 - cfg.sigma) * (e.server_j + e.ap_j + e.ris_sum_j());
    return e;
}

} // namespace rismec
