#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "rismec/controller.hpp"
#include "rismec/scenario.hpp"

namespace rismec {

/// Fixed-format number rendering so identical runs reproduce identical bytes.
inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

/// Per-slot metrics table. Column order is part of the output contract:
/// slot, ap_active, es_freq_hz, the energy breakdown (J), the surrogate, the
/// windowed user-energy moving average, then one column group per user.
inline std::string episode_table(const ScenarioConfig& cfg, const EpisodeResult& result) {
    std::string out;
    out += "slot,ap_active,es_freq_hz,e_weighted_j,e_users_j,e_ap_j,e_es_j,e_ris_j,"
           "surrogate,ma_e_users_j";
    for (std::size_t k = 0; k < cfg.num_users(); ++k) {
        const std::string u = std::to_string(k);
        out += ",qtot_bits_" + u + ",z_bits_" + u + ",delay_s_" + u + ",up_rate_bps_" + u +
               ",dn_rate_bps_" + u;
    }
    out += "\n";
    for (std::size_t t = 0; t < result.slots.size(); ++t) {
        const auto& m = result.slots[t];
        out += std::to_string(t);
        out += m.ap_active ? ",1" : ",0";
        out += "," + fmt(m.es_freq_hz);
        out += "," + fmt(m.energy.weighted_j);
        out += "," + fmt(m.energy.user_sum_j());
        out += "," + fmt(m.energy.ap_j);
        out += "," + fmt(m.energy.server_j);
        out += "," + fmt(m.energy.ris_sum_j());
        out += "," + fmt(m.surrogate);
        out += "," + fmt(result.ma_user_energy_j[t]);
        for (std::size_t k = 0; k < cfg.num_users(); ++k) {
            out += "," + fmt(m.backlog_bits[k]);
            out += "," + fmt(m.virtual_bits[k]);
            out += "," + fmt(m.delay_estimate_s[k]);
            out += "," + fmt(m.up_rate_bps[k]);
            out += "," + fmt(m.down_rate_bps[k]);
        }
        out += "\n";
    }
    return out;
}

/// One sweep point after seed-averaging.
struct SweepRow {
    std::string parameter;
    double value = 0.0;
    double v_param = 0.0;
    double sigma = 0.0;
    EpisodeSummary mean;
};

inline std::string sweep_table(const std::vector<SweepRow>& rows) {
    std::string out = "param,value,v_param,sigma,e_weighted_j,e_users_j,e_ap_j,e_es_j,"
                      "e_ris_j,delay_s,duty_cycle\n";
    for (const auto& r : rows) {
        out += r.parameter;
        out += "," + fmt(r.value);
        out += "," + fmt(r.v_param);
        out += "," + fmt(r.sigma);
        out += "," + fmt(r.mean.avg_weighted_j);
        out += "," + fmt(r.mean.avg_user_j);
        out += "," + fmt(r.mean.avg_ap_j);
        out += "," + fmt(r.mean.avg_es_j);
        out += "," + fmt(r.mean.avg_ris_j);
        out += "," + fmt(r.mean.mean_delay_s);
        out += "," + fmt(r.mean.duty_cycle);
        out += "\n";
    }
    return out;
}

/// Fully resolved scenario echo (defaults materialized) for run provenance.
inline nlohmann::json scenario_to_json(const ScenarioConfig& cfg) {
    nlohmann::json j;
    j["timing"] = {{"slot_total_s", cfg.timing.slot_total_s},
                   {"signaling_s", cfg.timing.signaling_s},
                   {"payload_s", cfg.timing.payload_s}};
    j["sigma"] = cfg.sigma;
    j["v_param"] = cfg.v_param;
    j["horizon"] = cfg.horizon;
    j["rng_seed"] = cfg.rng_seed;
    j["ap"] = {{"position_m", cfg.ap.position_m},
               {"active_power_w", cfg.ap.active_power_w},
               {"sleep_power_w", cfg.ap.sleep_power_w},
               {"max_tx_power_w", cfg.ap.max_tx_power_w},
               {"signaling_power_w", cfg.ap.signaling_power_w}};
    j["server"] = {{"freq_set_hz", cfg.server.freq_set_hz},
                   {"switched_capacitance_ws3", cfg.server.switched_capacitance_ws3},
                   {"signaling_freq_hz", cfg.server.signaling_freq_hz}};
    j["users"] = nlohmann::json::array();
    for (const auto& u : cfg.users) {
        j["users"].push_back({{"position_m", u.position_m},
                              {"max_power_w", u.max_power_w},
                              {"signaling_power_w", u.signaling_power_w},
                              {"uplink_bandwidth_hz", u.uplink_bandwidth_hz},
                              {"downlink_bandwidth_hz", u.downlink_bandwidth_hz},
                              {"arrival_rate_bps", u.arrival_rate_bps},
                              {"bits_per_cycle", u.bits_per_cycle},
                              {"output_ratio", u.output_ratio},
                              {"delay_bound_s", u.delay_bound_s},
                              {"step_size", u.step_size},
                              {"queue_bound_bits", u.queue_bound_bits}});
    }
    j["riss"] = nlohmann::json::array();
    for (const auto& r : cfg.riss) {
        j["riss"].push_back({{"position_m", r.position_m},
                             {"num_elements", r.num_elements},
                             {"phase_bits", r.phase_bits},
                             {"element_power_w", r.element_power_w},
                             {"num_blocks", r.num_blocks}});
    }
    j["events"] = nlohmann::json::object();
    j["events"]["noise_psd_w_hz"] = cfg.events.noise_psd_w_hz;
    if (cfg.events.csi_snr)
        j["events"]["csi_snr"] = *cfg.events.csi_snr;
    else
        j["events"]["csi_snr"] = nullptr;
    j["events"]["blockage_db"] = nlohmann::json::array();
    for (const auto& ev : cfg.events.blockage_db)
        j["events"]["blockage_db"].push_back(
            {{"slot", ev.slot}, {"attenuation_db", ev.attenuation_db}});
    j["channel_model"] = {{"carrier_hz", cfg.channel_model.carrier_hz},
                          {"pathloss_exponent", cfg.channel_model.pathloss_exponent},
                          {"rician_k", cfg.channel_model.rician_k}};
    return j;
}

} // namespace rismec
