#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "rismec/errors.hpp"

namespace rismec {

using Vec3 = std::array<double, 3>;

inline double distance(const Vec3& a, const Vec3& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Slot timing. The payload period is what queues are drained with; the
/// signaling period is charged to every slot for CSI acquisition and control.
struct TimingSpec {
    double slot_total_s = 0.010;
    double signaling_s = 0.001;
    double payload_s = 0.009; // slot_total_s - signaling_s
};

struct UserSpec {
    Vec3 position_m{0, 0, 0};
    double max_power_w = 0.1;        // uplink transmit cap
    double signaling_power_w = 1e-4; // fixed control-plane power
    double uplink_bandwidth_hz = 1e7;
    double downlink_bandwidth_hz = 1e7;
    double arrival_rate_bps = 1e5;
    double bits_per_cycle = 1e-3; // bits processed per CPU cycle
    double output_ratio = 1.0;    // output bits per input bit
    double delay_bound_s = 0.05;
    double step_size = 1.0; // virtual-queue step
    // Derived at load time: delay bound converted to a backlog bound.
    double queue_bound_bits = 0.0;
};

struct RisSpec {
    Vec3 position_m{0, 0, 0};
    int num_elements = 100;
    int phase_bits = 2;
    double element_power_w = 1e-3; // per phase shifter, at this resolution
    int num_blocks = 100;          // num_blocks == num_elements means per-element control
};

struct ApSpec {
    Vec3 position_m{0, 0, 0};
    double active_power_w = 2.2;
    double sleep_power_w = 0.278;
    double max_tx_power_w = 0.2512; // total downlink budget
    double signaling_power_w = 0.1;
};

struct ServerSpec {
    std::vector<double> freq_set_hz;      // ascending, first entry is the idle floor
    double switched_capacitance_ws3 = 1e-27;
    double signaling_freq_hz = -1.0;      // <0 means "default to smallest nonzero entry"
};

struct BlockageEvent {
    std::int64_t slot = 0;
    double attenuation_db = 0.0; // applied to direct links from this slot on
};

struct EventSchedule {
    std::vector<BlockageEvent> blockage_db;
    double noise_psd_w_hz = 3.9810717055349695e-21; // -174 dBm/Hz
    std::optional<double> csi_snr;                  // absent = perfect CSI

    /// Attenuation active at a slot: value of the latest event at or before it.
    double attenuation_at(std::int64_t slot) const {
        double db = 0.0;
        for (const auto& ev : blockage_db) {
            if (ev.slot > slot) break;
            db = ev.attenuation_db;
        }
        return db;
    }
};

/// Stochastic channel generator knobs (free-space-referenced path loss with a
/// configurable exponent, plus unit-variance Rician small-scale fading).
struct ChannelModelSpec {
    double carrier_hz = 28e9;
    double pathloss_exponent = 2.0;
    double rician_k = 4.0; // linear ratio; huge values approach a pure LOS draw
};

struct ScenarioConfig {
    TimingSpec timing;
    std::vector<UserSpec> users;
    std::vector<RisSpec> riss;
    ApSpec ap;
    ServerSpec server;
    EventSchedule events;
    ChannelModelSpec channel_model;
    double sigma = 0.5;   // energy weighting: 1 = user-centric, 0 = network-centric
    double v_param = 1e9; // Lyapunov trade-off weight
    std::int64_t horizon = 1000;
    std::uint64_t rng_seed = 1;

    std::size_t num_users() const { return users.size(); }
    std::size_t num_riss() const { return riss.size(); }
    /// Total number of RIS elements across all surfaces.
    int total_elements() const {
        int n = 0;
        for (const auto& r : riss) n += r.num_elements;
        return n;
    }
    double signaling_freq_hz() const { return server.signaling_freq_hz; }
};

namespace detail {

inline void check(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

} // namespace detail

/// Finalizes derived fields and enforces every type invariant.
/// Throws ValidationError naming the failing field or invariant.
inline void validate_scenario(ScenarioConfig& cfg) {
    using detail::check;

    auto& t = cfg.timing;
    check(t.slot_total_s > 0.0, "timing.slot_total_s: must be > 0");
    check(t.signaling_s > 0.0, "timing.signaling_s: must be > 0");
    check(t.slot_total_s > t.signaling_s,
          "timing: slot_total_s must exceed signaling_s (payload must be > 0)");
    t.payload_s = t.slot_total_s - t.signaling_s;

    check(!cfg.users.empty(), "users: at least one user required");
    for (std::size_t k = 0; k < cfg.users.size(); ++k) {
        auto& u = cfg.users[k];
        const std::string p = "users[" + std::to_string(k) + "].";
        check(u.max_power_w > 0.0, p + "max_power_w: must be > 0");
        check(u.signaling_power_w > 0.0, p + "signaling_power_w: must be > 0");
        check(u.uplink_bandwidth_hz > 0.0, p + "uplink_bandwidth_hz: must be > 0");
        check(u.downlink_bandwidth_hz > 0.0, p + "downlink_bandwidth_hz: must be > 0");
        check(u.arrival_rate_bps >= 0.0, p + "arrival_rate_bps: must be >= 0");
        check(u.bits_per_cycle > 0.0, p + "bits_per_cycle: must be > 0");
        check(u.output_ratio >= 0.0, p + "output_ratio: must be >= 0");
        check(u.delay_bound_s > 0.0, p + "delay_bound_s: must be > 0");
        check(u.step_size > 0.0, p + "step_size: must be > 0");
        // Little's law conversion of the delay bound.
        u.queue_bound_bits = u.delay_bound_s * u.arrival_rate_bps;
    }

    for (std::size_t i = 0; i < cfg.riss.size(); ++i) {
        auto& r = cfg.riss[i];
        const std::string p = "riss[" + std::to_string(i) + "].";
        check(r.num_elements >= 1, p + "num_elements: must be >= 1");
        check(r.phase_bits >= 1, p + "phase_bits: must be >= 1");
        check(r.element_power_w >= 0.0, p + "element_power_w: must be >= 0");
        check(r.num_blocks >= 1 && r.num_blocks <= r.num_elements,
              p + "num_blocks: must lie in [1, num_elements]");
        check(r.num_elements % r.num_blocks == 0,
              p + "num_blocks: must divide num_elements");
    }

    check(cfg.ap.active_power_w > cfg.ap.sleep_power_w,
          "ap: active_power_w must exceed sleep_power_w");
    check(cfg.ap.sleep_power_w >= 0.0, "ap.sleep_power_w: must be >= 0");
    check(cfg.ap.max_tx_power_w > 0.0, "ap.max_tx_power_w: must be > 0");
    check(cfg.ap.signaling_power_w >= 0.0, "ap.signaling_power_w: must be >= 0");

    auto& s = cfg.server;
    check(!s.freq_set_hz.empty(), "server.freq_set_hz: must be non-empty");
    check(std::is_sorted(s.freq_set_hz.begin(), s.freq_set_hz.end()),
          "server.freq_set_hz: must be sorted ascending");
    check(s.freq_set_hz.front() >= 0.0, "server.freq_set_hz: entries must be >= 0");
    check(s.switched_capacitance_ws3 >= 0.0,
          "server.switched_capacitance_ws3: must be >= 0");
    if (s.signaling_freq_hz < 0.0) {
        // Default: the smallest nonzero frequency, or the floor if all-zero.
        s.signaling_freq_hz = s.freq_set_hz.front();
        for (double f : s.freq_set_hz) {
            if (f > 0.0) {
                s.signaling_freq_hz = f;
                break;
            }
        }
    } else {
        const bool member = std::any_of(
            s.freq_set_hz.begin(), s.freq_set_hz.end(),
            [&](double f) { return f == s.signaling_freq_hz; });
        check(member, "server.signaling_freq_hz: must be a member of freq_set_hz");
    }

    std::int64_t prev = -1;
    for (std::size_t e = 0; e < cfg.events.blockage_db.size(); ++e) {
        const auto& ev = cfg.events.blockage_db[e];
        const std::string p = "events.blockage_db[" + std::to_string(e) + "].";
        check(ev.slot >= prev, p + "slot: indices must be non-decreasing");
        check(ev.attenuation_db >= 0.0, p + "attenuation_db: must be >= 0");
        prev = ev.slot;
    }
    check(cfg.events.noise_psd_w_hz > 0.0, "events.noise_psd_w_hz: must be > 0");
    if (cfg.events.csi_snr) {
        check(*cfg.events.csi_snr > 0.0, "events.csi_snr: must be > 0 when present");
    }

    check(cfg.channel_model.carrier_hz > 0.0, "channel_model.carrier_hz: must be > 0");
    check(cfg.channel_model.pathloss_exponent > 0.0,
          "channel_model.pathloss_exponent: must be > 0");
    check(cfg.channel_model.rician_k >= 0.0, "channel_model.rician_k: must be >= 0");

    check(cfg.sigma >= 0.0 && cfg.sigma <= 1.0, "sigma: must lie in [0, 1]");
    check(cfg.v_param >= 0.0, "v_param: must be >= 0");
    check(cfg.horizon >= 1, "horizon: must be >= 1");
}

namespace detail {

using json = nlohmann::json;

template <typename T>
T require(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ValidationError(where + key + ": missing required key");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(where + key + ": wrong type");
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, const std::string& where, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(where + key + ": wrong type");
    }
}

inline Vec3 require_vec3(const json& j, const std::string& key, const std::string& where) {
    auto v = require<std::vector<double>>(j, key, where);
    if (v.size() != 3) throw ValidationError(where + key + ": expected 3 coordinates");
    return {v[0], v[1], v[2]};
}

inline std::vector<double> parse_freq_set(const json& j, const std::string& where) {
    if (!j.contains("freq_set_hz"))
        throw ValidationError(where + "freq_set_hz: missing required key");
    const auto& f = j.at("freq_set_hz");
    if (f.is_array()) return f.get<std::vector<double>>();
    if (f.is_object()) {
        // Shorthand: evenly spaced grid {0, max/count-1, ..., max}.
        const double max_hz = require<double>(f, "max_hz", where + "freq_set_hz.");
        const int count = require<int>(f, "count", where + "freq_set_hz.");
        if (count < 2) throw ValidationError(where + "freq_set_hz.count: must be >= 2");
        std::vector<double> out(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i)
            out[static_cast<std::size_t>(i)] = max_hz * i / (count - 1);
        return out;
    }
    throw ValidationError(where + "freq_set_hz: expected array or {max_hz, count}");
}

} // namespace detail

/// Parses and validates a scenario document (JSON text, schema in the README).
inline ScenarioConfig load_scenario(const std::string& text) {
    using detail::get_or;
    using detail::require;
    using detail::require_vec3;
    using json = nlohmann::json;

    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("document does not parse: ") + e.what());
    }

    ScenarioConfig cfg;

    const json timing = require<json>(j, "timing", "");
    cfg.timing.slot_total_s = require<double>(timing, "slot_total_s", "timing.");
    cfg.timing.signaling_s = require<double>(timing, "signaling_s", "timing.");

    cfg.sigma = require<double>(j, "sigma", "");
    cfg.v_param = require<double>(j, "v_param", "");
    cfg.horizon = require<std::int64_t>(j, "horizon", "");
    cfg.rng_seed = get_or<std::uint64_t>(j, "rng_seed", "", 1);

    const json ap = require<json>(j, "ap", "");
    cfg.ap.position_m = require_vec3(ap, "position_m", "ap.");
    cfg.ap.active_power_w = require<double>(ap, "active_power_w", "ap.");
    cfg.ap.sleep_power_w = require<double>(ap, "sleep_power_w", "ap.");
    cfg.ap.max_tx_power_w = require<double>(ap, "max_tx_power_w", "ap.");
    cfg.ap.signaling_power_w = require<double>(ap, "signaling_power_w", "ap.");

    const json server = require<json>(j, "server", "");
    cfg.server.freq_set_hz = detail::parse_freq_set(server, "server.");
    cfg.server.switched_capacitance_ws3 =
        require<double>(server, "switched_capacitance_ws3", "server.");
    cfg.server.signaling_freq_hz = get_or<double>(server, "signaling_freq_hz", "server.", -1.0);

    const auto users = require<std::vector<json>>(j, "users", "");
    for (std::size_t k = 0; k < users.size(); ++k) {
        const std::string w = "users[" + std::to_string(k) + "].";
        const json& u = users[k];
        UserSpec spec;
        spec.position_m = require_vec3(u, "position_m", w);
        spec.max_power_w = require<double>(u, "max_power_w", w);
        spec.signaling_power_w = require<double>(u, "signaling_power_w", w);
        spec.uplink_bandwidth_hz = require<double>(u, "uplink_bandwidth_hz", w);
        spec.downlink_bandwidth_hz = require<double>(u, "downlink_bandwidth_hz", w);
        spec.arrival_rate_bps = require<double>(u, "arrival_rate_bps", w);
        spec.bits_per_cycle = require<double>(u, "bits_per_cycle", w);
        spec.output_ratio = require<double>(u, "output_ratio", w);
        spec.delay_bound_s = require<double>(u, "delay_bound_s", w);
        spec.step_size = get_or<double>(u, "step_size", w, 1.0);
        cfg.users.push_back(spec);
    }

    const auto riss = get_or<std::vector<json>>(j, "riss", "", {});
    for (std::size_t i = 0; i < riss.size(); ++i) {
        const std::string w = "riss[" + std::to_string(i) + "].";
        const json& r = riss[i];
        RisSpec spec;
        spec.position_m = require_vec3(r, "position_m", w);
        spec.num_elements = require<int>(r, "num_elements", w);
        spec.phase_bits = require<int>(r, "phase_bits", w);
        spec.element_power_w = require<double>(r, "element_power_w", w);
        spec.num_blocks = get_or<int>(r, "num_blocks", w, spec.num_elements);
        cfg.riss.push_back(spec);
    }

    const json events = get_or<json>(j, "events", "", json::object());
    cfg.events.noise_psd_w_hz =
        get_or<double>(events, "noise_psd_w_hz", "events.", cfg.events.noise_psd_w_hz);
    if (events.contains("csi_snr") && !events.at("csi_snr").is_null()) {
        const auto& snr = events.at("csi_snr");
        if (snr.is_string()) {
            if (snr.get<std::string>() != "inf")
                throw ValidationError("events.csi_snr: expected number, null, or \"inf\"");
            // "inf" spells perfect CSI, same as omitting the key.
        } else {
            cfg.events.csi_snr = require<double>(events, "csi_snr", "events.");
        }
    }
    const auto blockage = get_or<std::vector<json>>(events, "blockage_db", "events.", {});
    for (std::size_t e = 0; e < blockage.size(); ++e) {
        const std::string w = "events.blockage_db[" + std::to_string(e) + "].";
        BlockageEvent ev;
        ev.slot = require<std::int64_t>(blockage[e], "slot", w);
        ev.attenuation_db = require<double>(blockage[e], "attenuation_db", w);
        cfg.events.blockage_db.push_back(ev);
    }

    const json chan = get_or<json>(j, "channel_model", "", json::object());
    cfg.channel_model.carrier_hz =
        get_or<double>(chan, "carrier_hz", "channel_model.", cfg.channel_model.carrier_hz);
    cfg.channel_model.pathloss_exponent = get_or<double>(
        chan, "pathloss_exponent", "channel_model.", cfg.channel_model.pathloss_exponent);
    cfg.channel_model.rician_k =
        get_or<double>(chan, "rician_k", "channel_model.", cfg.channel_model.rician_k);

    validate_scenario(cfg);
    return cfg;
}

inline ScenarioConfig load_scenario(std::istream& in) {
    return load_scenario(std::string(std::istreambuf_iterator<char>(in), {}));
}

/// Fresh task bits for one slot: Poisson with mean arrival_rate * slot_total.
inline std::int64_t poisson_arrivals(const UserSpec& user, const TimingSpec& timing,
                                     std::mt19937_64& rng) {
    if (user.arrival_rate_bps <= 0.0) return 0;
    const double mean = user.arrival_rate_bps * timing.slot_total_s;
    std::poisson_distribution<std::int64_t> dist(mean);
    return dist(rng);
}

} // namespace rismec
