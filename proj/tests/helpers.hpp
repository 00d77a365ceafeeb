#pragma once

#include <random>
#include <string>

#include "rismec/channel.hpp"
#include "rismec/scenario.hpp"

namespace testutil {

using namespace rismec;

/// Two users, one small RIS; compact geometry so drain powers stay tiny.
inline ScenarioConfig desk_config() {
    ScenarioConfig cfg;
    cfg.timing = {0.010, 0.001, 0.009};
    cfg.sigma = 0.5;
    cfg.v_param = 1e9;
    cfg.horizon = 200;
    cfg.rng_seed = 1;
    cfg.ap.position_m = {0, 0, 2};
    cfg.ap.active_power_w = 2.2;
    cfg.ap.sleep_power_w = 0.278;
    cfg.ap.max_tx_power_w = 0.2512;
    cfg.ap.signaling_power_w = 0.1;
    for (int i = 0; i <= 10; ++i) cfg.server.freq_set_hz.push_back(4.5e9 * i / 10);
    cfg.server.switched_capacitance_ws3 = 1e-27;
    cfg.server.signaling_freq_hz = -1.0;

    UserSpec u;
    u.max_power_w = 0.1;
    u.signaling_power_w = 1e-3;
    u.uplink_bandwidth_hz = 1e7;
    u.downlink_bandwidth_hz = 1e7;
    u.arrival_rate_bps = 1e5;
    u.bits_per_cycle = 1e-3;
    u.output_ratio = 1.0;
    u.delay_bound_s = 0.05;
    u.step_size = 1.0;
    u.position_m = {5, 0, 1};
    cfg.users.push_back(u);
    u.position_m = {5, 1, 1};
    cfg.users.push_back(u);

    RisSpec r;
    r.position_m = {2.5, 2, 1.5};
    r.num_elements = 16;
    r.phase_bits = 2;
    r.element_power_w = 1e-3;
    r.num_blocks = 16;
    cfg.riss.push_back(r);

    validate_scenario(cfg);
    return cfg;
}

/// Hand-built channels for gain/surrogate tests: every coefficient drawn from
/// a standard complex Gaussian.
inline ChannelRealization random_channels(std::size_t num_users,
                                          const std::vector<int>& ris_sizes,
                                          std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    auto cplx = [&]() { return Complex(g(rng), g(rng)); };
    auto linkset = [&]() {
        LinkSet ls;
        ls.direct.resize(num_users);
        ls.user_to_ris.assign(num_users, std::vector<CVector>(ris_sizes.size()));
        ls.ris_to_ap.assign(num_users, std::vector<CVector>(ris_sizes.size()));
        for (auto& h : ls.direct) h = cplx();
        for (std::size_t k = 0; k < num_users; ++k) {
            for (std::size_t i = 0; i < ris_sizes.size(); ++i) {
                CVector h(ris_sizes[i]), gg(ris_sizes[i]);
                for (int l = 0; l < ris_sizes[i]; ++l) {
                    h[l] = cplx();
                    gg[l] = cplx();
                }
                ls.user_to_ris[k][i] = h;
                ls.ris_to_ap[k][i] = gg;
            }
        }
        return ls;
    };
    ChannelRealization real;
    real.uplink = linkset();
    real.downlink = linkset();
    return real;
}

/// Random Hermitian matrix of the surrogate's shape.
inline SurrogateMatrix random_hermitian(const std::vector<int>& ris_sizes,
                                        std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    SurrogateMatrix m;
    m.ris_sizes = ris_sizes;
    Eigen::Index dim = 1;
    for (int n : ris_sizes) dim += n;
    CMatrix a(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c) a(r, c) = Complex(g(rng), g(rng));
    m.h = 0.5 * (a + a.adjoint());
    return m;
}

inline std::string scenarios_dir() { return RISMEC_SCENARIOS_DIR; }

} // namespace testutil
