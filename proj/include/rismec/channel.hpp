#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "rismec/decision.hpp"
#include "rismec/errors.hpp"
#include "rismec/rng.hpp"
#include "rismec/scenario.hpp"

namespace rismec {

enum class LinkDirection { uplink, downlink };

/// One direction's coefficients: direct user<->AP scalars plus, per (user,
/// RIS) pair, the user-side and AP-side element vectors.
struct LinkSet {
    std::vector<Complex> direct;                  // [user]
    std::vector<std::vector<CVector>> user_to_ris; // [user][ris], length N_i
    std::vector<std::vector<CVector>> ris_to_ap;   // [user][ris], length N_i
};

struct ChannelRealization {
    LinkSet uplink;
    LinkSet downlink;
    std::int64_t slot = 0;

    const LinkSet& links(LinkDirection d) const {
        return d == LinkDirection::uplink ? uplink : downlink;
    }
};

namespace detail {

/// Free-space-referenced amplitude: sqrt((lambda/4pi)^2 / d^exponent).
inline double pathloss_amplitude(double dist_m, const ChannelModelSpec& model) {
    const double lambda = 299792458.0 / model.carrier_hz;
    const double ref = lambda / (4.0 * std::numbers::pi);
    return ref / std::sqrt(std::pow(dist_m, model.pathloss_exponent));
}

/// Unit-variance Rician fade: LOS term with uniform phase plus CN(0,1) scatter.
inline Complex rician_fade(double k_factor, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double theta = phase(rng);
    const double re = gauss(rng);
    const double im = gauss(rng);
    double los = 1.0, scatter = 0.0;
    if (std::isfinite(k_factor)) {
        los = std::sqrt(k_factor / (k_factor + 1.0));
        scatter = std::sqrt(1.0 / (k_factor + 1.0));
    }
    return los * std::polar(1.0, theta) +
           scatter * Complex(re, im) / std::numbers::sqrt2;
}

inline LinkSet draw_linkset(const ScenarioConfig& cfg, double direct_scale,
                            std::mt19937_64& rng) {
    const auto& model = cfg.channel_model;
    const std::size_t num_users = cfg.num_users();
    const std::size_t num_riss = cfg.num_riss();

    LinkSet ls;
    ls.direct.resize(num_users);
    ls.user_to_ris.assign(num_users, std::vector<CVector>(num_riss));
    ls.ris_to_ap.assign(num_users, std::vector<CVector>(num_riss));

    for (std::size_t k = 0; k < num_users; ++k) {
        const double amp =
            pathloss_amplitude(distance(cfg.users[k].position_m, cfg.ap.position_m), model);
        ls.direct[k] = direct_scale * amp * rician_fade(model.rician_k, rng);
    }
    for (std::size_t i = 0; i < num_riss; ++i) {
        for (std::size_t k = 0; k < num_users; ++k) {
            const double amp = pathloss_amplitude(
                distance(cfg.users[k].position_m, cfg.riss[i].position_m), model);
            CVector h(cfg.riss[i].num_elements);
            for (Eigen::Index l = 0; l < h.size(); ++l)
                h[l] = amp * rician_fade(model.rician_k, rng);
            ls.user_to_ris[k][i] = std::move(h);
        }
    }
    for (std::size_t i = 0; i < num_riss; ++i) {
        for (std::size_t k = 0; k < num_users; ++k) {
            const double amp = pathloss_amplitude(
                distance(cfg.riss[i].position_m, cfg.ap.position_m), model);
            CVector g(cfg.riss[i].num_elements);
            for (Eigen::Index l = 0; l < g.size(); ++l)
                g[l] = amp * rician_fade(model.rician_k, rng);
            ls.ris_to_ap[k][i] = std::move(g);
        }
    }
    return ls;
}

} // namespace detail

/// Draws the slot's channels. Pure in (config, slot): the generator derives
/// its substreams from the scenario seed, so regeneration is exact and slots
/// can be produced concurrently. Scheduled blockage attenuates direct links
/// only, as a deterministic scale on top of the stochastic draw.
inline ChannelRealization generate_channels(const ScenarioConfig& cfg, std::int64_t slot) {
    const double att_db = cfg.events.attenuation_at(slot);
    const double direct_scale = std::pow(10.0, -att_db / 20.0);

    ChannelRealization out;
    out.slot = slot;
    auto rng_up = make_engine(cfg.rng_seed, static_cast<std::uint64_t>(slot),
                              StreamTag::channel_uplink);
    out.uplink = detail::draw_linkset(cfg, direct_scale, rng_up);
    auto rng_dn = make_engine(cfg.rng_seed, static_cast<std::uint64_t>(slot),
                              StreamTag::channel_downlink);
    out.downlink = detail::draw_linkset(cfg, direct_scale, rng_dn);
    return out;
}

/// Additive estimation noise: h_hat = h + n, n ~ CN(0, |h|^2 / eta),
/// independent per coefficient. A zero coefficient stays exactly zero.
inline ChannelRealization corrupt_csi(const ChannelRealization& truth, double eta,
                                      std::mt19937_64& rng) {
    if (!(eta > 0.0)) throw ContractViolation("corrupt_csi: eta must be > 0");
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto noisy = [&](Complex h) {
        const double sigma = std::abs(h) / std::sqrt(eta);
        const Complex n(gauss(rng), gauss(rng));
        return h + sigma * n / std::numbers::sqrt2;
    };
    ChannelRealization out = truth;
    for (LinkSet* ls : {&out.uplink, &out.downlink}) {
        for (auto& h : ls->direct) h = noisy(h);
        for (auto& per_user : ls->user_to_ris)
            for (auto& v : per_user)
                for (Eigen::Index l = 0; l < v.size(); ++l) v[l] = noisy(v[l]);
        for (auto& per_user : ls->ris_to_ap)
            for (auto& v : per_user)
                for (Eigen::Index l = 0; l < v.size(); ++l) v[l] = noisy(v[l]);
    }
    return out;
}

/// Normalized effective channel gain under a RIS configuration:
/// |h_direct + sum_i h_i^T diag(v_i) g_i|^2 / (N0 * B), in 1/W.
inline double effective_gain(LinkDirection direction, std::size_t user,
                             const std::vector<CVector>& ris_vectors,
                             const ChannelRealization& channels, double bandwidth_hz,
                             double noise_psd_w_hz) {
    const LinkSet& ls = channels.links(direction);
    Complex sum = ls.direct[user];
    for (std::size_t i = 0; i < ris_vectors.size(); ++i) {
        const CVector& h = ls.user_to_ris[user][i];
        const CVector& g = ls.ris_to_ap[user][i];
        for (Eigen::Index l = 0; l < h.size(); ++l) sum += h[l] * ris_vectors[i][l] * g[l];
    }
    return std::norm(sum) / (noise_psd_w_hz * bandwidth_hz);
}

/// Stacked cascade vector z_k = h_k (.) g_k with the direct coefficient at
/// index 0, divided by sqrt(N0 * B) so that |z_k^T vtilde|^2 is the
/// normalized gain directly.
inline CVector cascade_vector(LinkDirection direction, std::size_t user,
                              const ChannelRealization& channels, double bandwidth_hz,
                              double noise_psd_w_hz) {
    const LinkSet& ls = channels.links(direction);
    Eigen::Index total = 1;
    for (const auto& v : ls.user_to_ris[user]) total += v.size();
    CVector z(total);
    z[0] = ls.direct[user];
    Eigen::Index at = 1;
    for (std::size_t i = 0; i < ls.user_to_ris[user].size(); ++i) {
        const CVector& h = ls.user_to_ris[user][i];
        const CVector& g = ls.ris_to_ap[user][i];
        for (Eigen::Index l = 0; l < h.size(); ++l) z[at++] = h[l] * g[l];
    }
    return z / std::sqrt(noise_psd_w_hz * bandwidth_hz);
}

/// Hermitian form of the per-slot RIS objective: vtilde^H * H * vtilde equals
/// the queue-weighted gain combination plus the element energy penalty.
struct SurrogateMatrix {
    CMatrix h;                  // (N_total + 1) x (N_total + 1)
    std::vector<int> ris_sizes; // element counts, defining the index layout

    Eigen::Index dim() const { return h.rows(); }
    /// First stacked index of RIS i (index 0 is the direct-path slot).
    Eigen::Index offset(std::size_t ris) const {
        Eigen::Index at = 1;
        for (std::size_t i = 0; i < ris; ++i) at += ris_sizes[i];
        return at;
    }
};

/// Builds H = -sum_{U_up>0} w_k z_k* z_k^T - sum_k w'_k z_k* z_k^T
///          + V (1-sigma) tau D, with the noise normalization folded into the
/// cascade vectors so the quadratic form reproduces the surrogate exactly.
/// Up-weights at or below zero are outside the transmitting set and skipped.
inline SurrogateMatrix build_surrogate_matrix(const ChannelRealization& channels,
                                              const std::vector<double>& up_weights,
                                              const std::vector<double>& down_weights,
                                              const std::vector<UserSpec>& users,
                                              double noise_psd_w_hz, double v_param,
                                              double sigma, const TimingSpec& timing,
                                              const std::vector<RisSpec>& ris_specs) {
    SurrogateMatrix out;
    out.ris_sizes.reserve(ris_specs.size());
    Eigen::Index dim = 1;
    for (const auto& r : ris_specs) {
        out.ris_sizes.push_back(r.num_elements);
        dim += r.num_elements;
    }
    out.h = CMatrix::Zero(dim, dim);

    for (std::size_t k = 0; k < users.size(); ++k) {
        if (up_weights[k] > 0.0) {
            const CVector z = cascade_vector(LinkDirection::uplink, k, channels,
                                             users[k].uplink_bandwidth_hz, noise_psd_w_hz);
            out.h.noalias() -= up_weights[k] * (z.conjugate() * z.transpose());
        }
        if (down_weights[k] != 0.0) {
            const CVector z = cascade_vector(LinkDirection::downlink, k, channels,
                                             users[k].downlink_bandwidth_hz, noise_psd_w_hz);
            out.h.noalias() -= down_weights[k] * (z.conjugate() * z.transpose());
        }
    }

    const double energy_scale = v_param * (1.0 - sigma) * timing.payload_s;
    Eigen::Index at = 1;
    for (const auto& r : ris_specs) {
        for (int l = 0; l < r.num_elements; ++l, ++at)
            out.h(at, at) += energy_scale * r.element_power_w;
    }
    return out;
}

} // namespace rismec
