#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace rismec {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Full per-slot control output. Feasibility ties everything to the AP state:
/// when the AP sleeps, every power and every RIS coefficient is exactly zero.
struct AllocationDecision {
    bool ap_active = false;
    std::vector<CVector> ris_vectors;    // one reflectivity vector per RIS
    std::vector<double> uplink_power_w;  // per user
    std::vector<double> downlink_power_w;
    std::vector<double> cpu_split_hz; // per user, sums to at most es_freq_hz
    double es_freq_hz = 0.0;

    static AllocationDecision sleeping(std::size_t num_users,
                                       const std::vector<int>& ris_sizes) {
        AllocationDecision d;
        d.ap_active = false;
        for (int n : ris_sizes) d.ris_vectors.push_back(CVector::Zero(n));
        d.uplink_power_w.assign(num_users, 0.0);
        d.downlink_power_w.assign(num_users, 0.0);
        d.cpu_split_hz.assign(num_users, 0.0);
        return d;
    }

    /// Count of RIS elements currently reflecting (|v| == 1).
    double active_elements(std::size_t ris) const {
        double on = 0.0;
        for (Eigen::Index l = 0; l < ris_vectors[ris].size(); ++l)
            on += std::norm(ris_vectors[ris][l]);
        return on;
    }
};

} // namespace rismec
