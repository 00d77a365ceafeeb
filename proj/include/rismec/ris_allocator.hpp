#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "rismec/channel.hpp"
#include "rismec/decision.hpp"
#include "rismec/errors.hpp"

namespace rismec {

/// Admissible per-element coefficients: off (0) plus the 2^bits unit-modulus
/// quantized phases. Order matters downstream: greedy tie-breaks prefer the
/// earliest entry, so "off" sits first.
struct PhaseAlphabet {
    std::vector<Complex> values;
};

inline PhaseAlphabet phase_alphabet(int bits) {
    if (bits < 1) throw ContractViolation("phase_alphabet: bits must be >= 1");
    PhaseAlphabet a;
    const int levels = 1 << bits;
    a.values.reserve(static_cast<std::size_t>(levels) + 1);
    a.values.emplace_back(0.0, 0.0);
    for (int m = 0; m < levels; ++m)
        a.values.push_back(std::polar(1.0, 2.0 * std::numbers::pi * m / levels));
    return a;
}

struct RisDecision {
    std::vector<CVector> vectors;
    double surrogate_value = 0.0;
};

/// Real value of the Hermitian form vtilde^H H vtilde. The stacked vector
/// must carry the constant 1 at index 0.
inline double surrogate_value(const CVector& v_stacked, const SurrogateMatrix& m) {
    if (v_stacked.size() != m.dim())
        throw ContractViolation("surrogate_value: dimension mismatch");
    if (std::abs(v_stacked[0] - Complex(1.0, 0.0)) > 1e-12)
        throw ContractViolation("surrogate_value: leading entry must be 1");
    const Complex q = v_stacked.dot(m.h * v_stacked);
    if (std::abs(q.imag()) > 1e-6 * (1.0 + std::abs(q.real())))
        throw ContractViolation("surrogate_value: quadratic form is not numerically real");
    return q.real();
}

/// Single-pass greedy minimization of the surrogate. Sweeps RISs in index
/// order and blocks (elements when num_blocks == N_i) in index order; each
/// step scans the alphabet with every other coordinate fixed and keeps the
/// best value. Candidate deltas come from the cached product H*vtilde, so one
/// candidate costs O(1) and an accepted change costs O(N_total); the cache is
/// re-anchored with a full recompute every 64 accepted steps to bound drift.
/// Appends the post-step surrogate value to step_values when provided.
inline RisDecision greedy_optimize(const SurrogateMatrix& m,
                                   const std::vector<PhaseAlphabet>& alphabets,
                                   const std::vector<int>& blocks,
                                   std::vector<double>* step_values = nullptr) {
    const std::size_t num_riss = m.ris_sizes.size();
    if (alphabets.size() != num_riss || blocks.size() != num_riss)
        throw ContractViolation("greedy_optimize: per-RIS inputs do not match the matrix");
    for (std::size_t i = 0; i < num_riss; ++i) {
        if (blocks[i] < 1 || m.ris_sizes[i] % blocks[i] != 0)
            throw ContractViolation("greedy_optimize: block count must divide N_i");
    }

    const Eigen::Index dim = m.dim();
    CVector vtilde = CVector::Zero(dim);
    vtilde[0] = Complex(1.0, 0.0);
    CVector hv = m.h.col(0);
    double value = hv[0].real();

    int accepted = 0;
    for (std::size_t i = 0; i < num_riss; ++i) {
        const int group = m.ris_sizes[i] / blocks[i];
        const Eigen::Index base = m.offset(i);
        for (int b = 0; b < blocks[i]; ++b) {
            const Eigen::Index j0 = base + static_cast<Eigen::Index>(b) * group;

            // Quadratic self-term of the block: Re(1^T H_JJ 1).
            double block_quad = 0.0;
            for (Eigen::Index r = 0; r < group; ++r)
                for (Eigen::Index c = 0; c < group; ++c)
                    block_quad += m.h(j0 + r, j0 + c).real();

            Complex cross(0.0, 0.0); // sum of (H vtilde) over the block
            for (Eigen::Index r = 0; r < group; ++r) cross += hv[j0 + r];

            const Complex current = vtilde[j0];
            double best_delta = 0.0;
            Complex best = current;
            bool improved = false;
            for (const Complex& cand : alphabets[i].values) {
                const Complex d = cand - current;
                if (d == Complex(0.0, 0.0)) continue;
                const double delta =
                    2.0 * (std::conj(d) * cross).real() + std::norm(d) * block_quad;
                if (delta < best_delta) {
                    best_delta = delta;
                    best = cand;
                    improved = true;
                }
            }

            if (improved) {
                const Complex d = best - current;
                hv.noalias() += d * m.h.middleCols(j0, group).rowwise().sum();
                for (Eigen::Index r = 0; r < group; ++r) vtilde[j0 + r] = best;
                value += best_delta;
                if (++accepted % 64 == 0) {
                    hv.noalias() = m.h * vtilde;
                    value = vtilde.dot(hv).real();
                }
            }
            if (step_values) step_values->push_back(value);
        }
    }

    RisDecision out;
    out.vectors.reserve(num_riss);
    for (std::size_t i = 0; i < num_riss; ++i)
        out.vectors.push_back(vtilde.segment(m.offset(i), m.ris_sizes[i]));
    out.surrogate_value = value;
    return out;
}

} // namespace rismec
