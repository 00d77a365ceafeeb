#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "rismec/channel.hpp"
#include "rismec/decision.hpp"
#include "rismec/errors.hpp"
#include "rismec/ris_allocator.hpp"
#include "rismec/scenario.hpp"

// Brute-force and convex reference solvers for tests and acceptance runs.
// These deliberately share no solver code with the production allocators:
// quadratic forms, fills, and projections are all re-derived here from the
// domain types alone.

namespace rismec::oracles {

struct OracleReport {
    std::string instance;
    double oracle_value = 0.0;
    double system_value = 0.0;
    double gap = 0.0; // system - oracle, for minimization problems
    double tolerance = 0.0;
    bool pass = false;
};

inline OracleReport make_report(std::string instance, double oracle_value,
                                double system_value, double tolerance) {
    OracleReport r;
    r.instance = std::move(instance);
    r.oracle_value = oracle_value;
    r.system_value = system_value;
    r.gap = system_value - oracle_value;
    r.tolerance = tolerance;
    r.pass = r.gap <= tolerance;
    return r;
}

/// Naive Hermitian form, written out longhand on purpose.
inline double quadratic_form(const CVector& v, const CMatrix& m) {
    Complex acc(0.0, 0.0);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            acc += std::conj(v[r]) * m(r, c) * v[c];
    return acc.real();
}

struct ExhaustiveRis {
    std::vector<CVector> vectors;
    double value = 0.0;
};

/// True minimizer of the surrogate over every quantized configuration.
/// Refuses instances with more than one million candidates.
inline ExhaustiveRis exhaustive_ris(const SurrogateMatrix& m,
                                    const std::vector<PhaseAlphabet>& alphabets) {
    std::vector<std::size_t> radix; // alphabet cardinality per stacked element
    for (std::size_t i = 0; i < m.ris_sizes.size(); ++i)
        for (int l = 0; l < m.ris_sizes[i]; ++l) radix.push_back(alphabets[i].values.size());

    double combos = 1.0;
    for (std::size_t r : radix) combos *= static_cast<double>(r);
    if (combos > 1e6)
        throw OracleFailure("exhaustive_ris: instance too large (" + std::to_string(combos) +
                            " candidates)");

    const Eigen::Index dim = m.dim();
    CVector v = CVector::Zero(dim);
    v[0] = Complex(1.0, 0.0);
    std::vector<std::size_t> digits(radix.size(), 0);

    ExhaustiveRis best;
    best.value = std::numeric_limits<double>::infinity();
    bool done = radix.empty();
    while (true) {
        Eigen::Index at = 1;
        std::size_t coord = 0;
        for (std::size_t i = 0; i < m.ris_sizes.size(); ++i)
            for (int l = 0; l < m.ris_sizes[i]; ++l, ++at, ++coord)
                v[at] = alphabets[i].values[digits[coord]];

        const double val = quadratic_form(v, m.h);
        if (val < best.value) {
            best.value = val;
            best.vectors.clear();
            for (std::size_t i = 0; i < m.ris_sizes.size(); ++i)
                best.vectors.push_back(v.segment(m.offset(i), m.ris_sizes[i]));
        }
        if (done) break;

        // Mixed-radix increment.
        std::size_t c = 0;
        while (c < digits.size()) {
            if (++digits[c] < radix[c]) break;
            digits[c] = 0;
            ++c;
        }
        if (c == digits.size()) break;
    }
    return best;
}

namespace detail {

/// Euclidean projection onto {0 <= p <= cap, sum p <= budget}.
inline std::vector<double> project_box_budget(std::vector<double> y,
                                              const std::vector<double>& cap,
                                              double budget) {
    std::vector<double> p(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) p[k] = std::clamp(y[k], 0.0, cap[k]);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    if (total <= budget) return p;

    double lo = 0.0, hi = *std::max_element(y.begin(), y.end());
    for (int i = 0; i < 200; ++i) {
        const double lam = 0.5 * (lo + hi);
        double s = 0.0;
        for (std::size_t k = 0; k < y.size(); ++k)
            s += std::clamp(y[k] - lam, 0.0, cap[k]);
        (s > budget ? lo : hi) = lam;
    }
    const double lam = 0.5 * (lo + hi);
    for (std::size_t k = 0; k < y.size(); ++k) p[k] = std::clamp(y[k] - lam, 0.0, cap[k]);
    return p;
}

} // namespace detail

/// Projected gradient descent on the downlink objective over the box/budget
/// set, run to 1e-8 stationarity. Fails loudly instead of returning a stale
/// iterate.
inline std::vector<double> convex_downlink(const std::vector<double>& down_weights,
                                           const std::vector<double>& gains,
                                           const std::vector<double>& caps,
                                           double ap_budget, double v_param, double sigma,
                                           const TimingSpec& timing) {
    const std::size_t num_users = down_weights.size();
    const double lin = v_param * (1.0 - sigma) * timing.payload_s;

    // Infinite caps (astronomical drain powers) are harmless to the optimum;
    // the budget constraint keeps iterates bounded either way.
    std::vector<double> box(num_users);
    for (std::size_t k = 0; k < num_users; ++k)
        box[k] = std::min(caps[k], ap_budget); // no single user can exceed the sum cap

    double lipschitz = 0.0;
    for (std::size_t k = 0; k < num_users; ++k)
        lipschitz = std::max(lipschitz,
                             down_weights[k] * gains[k] * gains[k] / std::numbers::ln2);
    std::vector<double> p(num_users, 0.0);
    if (lipschitz == 0.0) return p; // objective linear with nonnegative slope

    // Accelerated projected gradient (momentum restarted when it overshoots).
    const double step = 1.0 / lipschitz;
    auto gradient = [&](const std::vector<double>& x, std::vector<double>& g) {
        for (std::size_t k = 0; k < num_users; ++k)
            g[k] = -down_weights[k] * gains[k] /
                       (std::numbers::ln2 * (1.0 + gains[k] * x[k])) +
                   lin;
    };
    std::vector<double> y = p, prev = p, grad(num_users), trial(num_users);
    double momentum = 0.0;
    const int max_iters = 500000;
    for (int it = 0; it < max_iters; ++it) {
        gradient(y, grad);
        for (std::size_t k = 0; k < num_users; ++k) trial[k] = y[k] - step * grad[k];
        auto next = detail::project_box_budget(trial, box, ap_budget);

        double slide = 0.0;
        for (std::size_t k = 0; k < num_users; ++k)
            slide += (next[k] - p[k]) * (y[k] - next[k]);
        momentum = slide > 0.0 ? 0.0 : (momentum + 1.0); // restart on overshoot
        const double beta = momentum / (momentum + 3.0);
        for (std::size_t k = 0; k < num_users; ++k)
            y[k] = next[k] + beta * (next[k] - prev[k]);
        prev = p;
        p = std::move(next);

        // fixed-point residual of the plain projected-gradient map at p
        gradient(p, grad);
        for (std::size_t k = 0; k < num_users; ++k) trial[k] = p[k] - step * grad[k];
        const auto fixed = detail::project_box_budget(trial, box, ap_budget);
        double residual = 0.0, norm = 0.0;
        for (std::size_t k = 0; k < num_users; ++k) {
            residual += (fixed[k] - p[k]) * (fixed[k] - p[k]);
            norm += p[k] * p[k];
        }
        if (std::sqrt(residual) <= 1e-11 * (1.0 + std::sqrt(norm))) return p;
    }
    throw OracleFailure("convex_downlink: no convergence within the iteration cap");
}

struct LpCpu {
    std::vector<double> split_hz;
    double value = 0.0; // sum of weight * frequency
};

/// LP optimum by enumerating priority-fill vertices (every permutation of the
/// positive-weight users). Refuses more than eight contenders.
inline LpCpu lp_cpu(const std::vector<double>& weights, const std::vector<double>& caps,
                    double f_total) {
    std::vector<std::size_t> contenders;
    for (std::size_t k = 0; k < weights.size(); ++k)
        if (weights[k] > 0.0) contenders.push_back(k);
    if (contenders.size() > 8)
        throw OracleFailure("lp_cpu: too many users for permutation enumeration");

    LpCpu best;
    best.split_hz.assign(weights.size(), 0.0);
    best.value = 0.0;
    std::sort(contenders.begin(), contenders.end());
    if (contenders.empty()) return best;

    do {
        std::vector<double> f(weights.size(), 0.0);
        double available = f_total;
        for (std::size_t k : contenders) {
            f[k] = std::min(caps[k], available);
            available -= f[k];
        }
        double value = 0.0;
        for (std::size_t k = 0; k < weights.size(); ++k) value += weights[k] * f[k];
        if (value > best.value) {
            best.value = value;
            best.split_hz = std::move(f);
        }
    } while (std::next_permutation(contenders.begin(), contenders.end()));
    return best;
}

struct GridUplink {
    double power_w = 0.0;
    double objective = 0.0;
    double step_w = 0.0;
};

/// Scalar grid search for the per-user uplink objective over [0, cap].
inline GridUplink grid_uplink(double up_weight, double gain, double cap, double v_param,
                              double sigma, const TimingSpec& timing, int points = 10000) {
    const double lin = v_param * sigma * timing.payload_s;
    GridUplink best;
    best.step_w = cap / points;
    best.objective = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= points; ++i) {
        const double p = cap * i / points;
        const double obj = -up_weight * std::log2(1.0 + gain * p) + lin * p;
        if (obj < best.objective) {
            best.objective = obj;
            best.power_w = p;
        }
    }
    return best;
}

} // namespace rismec::oracles
