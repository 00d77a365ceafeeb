#pragma once

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "rismec/controller.hpp"
#include "rismec/errors.hpp"
#include "rismec/report.hpp"
#include "rismec/scenario.hpp"

namespace rismec {

/// One-parameter sweep: a list of values for a named scenario knob, each run
/// with one or more seeds and seed-averaged.
struct SweepSpec {
    std::string parameter; // v_param | sigma | num_blocks | phase_bits | ris_count
    std::vector<double> values;
    int seeds_per_point = 1;
};

inline void validate_sweep(const SweepSpec& spec) {
    static const char* known[] = {"v_param", "sigma", "num_blocks", "phase_bits",
                                  "ris_count"};
    bool ok = false;
    for (const char* name : known) ok = ok || spec.parameter == name;
    if (!ok) throw ValidationError("sweep: unknown parameter '" + spec.parameter + "'");
    if (spec.values.empty()) throw ValidationError("sweep: value list must be non-empty");
    if (spec.seeds_per_point < 1) throw ValidationError("sweep: seeds_per_point must be >= 1");
}

/// Applies one sweep value to a copy of the base scenario and revalidates.
/// Integer knobs require integral values; ris_count keeps the first n RISs.
inline ScenarioConfig apply_sweep_value(ScenarioConfig cfg, const std::string& parameter,
                                        double value) {
    auto as_int = [&](const char* what) {
        const double r = std::round(value);
        if (r != value) throw ValidationError(std::string("sweep: ") + what +
                                              " requires an integral value");
        return static_cast<int>(r);
    };
    if (parameter == "v_param") {
        cfg.v_param = value;
    } else if (parameter == "sigma") {
        cfg.sigma = value;
    } else if (parameter == "num_blocks") {
        const int n = as_int("num_blocks");
        for (auto& r : cfg.riss) r.num_blocks = n;
    } else if (parameter == "phase_bits") {
        const int n = as_int("phase_bits");
        for (auto& r : cfg.riss) r.phase_bits = n;
    } else if (parameter == "ris_count") {
        const int n = as_int("ris_count");
        if (n < 0 || static_cast<std::size_t>(n) > cfg.riss.size())
            throw ValidationError("sweep: ris_count outside [0, configured RIS count]");
        cfg.riss.resize(static_cast<std::size_t>(n));
    } else {
        throw ValidationError("sweep: unknown parameter '" + parameter + "'");
    }
    validate_scenario(cfg);
    return cfg;
}

namespace detail {

inline EpisodeSummary mean_summary(const std::vector<EpisodeSummary>& summaries) {
    EpisodeSummary m = summaries.front();
    for (std::size_t s = 1; s < summaries.size(); ++s) {
        const auto& r = summaries[s];
        m.avg_weighted_j += r.avg_weighted_j;
        m.avg_user_j += r.avg_user_j;
        m.avg_ap_j += r.avg_ap_j;
        m.avg_es_j += r.avg_es_j;
        m.avg_ris_j += r.avg_ris_j;
        m.mean_delay_s += r.mean_delay_s;
        m.duty_cycle += r.duty_cycle;
        for (std::size_t k = 0; k < m.avg_backlog_bits.size(); ++k) {
            m.avg_backlog_bits[k] += r.avg_backlog_bits[k];
            m.avg_delay_s[k] += r.avg_delay_s[k];
        }
    }
    const double n = static_cast<double>(summaries.size());
    m.avg_weighted_j /= n;
    m.avg_user_j /= n;
    m.avg_ap_j /= n;
    m.avg_es_j /= n;
    m.avg_ris_j /= n;
    m.mean_delay_s /= n;
    m.duty_cycle /= n;
    for (std::size_t k = 0; k < m.avg_backlog_bits.size(); ++k) {
        m.avg_backlog_bits[k] /= n;
        m.avg_delay_s[k] /= n;
    }
    return m;
}

} // namespace detail

/// Runs every (point, seed) episode on a worker pool and seed-averages per
/// point. Episodes are independent; rows come back in point order regardless
/// of scheduling.
inline std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const SweepSpec& spec,
                                       int ma_window) {
    validate_sweep(spec);
    const std::size_t points = spec.values.size();
    const std::size_t seeds = static_cast<std::size_t>(spec.seeds_per_point);

    std::vector<ScenarioConfig> configs;
    configs.reserve(points);
    for (double v : spec.values) configs.push_back(apply_sweep_value(base, spec.parameter, v));

    std::vector<EpisodeSummary> results(points * seeds);
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t job = cursor.fetch_add(1);
            if (job >= points * seeds) return;
            try {
                ScenarioConfig cfg = configs[job / seeds];
                cfg.rng_seed = cfg.rng_seed + (job % seeds);
                results[job] =
                    run_episode(cfg, default_channel_provider(), ma_window).summary;
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    const std::size_t workers =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()),
                              points * seeds);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);

    std::vector<SweepRow> rows;
    rows.reserve(points);
    for (std::size_t p = 0; p < points; ++p) {
        std::vector<EpisodeSummary> per_seed(results.begin() + p * seeds,
                                             results.begin() + (p + 1) * seeds);
        SweepRow row;
        row.parameter = spec.parameter;
        row.value = spec.values[p];
        row.v_param = configs[p].v_param;
        row.sigma = configs[p].sigma;
        row.mean = detail::mean_summary(per_seed);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace rismec
