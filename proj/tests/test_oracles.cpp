#include <catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "rismec/compute_allocator.hpp"
#include "rismec/oracles.hpp"

using namespace rismec;
using Catch::Approx;

namespace {
const TimingSpec kTiming{0.010, 0.001, 0.009};
}

TEST_CASE("exhaustive search scans tiny instances and refuses huge ones") {
    SurrogateMatrix one;
    one.ris_sizes = {1};
    one.h = CMatrix::Zero(2, 2);
    one.h(1, 1) = 0.5;
    const auto best = oracles::exhaustive_ris(one, {phase_alphabet(1)});
    CHECK(best.vectors[0][0] == Complex(0.0, 0.0)); // energy-only: off wins
    CHECK(best.value == Approx(0.0));

    SurrogateMatrix big;
    big.ris_sizes = {40};
    big.h = CMatrix::Zero(41, 41);
    CHECK_THROWS_AS(oracles::exhaustive_ris(big, {phase_alphabet(2)}), OracleFailure);
}

TEST_CASE("exhaustive search finds a better-or-equal value than greedy") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = testutil::random_hermitian({5}, rng);
        const std::vector<PhaseAlphabet> alphabets{phase_alphabet(2)};
        const auto best = oracles::exhaustive_ris(m, alphabets);
        const auto greedy = greedy_optimize(m, alphabets, {5});
        CHECK(best.value <= greedy.surrogate_value + 1e-12);
    }
}

TEST_CASE("the convex oracle returns zeros without pressure and the clamp formula "
          "when the budget is slack") {
    const auto zero =
        oracles::convex_downlink({0.0, 0.0}, {1.0, 2.0}, {1.0, 1.0}, 1.0, 1e2, 0.5,
                                 kTiming);
    CHECK(zero == std::vector<double>{0.0, 0.0});

    const std::vector<double> weights{2.0, 1.0};
    const std::vector<double> gains{3.0, 4.0};
    const std::vector<double> caps{5.0, 5.0};
    const double v_param = 150.0, sigma = 0.5;
    const auto p =
        oracles::convex_downlink(weights, gains, caps, 100.0, v_param, sigma, kTiming);
    const double base = v_param * (1.0 - sigma) * kTiming.payload_s;
    for (std::size_t k = 0; k < 2; ++k) {
        const double expected =
            std::clamp(weights[k] / (base * std::numbers::ln2) - 1.0 / gains[k], 0.0,
                       caps[k]);
        CHECK(p[k] == Approx(expected).margin(1e-8));
    }
}

TEST_CASE("the lp oracle handles single users, refusals, and degenerate ties") {
    const auto single = oracles::lp_cpu({2.0}, {0.4e9}, 1e9);
    CHECK(single.split_hz[0] == Approx(0.4e9)); // min(cap, budget)

    const auto capped = oracles::lp_cpu({2.0}, {3e9}, 1e9);
    CHECK(capped.split_hz[0] == Approx(1e9));

    CHECK_THROWS_AS(
        oracles::lp_cpu(std::vector<double>(9, 1.0), std::vector<double>(9, 1.0), 5.0),
        OracleFailure);

    // all weights equal: any cap-respecting full fill is optimal and the
    // value matches the production greedy
    auto cfg = testutil::desk_config();
    ComputeWeights w;
    w.y = {1.5, 1.5};
    std::vector<double> caps{0.7e9, 0.7e9};
    std::vector<double> remote{caps[0] * kTiming.payload_s * 1e-3,
                               caps[1] * kTiming.payload_s * 1e-3};
    const auto lp = oracles::lp_cpu(w.y, caps, 1e9);
    const auto greedy = schedule_cpu(w, remote, cfg.users, 1e9, cfg.timing);
    double greedy_value = 0.0;
    for (std::size_t k = 0; k < 2; ++k) greedy_value += w.y[k] * greedy[k];
    CHECK(lp.value == Approx(greedy_value));
}

TEST_CASE("oracle reports compute the gap against the stated tolerance") {
    const auto good = oracles::make_report("demo", -3.0, -3.0 + 5e-9, 1e-8);
    CHECK(good.gap == Approx(5e-9));
    CHECK(good.pass);
    const auto bad = oracles::make_report("demo", -3.0, -2.9, 1e-8);
    CHECK_FALSE(bad.pass);
}
