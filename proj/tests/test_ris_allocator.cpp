#include <catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "rismec/oracles.hpp"
#include "rismec/ris_allocator.hpp"

using namespace rismec;
using Catch::Approx;

TEST_CASE("phase alphabets enumerate off plus the quantized roots") {
    const auto one_bit = phase_alphabet(1);
    REQUIRE(one_bit.values.size() == 3);
    CHECK(one_bit.values[0] == Complex(0.0, 0.0));
    CHECK(std::abs(one_bit.values[1] - Complex(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(one_bit.values[2] - Complex(-1.0, 0.0)) < 1e-12);

    const auto two_bit = phase_alphabet(2);
    REQUIRE(two_bit.values.size() == 5);
    CHECK(std::abs(two_bit.values[1] - Complex(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(two_bit.values[2] - Complex(0.0, 1.0)) < 1e-12);
    CHECK(std::abs(two_bit.values[3] - Complex(-1.0, 0.0)) < 1e-12);
    CHECK(std::abs(two_bit.values[4] - Complex(0.0, -1.0)) < 1e-12);

    for (int b : {1, 2, 3, 4, 6}) {
        const auto a = phase_alphabet(b);
        CHECK(a.values.size() == (1u << b) + 1);
        Complex sum(0.0, 0.0);
        for (std::size_t i = 1; i < a.values.size(); ++i) {
            CHECK(std::abs(std::abs(a.values[i]) - 1.0) < 1e-12);
            sum += a.values[i];
        }
        CHECK(std::abs(sum) < 1e-12); // roots of unity cancel
    }
    CHECK_THROWS_AS(phase_alphabet(0), ContractViolation);
}

TEST_CASE("surrogate value basics") {
    std::mt19937_64 rng(3);
    const auto m = testutil::random_hermitian({4}, rng);

    CVector v = CVector::Zero(m.dim());
    v[0] = Complex(1.0, 0.0);
    CHECK(surrogate_value(v, m) == Approx(m.h(0, 0).real()));

    CVector bad = v;
    bad[0] = Complex(0.5, 0.0);
    CHECK_THROWS_AS(surrogate_value(bad, m), ContractViolation);
}

TEST_CASE("a pure energy matrix counts active elements") {
    SurrogateMatrix m;
    m.ris_sizes = {3};
    m.h = CMatrix::Zero(4, 4);
    const double cost = 2.5;
    for (int l = 1; l < 4; ++l) m.h(l, l) = cost;
    CVector v(4);
    v << Complex(1, 0), Complex(0, 1), Complex(0, 0), Complex(-1, 0);
    CHECK(surrogate_value(v, m) == Approx(2.0 * cost)); // two elements on
}

namespace {

/// From-scratch greedy reference: evaluates the full quadratic form for every
/// candidate instead of using incremental updates, recording the post-step
/// values.
RisDecision naive_greedy(const SurrogateMatrix& m,
                         const std::vector<PhaseAlphabet>& alphabets,
                         const std::vector<int>& blocks,
                         std::vector<double>* step_values = nullptr) {
    CVector v = CVector::Zero(m.dim());
    v[0] = Complex(1.0, 0.0);
    auto eval = [&]() { return (v.dot(m.h * v)).real(); };
    for (std::size_t i = 0; i < m.ris_sizes.size(); ++i) {
        const int group = m.ris_sizes[i] / blocks[i];
        for (int b = 0; b < blocks[i]; ++b) {
            const Eigen::Index j0 = m.offset(i) + static_cast<Eigen::Index>(b) * group;
            double best = eval();
            Complex best_value = v[j0];
            for (const auto& cand : alphabets[i].values) {
                for (int r = 0; r < group; ++r) v[j0 + r] = cand;
                const double val = eval();
                if (val < best) {
                    best = val;
                    best_value = cand;
                }
            }
            for (int r = 0; r < group; ++r) v[j0 + r] = best_value;
            if (step_values) step_values->push_back(eval());
        }
    }
    RisDecision out;
    for (std::size_t i = 0; i < m.ris_sizes.size(); ++i)
        out.vectors.push_back(v.segment(m.offset(i), m.ris_sizes[i]));
    out.surrogate_value = eval();
    return out;
}

} // namespace

TEST_CASE("greedy turns everything off when only the energy term is active") {
    SurrogateMatrix m;
    m.ris_sizes = {6};
    m.h = CMatrix::Zero(7, 7);
    for (int l = 1; l < 7; ++l) m.h(l, l) = 0.7;
    const auto d = greedy_optimize(m, {phase_alphabet(2)}, {6});
    for (Eigen::Index l = 0; l < 6; ++l) CHECK(d.vectors[0][l] == Complex(0.0, 0.0));
    CHECK(d.surrogate_value == Approx(0.0));
}

TEST_CASE("greedy step values never increase") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const auto m = testutil::random_hermitian({5, 3}, rng);
        std::vector<double> steps;
        greedy_optimize(m, {phase_alphabet(2), phase_alphabet(1)}, {5, 3}, &steps);
        REQUIRE(steps.size() == 8);
        double prev = m.h(0, 0).real();
        for (double s : steps) {
            CHECK(s <= prev + 1e-9 * std::abs(prev));
            prev = s;
        }
    }
}

TEST_CASE("greedy output is feasible and matches the from-scratch reference") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const auto m = testutil::random_hermitian({6, 4}, rng);
        const std::vector<PhaseAlphabet> alphabets{phase_alphabet(2), phase_alphabet(1)};
        const std::vector<int> blocks{3, 4}; // first RIS in blocks of 2
        std::vector<double> fast_steps, slow_steps;
        const auto fast = greedy_optimize(m, alphabets, blocks, &fast_steps);
        const auto slow = naive_greedy(m, alphabets, blocks, &slow_steps);

        // incremental value bookkeeping tracks the from-scratch form per step
        REQUIRE(fast_steps.size() == slow_steps.size());
        for (std::size_t s = 0; s < fast_steps.size(); ++s)
            CHECK(fast_steps[s] ==
                  Approx(slow_steps[s]).epsilon(1e-9).margin(1e-12));
        for (std::size_t i = 0; i < 2; ++i) {
            REQUIRE(fast.vectors[i].size() == slow.vectors[i].size());
            for (Eigen::Index l = 0; l < fast.vectors[i].size(); ++l) {
                CHECK(fast.vectors[i][l] == slow.vectors[i][l]);
                bool member = false;
                for (const auto& cand : alphabets[i].values)
                    member = member || std::abs(cand - fast.vectors[i][l]) < 1e-12;
                CHECK(member);
            }
        }
        // block equality within the first RIS
        for (int b = 0; b < 3; ++b)
            CHECK(fast.vectors[0][2 * b] == fast.vectors[0][2 * b + 1]);
        CHECK(fast.surrogate_value == Approx(slow.surrogate_value).epsilon(1e-9));

        // incremental bookkeeping agrees with a from-scratch evaluation
        CVector stacked(m.dim());
        stacked[0] = Complex(1.0, 0.0);
        stacked.segment(1, 6) = fast.vectors[0];
        stacked.segment(7, 4) = fast.vectors[1];
        CHECK(fast.surrogate_value == Approx(surrogate_value(stacked, m)).epsilon(1e-9));
    }
}

TEST_CASE("greedy lands between the exhaustive optimum and the all-off value") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const auto m = testutil::random_hermitian({6}, rng);
        const std::vector<PhaseAlphabet> alphabets{phase_alphabet(1)};
        const auto greedy = greedy_optimize(m, alphabets, {6});
        const auto best = oracles::exhaustive_ris(m, alphabets);
        const double off_value = m.h(0, 0).real();
        CHECK(greedy.surrogate_value >= best.value - 1e-9 * std::abs(best.value));
        CHECK(greedy.surrogate_value <= off_value + 1e-9 * std::abs(off_value));
    }
}

TEST_CASE("scaling the matrix leaves the chosen vectors unchanged") {
    std::mt19937_64 rng(19);
    const auto m = testutil::random_hermitian({5, 4}, rng);
    SurrogateMatrix scaled = m;
    scaled.h *= 37.5;
    const std::vector<PhaseAlphabet> alphabets{phase_alphabet(2), phase_alphabet(2)};
    const auto a = greedy_optimize(m, alphabets, {5, 4});
    const auto b = greedy_optimize(scaled, alphabets, {5, 4});
    for (std::size_t i = 0; i < 2; ++i) CHECK(a.vectors[i] == b.vectors[i]);
    CHECK(b.surrogate_value == Approx(37.5 * a.surrogate_value).epsilon(1e-9));
}

TEST_CASE("single-block mode on a rank-one objective still helps one user") {
    // A rank-one pressure matrix favoring one user with aligned cascades: the
    // full optimizer and the one-block optimizer both switch elements on.
    const int n = 8;
    CVector z(n + 1);
    z[0] = Complex(1.0, 0.0);
    for (int l = 1; l <= n; ++l) z[l] = Complex(0.3, 0.0); // phase-aligned cascade
    SurrogateMatrix m;
    m.ris_sizes = {n};
    m.h = -(z.conjugate() * z.transpose());
    const std::vector<PhaseAlphabet> alphabets{phase_alphabet(2)};

    const auto full = greedy_optimize(m, alphabets, {n});
    const auto block = greedy_optimize(m, alphabets, {1});
    for (Eigen::Index l = 0; l < n; ++l) {
        CHECK(std::abs(std::abs(full.vectors[0][l]) - 1.0) < 1e-12);
        CHECK(std::abs(std::abs(block.vectors[0][l]) - 1.0) < 1e-12);
        CHECK(block.vectors[0][l] == block.vectors[0][0]);
    }
    CHECK(block.surrogate_value >= full.surrogate_value - 1e-12);
}

TEST_CASE("the re-anchoring path keeps values accurate on long sweeps") {
    std::mt19937_64 rng(23);
    const auto m = testutil::random_hermitian({200}, rng); // > 64 accepted steps
    const std::vector<PhaseAlphabet> alphabets{phase_alphabet(2)};
    const auto d = greedy_optimize(m, alphabets, {200});
    CVector stacked(m.dim());
    stacked[0] = Complex(1.0, 0.0);
    stacked.segment(1, 200) = d.vectors[0];
    CHECK(d.surrogate_value == Approx(surrogate_value(stacked, m)).epsilon(1e-9));
}
