#include "hip/core.hpp"
#include "hip/error.hpp"

#include "support/oracles.hpp"
#include "support/synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace hip;
using hip::oracle::direct_simulate;

namespace {

DailySeries shares(std::vector<double> v) { return DailySeries(std::move(v), SeriesKind::shares); }

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected hip::Error";
    return ErrorCode::io_error;
}

std::vector<double> to_vec(const DailySeries& s) { return {s.values().begin(), s.values().end()}; }

}  // namespace

TEST(Simulate, NoExcitationScalesInput) {
    const auto out = simulate({2.0, 0.0, 1.0, 1.0}, shares({1, 3, 0}), 3);
    EXPECT_EQ(to_vec(out), (std::vector<double>{2, 6, 0}));
}

TEST(Simulate, ZeroInputGivesZero) {
    const auto out = simulate({1.0, 0.5, 1.0, 1.0}, shares({0, 0, 0, 0}), 4);
    EXPECT_EQ(to_vec(out), (std::vector<double>{0, 0, 0, 0}));
}

TEST(Simulate, HandUnrolledRecurrence) {
    const HipParams p{1.0, 0.5, 1.0, 1.0};
    const auto out = simulate(p, shares({1, 0, 0}), 3);
    EXPECT_DOUBLE_EQ(out[0], 1.0);
    EXPECT_DOUBLE_EQ(out[1], 0.125);
    EXPECT_NEAR(out[2], 0.0711805555555555555, 1e-15);
    const auto oracle = direct_simulate(p, {1, 0, 0}, 3);
    for (std::size_t t = 0; t < 3; ++t) EXPECT_NEAR(out[t], oracle[t], 1e-15);
}

TEST(Simulate, MatchesDirectSummationOnRandomInputs) {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 20; ++k) {
        const auto p = hip::oracle::random_subcritical(rng);
        const auto s = hip::oracle::random_shares(rng, 150);
        const auto out = simulate(p, s, 150);
        const auto oracle = direct_simulate(p, to_vec(s), 150);
        for (std::size_t t = 0; t < 150; ++t) {
            EXPECT_NEAR(out[t], oracle[t], 1e-12 * std::max(1.0, oracle[t]));
        }
    }
}

TEST(Simulate, Errors) {
    const HipParams p{1.0, 0.5, 1.0, 1.0};
    EXPECT_EQ(code_of([&] { (void)simulate(p, shares({1}), 0); }), ErrorCode::invalid_argument);
    EXPECT_EQ(code_of([&] { (void)simulate(p, shares({1, 2}), 3); }), ErrorCode::insufficient_exogenous_data);
    EXPECT_EQ(code_of([&] { (void)simulate({-1, 0, 1, 1}, shares({1}), 1); }), ErrorCode::invalid_argument);
    EXPECT_EQ(code_of([&] { (void)simulate({1, 0, 1e-4, 1}, shares({1}), 1); }), ErrorCode::invalid_argument);
    EXPECT_EQ(code_of([&] { (void)simulate({1, 0, 1, 10.5}, shares({1}), 1); }), ErrorCode::invalid_argument);
    const auto padded = simulate(p, shares({1, 2}), 4, {.zero_fill_exogenous = true});
    EXPECT_EQ(padded.size(), 4u);
    EXPECT_EQ(padded[3], simulate(p, shares({1, 2, 0, 0}), 4)[3]);
}

TEST(Simulate, SupercriticalStillRunsOnFiniteHorizon) {
    const HipParams p{1.0, 5.0, 0.5, 0.5};
    ASSERT_GT(kernel_mass(p), 1.0);
    const auto out = simulate(p, shares(std::vector<double>(30, 1.0)), 30);
    EXPECT_TRUE(std::isfinite(out[29]));
    EXPECT_GT(out[29], out[10]);
}

TEST(DailySeriesTest, RejectsNegativeAndNonFinite) {
    EXPECT_EQ(code_of([] { DailySeries({1.0, -1.0}); }), ErrorCode::invalid_value);
    EXPECT_EQ(code_of([] { DailySeries({NAN}); }), ErrorCode::invalid_value);
    EXPECT_EQ(code_of([] { (void)DailySeries({1.0}).prefix(2); }), ErrorCode::window_out_of_range);
}

TEST(KernelMass, ZeroExcitation) { EXPECT_EQ(kernel_mass({1.0, 0.0, 3.0, 0.4}), 0.0); }

TEST(KernelMass, BaselTailClosedForm) {
    const double expected = 0.5 * (std::numbers::pi * std::numbers::pi / 6.0 - 1.0);
    EXPECT_NEAR(kernel_mass({1.0, 0.5, 1.0, 1.0}), expected, 1e-14);
    EXPECT_NEAR(expected, 0.32246703342411321824, 1e-15);
    EXPECT_NEAR(0.5 * hip::oracle::brute_kernel_sum(1.0, 1.0, 10'000'000), expected, 1e-12);
}

TEST(KernelMass, LargeOffsetMatchesBruteForce) {
    const double brute = hip::oracle::brute_kernel_sum(1000.0, 1.0, 10'000'000);
    EXPECT_NEAR(kernel_mass({1.0, 1.0, 1000.0, 1.0}), brute, 1e-9 * brute);
    // Hurwitz zeta(2, 1001), 30-digit reference.
    EXPECT_NEAR(kernel_mass({1.0, 1.0, 1000.0, 1.0}), 0.00099950016666663333335714282381, 1e-17);
}

TEST(KernelMass, HeavyTailsStayAccurate) {
    // Hurwitz zeta references (s = 1 + theta, q = 1 + c).
    EXPECT_NEAR(kernel_mass({1.0, 0.8, 2.5, 0.3}), 1.9145454347849364166339417155, 1e-12);
    EXPECT_NEAR(kernel_mass({1.0, 1.0, 0.001, 0.05}), 20.5791651388096145988771200559, 1e-9);
}

TEST(ImpulseResponse, NoExcitation) {
    const auto r = impulse_response({3.0, 0.0, 1.0, 1.0});
    EXPECT_EQ(to_vec(r.series), std::vector<double>{1.0});
    EXPECT_EQ(r.total, 1.0);
}

TEST(ImpulseResponse, ClosedFormTotal) {
    const auto r = impulse_response({7.0, 0.5, 1.0, 1.0});
    EXPECT_EQ(r.series[0], 1.0);
    EXPECT_NEAR(r.total, 1.47594294201475647320183415782, 1e-6 * 1.476);
    EXPECT_GE(r.total, 1.0);
    EXPECT_NEAR(r.series[1], 0.125, 1e-15);  // mu does not enter
}

TEST(ImpulseResponse, FastDecayConvergesWithoutTail) {
    // theta = 4: the simulated prefix alone reaches the closed form.
    const HipParams p{1.0, 0.6, 0.5, 4.0};
    const auto r = impulse_response(p);
    const double nstar = kernel_mass(p);
    EXPECT_LT(r.tail_bound, 1e-9 * r.total);
    EXPECT_LT(r.truncated_at, 4096u);
    EXPECT_NEAR(r.series.total() * (1.0 - nstar), 1.0, 1e-8);
}

TEST(ImpulseResponse, RandomSubcriticalClosedForm) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 30; ++k) {
        const auto p = hip::oracle::random_subcritical(rng, 0.05, 0.95);
        const auto r = impulse_response(p);
        EXPECT_GE(r.total, 1.0);
        EXPECT_NEAR(r.total * (1.0 - kernel_mass(p)), 1.0, 1e-6);
        EXPECT_NEAR(r.series.total() + r.tail_bound, r.total, 1e-12 * r.total);
    }
}

TEST(ImpulseResponse, SupercriticalRefused) {
    try {
        (void)impulse_response({1.0, 5.0, 0.5, 0.5});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::divergent_response);
        EXPECT_GT(e.details().at("branching_factor"), 1.0);
    }
}

TEST(ViralPotential, Definition) {
    EXPECT_EQ(viral_potential(0.0, 5.0), 0.0);
    EXPECT_EQ(viral_potential(2.0, 3.0), 6.0);
    EXPECT_THROW((void)viral_potential(1.0, 0.5), Error);
}

TEST(EvenSchedule, Conservation) {
    const auto unit = even_schedule(90.0, 90);
    EXPECT_EQ(unit.size(), 90u);
    for (double v : unit.values()) EXPECT_EQ(v, 1.0);
    const auto none = even_schedule(0.0, 90);
    for (double v : none.values()) EXPECT_EQ(v, 0.0);
    const auto half = even_schedule(45.0);
    EXPECT_EQ(half[0], 0.5);
    EXPECT_EQ(half.total(), 45.0);
    EXPECT_EQ(half.kind(), SeriesKind::promotion);
    EXPECT_THROW((void)even_schedule(-1.0), Error);
    EXPECT_THROW((void)even_schedule(1.0, 0), Error);
}

TEST(PromotedSeries, ZeroPromotionIsOrganic) {
    std::mt19937_64 rng(3);
    const auto p = hip::oracle::random_subcritical(rng);
    const auto organic = hip::oracle::random_shares(rng, 120);
    EXPECT_EQ(promoted_series(p, organic, even_schedule(0.0), 120), simulate(p, organic, 120));
}

TEST(PromotedSeries, ImpulsePromotionIsImpulseResponse) {
    const HipParams p{1.0, 0.5, 1.0, 1.0};
    const auto out = promoted_series(p, shares(std::vector<double>(50, 0.0)),
                                     DailySeries({1.0}, SeriesKind::promotion), 50);
    const auto r = impulse_response(p);
    for (std::size_t t = 0; t < 50; ++t) EXPECT_NEAR(out[t], r.series[t], 1e-15);
}

TEST(PromotedSeries, DoublingVolumeDoublesIncrement) {
    std::mt19937_64 rng(5);
    const auto p = hip::oracle::random_subcritical(rng);
    const auto organic = hip::oracle::random_shares(rng, 120);
    const auto base = simulate(p, organic, 120);
    const auto once = promoted_series(p, organic, even_schedule(300.0), 120);
    const auto twice = promoted_series(p, organic, even_schedule(600.0), 120);
    for (std::size_t t = 0; t < 120; ++t) {
        const double inc1 = once[t] - base[t];
        const double inc2 = twice[t] - base[t];
        EXPECT_NEAR(inc2, 2.0 * inc1, 1e-9 * std::max(1.0, base[t]));
    }
}

TEST(CascadeTotal, PromotionReturnIsViralPotentialTimesVolume) {
    std::mt19937_64 rng(17);
    for (int k = 0; k < 10; ++k) {
        const auto p = hip::oracle::random_subcritical(rng);
        const double volume = 500.0;
        const auto total = cascade_total(p, even_schedule(volume));
        const double expected = p.mu * impulse_response(p).total * volume;
        EXPECT_NEAR(total.total(), expected, 1e-6 * expected);
    }
}
