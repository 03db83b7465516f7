#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "twave/error.hpp"
#include "twave/rng.hpp"
#include "twave/stats.hpp"
#include "twave/waves.hpp"

using namespace twave;

namespace {

// Exact draws from Exp(1): the fixed point of V = (V1 + V2) U.
std::vector<double> exp1_pool(std::size_t m, std::uint64_t seed) {
  RngStream rng(seed, 17);
  std::vector<double> v(m);
  for (auto& x : v) x = exponential(rng, 1.0);
  std::sort(v.begin(), v.end());
  return v;
}

double logistic_survival(double x) { return 1.0 / (1.0 + std::exp(x)); }

std::vector<double> sorted_copy(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(ProfileEval, UnitPool) {
  const std::vector<double> pool{1.0};
  const std::vector<double> grid{0.0};
  EXPECT_NEAR(profile_eval(pool, 1.0, Orientation::SyncRight, grid).values[0], 1 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(profile_eval(pool, 1.0, Orientation::Power2, grid).values[0], std::exp(-1.0), 1e-15);
}

TEST(ProfileEval, MonotoneAndBounded) {
  const auto pool = exp1_pool(10'000, 1);
  for (auto o : {Orientation::SyncRight, Orientation::Power2}) {
    const auto grid = linear_grid(-12.0, 12.0, 241);
    const auto p = profile_eval(pool, 1.0, o, grid);
    EXPECT_GT(p.values.front(), 0.99);
    EXPECT_LT(p.values.back(), 0.01);
    for (std::size_t i = 1; i < p.values.size(); ++i) EXPECT_LE(p.values[i], p.values[i - 1]);
    for (double v : p.values) EXPECT_TRUE(v >= 0.0 && v <= 1.0);
  }
}

TEST(ProfileEval, ShiftCovariance) {
  const auto pool = exp1_pool(2'000, 2);
  const double a = 3.7, gamma = 0.8;
  std::vector<double> scaled(pool);
  for (auto& v : scaled) v *= a;
  const auto grid = linear_grid(-5.0, 5.0, 41);
  for (auto o : {Orientation::SyncRight, Orientation::Power2}) {
    const double shift = (o == Orientation::SyncRight ? 1.0 : -1.0) * std::log(a) / gamma;
    std::vector<double> moved(grid);
    for (auto& x : moved) x -= shift;
    const auto lhs = profile_eval(scaled, gamma, o, grid);
    const auto rhs = profile_eval(pool, gamma, o, moved);
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(lhs.values[i], rhs.values[i], 1e-12);
  }
}

TEST(ProfileEval, WorkerIndependent) {
  const auto pool = exp1_pool(5'000, 3);
  const auto grid = linear_grid(-4.0, 4.0, 33);
  const auto a = profile_eval(pool, 1.0, Orientation::Power2, grid, 1);
  const auto b = profile_eval(pool, 1.0, Orientation::Power2, grid, 3);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.stderr_values, b.stderr_values);
}

TEST(ProfileEval, SurvivalInterpolation) {
  const auto p = profile_eval(std::vector<double>{1.0}, 1.0, Orientation::Power2, linear_grid(-1, 1, 3));
  EXPECT_DOUBLE_EQ(p.survival(-5.0), 1.0);
  EXPECT_DOUBLE_EQ(p.survival(5.0), 0.0);
  EXPECT_NEAR(p.survival(-0.5), 0.5 * (p.values[0] + p.values[1]), 1e-15);
  EXPECT_NEAR(p.cdf(0.0), 1 - std::exp(-1.0), 1e-15);
}

TEST(ProfileEval, LogisticWaveForExponentialPool) {
  const auto pool = exp1_pool(200'000, 4);
  const auto grid = linear_grid(-6.0, 6.0, 25);
  const auto p = profile_eval(pool, 1.0, Orientation::Power2, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(p.values[i], logistic_survival(grid[i]), 4 * p.stderr_values[i] + 1e-12) << grid[i];
  }
}

TEST(SampleWave, UnitPoolGivesGumbel) {
  const auto w = sample_wave(std::vector<double>{1.0}, 1.0, Orientation::SyncRight, 1'000'000, 5);
  const auto xi = sorted_copy(w.xi);
  EXPECT_LT(stats::ks_one_sample_sorted(xi, [](double x) { return std::exp(-std::exp(-x)); }), 0.005);
}

TEST(SampleWave, GammaScaling) {
  const std::vector<double> pool{1.0};
  const auto a = sample_wave(pool, 1.0, Orientation::SyncRight, 10'000, 6);
  const auto b = sample_wave(pool, 2.0, Orientation::SyncRight, 10'000, 6);
  for (std::size_t i = 0; i < a.xi.size(); ++i) EXPECT_NEAR(b.xi[i], 0.5 * a.xi[i], 1e-15);
}

TEST(SampleWave, RejectsZeros) {
  const std::vector<double> pool{0.0, 1.0};
  const auto w = sample_wave(pool, 1.0, Orientation::SyncRight, 10'000, 7);
  EXPECT_GT(w.zero_rejections, 4'000u);
  EXPECT_TRUE(std::all_of(w.xi.begin(), w.xi.end(), [](double x) { return std::isfinite(x); }));
  EXPECT_THROW(sample_wave(std::vector<double>{0.0}, 1.0, Orientation::SyncRight, 10, 1), NumericalError);
}

TEST(SampleWave, WorkerIndependent) {
  const auto pool = exp1_pool(1'000, 8);
  EXPECT_EQ(sample_wave(pool, 1.0, Orientation::Power2, 50'000, 9, 1).xi,
            sample_wave(pool, 1.0, Orientation::Power2, 50'000, 9, 4).xi);
}

TEST(SampleWave, ConsistentWithProfile) {
  const auto pool = exp1_pool(100'000, 10);
  for (auto o : {Orientation::SyncRight, Orientation::Power2}) {
    const auto xi = sorted_copy(sample_wave(pool, 1.0, o, 1'000'000, 11).xi);
    const auto grid = linear_grid(-15.0, 15.0, 3001);
    const auto p = profile_eval(pool, 1.0, o, grid);
    const double ks = stats::ks_one_sample_sorted(xi, [&](double x) { return p.cdf(x); });
    EXPECT_LT(ks, stats::ks_critical_two_sample(xi.size(), pool.size(), 0.01)) << to_string(o);
  }
}

TEST(SampleWave, Power2ExponentialIsLogistic) {
  const auto xi = sorted_copy(sample_wave(exp1_pool(1'000'000, 12), 1.0, Orientation::Power2, 1'000'000, 13).xi);
  EXPECT_LT(stats::ks_one_sample_sorted(xi, [](double x) { return 1 - logistic_survival(x); }), 0.005);
}

TEST(VerifySync, GumbelMaxStability) {
  const auto inc = IncrementLaw::constant(std::log(2.0));
  const auto xi = sample_wave(std::vector<double>{1.0}, 1.0, Orientation::SyncRight, 200'000, 14).xi;
  const auto ok = verify_fixed_point_sync(xi, inc, 15);
  EXPECT_TRUE(ok.pass) << ok.statistic << " vs " << ok.critical_value;
  const auto shifted = verify_fixed_point_sync(xi, inc, 15, 2, 0.5);
  EXPECT_FALSE(shifted.pass);
}

TEST(VerifySync, PureCopyingExponentialWave) {
  // W ~ Exp(1) solves the pure-copying recursion with c = gamma = 1.
  const auto inc = IncrementLaw::sync(LevySpec::none(), 1.0);
  const auto xi = sample_wave(exp1_pool(1'000'000, 16), 1.0, Orientation::SyncRight, 1'000'000, 17).xi;
  EXPECT_TRUE(verify_fixed_point_sync(xi, inc, 18).pass);
  EXPECT_FALSE(verify_fixed_point_sync(xi, inc, 18, 2, 0.5).pass);
}

TEST(VerifySync, NeedsEnoughSamples) {
  const std::vector<double> xi(1'000, 0.0);
  EXPECT_THROW(verify_fixed_point_sync(xi, IncrementLaw::constant(1.0), 1), ValidationError);
}

TEST(VerifyPower2, ExponentialWave) {
  const auto xi = sample_wave(exp1_pool(1'000'000, 19), 1.0, Orientation::Power2, 1'000'000, 20).xi;
  const auto ok = verify_fixed_point_power2(xi, JumpLaw::exponential(1), 0.0, 21);
  EXPECT_TRUE(ok.pass) << ok.statistic << " vs " << ok.critical_value;
  EXPECT_FALSE(verify_fixed_point_power2(xi, JumpLaw::exponential(0.5), 0.0, 21).pass);
}

TEST(VerifyPower2, EquivalenceOnLogisticWave) {
  // Exact logistic draws, the sigma2 = 0 Exp(1) wave at gamma = 1.
  RngStream rng(22, 23);
  std::vector<double> xi(1'000'000);
  for (auto& x : xi) {
    const double u = uniform01(rng);
    x = std::log(u / (1 - u));
  }
  const auto r = verify_equivalence_power2(xi, JumpLaw::exponential(1), 0.0, 24);
  EXPECT_TRUE(r.pass) << r.statistic << " vs " << r.critical_value;
  // Xbar ~ Exp(1) replaced by nothing: min(xi_a, xi_b) alone is far off.
  const auto wrong = verify_equivalence_power2(xi, JumpLaw::deterministic(1), 2.0, 24, false);
  EXPECT_FALSE(wrong.pass);
}

TEST(TailAsymptotics, ExponentialPoolPower2) {
  const auto pool = exp1_pool(1'000'000, 25);
  const auto t = tail_asymptotics(pool, 1.0, Orientation::Power2);
  EXPECT_NEAR(t.left_slope, 1.0, 0.05);
  EXPECT_NEAR(t.left_prefactor, 1.0, 0.1);
  EXPECT_NEAR(t.pool_mean, 1.0, 0.01);
  EXPECT_GE(t.left_points, 3u);
  EXPECT_NEAR(t.density_at_zero, 1.0, 0.1);
}

TEST(TailAsymptotics, ExponentialPoolSyncRight) {
  const auto pool = exp1_pool(1'000'000, 26);
  const double gamma = 0.5;
  const auto t = tail_asymptotics(pool, gamma, Orientation::SyncRight);
  EXPECT_NEAR(t.right_slope / -gamma, 1.0, 0.05);
  EXPECT_NEAR(t.right_prefactor / t.pool_mean, 1.0, 0.1);
}

TEST(TailAsymptotics, DegeneratePool) {
  const std::vector<double> zeros(100, 0.0);
  try {
    tail_asymptotics(zeros, 1.0, Orientation::SyncRight);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("insufficient tail resolution"), std::string::npos);
  }
}

TEST(Orientation, RoundTrip) {
  for (auto o : {Orientation::SyncRight, Orientation::Power2}) EXPECT_EQ(parse_orientation(to_string(o)), o);
  EXPECT_THROW(parse_orientation("left"), ValidationError);
}
