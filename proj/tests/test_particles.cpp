#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "twave/error.hpp"
#include "twave/particles.hpp"
#include "twave/rng.hpp"
#include "twave/waves.hpp"

using namespace twave;

namespace {

ParticleSystemConfig power2_config(std::size_t n, double horizon, std::uint64_t seed) {
  ParticleSystemConfig c;
  c.n = n;
  c.mechanism = Mechanism::Power2;
  c.jumps = JumpLaw::exponential(1);
  c.horizon = horizon;
  c.burn_in = horizon / 4;
  c.seed = seed;
  return c;
}

std::vector<PathPoint> line(double slope, std::size_t n, double noise_sd, std::uint64_t seed) {
  RngStream rng(seed, 3);
  std::vector<PathPoint> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i);
    p[i] = {t, slope * t + noise_sd * standard_normal(rng)};
  }
  return p;
}

// Survival function of the logistic law with scale 1/gamma, on a fine grid.
WaveProfile logistic_profile(double gamma) {
  WaveProfile w;
  w.gamma = gamma;
  w.orientation = Orientation::Power2;
  w.grid = linear_grid(-30.0 / gamma, 30.0 / gamma, 60'001);
  for (double x : w.grid) w.values.push_back(1.0 / (1.0 + std::exp(gamma * x)));
  w.stderr_values.assign(w.grid.size(), 0.0);
  return w;
}

std::vector<double> logistic_draws(double gamma, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 5);
  std::vector<double> v(n);
  for (auto& x : v) {
    const double u = uniform01(rng);
    x = std::log(u / (1 - u)) / gamma;
  }
  return v;
}

}  // namespace

TEST(ParticleSystem, SyncPairMovesToMax) {
  ParticleSystem s(Mechanism::Sync, {0.3, 1.7});
  RngStream rng(1, 1);
  s.interact(0, 1, 0.5, 0.0, rng);
  EXPECT_EQ(s.positions(), (std::vector<double>{1.7, 1.7}));
  ParticleSystem r(Mechanism::Sync, {0.3, 1.7});
  r.interact(1, 0, 0.5, 0.0, rng);  // the leader never moves back
  EXPECT_EQ(r.positions(), (std::vector<double>{0.3, 1.7}));
}

TEST(ParticleSystem, Power2LowerParticleMoves) {
  RngStream rng(1, 1);
  ParticleSystem s(Mechanism::Power2, {2.0, 1.0});
  s.interact(0, 1, 0.1, 0.5, rng);
  EXPECT_EQ(s.positions(), (std::vector<double>{2.0, 1.5}));
  s.interact(1, 0, 0.2, 0.25, rng);
  EXPECT_EQ(s.positions(), (std::vector<double>{2.0, 1.75}));
  ParticleSystem tie(Mechanism::Power2, {1.0, 1.0});
  tie.interact(1, 0, 0.1, 1.0, rng);
  EXPECT_EQ(tie.positions(), (std::vector<double>{1.0, 2.0}));
}

TEST(ParticleSystem, LazyBrownianVariance) {
  RngStream rng(4, 4);
  const int reps = 20'000;
  double sum2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    ParticleSystem s(Mechanism::Sync, {0.0, 0.0}, 2.0);
    s.advance(0, 0.7, rng);
    s.advance(0, 1.5, rng);
    sum2 += s.positions()[0] * s.positions()[0];
  }
  EXPECT_NEAR(sum2 / reps, 3.0, 0.1);
}

TEST(ParticleSystem, Exchangeability) {
  const std::vector<double> init{0.0, 0.4, -1.0, 2.0, 0.9, 0.1};
  const std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
  std::vector<double> pinit(init.size());
  for (std::size_t k = 0; k < init.size(); ++k) pinit[perm[k]] = init[k];
  for (auto mech : {Mechanism::Sync, Mechanism::Power2}) {
    ParticleSystem a(mech, init), b(mech, pinit);
    RngStream rng(2, 2), dummy(0, 0);
    for (int e = 0; e < 500; ++e) {
      const auto i = uniform_index(rng, init.size());
      auto j = uniform_index(rng, init.size() - 1);
      if (j >= i) ++j;
      const double x = exponential(rng, 1.0);
      a.interact(i, j, e, x, dummy);
      b.interact(perm[i], perm[j], e, x, dummy);
    }
    auto pa = a.positions(), pb = b.positions();
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    EXPECT_EQ(pa, pb) << to_string(mech);
  }
}

TEST(Simulate, SinglePairSync) {
  ParticleSystemConfig c;
  c.n = 2;
  c.mechanism = Mechanism::Sync;
  c.initial_positions = {0.0, 1.0};
  c.horizon = 50.0;
  c.burn_in = 0.0;
  const auto r = simulate(c);
  EXPECT_EQ(r.snapshots.back(), (std::vector<double>{1.0, 1.0}));
}

TEST(Simulate, MonotoneCoupling) {
  for (auto mech : {Mechanism::Sync, Mechanism::Power2}) {
    auto c = power2_config(200, 20.0, 6);
    c.mechanism = mech;
    if (mech == Mechanism::Sync) {
      c.jumps.reset();
      RngStream rng(8, 8);
      for (std::size_t i = 0; i < c.n; ++i) c.initial_positions.push_back(standard_normal(rng));
    }
    c.snapshot_times = linear_grid(0.5, 20.0, 40);
    const auto r = simulate(c);
    for (std::size_t s = 1; s < r.snapshots.size(); ++s) {
      for (std::size_t i = 0; i < c.n; ++i) ASSERT_GE(r.snapshots[s][i], r.snapshots[s - 1][i]);
    }
  }
}

TEST(Simulate, Deterministic) {
  const auto c = power2_config(500, 10.0, 9);
  const auto a = simulate(c), b = simulate(c);
  EXPECT_EQ(a.snapshots, b.snapshots);
  EXPECT_EQ(a.events, b.events);
  auto d = c;
  d.seed = 10;
  EXPECT_NE(simulate(d).snapshots, a.snapshots);
}

TEST(Simulate, SnapshotsAndMedianCadence) {
  const auto c = power2_config(100, 40.0, 11);
  const auto r = simulate(c);
  ASSERT_EQ(r.snapshots.size(), 20u);
  EXPECT_DOUBLE_EQ(r.snapshot_times.front(), 11.5);
  EXPECT_DOUBLE_EQ(r.snapshot_times.back(), 40.0);
  ASSERT_EQ(r.median_path.size(), 41u);
  EXPECT_EQ(r.median_path.front().median, 0.0);
  EXPECT_FALSE(r.truncated);
}

TEST(Simulate, Truncation) {
  auto c = power2_config(100, 100.0, 12);
  c.max_events = 500;
  const auto r = simulate(c);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.events, 500u);
  EXPECT_LT(r.end_time, 100.0);
}

TEST(Simulate, Power2MassTransport) {
  // Every interaction moves one particle by X, so the mean advances at rho E[X].
  for (double rho : {1.0, 2.0}) {
    auto c = power2_config(1'000, 100.0, 13);
    c.copy_rate = rho;
    const auto r = simulate(c);
    const auto& last = r.snapshots.back();
    const double mean = std::accumulate(last.begin(), last.end(), 0.0) / last.size();
    EXPECT_NEAR(mean / 100.0, rho, 0.02 * rho);
  }
}

TEST(Simulate, Power2SpeedSmallN) {
  const auto c = power2_config(2'000, 100.0, 14);
  const auto r = simulate(c);
  const auto s = estimate_speed(r.median_path, c.burn_in);
  EXPECT_NEAR(s.c_hat, 1.0, 0.08);
}

TEST(Simulate, ValidationNamesField) {
  auto check = [](ParticleSystemConfig c, const std::string& field) {
    try {
      c.validate();
      ADD_FAILURE() << "accepted bad " << field;
    } catch (const ValidationError& e) {
      EXPECT_EQ(std::string(e.what()).rfind(field + ":", 0), 0u) << e.what();
    }
  };
  auto c = power2_config(10, 10.0, 1);
  auto bad = c;
  bad.n = 1;
  check(bad, "n");
  bad = c;
  bad.jumps = JumpLaw::exponential(0.5);
  check(bad, "jumps");
  bad = c;
  bad.jumps.reset();
  check(bad, "jumps");
  bad = c;
  bad.burn_in = 20.0;
  check(bad, "burn_in");
  bad = c;
  bad.copy_rate = 0.0;
  check(bad, "rho");
  bad = c;
  bad.mechanism = Mechanism::BSModel;
  bad.sigma2 = 1.0;
  check(bad, "sigma2");
  bad = c;
  bad.initial_positions = {1.0};
  check(bad, "initial_positions");
}

TEST(Mechanism, RoundTrip) {
  for (auto m : {Mechanism::Sync, Mechanism::BSModel, Mechanism::Power2}) {
    EXPECT_EQ(parse_mechanism(to_string(m)), m);
  }
  EXPECT_THROW(parse_mechanism("voter"), ValidationError);
}

TEST(EstimateSpeed, ExactLine) {
  const auto s = estimate_speed(line(2.0, 100, 0.0, 1), 0.0);
  EXPECT_NEAR(s.c_hat, 2.0, 1e-12);
  EXPECT_EQ(s.points, 100u);
}

TEST(EstimateSpeed, BurnInDropsPoints) {
  EXPECT_EQ(estimate_speed(line(2.0, 100, 0.0, 1), 49.5).points, 50u);
}

TEST(EstimateSpeed, CoverageOverSeeds) {
  int covered = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto s = estimate_speed(line(2.0, 150, 0.1, seed), 0.0, seed);
    if (s.ci_lo <= 2.0 && 2.0 <= s.ci_hi) ++covered;
  }
  EXPECT_GE(covered, 45);
}

TEST(EstimateSpeed, InsufficientPoints) {
  try {
    estimate_speed(line(1.0, 30, 0.0, 1), 15.0);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("insufficient points"), std::string::npos);
  }
}

TEST(CenteredProfile, SinglePointIsStep) {
  const std::vector<double> times{1.0};
  const std::vector<std::vector<double>> snaps{std::vector<double>(50, 4.2)};
  const auto e = centered_profile(times, snaps, 0.0, 2.0);
  EXPECT_DOUBLE_EQ(e.cdf(-1e-9), 0.0);
  EXPECT_DOUBLE_EQ(e.cdf(0.0), 1.0);
  EXPECT_DOUBLE_EQ(e.offset, 4.2);
}

TEST(CenteredProfile, ShiftInvariant) {
  const auto base = logistic_draws(1.0, 1'001, 3);
  std::vector<double> moved(base);
  for (auto& x : moved) x += 7.5;
  const std::vector<double> t1{1.0}, t2{2.0};
  const auto a = centered_profile(t1, {base}, 0.0, 5.0);
  const auto b = centered_profile(t2, {moved}, 0.0, 5.0);
  ASSERT_EQ(a.sorted.size(), b.sorted.size());
  for (std::size_t i = 0; i < a.sorted.size(); ++i) EXPECT_NEAR(a.sorted[i], b.sorted[i], 1e-12);
}

TEST(CenteredProfile, EmptyRange) {
  const std::vector<double> times{1.0};
  const std::vector<std::vector<double>> snaps{std::vector<double>(5, 0.0)};
  EXPECT_THROW(centered_profile(times, snaps, 2.0, 3.0), ValidationError);
}

TEST(CompareProfiles, ExactSample) {
  const std::size_t n = 10'000;
  const auto pred = logistic_profile(2.0);
  const auto emp = make_empirical_cdf(logistic_draws(2.0, n, 4));
  const auto r = compare_profiles(emp, pred);
  EXPECT_LT(r.w1_after_shift, 2.0 / std::sqrt(static_cast<double>(n)));
}

TEST(CompareProfiles, RecoversShift) {
  const auto pred = logistic_profile(1.0);
  const auto draws = logistic_draws(1.0, 10'000, 5);
  std::vector<double> moved(draws);
  for (auto& x : moved) x += 3.0;
  const auto self = compare_profiles(make_empirical_cdf(draws), pred);
  const auto r = compare_profiles(make_empirical_cdf(moved), pred);
  EXPECT_NEAR(r.shift - self.shift, 3.0, 1e-9);
  EXPECT_NEAR(r.w1_after_shift, self.w1_after_shift, 1e-9);
  EXPECT_GT(r.w1_unshifted, 2.5);
}

TEST(CompareProfiles, DetectsWrongRate) {
  const auto emp = make_empirical_cdf(logistic_draws(1.0, 10'000, 6));
  const auto good = compare_profiles(emp, logistic_profile(1.0));
  const auto bad = compare_profiles(emp, logistic_profile(2.0));
  EXPECT_GT(bad.w1_after_shift, 3 * good.w1_after_shift);
}
