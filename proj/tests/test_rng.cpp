#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "twave/parallel.hpp"
#include "twave/rng.hpp"
#include "twave/stats.hpp"

using namespace twave;

TEST(RngStream, SameKeyGivesSameSequence) {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(RngStream, DifferentStreamsDiffer) {
  RngStream a(42, 7), b(42, 8), c(43, 7);
  int same_b = 0, same_c = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    same_b += x == b();
    same_c += x == c();
  }
  EXPECT_EQ(same_b, 0);
  EXPECT_EQ(same_c, 0);
}

TEST(RngStream, SplitDoesNotAdvanceParent) {
  RngStream a(1, 2), b(1, 2);
  (void)a.split(5, 6);
  EXPECT_EQ(a(), b());
  RngStream s1 = a.split(5, 6), s2 = b.split(5, 6);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(s1(), s2());
}

TEST(RngStream, CounterCountsBlocks) {
  RngStream a(3, 4);
  EXPECT_EQ(a.counter(), 0u);
  a();
  a();
  EXPECT_EQ(a.counter(), 1u);
  a();
  EXPECT_EQ(a.counter(), 2u);
}

TEST(RngStream, UniformIsOpenUnitInterval) {
  RngStream rng(9, 9);
  double lo = 1, hi = 0, sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / n, 0.5, 0.003);
}

TEST(RngStream, UniformIndexCoversRangeEvenly) {
  RngStream rng(5, 1);
  std::vector<int> counts(7, 0);
  const int n = 700000;
  for (int i = 0; i < n; ++i) counts[uniform_index(rng, 7)]++;
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 5 * std::sqrt(n / 7.0));
}

TEST(RngStream, SamplersMatchMoments) {
  RngStream rng(11, 0);
  const int n = 400000;
  std::vector<double> e(n), g(n), z(n);
  for (int i = 0; i < n; ++i) {
    e[i] = exponential(rng, 2.0);
    g[i] = gumbel(rng);
    z[i] = standard_normal(rng);
  }
  EXPECT_NEAR(stats::summarize(e).mean, 0.5, 0.005);
  EXPECT_NEAR(stats::summarize(g).mean, 0.5772156649, 0.01);
  const auto sz = stats::summarize(z);
  EXPECT_NEAR(sz.mean, 0.0, 0.01);
  EXPECT_NEAR(sz.stddev, 1.0, 0.01);
}

TEST(Parallel, ChunkLayoutIndependentOfWorkers) {
  auto fill = [](int workers) {
    std::vector<double> out(100003);
    const RngStream base(77, 0);
    for_each_chunk(out.size(), 4096, workers, [&](std::size_t c, std::size_t b, std::size_t e) {
      RngStream rng = base.split(c);
      for (std::size_t i = b; i < e; ++i) out[i] = uniform01(rng);
    });
    return out;
  };
  EXPECT_EQ(fill(1), fill(3));
  EXPECT_EQ(fill(1), fill(8));
}

TEST(Parallel, PropagatesExceptions) {
  EXPECT_THROW(for_each_chunk(100, 10, 4,
                              [](std::size_t c, std::size_t, std::size_t) {
                                if (c == 5) throw std::runtime_error("boom");
                              }),
               std::runtime_error);
}

TEST(Stats, KsCriticalValueMatchesKolmogorovQuantile) {
  // c(0.01) = 1.6276 for the asymptotic Kolmogorov distribution.
  EXPECT_NEAR(stats::ks_critical_two_sample(1000000, 1000000, 0.01), 1.62762 * std::sqrt(2e-6),
              1e-5);
  EXPECT_NEAR(stats::kolmogorov_survival(1.35810), 0.05, 1e-4);
}

TEST(Stats, KsTwoSampleOfIdenticalSamplesIsZero) {
  std::vector<double> a{1, 2, 3, 4};
  EXPECT_EQ(stats::ks_two_sample(a, a), 0.0);
  std::vector<double> b{5, 6, 7, 8};
  EXPECT_EQ(stats::ks_two_sample(a, b), 1.0);
}

TEST(Stats, KsOneSampleAgainstUniform) {
  std::vector<double> x{0.125, 0.375, 0.625, 0.875};
  EXPECT_NEAR(stats::ks_one_sample_sorted(x, [](double t) { return t; }), 0.125, 1e-15);
}

TEST(Stats, LeastSquaresRecoversLine) {
  std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto f = stats::least_squares(x, y);
  EXPECT_DOUBLE_EQ(f.slope, 2.0);
  EXPECT_DOUBLE_EQ(f.intercept, 1.0);
}

TEST(Stats, SummaryAndQuantile) {
  std::vector<double> x{1, 2, 3, 4, 5};
  const auto s = stats::summarize(x);
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  EXPECT_NEAR(s.stddev, std::sqrt(2.5), 1e-15);
  EXPECT_DOUBLE_EQ(stats::quantile_sorted(x, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(stats::quantile_sorted(x, 0.25), 2.0);
}
