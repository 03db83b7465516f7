#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "twave/dispersion.hpp"
#include "twave/increment.hpp"

namespace twave {

/// Empirical population approximating the law of the martingale limit V (or W)
/// at a fixed gamma.
struct SamplePool {
  std::vector<double> samples;  // sorted ascending
  double gamma = 0.0;
  std::string increment;
  int iterations = 0;
  int k = 2;
  std::uint64_t seed = 0;
  Regime regime = Regime::Invalid;
  bool early_stopped = false;
  std::vector<double> ks_trace;    // KS distance between successive pools
  std::vector<double> mean_trace;  // pool mean after each iteration
  std::vector<double> sd_trace;    // pool standard deviation after each iteration
  /// Standard error of the pool mean as a martingale: sqrt(sum_s var_s / M).
  std::vector<double> mean_se_trace;
  std::vector<std::string> warnings;
};

struct PoolOptions {
  std::size_t pool_size = 100'000;
  int iterations = 50;
  int k = 2;
  std::uint64_t seed = 1;
  int workers = 1;
  double initial_value = 1.0;
  bool early_stop = true;
};

constexpr std::size_t kMinPoolSize = 10'000;
constexpr double kEarlyStopKs = 1e-3;

/// Iterates V <- (V_1 + ... + V_k) e^{-gamma A} from V_0 = initial_value.
SamplePool iterate_pool(const IncrementLaw& inc, double gamma, const PoolOptions& opt);
/// Same, starting from an explicit population (its size sets M).
SamplePool iterate_pool(const IncrementLaw& inc, double gamma, std::vector<double> initial,
                        const PoolOptions& opt);

/// One application of the recursion: m fresh draws from the image of pool.
/// Result is a pure function of (pool, seed, tag), independent of workers.
std::vector<double> pool_step(std::span<const double> pool, const IncrementLaw& inc, double gamma,
                              int k, std::size_t m, std::uint64_t seed, std::uint64_t tag,
                              int workers = 1);

struct BranchingOptions {
  int generations = 16;
  std::size_t replicates = 10'000;
  int k = 2;
  std::uint64_t seed = 1;
  int workers = 1;
  /// Bound on k^g * R edge draws.
  double work_budget = 2e9;
};

/// Finite-depth additive martingale values M_g over a full k-ary genealogy.
/// Each branching event draws one A, shared by its k children.
std::vector<double> branching_cross_check(const IncrementLaw& inc, double gamma,
                                          const BranchingOptions& opt);

struct LaplaceResidual {
  std::vector<double> s;
  std::vector<double> lhs;  // mean of e^{-s V} over the pool
  std::vector<double> rhs;  // E[phi(s e^{-gamma A})^k]
  std::vector<double> lhs_se;
  std::vector<double> rhs_se;
  double max_residual = 0.0;
};

/// The right side is estimated without bias as the mean of
/// exp(-s e^{-gamma A} (V_a + V_b + ...)) over fresh A and independent pool
/// indices.
LaplaceResidual laplace_functional_residual(const SamplePool& pool, const IncrementLaw& inc,
                                            double gamma, std::span<const double> s_grid,
                                            std::size_t draws = 1'000'000,
                                            std::uint64_t seed = 1);

}  // namespace twave
