#include "twave/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "twave/error.hpp"
#include "twave/parallel.hpp"
#include "twave/rng.hpp"
#include "twave/stats.hpp"

namespace twave {

namespace {

constexpr std::size_t kChunk = 8192;
constexpr std::uint64_t kPoolDomain = 0x706f6f6cULL;
constexpr std::uint64_t kBranchDomain = 0x6272616eULL;
constexpr std::uint64_t kResidualDomain = 0x72657369ULL;

void check_common(double gamma, int k) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be positive");
  if (k < 2) throw ValidationError("k must be at least 2");
}

}  // namespace

std::vector<double> pool_step(std::span<const double> pool, const IncrementLaw& inc, double gamma,
                              int k, std::size_t m, std::uint64_t seed, std::uint64_t tag,
                              int workers) {
  check_common(gamma, k);
  if (pool.empty()) throw ValidationError("pool is empty");
  std::vector<double> out(m);
  const RngStream base(seed, mix64(kPoolDomain));
  for_each_chunk(m, kChunk, workers, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    RngStream rng = base.split(tag, chunk);
    for (std::size_t i = begin; i < end; ++i) {
      double sum = 0.0;
      for (int j = 0; j < k; ++j) sum += pool[uniform_index(rng, pool.size())];
      out[i] = sum * std::exp(-gamma * inc.sample(rng));
    }
  });
  return out;
}

SamplePool iterate_pool(const IncrementLaw& inc, double gamma, const PoolOptions& opt) {
  if (opt.pool_size < kMinPoolSize) {
    throw ValidationError("pool size must be at least 10000");
  }
  if (!(opt.initial_value > 0.0)) throw ValidationError("initial value must be positive");
  return iterate_pool(inc, gamma, std::vector<double>(opt.pool_size, opt.initial_value), opt);
}

SamplePool iterate_pool(const IncrementLaw& inc, double gamma, std::vector<double> initial,
                        const PoolOptions& opt) {
  check_common(gamma, opt.k);
  if (initial.empty()) throw ValidationError("initial pool is empty");
  if (opt.iterations < 1) throw ValidationError("iterations must be at least 1");

  SamplePool pool;
  pool.gamma = gamma;
  pool.increment = inc.describe();
  pool.k = opt.k;
  pool.seed = opt.seed;
  pool.regime = regime_classify(inc, gamma, {.k = opt.k}).regime;
  if (pool.regime == Regime::Critical) {
    pool.warnings.push_back(
        "critical regime: the additive martingale converges to 0 and the pool degenerates");
  } else if (pool.regime == Regime::Invalid) {
    pool.warnings.push_back(
        "invalid regime: E[exp(-gamma A)] != 1/k or the tilted mean is negative; no "
        "nondegenerate fixed point");
  }

  const std::size_t m = initial.size();
  std::vector<double> current = std::move(initial);
  std::sort(current.begin(), current.end());
  double var_accum = 0.0;
  int below = 0;
  for (int it = 0; it < opt.iterations; ++it) {
    std::vector<double> next = pool_step(current, inc, gamma, opt.k, m, opt.seed,
                                         static_cast<std::uint64_t>(it), opt.workers);
    std::sort(next.begin(), next.end());
    const double ks = stats::ks_two_sample_sorted(current, next);
    const auto sum = stats::summarize(next);
    var_accum += sum.stddev * sum.stddev / static_cast<double>(m);
    pool.ks_trace.push_back(ks);
    pool.mean_trace.push_back(sum.mean);
    pool.sd_trace.push_back(sum.stddev);
    pool.mean_se_trace.push_back(std::sqrt(var_accum));
    current = std::move(next);
    pool.iterations = it + 1;
    below = ks < kEarlyStopKs ? below + 1 : 0;
    if (opt.early_stop && below >= 3) {
      pool.early_stopped = true;
      break;
    }
  }
  const auto zeros = static_cast<std::size_t>(
      std::upper_bound(current.begin(), current.end(), 0.0) - current.begin());
  if (pool.regime == Regime::Supercritical && zeros > 1e-4 * static_cast<double>(m)) {
    std::ostringstream os;
    os << zeros << " exact zeros in the pool (underflow)";
    pool.warnings.push_back(os.str());
  }
  pool.samples = std::move(current);
  return pool;
}

std::vector<double> branching_cross_check(const IncrementLaw& inc, double gamma,
                                          const BranchingOptions& opt) {
  check_common(gamma, opt.k);
  if (opt.generations < 0 || opt.generations > 25) {
    throw ValidationError("generations must be in [0, 25]");
  }
  if (opt.replicates < 100) throw ValidationError("replicates must be at least 100");
  const double leaves = std::pow(static_cast<double>(opt.k), opt.generations);
  if (leaves * static_cast<double>(opt.replicates) > opt.work_budget) {
    std::ostringstream os;
    os << "branching cross-check needs " << leaves * static_cast<double>(opt.replicates)
       << " leaf weights, above the budget of " << opt.work_budget;
    throw ValidationError(os.str());
  }
  std::vector<double> out(opt.replicates);
  const RngStream base(opt.seed, mix64(kBranchDomain));
  const auto width = static_cast<std::size_t>(leaves);
  for_each_chunk(opt.replicates, 16, opt.workers,
                 [&](std::size_t, std::size_t begin, std::size_t end) {
                   std::vector<double> level, next;
                   level.reserve(width);
                   next.reserve(width);
                   for (std::size_t r = begin; r < end; ++r) {
                     RngStream rng = base.split(r);
                     level.assign(1, 1.0);
                     for (int g = 0; g < opt.generations; ++g) {
                       next.clear();
                       // One increment per branching event, shared by its k children.
                       for (double w : level) {
                         const double shared = w * std::exp(-gamma * inc.sample(rng));
                         for (int j = 0; j < opt.k; ++j) next.push_back(shared);
                       }
                       level.swap(next);
                     }
                     double total = 0.0;
                     for (double w : level) total += w;
                     out[r] = total;
                   }
                 });
  return out;
}

LaplaceResidual laplace_functional_residual(const SamplePool& pool, const IncrementLaw& inc,
                                            double gamma, std::span<const double> s_grid,
                                            std::size_t draws, std::uint64_t seed) {
  check_common(gamma, pool.k);
  if (pool.samples.empty()) throw ValidationError("pool is empty");
  if (draws < 2) throw ValidationError("need at least 2 draws");
  const std::size_t ns = s_grid.size();
  LaplaceResidual res;
  res.s.assign(s_grid.begin(), s_grid.end());
  res.lhs.assign(ns, 0.0);
  res.rhs.assign(ns, 0.0);
  res.lhs_se.assign(ns, 0.0);
  res.rhs_se.assign(ns, 0.0);

  const auto& v = pool.samples;
  const double m = static_cast<double>(v.size());
  for (std::size_t j = 0; j < ns; ++j) {
    double s1 = 0.0, s2 = 0.0;
    for (double x : v) {
      const double e = std::exp(-s_grid[j] * x);
      s1 += e;
      s2 += e * e;
    }
    res.lhs[j] = s1 / m;
    res.lhs_se[j] = std::sqrt(std::max(0.0, s2 / m - res.lhs[j] * res.lhs[j]) / m);
  }

  std::vector<double> s1(ns, 0.0), s2(ns, 0.0);
  RngStream rng(seed, mix64(kResidualDomain));
  for (std::size_t i = 0; i < draws; ++i) {
    double sum = 0.0;
    for (int j = 0; j < pool.k; ++j) sum += v[uniform_index(rng, v.size())];
    const double y = sum * std::exp(-gamma * inc.sample(rng));
    for (std::size_t j = 0; j < ns; ++j) {
      const double e = std::exp(-s_grid[j] * y);
      s1[j] += e;
      s2[j] += e * e;
    }
  }
  const double n = static_cast<double>(draws);
  for (std::size_t j = 0; j < ns; ++j) {
    res.rhs[j] = s1[j] / n;
    res.rhs_se[j] = std::sqrt(std::max(0.0, s2[j] / n - res.rhs[j] * res.rhs[j]) / n);
    res.max_residual = std::max(res.max_residual, std::abs(res.lhs[j] - res.rhs[j]));
  }
  return res;
}

}  // namespace twave
