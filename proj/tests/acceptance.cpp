// Acceptance suite: one PASS/FAIL line per primary criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "twave/dispersion.hpp"
#include "twave/increment.hpp"
#include "twave/particles.hpp"
#include "twave/smoothing.hpp"
#include "twave/stats.hpp"
#include "twave/waves.hpp"

using namespace twave;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = seconds_since(t0);
  if (!o.pass) ++failures;
  std::printf("[%s] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

PoolOptions pool_options(std::size_t m, int n, std::uint64_t seed) {
  PoolOptions o;
  o.pool_size = m;
  o.iterations = n;
  o.seed = seed;
  o.early_stop = false;
  return o;
}

const JumpLaw kExp1 = JumpLaw::exponential(1);
const JumpLaw kDet1 = JumpLaw::deterministic(1);

IncrementLaw bs_exp_increment() {
  return IncrementLaw::sync(LevySpec::compound_poisson(1.0, kExp1), 4.5);
}

double bs_exp_gamma() { return gamma_from_speed_bs(4.5, 1.0, kExp1).gamma; }

struct CachedPool {
  std::string key;
  SamplePool pool;
  double build_seconds = 0.0;
};

// Converged pools shared by several criteria, built on first use.
const CachedPool& cached_entry(const std::string& key) {
  static std::vector<CachedPool> cache;
  for (const auto& c : cache) {
    if (c.key == key) return c;
  }
  const auto t0 = Clock::now();
  SamplePool pool;
  if (key == "bs-exp") {
    pool = iterate_pool(bs_exp_increment(), bs_exp_gamma(), pool_options(1'000'000, 60, 101));
  } else if (key == "power2-exp-0") {
    pool = iterate_pool(IncrementLaw::power2(kExp1, 0.0), 1.0, pool_options(1'000'000, 40, 102));
  } else if (key == "power2-exp-2") {
    pool = iterate_pool(IncrementLaw::power2(kExp1, 2.0), solve_gamma_power2(kExp1, 2.0).gamma,
                        pool_options(1'000'000, 60, 103));
  } else if (key == "power2-det-1") {
    pool = iterate_pool(IncrementLaw::power2(kDet1, 1.0), solve_gamma_power2(kDet1, 1.0).gamma,
                        pool_options(1'000'000, 60, 104));
  }
  cache.push_back({key, std::move(pool), seconds_since(t0)});
  return cache.back();
}

const SamplePool& cached_pool(const std::string& key) { return cached_entry(key).pool; }

Outcome martingale_mean(const IncrementLaw& inc, double gamma, std::uint64_t seed) {
  const auto t0 = Clock::now();
  const auto pool = iterate_pool(inc, gamma, pool_options(100'000, 50, seed));
  const double secs = seconds_since(t0);
  double worst = 0.0;
  for (std::size_t t = 0; t < pool.mean_trace.size(); ++t) {
    worst = std::max(worst, std::abs(pool.mean_trace[t] - 1.0) / pool.mean_se_trace[t]);
  }
  return {worst < 5.0 && secs < 60.0,
          fmt("final mean %.5f, max |mean-1|/stderr %.2f over %d iterations, %.1f s", pool.mean_trace.back(),
              worst, pool.iterations, secs)};
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");

  criterion("Brownian minimal speed", [] {
    const auto t0 = Clock::now();
    const auto r = brownian_dispersion(1.0, BrownianMinimal{});
    const double secs = seconds_since(t0);
    const double eg = std::abs(r.gamma - std::numbers::sqrt2), ec = std::abs(r.c - std::numbers::sqrt2);
    return Outcome{eg < 1e-10 && ec < 1e-10 && secs < 1e-3,
                   fmt("gamma %.15g, c %.15g, errors %.1e/%.1e, %.1f us", r.gamma, r.c, eg, ec, secs * 1e6)};
  });

  criterion("BS critical point", [] {
    const auto t0 = Clock::now();
    const auto r = critical_point_bs(1.0, kExp1);
    const double secs = seconds_since(t0);
    const double eg = std::abs(r.gamma - 0.5), ec = std::abs(r.c - 4.0);
    return Outcome{eg < 1e-8 && ec < 1e-8 && r.regime == Regime::Critical && secs < 0.01,
                   fmt("gamma* %.12f, c* %.12f, errors %.1e/%.1e, %.2f ms", r.gamma, r.c, eg, ec, secs * 1e3)};
  });

  criterion("Pure copying family", [] {
    double worst = 0.0;
    for (double g : {0.5, 1.0, 2.0}) worst = std::max(worst, std::abs(speed_from_gamma_bs(g, 0.0, kExp1) * g - 1));
    return Outcome{worst < 1e-12, fmt("max |gamma c - 1| = %.1e over gamma in {0.5, 1, 2}", worst)};
  });

  criterion("Power-of-2 decay rate", [] {
    const auto t0 = Clock::now();
    const auto r = solve_gamma_power2(kExp1, 2.0);
    const double secs = seconds_since(t0);
    const double err = std::abs(r.gamma - oracle::power2_exp_gamma(2.0));
    return Outcome{err < 1e-10 && !r.notes.empty() && secs < 0.01,
                   fmt("gamma %.15f, error %.1e, %zu note(s), %.2f ms", r.gamma, err, r.notes.size(), secs * 1e3)};
  });

  criterion("Martingale mean conservation", [] {
    const std::vector<std::tuple<std::string, IncrementLaw, double>> cases{
        {"power2-exp", IncrementLaw::power2(kExp1, 0.0), 1.0},
        {"bs-exp", bs_exp_increment(), bs_exp_gamma()},
        {"fkpp pure copy", IncrementLaw::sync(LevySpec::none(), 1.0), 1.0},
    };
    bool ok = true;
    std::string detail;
    std::uint64_t seed = 11;
    for (const auto& [name, inc, gamma] : cases) {
      const auto o = martingale_mean(inc, gamma, seed++);
      ok = ok && o.pass;
      detail += name + ": " + o.detail + "; ";
    }
    return Outcome{ok, detail};
  });

  criterion("Laplace functional residual", [] {
    const std::vector<double> s{0.25, 0.5, 1, 2, 4};
    std::ostringstream os;
    bool ok = true;
    const std::vector<std::tuple<std::string, IncrementLaw, double>> cases{
        {"power2-exp-0", IncrementLaw::power2(kExp1, 0.0), 1.0},
        {"bs-exp", bs_exp_increment(), bs_exp_gamma()},
        {"power2-exp-2", IncrementLaw::power2(kExp1, 2.0), solve_gamma_power2(kExp1, 2.0).gamma},
    };
    for (const auto& [key, inc, gamma] : cases) {
      const auto r = laplace_functional_residual(cached_pool(key), inc, gamma, s, 1'000'000, 7);
      ok = ok && r.max_residual < 0.01;
      os << key << " " << fmt("%.2e", r.max_residual) << "; ";
    }
    return Outcome{ok, "max residual " + os.str()};
  });

  criterion("Branching cross-check (power2-exp, g=16, R=1e4)", [] {
    const auto inc = IncrementLaw::power2(kExp1, 0.0);
    BranchingOptions b;
    b.generations = 16;
    b.replicates = 10'000;
    b.seed = 21;
    const auto m = branching_cross_check(inc, 1.0, b);
    const auto pool = iterate_pool(inc, 1.0, pool_options(100'000, 50, 22));
    const double ks = stats::ks_two_sample(m, pool.samples);
    return Outcome{ks < 0.02, fmt("KS %.4f", ks)};
  });

  criterion("Nonlinear fixed points", [] {
    const auto t0 = Clock::now();
    bool ok = true;
    std::ostringstream os;
    {
      const auto& pool = cached_pool("bs-exp");
      const auto xi = sample_wave(pool.samples, pool.gamma, Orientation::SyncRight, 1'000'000, 31).xi;
      const auto fit = verify_fixed_point_sync(xi, bs_exp_increment(), 32);
      const auto ctl = verify_fixed_point_sync(xi, bs_exp_increment(), 32, 2, 0.5);
      ok = ok && fit.pass && !ctl.pass;
      os << fmt("sync KS %.5f (crit %.5f), shifted control %.4f; ", fit.statistic, fit.critical_value,
                ctl.statistic);
    }
    for (double s2 : {0.0, 2.0}) {
      const auto& pool = cached_pool(s2 == 0.0 ? "power2-exp-0" : "power2-exp-2");
      const auto xi = sample_wave(pool.samples, pool.gamma, Orientation::Power2, 1'000'000, 33).xi;
      const auto fit = verify_fixed_point_power2(xi, kExp1, s2, 34);
      const auto ctl = verify_fixed_point_power2(xi, JumpLaw::exponential(0.5), s2, 34);
      ok = ok && fit.pass && !ctl.pass;
      os << fmt("power2 sigma2=%g KS %.5f (crit %.5f), mean-2 control %.4f; ", s2, fit.statistic,
                fit.critical_value, ctl.statistic);
    }
    const double secs = seconds_since(t0);
    const double build = cached_entry("bs-exp").build_seconds + cached_entry("power2-exp-0").build_seconds +
                         cached_entry("power2-exp-2").build_seconds;
    os << fmt("%.1f s verification + %.1f s pool construction", secs, build);
    return Outcome{ok && secs + build < 120.0, os.str()};
  });

  criterion("Power-of-2 equivalence", [] {
    bool ok = true;
    std::ostringstream os;
    const std::vector<std::tuple<std::string, JumpLaw, double>> cases{{"power2-exp-2", kExp1, 2.0},
                                                                      {"power2-det-1", kDet1, 1.0}};
    for (const auto& [key, jumps, s2] : cases) {
      const auto& pool = cached_pool(key);
      const auto xi = sample_wave(pool.samples, pool.gamma, Orientation::Power2, 1'000'000, 41).xi;
      const auto r = verify_equivalence_power2(xi, jumps, s2, 42);
      const auto ctl = verify_equivalence_power2(xi, jumps, s2, 42, false);
      ok = ok && r.pass;
      os << fmt("%s sigma2=%g KS %.5f (crit %.5f), without Z %.4f; ", jumps.describe().c_str(), s2, r.statistic,
                r.critical_value, ctl.statistic);
    }
    return Outcome{ok, os.str()};
  });

  criterion("Tail asymptotics", [] {
    const auto& bs = cached_pool("bs-exp");
    const auto rt = tail_asymptotics(bs.samples, bs.gamma, Orientation::SyncRight);
    const double slope_err = std::abs(rt.right_slope / -bs.gamma - 1);
    const double pref_err = std::abs(rt.right_prefactor / rt.pool_mean - 1);
    const auto& p2 = cached_pool("power2-exp-0");
    const auto lt = tail_asymptotics(p2.samples, p2.gamma, Orientation::Power2);
    const double left_err = std::abs(lt.left_slope / p2.gamma - 1);
    return Outcome{slope_err < 0.05 && pref_err < 0.10 && left_err < 0.05,
                   fmt("bs-exp right slope %.5f vs %.5f (%.2f%%), prefactor %.4f vs mean %.4f (%.2f%%); "
                       "power2-exp left slope %.5f vs %.5f (%.2f%%)",
                       rt.right_slope, -bs.gamma, 100 * slope_err, rt.right_prefactor, rt.pool_mean,
                       100 * pref_err, lt.left_slope, p2.gamma, 100 * left_err)};
  });

  // The power-of-2 simulation feeds both microscopic power-of-2 criteria.
  ParticleSystemConfig p2cfg;
  p2cfg.n = 10'000;
  p2cfg.mechanism = Mechanism::Power2;
  p2cfg.jumps = kExp1;
  p2cfg.horizon = 200;
  p2cfg.burn_in = 50;
  p2cfg.seed = 51;
  SimulationResult p2sim;
  double p2secs = 0.0;
  {
    const auto t0 = Clock::now();
    p2sim = simulate(p2cfg);
    p2secs = seconds_since(t0);
  }

  criterion("Microscopic speed, power-of-2", [&] {
    const auto s = estimate_speed(p2sim.median_path, p2cfg.burn_in, 52);
    const bool ok = s.ci_lo <= 1.0 && 1.0 <= s.ci_hi && std::abs(s.c_hat - 1) < 0.05 && p2secs < 300;
    return Outcome{ok, fmt("c_hat %.4f, 95%% CI [%.4f, %.4f], %llu events, simulation %.1f s", s.c_hat, s.ci_lo,
                           s.ci_hi, static_cast<unsigned long long>(p2sim.events), p2secs)};
  });

  criterion("Microscopic profile, power-of-2", [&] {
    const auto emp = centered_profile(p2sim.snapshot_times, p2sim.snapshots, p2cfg.burn_in, p2cfg.horizon);
    const auto& pool = cached_pool("power2-exp-0");
    const auto grid = linear_grid(-20.0, 20.0, 1201);
    const auto good = compare_profiles(emp, profile_eval(pool.samples, pool.gamma, Orientation::Power2, grid));
    const auto bad = compare_profiles(emp, profile_eval(pool.samples, 2 * pool.gamma, Orientation::Power2, grid));
    const double ratio = bad.w1_after_shift / good.w1_after_shift;
    return Outcome{good.w1_after_shift < 0.1 && ratio >= 3.0,
                   fmt("W1 %.4f (KS %.4f), wrong-gamma W1 %.4f, ratio %.1f", good.w1_after_shift,
                       good.ks_after_shift, bad.w1_after_shift, ratio)};
  });

  criterion("Microscopic speed, BS model", [] {
    ParticleSystemConfig c;
    c.n = 10'000;
    c.mechanism = Mechanism::BSModel;
    c.jump_rate = 1.0;
    c.jumps = kExp1;
    c.horizon = 200;
    c.burn_in = 50;
    c.seed = 61;
    const auto t0 = Clock::now();
    const auto sim = simulate(c);
    const double secs = seconds_since(t0);
    const auto s = estimate_speed(sim.median_path, c.burn_in, 62);
    const double cstar = critical_point_bs(1.0, kExp1).c;
    const double rel = (s.c_hat - cstar) / cstar;
    return Outcome{std::abs(rel) < 0.15,
                   fmt("c_hat %.4f, 95%% CI [%.4f, %.4f], c* %.4f, finite-N bias %+.2f%%, simulation %.1f s",
                       s.c_hat, s.ci_lo, s.ci_hi, cstar, 100 * rel, secs)};
  });

  std::printf("%d criterion line(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
