#include "twave/particles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "twave/error.hpp"
#include "twave/stats.hpp"

namespace twave {

namespace {

constexpr std::uint64_t kSimDomain = 0x73696d75ULL;
constexpr std::uint64_t kBootDomain = 0x626f6f74ULL;

double median_of(std::vector<double>& scratch) {
  const std::size_t n = scratch.size();
  const auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(scratch.begin(), mid, scratch.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(scratch.begin(), mid);
  return 0.5 * (lower + upper);
}

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw ValidationError(field + ": " + why);
}

}  // namespace

std::string to_string(Mechanism m) {
  switch (m) {
    case Mechanism::Sync: return "sync";
    case Mechanism::BSModel: return "bs";
    case Mechanism::Power2: break;
  }
  return "power2";
}

Mechanism parse_mechanism(const std::string& s) {
  if (s == "sync" || s == "fkpp") return Mechanism::Sync;
  if (s == "bs") return Mechanism::BSModel;
  if (s == "power2") return Mechanism::Power2;
  throw ValidationError("mechanism must be one of sync, bs, power2 (got '" + s + "')");
}

void ParticleSystemConfig::validate() const {
  if (n < 2) bad_field("n", "need at least 2 particles");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) bad_field("sigma2", "must be nonnegative");
  if (!(jump_rate >= 0.0) || !std::isfinite(jump_rate)) bad_field("lambda", "must be nonnegative");
  if (!(copy_rate > 0.0) || !std::isfinite(copy_rate)) bad_field("rho", "must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) bad_field("horizon", "must be positive");
  if (!(burn_in >= 0.0) || burn_in >= horizon) bad_field("burn_in", "must lie in [0, horizon)");
  if (!(median_interval > 0.0)) bad_field("median_interval", "must be positive");
  if (!initial_positions.empty() && initial_positions.size() != n) {
    bad_field("initial_positions", "must have exactly n entries");
  }
  for (double t : snapshot_times) {
    if (!(t >= 0.0) || t > horizon) bad_field("snapshot_times", "must lie in [0, horizon]");
  }
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end())) {
    bad_field("snapshot_times", "must be sorted");
  }
  switch (mechanism) {
    case Mechanism::Sync:
      if (jump_rate > 0.0) bad_field("lambda", "individual jumps belong to the bs mechanism");
      break;
    case Mechanism::BSModel:
      if (sigma2 > 0.0) bad_field("sigma2", "the bs mechanism has no Brownian part");
      if (jump_rate > 0.0 && !jumps) bad_field("jumps", "required when lambda > 0");
      break;
    case Mechanism::Power2:
      if (jump_rate > 0.0) bad_field("lambda", "individual jumps belong to the bs mechanism");
      if (!jumps) bad_field("jumps", "required for the power2 mechanism");
      if (std::abs(jumps->mean() - 1.0) > 1e-9) {
        bad_field("jumps", "power-of-2 model requires E[X] = 1 within 1e-9");
      }
      break;
  }
}

std::vector<double> ParticleSystemConfig::effective_snapshot_times() const {
  if (!snapshot_times.empty()) return snapshot_times;
  std::vector<double> t(20);
  for (int i = 0; i < 20; ++i) t[i] = burn_in + (horizon - burn_in) * (i + 1) / 20.0;
  return t;
}

ParticleSystem::ParticleSystem(Mechanism mechanism, std::vector<double> initial, double sigma2)
    : mechanism_(mechanism), sigma_(std::sqrt(sigma2)), x_(std::move(initial)) {
  if (x_.size() < 2) throw ValidationError("a particle system needs at least 2 particles");
  if (sigma_ > 0.0) last_.assign(x_.size(), 0.0);
}

void ParticleSystem::advance(std::size_t i, double t, RngStream& rng) {
  if (sigma_ == 0.0) return;
  const double dt = t - last_[i];
  if (dt > 0.0) {
    x_[i] += sigma_ * std::sqrt(dt) * standard_normal(rng);
    last_[i] = t;
  }
}

void ParticleSystem::interact(std::size_t i, std::size_t j, double t, double x, RngStream& rng) {
  advance(i, t, rng);
  advance(j, t, rng);
  if (mechanism_ == Mechanism::Power2) {
    if (x_[i] <= x_[j]) x_[i] += x; else x_[j] += x;
  } else {
    x_[i] = std::max(x_[i], x_[j]);
  }
}

void ParticleSystem::jump(std::size_t i, double t, double x, RngStream& rng) {
  advance(i, t, rng);
  x_[i] += x;
}

void ParticleSystem::synchronize(double t, RngStream& rng) {
  for (std::size_t i = 0; i < x_.size(); ++i) advance(i, t, rng);
}

SimulationResult simulate(const ParticleSystemConfig& config) {
  config.validate();
  std::vector<double> init = config.initial_positions;
  if (init.empty()) init.assign(config.n, 0.0);
  ParticleSystem sys(config.mechanism, std::move(init), config.sigma2);

  SimulationResult res;
  res.snapshot_times = config.effective_snapshot_times();
  RngStream rng(config.seed, mix64(kSimDomain));

  const double n = static_cast<double>(config.n);
  const double interact_rate = config.copy_rate * n;
  const double jump_rate = config.mechanism == Mechanism::BSModel ? config.jump_rate * n : 0.0;
  const double total_rate = interact_rate + jump_rate;
  const double p_interact = interact_rate / total_rate;
  const bool power2 = config.mechanism == Mechanism::Power2;

  std::vector<double> scratch;
  std::size_t next_snap = 0;
  std::size_t next_median = 0;
  auto observe_until = [&](double t_limit) {
    // Observations strictly before the next event time, in time order.
    while (true) {
      const double t_med = static_cast<double>(next_median) * config.median_interval;
      const double t_snap = next_snap < res.snapshot_times.size()
                                ? res.snapshot_times[next_snap]
                                : std::numeric_limits<double>::infinity();
      const bool med_ok = t_med <= config.horizon && t_med < t_limit;
      const bool snap_ok = t_snap < t_limit;
      if (!med_ok && !snap_ok) return;
      if (snap_ok && (!med_ok || t_snap <= t_med)) {
        sys.synchronize(t_snap, rng);
        res.snapshots.push_back(sys.positions());
        ++next_snap;
      } else {
        sys.synchronize(t_med, rng);
        scratch = sys.positions();
        res.median_path.push_back({t_med, median_of(scratch)});
        ++next_median;
      }
    }
  };

  double t = 0.0;
  while (true) {
    const double t_next = t + exponential(rng, total_rate);
    if (t_next > config.horizon) {
      observe_until(std::nextafter(config.horizon, std::numeric_limits<double>::infinity()));
      res.end_time = config.horizon;
      break;
    }
    if (res.events >= config.max_events) {
      observe_until(t_next);
      res.truncated = true;
      res.end_time = t;
      break;
    }
    observe_until(t_next);
    t = t_next;
    ++res.events;
    const std::size_t i = uniform_index(rng, config.n);
    if (uniform01(rng) < p_interact) {
      std::size_t j = uniform_index(rng, config.n - 1);
      if (j >= i) ++j;
      const double x = power2 ? config.jumps->sample(rng) : 0.0;
      sys.interact(i, j, t, x, rng);
    } else {
      sys.jump(i, t, config.jumps->sample(rng), rng);
    }
  }
  return res;
}

SpeedEstimate estimate_speed(std::span<const PathPoint> path, double burn_in, std::uint64_t seed,
                             int resamples) {
  std::vector<double> t, y;
  for (const auto& p : path) {
    if (p.t >= burn_in) {
      t.push_back(p.t);
      y.push_back(p.median);
    }
  }
  if (t.size() < kMinSpeedPoints) {
    std::ostringstream os;
    os << "insufficient points: " << t.size() << " after burn-in, need " << kMinSpeedPoints;
    throw ValidationError(os.str());
  }
  if (resamples < 10) throw ValidationError("need at least 10 bootstrap resamples");
  SpeedEstimate est;
  est.points = t.size();
  est.c_hat = stats::least_squares(t, y).slope;

  const std::size_t m = t.size() - 1;
  std::vector<double> resid(m);
  for (std::size_t i = 0; i < m; ++i) {
    resid[i] = (y[i + 1] - y[i]) - est.c_hat * (t[i + 1] - t[i]);
  }
  const auto block = static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(m))));
  const std::size_t starts = m - block + 1;
  RngStream rng(seed, mix64(kBootDomain));
  std::vector<double> slopes(static_cast<std::size_t>(resamples));
  std::vector<double> ys(t.size());
  for (auto& slope : slopes) {
    ys[0] = y[0];
    std::size_t i = 0;
    while (i < m) {
      const std::size_t s = uniform_index(rng, starts);
      for (std::size_t b = 0; b < block && i < m; ++b, ++i) {
        ys[i + 1] = ys[i] + est.c_hat * (t[i + 1] - t[i]) + resid[s + b];
      }
    }
    slope = stats::least_squares(t, ys).slope;
  }
  std::sort(slopes.begin(), slopes.end());
  est.ci_lo = std::min(est.c_hat, stats::quantile_sorted(slopes, 0.025));
  est.ci_hi = std::max(est.c_hat, stats::quantile_sorted(slopes, 0.975));
  return est;
}

double EmpiricalCDF::cdf(double x) const {
  if (sorted.empty()) throw ValidationError("empirical CDF is empty");
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

EmpiricalCDF make_empirical_cdf(std::vector<double> positions) {
  if (positions.empty()) throw ValidationError("empirical CDF needs at least one position");
  std::sort(positions.begin(), positions.end());
  return EmpiricalCDF{std::move(positions), 0.0};
}

EmpiricalCDF centered_profile(std::span<const double> times,
                              const std::vector<std::vector<double>>& snapshots, double t_lo,
                              double t_hi) {
  if (times.size() != snapshots.size()) {
    throw ValidationError("centered_profile: times and snapshots differ in length");
  }
  EmpiricalCDF out;
  std::size_t used = 0;
  std::vector<double> scratch;
  for (std::size_t s = 0; s < snapshots.size(); ++s) {
    if (times[s] < t_lo || times[s] > t_hi || snapshots[s].empty()) continue;
    scratch = snapshots[s];
    const double med = median_of(scratch);
    for (double x : snapshots[s]) out.sorted.push_back(x - med);
    out.offset += med;
    ++used;
  }
  if (used == 0) throw ValidationError("centered_profile: no snapshots in the time range");
  out.offset /= static_cast<double>(used);
  std::sort(out.sorted.begin(), out.sorted.end());
  return out;
}

ProfileComparison compare_profiles(const EmpiricalCDF& emp, const WaveProfile& predicted) {
  if (emp.sorted.empty()) throw ValidationError("empirical CDF is empty");
  if (predicted.grid.size() < 2 || predicted.values.size() != predicted.grid.size()) {
    throw ValidationError("predicted profile needs a grid with matching values");
  }
  // Predicted CDF on the grid, made nondecreasing for inversion.
  std::vector<double> f(predicted.values.size());
  double run = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    run = std::max(run, 1.0 - predicted.values[i]);
    f[i] = run;
  }
  auto predicted_quantile = [&](double u) {
    const auto it = std::lower_bound(f.begin(), f.end(), u);
    if (it == f.begin()) return predicted.grid.front();
    if (it == f.end()) return predicted.grid.back();
    const auto i = static_cast<std::size_t>(it - f.begin());
    const double df = f[i] - f[i - 1];
    const double w = df > 0.0 ? (u - f[i - 1]) / df : 0.0;
    return predicted.grid[i - 1] + w * (predicted.grid[i] - predicted.grid[i - 1]);
  };

  const std::size_t k = std::clamp<std::size_t>(emp.sorted.size(), 10'000, 1'000'000);
  std::vector<double> diff(k);
  double w1_raw = 0.0;
  for (std::size_t q = 0; q < k; ++q) {
    const double u = (static_cast<double>(q) + 0.5) / static_cast<double>(k);
    const auto idx = std::min(emp.sorted.size() - 1,
                              static_cast<std::size_t>(u * static_cast<double>(emp.sorted.size())));
    diff[q] = emp.sorted[idx] - predicted_quantile(u);
    w1_raw += std::abs(diff[q]);
  }
  std::vector<double> sorted_diff = diff;
  std::sort(sorted_diff.begin(), sorted_diff.end());
  const double shift = stats::quantile_sorted(sorted_diff, 0.5);
  double w1 = 0.0;
  for (double d : diff) w1 += std::abs(d - shift);

  ProfileComparison out;
  out.shift = shift;
  out.w1_unshifted = w1_raw / static_cast<double>(k);
  out.w1_after_shift = w1 / static_cast<double>(k);
  out.ks_after_shift = stats::ks_one_sample_sorted(
      emp.sorted, [&](double x) { return predicted.cdf(x - shift); });
  return out;
}

}  // namespace twave
