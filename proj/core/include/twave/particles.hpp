#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twave/jump_law.hpp"
#include "twave/rng.hpp"
#include "twave/waves.hpp"

namespace twave {

enum class Mechanism { Sync, BSModel, Power2 };

std::string to_string(Mechanism m);
Mechanism parse_mechanism(const std::string& s);

struct ParticleSystemConfig {
  std::size_t n = 10'000;
  Mechanism mechanism = Mechanism::Power2;
  double sigma2 = 0.0;     // Brownian drive between events (Sync, Power2)
  double jump_rate = 0.0;  // lambda, individual jumps (BSModel)
  double copy_rate = 1.0;  // rho, interaction events at total rate rho * n
  std::optional<JumpLaw> jumps;
  double horizon = 200.0;
  double burn_in = 50.0;
  /// Empty: 20 evenly spaced times in (burn_in, horizon].
  std::vector<double> snapshot_times;
  double median_interval = 1.0;
  std::uint64_t seed = 1;
  std::uint64_t max_events = 20'000'000'000ULL;
  /// Empty: every particle starts at 0.
  std::vector<double> initial_positions;

  /// Throws ValidationError naming the offending field.
  void validate() const;
  std::vector<double> effective_snapshot_times() const;
};

/// Positions with lazily applied Brownian motion: particle i carries the time
/// of its last update and receives N(0, sigma2 * elapsed) when touched.
class ParticleSystem {
 public:
  ParticleSystem(Mechanism mechanism, std::vector<double> initial, double sigma2 = 0.0);

  std::size_t size() const noexcept { return x_.size(); }
  const std::vector<double>& positions() const noexcept { return x_; }

  void advance(std::size_t i, double t, RngStream& rng);
  /// Ordered-pair interaction at time t. Sync/BSModel: i copies j if j is
  /// ahead. Power2: the lower of the two moves up by x.
  void interact(std::size_t i, std::size_t j, double t, double x, RngStream& rng);
  /// Individual jump of particle i by x.
  void jump(std::size_t i, double t, double x, RngStream& rng);
  /// Brings every particle to time t.
  void synchronize(double t, RngStream& rng);

 private:
  Mechanism mechanism_;
  double sigma_;
  std::vector<double> x_;
  std::vector<double> last_;
};

struct PathPoint {
  double t;
  double median;
};

struct SimulationResult {
  std::vector<double> snapshot_times;
  std::vector<std::vector<double>> snapshots;
  std::vector<PathPoint> median_path;
  std::uint64_t events = 0;
  double end_time = 0.0;
  bool truncated = false;
};

SimulationResult simulate(const ParticleSystemConfig& config);

struct SpeedEstimate {
  double c_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t points = 0;
};

constexpr std::size_t kMinSpeedPoints = 20;

/// OLS slope of the median after burn_in. The 95% CI is a percentile
/// bootstrap over 200 resamples of moving blocks of detrended increments.
SpeedEstimate estimate_speed(std::span<const PathPoint> path, double burn_in,
                             std::uint64_t seed = 1, int resamples = 200);

/// Right-continuous empirical CDF of median-centred positions.
struct EmpiricalCDF {
  std::vector<double> sorted;
  double offset = 0.0;  // mean of the medians that were removed

  double cdf(double x) const;
  double survival(double x) const { return 1.0 - cdf(x); }
};

EmpiricalCDF make_empirical_cdf(std::vector<double> positions);

/// Pools every snapshot with time in [t_lo, t_hi], each centred by its median.
EmpiricalCDF centered_profile(std::span<const double> times,
                              const std::vector<std::vector<double>>& snapshots, double t_lo,
                              double t_hi);

struct ProfileComparison {
  double w1_after_shift = 0.0;
  double ks_after_shift = 0.0;
  double shift = 0.0;
  double w1_unshifted = 0.0;
};

/// Aligns emp with the law whose survival function is the predicted profile.
/// W1 is computed on quantiles; the minimising shift is the median of the
/// quantile differences.
ProfileComparison compare_profiles(const EmpiricalCDF& emp, const WaveProfile& predicted);

}  // namespace twave
