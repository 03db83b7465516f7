#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "twave/jump_law.hpp"
#include "twave/increment.hpp"
#include "twave/smoothing.hpp"
#include "twave/stats.hpp"

namespace twave {

/// SyncRight: h(x) = 1 - E[exp(-W e^{-gamma x})].
/// Power2:    h(x) = E[exp(-V e^{gamma x})].
/// In both cases h(x) = P(xi > x) for the wave variable xi.
enum class Orientation { SyncRight, Power2 };

std::string to_string(Orientation o);
Orientation parse_orientation(const std::string& s);

struct WaveProfile {
  double gamma = 0.0;
  Orientation orientation = Orientation::SyncRight;
  std::size_t pool_size = 0;
  double pool_mean = 0.0;
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> stderr_values;

  /// h(x) by linear interpolation; 1 left of the grid, 0 right of it.
  double survival(double x) const;
  double cdf(double x) const { return 1.0 - survival(x); }
};

/// Evenly spaced grid of n points on [lo, hi].
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

WaveProfile profile_eval(std::span<const double> pool, double gamma, Orientation orientation,
                         std::span<const double> grid, int workers = 1);

struct WaveSamples {
  std::vector<double> xi;
  std::size_t zero_rejections = 0;
};

/// Gumbel mixture draws: SyncRight xi = (log W + G) / gamma,
/// Power2 xi = -(log V + G) / gamma, with W (or V) uniform from the pool.
WaveSamples sample_wave(std::span<const double> pool, double gamma, Orientation orientation,
                        std::size_t n, std::uint64_t seed, int workers = 1);

constexpr std::size_t kMinVerifySamples = 100'000;

/// Two-sample KS of xi against max(xi_a, xi_b, ...) - A + rhs_shift.
/// A nonzero rhs_shift is a negative control.
stats::KsResult verify_fixed_point_sync(std::span<const double> xi, const IncrementLaw& inc,
                                        std::uint64_t seed, int k = 2, double rhs_shift = 0.0);

/// Two-sample KS of xi against xi_a + 1{xi_a <= xi_b} X - rho T + sqrt(sigma2 T) N
/// with T ~ Exp(2 rho): each particle takes part in interactions at rate 2 rho.
stats::KsResult verify_fixed_point_power2(std::span<const double> xi, const JumpLaw& jumps,
                                          double sigma2, std::uint64_t seed, double rho = 1.0);

/// Two-sample KS between the two right-hand sides built from the same xi:
/// the jump form above and min(xi_a, xi_b) + Xbar + Z. include_z = false
/// drops Z (negative control).
stats::KsResult verify_equivalence_power2(std::span<const double> xi, const JumpLaw& jumps,
                                          double sigma2, std::uint64_t seed,
                                          bool include_z = true);

struct TailFit {
  double right_slope = 0.0;
  double right_prefactor = 0.0;
  double left_slope = 0.0;
  double left_prefactor = 0.0;
  double pool_mean = 0.0;
  double density_at_zero = 0.0;
  std::size_t right_points = 0;
  std::size_t left_points = 0;
};

/// Log-linear fits of h (right) and 1 - h (left) where they lie in
/// [1e-5, 1e-2]. Throws NumericalError("insufficient tail resolution") when
/// the side governed by the pool mean has fewer than 3 points in the window;
/// the other side is NaN in that case.
TailFit tail_asymptotics(std::span<const double> pool, double gamma, Orientation orientation,
                         int workers = 1);

/// Reflection kernel estimate of the pool density at 0+.
double density_at_zero(std::span<const double> pool);

}  // namespace twave
