#pragma once

#include <optional>
#include <string>
#include <variant>

#include "twave/jump_law.hpp"
#include "twave/rng.hpp"

namespace twave {

struct NoDrive {};
struct BrownianDrive {
  double sigma2;
};
struct CompoundPoissonDrive {
  double lambda;
  JumpLaw jumps;
};

/// Driving Levy process between interactions.
class LevySpec {
 public:
  using Kind = std::variant<NoDrive, BrownianDrive, CompoundPoissonDrive>;

  static LevySpec none() { return LevySpec(NoDrive{}); }
  static LevySpec brownian(double sigma2);
  static LevySpec compound_poisson(double lambda, JumpLaw jumps);

  const Kind& kind() const noexcept { return kind_; }
  std::string describe() const;

  /// Cumulant kappa(theta) = log E[e^{theta Gamma(1)}]; finite for
  /// 0 <= theta < theta_max().
  double kappa(double theta) const;
  double kappa_prime(double theta) const;
  double kappa_second(double theta) const;
  double theta_max() const;

  /// Exact draw of the displacement Gamma(t).
  double displacement(double t, RngStream& rng) const;

 private:
  explicit LevySpec(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

}  // namespace twave
