#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "twave/rng.hpp"

namespace twave {

struct ExponentialJumps {
  double rate;
};
struct DeterministicJumps {
  double value;
};
struct GammaJumps {
  double shape;
  double rate;
};
/// Piecewise-linear CDF through (x[i], cdf[i]); both strictly increasing.
struct TabulatedJumps {
  std::vector<double> x;
  std::vector<double> cdf;
};

/// Law of a nonnegative jump size X.
class JumpLaw {
 public:
  using Kind = std::variant<ExponentialJumps, DeterministicJumps, GammaJumps, TabulatedJumps>;

  static JumpLaw exponential(double rate);
  static JumpLaw deterministic(double value);
  static JumpLaw gamma(double shape, double rate);
  static JumpLaw tabulated(std::vector<double> x, std::vector<double> cdf);

  /// Parses the short form used on the command line: "exp:RATE", "det:VALUE",
  /// "gamma:SHAPE:RATE".
  static JumpLaw parse(std::string_view spec);

  const Kind& kind() const noexcept { return kind_; }
  /// Law of factor * X.
  JumpLaw scaled(double factor) const;
  /// Inverse of parse() for the parametric kinds; "tabulated[n]" otherwise.
  std::string describe() const;

  double mean() const;
  /// Supremum of theta with E[e^{theta X}] finite; the MGF is finite only
  /// strictly below it (or everywhere when it is +inf).
  double theta_max() const;
  /// Largest value in the support, +inf when unbounded.
  double support_max() const;

  /// E[e^{theta X}] for any real theta; +inf at or beyond theta_max.
  double mgf(double theta) const;
  /// E[X^order e^{theta X}] for order 0, 1 or 2; +inf at or beyond theta_max.
  double tilted_moment(double theta, int order) const;
  /// E[e^{-s X}].
  double laplace(double s) const { return mgf(-s); }

  double cdf(double x) const;
  double survival(double x) const { return 1.0 - cdf(x); }
  /// E[(X - x)^+], the integral of the survival function over [x, inf).
  double stop_loss(double x) const;
  double quantile(double p) const;

  double sample(RngStream& rng) const;

 private:
  explicit JumpLaw(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// Integrated-tail (equilibrium) law of a jump law: density survival(x)/mean.
class IntegratedTail {
 public:
  explicit IntegratedTail(JumpLaw law);

  const JumpLaw& law() const noexcept { return law_; }
  double cdf(double x) const;
  double survival(double x) const { return 1.0 - cdf(x); }
  /// E[Xbar^order e^{-s Xbar}] for order 0, 1 or 2 and s >= 0.
  double tilted_laplace(double s, int order) const;
  double laplace(double s) const { return tilted_laplace(s, 0); }
  double sample(RngStream& rng) const;

  /// Number of grid points used for numeric inversion.
  static constexpr int kGridSize = 4096;

 private:
  enum class Mode { Exponential, Uniform, Grid };

  JumpLaw law_;
  double mean_;
  Mode mode_;
  // Grid mode: cdf values at x_grid_, exponential tail beyond the last node.
  std::vector<double> x_grid_;
  std::vector<double> cdf_grid_;
  double tail_hazard_ = 0.0;
};

/// Throws NumericalError("integrated tail undefined") for a law without a
/// finite positive mean.
IntegratedTail integrated_tail(const JumpLaw& law);

}  // namespace twave
