#pragma once

#include <memory>
#include <string>
#include <variant>

#include "twave/jump_law.hpp"
#include "twave/levy.hpp"
#include "twave/rng.hpp"

namespace twave {

/// A = c T - Gamma(T), T ~ Exp(rho): the increment between two copying
/// events of a tagged particle in the synchronisation models, seen in the
/// frame moving at speed c.
struct SyncIncrement {
  LevySpec levy;
  double c;
  double rho = 1.0;
};

/// Y = Xbar + Z with Xbar the integrated tail of the (mean-one) jump law and
/// Z ~ Exp(mean sigma2 / 2), Z = 0 when sigma2 = 0.
struct Power2Increment {
  JumpLaw jumps;
  double sigma2;
  std::shared_ptr<const IntegratedTail> tail;
};

/// A fixed increment A = value; used for degenerate test cases.
struct ConstantIncrement {
  double value;
};

class IncrementLaw {
 public:
  using Kind = std::variant<SyncIncrement, Power2Increment, ConstantIncrement>;

  static IncrementLaw sync(LevySpec levy, double c, double rho = 1.0);
  /// Throws ValidationError unless E[X] = 1 within 1e-9.
  static IncrementLaw power2(JumpLaw jumps, double sigma2);
  static IncrementLaw constant(double value);

  const Kind& kind() const noexcept { return kind_; }
  bool is_sync() const noexcept { return std::holds_alternative<SyncIncrement>(kind_); }
  bool is_power2() const noexcept { return std::holds_alternative<Power2Increment>(kind_); }
  bool is_constant() const noexcept { return std::holds_alternative<ConstantIncrement>(kind_); }
  std::string describe() const;

  double sample(RngStream& rng) const;

  /// E[A^order e^{-theta A}] for order 0, 1, 2 and theta >= 0.
  /// Throws NumericalError("transform undefined at s") outside the domain.
  double tilted_transform(double theta, int order) const;

  /// Supremum of theta where the transform is defined (+inf if unbounded).
  double domain_bound() const;

 private:
  explicit IncrementLaw(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// One draw of A; inc must be a synchronisation or constant increment.
double sample_A(const IncrementLaw& inc, RngStream& rng);
/// One draw of Y; inc must be a power-of-2 increment.
double sample_Y(const IncrementLaw& inc, RngStream& rng);
/// psi(s) = E[e^{-s gamma A}], analytic.
double laplace_A(const IncrementLaw& inc, double gamma, double s);

}  // namespace twave
