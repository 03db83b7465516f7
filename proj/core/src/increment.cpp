#include "twave/increment.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "twave/error.hpp"

namespace twave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void undefined_at(double theta) {
  std::ostringstream os;
  os.precision(10);
  os << "transform undefined at s (theta = " << theta << ")";
  throw NumericalError(os.str());
}

double sync_sample(const SyncIncrement& inc, RngStream& rng) {
  if (const auto* cp = std::get_if<CompoundPoissonDrive>(&inc.levy.kind());
      cp != nullptr && cp->lambda > 0.0) {
    // Competing clocks: the next event is a jump with probability
    // lambda / (rho + lambda), otherwise the copying event that ends T.
    const double total = inc.rho + cp->lambda;
    const double p_jump = cp->lambda / total;
    double t = 0.0, gamma_t = 0.0;
    while (true) {
      t += exponential(rng, total);
      if (uniform01(rng) >= p_jump) break;
      gamma_t += cp->jumps.sample(rng);
    }
    return inc.c * t - gamma_t;
  }
  const double t = exponential(rng, inc.rho);
  return inc.c * t - inc.levy.displacement(t, rng);
}

double sync_transform(const SyncIncrement& inc, double theta, int order) {
  if (theta >= inc.levy.theta_max()) undefined_at(theta);
  const double denom = inc.rho + theta * inc.c - inc.levy.kappa(theta);
  if (!(denom > 0.0) || !std::isfinite(denom)) undefined_at(theta);
  // L = rho / D, D' = c - kappa', D'' = -kappa''.
  const double d1 = inc.c - inc.levy.kappa_prime(theta);
  switch (order) {
    case 0:
      return inc.rho / denom;
    case 1:
      return inc.rho * d1 / (denom * denom);
    default:
      return inc.rho * inc.levy.kappa_second(theta) / (denom * denom) +
             2.0 * inc.rho * d1 * d1 / (denom * denom * denom);
  }
}

double power2_transform(const Power2Increment& inc, double theta, int order) {
  const double m = 0.5 * inc.sigma2;
  const double h = 1.0 / (1.0 + m * theta);
  const double g = inc.tail->tilted_laplace(theta, 0);
  if (order == 0) return g * h;
  const double g1 = inc.tail->tilted_laplace(theta, 1);
  if (order == 1) return g1 * h + g * m * h * h;
  const double g2 = inc.tail->tilted_laplace(theta, 2);
  return g2 * h + 2.0 * g1 * m * h * h + 2.0 * g * m * m * h * h * h;
}

}  // namespace

IncrementLaw IncrementLaw::sync(LevySpec levy, double c, double rho) {
  if (!std::isfinite(c)) throw ValidationError("c must be finite");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ValidationError("rho must be positive");
  return IncrementLaw(SyncIncrement{std::move(levy), c, rho});
}

IncrementLaw IncrementLaw::power2(JumpLaw jumps, double sigma2) {
  if (std::abs(jumps.mean() - 1.0) > 1e-9) {
    std::ostringstream os;
    os.precision(12);
    os << "jumps: power-of-2 model requires E[X] = 1 within 1e-9 (got " << jumps.mean() << ")";
    throw ValidationError(os.str());
  }
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw ValidationError("sigma2 must be nonnegative");
  }
  auto tail = std::make_shared<const IntegratedTail>(jumps);
  return IncrementLaw(Power2Increment{std::move(jumps), sigma2, std::move(tail)});
}

IncrementLaw IncrementLaw::constant(double value) {
  if (!std::isfinite(value)) throw ValidationError("constant increment must be finite");
  return IncrementLaw(ConstantIncrement{value});
}

std::string IncrementLaw::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (const auto* s = std::get_if<SyncIncrement>(&kind_)) {
    os << "sync(levy=" << s->levy.describe() << ", c=" << s->c << ", rho=" << s->rho << ')';
  } else if (const auto* k = std::get_if<ConstantIncrement>(&kind_)) {
    os << "constant(" << k->value << ')';
  } else {
    const auto& p = std::get<Power2Increment>(kind_);
    os << "power2(jumps=" << p.jumps.describe() << ", sigma2=" << p.sigma2 << ')';
  }
  return os.str();
}

double IncrementLaw::sample(RngStream& rng) const {
  if (const auto* s = std::get_if<SyncIncrement>(&kind_)) return sync_sample(*s, rng);
  if (const auto* k = std::get_if<ConstantIncrement>(&kind_)) return k->value;
  const auto& p = std::get<Power2Increment>(kind_);
  double y = p.tail->sample(rng);
  if (p.sigma2 > 0.0) y += exponential(rng, 2.0 / p.sigma2);
  return y;
}

double IncrementLaw::tilted_transform(double theta, int order) const {
  if (order < 0 || order > 2) throw ValidationError("tilted_transform: order must be 0, 1 or 2");
  if (!(theta >= 0.0)) undefined_at(theta);
  if (const auto* s = std::get_if<SyncIncrement>(&kind_)) return sync_transform(*s, theta, order);
  if (const auto* k = std::get_if<ConstantIncrement>(&kind_)) {
    return std::pow(k->value, order) * std::exp(-theta * k->value);
  }
  return power2_transform(std::get<Power2Increment>(kind_), theta, order);
}

double IncrementLaw::domain_bound() const {
  if (const auto* s = std::get_if<SyncIncrement>(&kind_)) return s->levy.theta_max();
  return kInf;
}

double sample_A(const IncrementLaw& inc, RngStream& rng) {
  if (inc.is_power2()) throw ValidationError("sample_A requires a synchronisation increment");
  return inc.sample(rng);
}

double sample_Y(const IncrementLaw& inc, RngStream& rng) {
  if (!inc.is_power2()) throw ValidationError("sample_Y requires a power-of-2 increment");
  return inc.sample(rng);
}

double laplace_A(const IncrementLaw& inc, double gamma, double s) {
  if (inc.is_power2()) throw ValidationError("laplace_A requires a synchronisation increment");
  if (!(gamma > 0.0)) throw ValidationError("laplace_A: gamma must be positive");
  if (!(s >= 0.0)) undefined_at(s * gamma);
  return inc.tilted_transform(s * gamma, 0);
}

}  // namespace twave
