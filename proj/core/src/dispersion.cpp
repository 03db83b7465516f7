#include "twave/dispersion.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "twave/error.hpp"
#include "twave/numerics.hpp"
#include "twave/rng.hpp"

namespace twave {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_options(const DispersionOptions& opt) {
  if (opt.k < 2) throw ValidationError("k must be at least 2");
  if (!(opt.rho > 0.0) || !std::isfinite(opt.rho)) throw ValidationError("rho must be positive");
}

Model model_of(const IncrementLaw& inc) {
  if (inc.is_power2()) return Model::Power2;
  if (inc.is_constant()) return Model::GenericLevy;
  const auto& kind = std::get<SyncIncrement>(inc.kind()).levy.kind();
  if (std::holds_alternative<BrownianDrive>(kind)) return Model::Brownian;
  if (std::holds_alternative<CompoundPoissonDrive>(kind)) return Model::BS;
  return Model::GenericLevy;
}

Regime classify(const Diagnostics& d, int k) {
  const double target = 1.0 / k;
  const double psi_tol = d.monte_carlo ? 3.0 * d.psi1_se + kPsiTolerance : kPsiTolerance;
  if (!std::isfinite(d.psi1) || std::abs(d.psi1 - target) > psi_tol) return Regime::Invalid;
  const double tilt_tol = d.monte_carlo ? 2.0 * d.mean_tilt_se : kCriticalTiltTolerance;
  if (std::abs(d.mean_tilt) < tilt_tol) return Regime::Critical;
  return d.mean_tilt > 0.0 ? Regime::Supercritical : Regime::Invalid;
}

double sync_r(const IncrementLaw& inc, double gamma) {
  if (!inc.is_sync()) return kNaN;
  const auto& s = std::get<SyncIncrement>(inc.kind());
  if (gamma >= s.levy.theta_max()) return kNaN;
  return s.rho + gamma * s.c - s.levy.kappa(gamma);
}

LevySpec bs_levy(double lambda, const JumpLaw& jumps) {
  return lambda > 0.0 ? LevySpec::compound_poisson(lambda, jumps) : LevySpec::none();
}

SpeedDecayResult finish(const IncrementLaw& inc, double gamma, double c, Model model,
                        const DispersionOptions& opt) {
  SpeedDecayResult res = regime_classify(inc, gamma, opt);
  res.c = c;
  res.model = model;
  return res;
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Supercritical: return "supercritical";
    case Regime::Critical: return "critical";
    case Regime::Invalid: break;
  }
  return "invalid";
}

std::string to_string(Model m) {
  switch (m) {
    case Model::Brownian: return "brownian";
    case Model::BS: return "bs";
    case Model::Power2: return "power2";
    case Model::GenericLevy: break;
  }
  return "generic_levy";
}

SpeedDecayResult solve_gamma_power2(const JumpLaw& jumps, double sigma2,
                                    const DispersionOptions& opt) {
  check_options(opt);
  const IncrementLaw inc = IncrementLaw::power2(jumps, sigma2);
  const double target = 1.0 / opt.k;
  auto phi = [&](double g) { return inc.tilted_transform(g, 0) - target; };
  numerics::Bracket b{1e-8, 50.0};
  while (phi(b.lo) <= 0.0) b.lo *= 0.5;
  while (phi(b.hi) >= 0.0) b.hi *= 2.0;
  const double gamma = numerics::bisect(phi, b, 1e-12);

  SpeedDecayResult res = finish(inc, gamma, 1.0, Model::Power2, opt);
  if (std::holds_alternative<ExponentialJumps>(jumps.kind()) &&
      std::get<ExponentialJumps>(jumps.kind()).rate == 1.0 && sigma2 > 0.0 && opt.k == 2) {
    const double closed = power2_exp_closed_form(sigma2);
    std::ostringstream os;
    os.precision(9);
    os << "closed form (sqrt(1+2*sigma2)-1)/sigma2 = " << closed
       << " does not solve E[exp(-gamma*Y)] = 1/2 (value there "
       << inc.tilted_transform(closed, 0) << "); reported gamma is the numeric root of "
       << "(1+gamma)(1+sigma2*gamma/2) = 2";
    res.notes.push_back(os.str());
  }
  return res;
}

double power2_exp_closed_form(double sigma2) {
  if (!(sigma2 > 0.0)) throw ValidationError("sigma2 must be positive");
  return (std::sqrt(1.0 + 2.0 * sigma2) - 1.0) / sigma2;
}

double speed_from_gamma_bs(double gamma, double lambda, const JumpLaw& jumps,
                           const DispersionOptions& opt) {
  check_options(opt);
  if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
  if (!(lambda >= 0.0)) throw ValidationError("lambda must be nonnegative");
  const double base = opt.rho * (opt.k - 1);
  if (lambda == 0.0) return base / gamma;
  if (gamma >= jumps.theta_max()) throw NumericalError("MGF divergent");
  const double m = jumps.mgf(gamma);
  if (!std::isfinite(m)) throw NumericalError("MGF divergent");
  return (base + lambda * (m - 1.0)) / gamma;
}

SpeedDecayResult critical_point_bs(double lambda, const JumpLaw& jumps,
                                   const DispersionOptions& opt) {
  check_options(opt);
  if (lambda == 0.0) {
    throw NumericalError("no interior minimum: v(gamma) = rho(k-1)/gamma is monotone when lambda = 0");
  }
  if (!(lambda > 0.0)) throw ValidationError("lambda must be nonnegative");
  auto v = [&](double g) { return speed_from_gamma_bs(g, lambda, jumps, opt); };

  double hi = jumps.theta_max();
  if (std::isfinite(hi)) {
    hi *= 1.0 - 1e-12;
  } else {
    hi = 1.0;
    while (v(2.0 * hi) < v(hi)) hi *= 2.0;
    hi *= 2.0;
  }
  const auto coarse = numerics::golden_section(v, 1e-12 * hi, hi, 1e-10);

  // Polish on the stationarity residual v(g) - lambda E[X e^{gX}], which
  // changes sign at the minimiser, to get past the flatness of v there.
  auto residual = [&](double g) { return v(g) - lambda * jumps.tilted_moment(g, 1); };
  double lo_b = coarse.x, hi_b = coarse.x;
  double step = 1e-9 * std::max(1.0, coarse.x);
  while (residual(lo_b) <= 0.0 && lo_b > step) lo_b -= step, step *= 2.0;
  step = 1e-9 * std::max(1.0, coarse.x);
  while (residual(hi_b) >= 0.0 && hi_b + step < hi) hi_b += step, step *= 2.0;
  double gamma = coarse.x;
  if (residual(lo_b) > 0.0 && residual(hi_b) < 0.0) {
    gamma = numerics::bisect(residual, {lo_b, hi_b}, 0.0);
  }
  const double c_star = v(gamma);
  const double stationarity = std::abs(c_star - lambda * jumps.tilted_moment(gamma, 1));
  if (stationarity >= 1e-6 * c_star) {
    throw NumericalError("critical point failed the stationarity check");
  }
  const IncrementLaw inc = IncrementLaw::sync(bs_levy(lambda, jumps), c_star, opt.rho);
  SpeedDecayResult res = finish(inc, gamma, c_star, Model::BS, opt);
  // The tilt vanishes at the minimiser up to rounding in c*.
  if (res.regime == Regime::Supercritical) res.regime = Regime::Critical;
  return res;
}

SpeedDecayResult gamma_from_speed_bs(double c, double lambda, const JumpLaw& jumps,
                                     const DispersionOptions& opt) {
  check_options(opt);
  if (!std::isfinite(c)) throw ValidationError("c must be finite");
  if (lambda == 0.0) {
    if (!(c > 0.0)) throw NumericalError("no travelling wave below c* (c must be positive when lambda = 0)");
    const double gamma = opt.rho * (opt.k - 1) / c;
    return finish(IncrementLaw::sync(LevySpec::none(), c, opt.rho), gamma, c, Model::BS, opt);
  }
  const SpeedDecayResult crit = critical_point_bs(lambda, jumps, opt);
  if (std::abs(c - crit.c) <= 1e-9 * std::max(1.0, crit.c)) return crit;
  if (c < crit.c) {
    std::ostringstream os;
    os.precision(10);
    os << "no travelling wave below c* (c = " << c << " < c* = " << crit.c << ")";
    throw NumericalError(os.str());
  }
  auto f = [&](double g) { return speed_from_gamma_bs(g, lambda, jumps, opt) - c; };
  double lo = 0.5 * crit.gamma;
  while (f(lo) <= 0.0) lo *= 0.5;
  const double gamma = numerics::bisect(f, {lo, crit.gamma}, 1e-14 * c);
  const IncrementLaw inc = IncrementLaw::sync(bs_levy(lambda, jumps), c, opt.rho);
  return finish(inc, gamma, c, Model::BS, opt);
}

SpeedDecayResult brownian_dispersion(double sigma2, const BrownianMode& mode,
                                     const DispersionOptions& opt) {
  check_options(opt);
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ValidationError("sigma2 must be positive");
  const double a = opt.rho * (opt.k - 1);
  const double sigma = std::sqrt(sigma2);
  const double gamma_min = std::sqrt(2.0 * a) / sigma;
  const double c_min = sigma * std::sqrt(2.0 * a);

  double gamma = gamma_min, c = c_min;
  bool critical = false;
  if (std::holds_alternative<BrownianMinimal>(mode)) {
    critical = true;
  } else if (const auto* fg = std::get_if<BrownianFromGamma>(&mode)) {
    if (!(fg->gamma > 0.0)) throw ValidationError("gamma must be positive");
    gamma = fg->gamma;
    c = (a + 0.5 * sigma2 * gamma * gamma) / gamma;
  } else {
    c = std::get<BrownianFromSpeed>(mode).c;
    if (std::abs(c - c_min) <= 1e-9 * std::max(1.0, c_min)) {
      c = c_min;
      critical = true;
    } else if (c < c_min) {
      std::ostringstream os;
      os.precision(10);
      os << "no travelling wave below c_min (c = " << c << " < c_min = " << c_min << ")";
      throw NumericalError(os.str());
    } else {
      gamma = 2.0 * a / (c + std::sqrt(c * c - 2.0 * a * sigma2));
    }
  }
  const IncrementLaw inc = IncrementLaw::sync(LevySpec::brownian(sigma2), c, opt.rho);
  SpeedDecayResult res = finish(inc, gamma, c, Model::Brownian, opt);
  if (critical && res.regime == Regime::Supercritical) res.regime = Regime::Critical;
  return res;
}

SpeedDecayResult regime_classify(const IncrementLaw& inc, double gamma,
                                 const DispersionOptions& opt) {
  check_options(opt);
  if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
  SpeedDecayResult res;
  res.gamma = gamma;
  res.model = model_of(inc);
  res.c = inc.is_sync() ? std::get<SyncIncrement>(inc.kind()).c : 1.0;
  Diagnostics& d = res.diagnostics;
  d.domain_bound = inc.domain_bound();
  d.r = sync_r(inc, gamma);
  try {
    d.psi1 = inc.tilted_transform(gamma, 0);
    d.mean_tilt = inc.tilted_transform(gamma, 1);
    d.moment2 = inc.tilted_transform(gamma, 2);
  } catch (const NumericalError& e) {
    d.psi1 = d.mean_tilt = d.moment2 = kNaN;
    res.notes.emplace_back(e.what());
    res.regime = Regime::Invalid;
    return res;
  }
  res.regime = classify(d, opt.k);
  return res;
}

SpeedDecayResult regime_classify_mc(const IncrementLaw& inc, double gamma,
                                    const MonteCarloOptions& mc,
                                    const DispersionOptions& opt) {
  check_options(opt);
  if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
  if (mc.draws < 2) throw ValidationError("Monte Carlo classification needs at least 2 draws");
  SpeedDecayResult res;
  res.gamma = gamma;
  res.model = model_of(inc);
  res.c = inc.is_sync() ? std::get<SyncIncrement>(inc.kind()).c : 1.0;
  Diagnostics& d = res.diagnostics;
  d.domain_bound = inc.domain_bound();
  d.r = sync_r(inc, gamma);
  d.monte_carlo = true;

  RngStream rng(mc.seed, mix64(0x7265'6769'6d65ULL));
  double s[3] = {0, 0, 0}, ss[3] = {0, 0, 0};
  for (std::size_t i = 0; i < mc.draws; ++i) {
    const double a = inc.sample(rng);
    const double w = std::exp(-gamma * a);
    const double v[3] = {w, a * w, a * a * w};
    for (int j = 0; j < 3; ++j) {
      s[j] += v[j];
      ss[j] += v[j] * v[j];
    }
  }
  const double n = static_cast<double>(mc.draws);
  double mean[3], se[3];
  for (int j = 0; j < 3; ++j) {
    mean[j] = s[j] / n;
    const double var = std::max(0.0, (ss[j] - n * mean[j] * mean[j]) / (n - 1.0));
    se[j] = std::sqrt(var / n);
  }
  d.psi1 = mean[0];
  d.mean_tilt = mean[1];
  d.moment2 = mean[2];
  d.psi1_se = se[0];
  d.mean_tilt_se = se[1];
  d.moment2_se = se[2];
  res.regime = classify(d, opt.k);
  return res;
}

}  // namespace twave
