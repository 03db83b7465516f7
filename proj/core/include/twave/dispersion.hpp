#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "twave/increment.hpp"
#include "twave/jump_law.hpp"

namespace twave {

enum class Regime { Supercritical, Critical, Invalid };
enum class Model { Brownian, BS, Power2, GenericLevy };

std::string to_string(Regime r);
std::string to_string(Model m);

struct Diagnostics {
  double psi1 = 0.0;       // E[e^{-gamma A}], must equal 1/k
  double mean_tilt = 0.0;  // E[A e^{-gamma A}]
  double moment2 = 0.0;    // E[A^2 e^{-gamma A}]
  double domain_bound = 0.0;
  double r = 0.0;          // rho + gamma c - kappa(gamma); equals k rho at a solution
  // Standard errors, zero on the analytic path.
  double psi1_se = 0.0;
  double mean_tilt_se = 0.0;
  double moment2_se = 0.0;
  bool monte_carlo = false;
};

struct SpeedDecayResult {
  double gamma = 0.0;
  double c = 0.0;
  Regime regime = Regime::Invalid;
  Model model = Model::GenericLevy;
  Diagnostics diagnostics;
  std::vector<std::string> notes;
};

/// Number of interacting particles k (1/2 becomes 1/k) and copying rate rho.
struct DispersionOptions {
  int k = 2;
  double rho = 1.0;
};

constexpr double kPsiTolerance = 1e-9;
constexpr double kCriticalTiltTolerance = 1e-7;

/// Root of E[e^{-gamma Y}] = 1/k, Y = Xbar + Z. Speed is 1.
SpeedDecayResult solve_gamma_power2(const JumpLaw& jumps, double sigma2,
                                    const DispersionOptions& opt = {});

/// Value of the closed form (sqrt(1 + 2 sigma2) - 1) / sigma2 that is sometimes
/// quoted for exponential jumps; it does not solve the defining equation.
double power2_exp_closed_form(double sigma2);

/// v(gamma) = (rho (k - 1) + lambda (E[e^{gamma X}] - 1)) / gamma.
/// Throws NumericalError("MGF divergent") when gamma >= theta_max.
double speed_from_gamma_bs(double gamma, double lambda, const JumpLaw& jumps,
                           const DispersionOptions& opt = {});

/// Minimiser (gamma*, c*) of v. Throws NumericalError("no interior minimum")
/// when lambda = 0.
SpeedDecayResult critical_point_bs(double lambda, const JumpLaw& jumps,
                                   const DispersionOptions& opt = {});

/// Smaller root of v(gamma) = c. Throws NumericalError("no travelling wave
/// below c*") when c < c*.
SpeedDecayResult gamma_from_speed_bs(double c, double lambda, const JumpLaw& jumps,
                                     const DispersionOptions& opt = {});

struct BrownianMinimal {};
struct BrownianFromGamma {
  double gamma;
};
struct BrownianFromSpeed {
  double c;
};
using BrownianMode = std::variant<BrownianMinimal, BrownianFromGamma, BrownianFromSpeed>;

SpeedDecayResult brownian_dispersion(double sigma2, const BrownianMode& mode,
                                     const DispersionOptions& opt = {});

struct MonteCarloOptions {
  std::size_t draws = 1'000'000;
  std::uint64_t seed = 1;
};

/// Analytic classification from the closed-form tilted transforms.
SpeedDecayResult regime_classify(const IncrementLaw& inc, double gamma,
                                 const DispersionOptions& opt = {});
/// Same classification from Monte Carlo estimates with standard errors.
SpeedDecayResult regime_classify_mc(const IncrementLaw& inc, double gamma,
                                    const MonteCarloOptions& mc,
                                    const DispersionOptions& opt = {});

}  // namespace twave
