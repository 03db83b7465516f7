#include "twave/levy.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "twave/error.hpp"

namespace twave {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

LevySpec LevySpec::brownian(double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw ValidationError("levy.sigma2 must be positive for a Brownian drive");
  }
  return LevySpec(BrownianDrive{sigma2});
}

LevySpec LevySpec::compound_poisson(double lambda, JumpLaw jumps) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ValidationError("levy.lambda must be nonnegative");
  }
  return LevySpec(CompoundPoissonDrive{lambda, std::move(jumps)});
}

std::string LevySpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const NoDrive&) { os << "none"; },
                 [&](const BrownianDrive& b) { os << "brownian(sigma2=" << b.sigma2 << ')'; },
                 [&](const CompoundPoissonDrive& c) {
                   os << "compound_poisson(lambda=" << c.lambda << ", " << c.jumps.describe()
                      << ')';
                 },
             },
             kind_);
  return os.str();
}

double LevySpec::kappa(double theta) const {
  return std::visit(overloaded{
                        [](const NoDrive&) { return 0.0; },
                        [&](const BrownianDrive& b) { return 0.5 * b.sigma2 * theta * theta; },
                        [&](const CompoundPoissonDrive& c) {
                          if (c.lambda == 0.0) return 0.0;
                          return c.lambda * (c.jumps.mgf(theta) - 1.0);
                        },
                    },
                    kind_);
}

double LevySpec::kappa_prime(double theta) const {
  return std::visit(overloaded{
                        [](const NoDrive&) { return 0.0; },
                        [&](const BrownianDrive& b) { return b.sigma2 * theta; },
                        [&](const CompoundPoissonDrive& c) {
                          if (c.lambda == 0.0) return 0.0;
                          return c.lambda * c.jumps.tilted_moment(theta, 1);
                        },
                    },
                    kind_);
}

double LevySpec::kappa_second(double theta) const {
  return std::visit(overloaded{
                        [](const NoDrive&) { return 0.0; },
                        [&](const BrownianDrive& b) { return b.sigma2; },
                        [&](const CompoundPoissonDrive& c) {
                          if (c.lambda == 0.0) return 0.0;
                          return c.lambda * c.jumps.tilted_moment(theta, 2);
                        },
                    },
                    kind_);
}

double LevySpec::theta_max() const {
  return std::visit(overloaded{
                        [](const NoDrive&) { return std::numeric_limits<double>::infinity(); },
                        [](const BrownianDrive&) { return std::numeric_limits<double>::infinity(); },
                        [](const CompoundPoissonDrive& c) {
                          return c.lambda == 0.0 ? std::numeric_limits<double>::infinity()
                                                 : c.jumps.theta_max();
                        },
                    },
                    kind_);
}

double LevySpec::displacement(double t, RngStream& rng) const {
  return std::visit(overloaded{
                        [](const NoDrive&) { return 0.0; },
                        [&](const BrownianDrive& b) {
                          return std::sqrt(b.sigma2 * t) * standard_normal(rng);
                        },
                        [&](const CompoundPoissonDrive& c) {
                          const auto n = poisson(rng, c.lambda * t);
                          double sum = 0.0;
                          for (std::uint64_t i = 0; i < n; ++i) sum += c.jumps.sample(rng);
                          return sum;
                        },
                    },
                    kind_);
}

}  // namespace twave
