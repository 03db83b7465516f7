#include "twave/jump_law.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "twave/error.hpp"

namespace twave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << what << " must be a positive finite number (got " << v << ")";
    throw ValidationError(os.str());
  }
}

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 8> kGlNodes{
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights{
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

// Integral of x^order e^{theta x} over [a, b], split so each piece has
// |theta| * width <= 1.
double segment_moment(double a, double b, double theta, int order) {
  const int pieces = std::clamp(static_cast<int>(std::ceil(std::abs(theta) * (b - a))), 1, 4096);
  const double w = (b - a) / pieces;
  double total = 0.0;
  for (int p = 0; p < pieces; ++p) {
    const double lo = a + p * w;
    const double mid = lo + 0.5 * w;
    double s = 0.0;
    for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
      const double x = mid + 0.5 * w * kGlNodes[i];
      s += kGlWeights[i] * std::pow(x, order) * std::exp(theta * x);
    }
    total += 0.5 * w * s;
  }
  return total;
}

double parse_number(std::string_view s, std::string_view field) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("jumps: cannot parse " + std::string(field) + " from '" +
                          std::string(s) + "'");
  }
  return v;
}

}  // namespace

JumpLaw JumpLaw::exponential(double rate) {
  require_positive(rate, "jumps.rate");
  return JumpLaw(ExponentialJumps{rate});
}

JumpLaw JumpLaw::deterministic(double value) {
  require_positive(value, "jumps.value");
  return JumpLaw(DeterministicJumps{value});
}

JumpLaw JumpLaw::gamma(double shape, double rate) {
  require_positive(shape, "jumps.shape");
  require_positive(rate, "jumps.rate");
  return JumpLaw(GammaJumps{shape, rate});
}

JumpLaw JumpLaw::tabulated(std::vector<double> x, std::vector<double> cdf) {
  if (x.size() != cdf.size() || x.size() < 2) {
    throw ValidationError("jumps.x and jumps.cdf must have equal length >= 2");
  }
  if (x.front() < 0.0) throw ValidationError("jumps.x must be nonnegative");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw ValidationError("jumps.x must be strictly increasing");
    if (!(cdf[i] > cdf[i - 1])) throw ValidationError("jumps.cdf must be strictly increasing");
  }
  if (cdf.front() > 1e-12) throw ValidationError("jumps.cdf must start at 0 (<= 1e-12)");
  if (cdf.back() < 1.0 - 1e-12 || cdf.back() > 1.0 + 1e-12) {
    throw ValidationError("jumps.cdf must end at 1 (within 1e-12)");
  }
  cdf.front() = 0.0;
  cdf.back() = 1.0;
  return JumpLaw(TabulatedJumps{std::move(x), std::move(cdf)});
}

JumpLaw JumpLaw::parse(std::string_view spec) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = spec.find(':', start);
    parts.push_back(spec.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  const auto kind = parts.front();
  if ((kind == "exp" || kind == "exponential") && parts.size() == 2) {
    return exponential(parse_number(parts[1], "rate"));
  }
  if ((kind == "det" || kind == "deterministic") && parts.size() == 2) {
    return deterministic(parse_number(parts[1], "value"));
  }
  if (kind == "gamma" && parts.size() == 3) {
    return gamma(parse_number(parts[1], "shape"), parse_number(parts[2], "rate"));
  }
  throw ValidationError("jumps: unrecognised law '" + std::string(spec) +
                        "' (expected exp:RATE, det:VALUE or gamma:SHAPE:RATE)");
}

std::string JumpLaw::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const ExponentialJumps& j) { os << "exp:" << j.rate; },
                 [&](const DeterministicJumps& j) { os << "det:" << j.value; },
                 [&](const GammaJumps& j) { os << "gamma:" << j.shape << ':' << j.rate; },
                 [&](const TabulatedJumps& j) { os << "tabulated[" << j.x.size() << ']'; },
             },
             kind_);
  return os.str();
}

JumpLaw JumpLaw::scaled(double factor) const {
  require_positive(factor, "scale factor");
  return std::visit(overloaded{
                        [&](const ExponentialJumps& j) { return exponential(j.rate / factor); },
                        [&](const DeterministicJumps& j) { return deterministic(j.value * factor); },
                        [&](const GammaJumps& j) { return gamma(j.shape, j.rate / factor); },
                        [&](const TabulatedJumps& j) {
                          std::vector<double> x = j.x;
                          for (auto& v : x) v *= factor;
                          return tabulated(std::move(x), j.cdf);
                        },
                    },
                    kind_);
}

double JumpLaw::mean() const {
  return std::visit(overloaded{
                        [](const ExponentialJumps& j) { return 1.0 / j.rate; },
                        [](const DeterministicJumps& j) { return j.value; },
                        [](const GammaJumps& j) { return j.shape / j.rate; },
                        [](const TabulatedJumps& j) {
                          double m = 0.0;
                          for (std::size_t i = 1; i < j.x.size(); ++i) {
                            m += (j.cdf[i] - j.cdf[i - 1]) * 0.5 * (j.x[i] + j.x[i - 1]);
                          }
                          return m;
                        },
                    },
                    kind_);
}

double JumpLaw::theta_max() const {
  return std::visit(overloaded{
                        [](const ExponentialJumps& j) { return j.rate; },
                        [](const DeterministicJumps&) { return kInf; },
                        [](const GammaJumps& j) { return j.rate; },
                        [](const TabulatedJumps&) { return kInf; },
                    },
                    kind_);
}

double JumpLaw::support_max() const {
  return std::visit(overloaded{
                        [](const ExponentialJumps&) { return kInf; },
                        [](const DeterministicJumps& j) { return j.value; },
                        [](const GammaJumps&) { return kInf; },
                        [](const TabulatedJumps& j) { return j.x.back(); },
                    },
                    kind_);
}

double JumpLaw::mgf(double theta) const { return tilted_moment(theta, 0); }

double JumpLaw::tilted_moment(double theta, int order) const {
  if (order < 0 || order > 2) throw ValidationError("tilted_moment: order must be 0, 1 or 2");
  if (theta >= theta_max()) return kInf;
  return std::visit(
      overloaded{
          [&](const ExponentialJumps& j) {
            const double d = j.rate - theta;
            // E[X^n e^{theta X}] = n! r / (r - theta)^{n+1}
            const double fact = order == 2 ? 2.0 : 1.0;
            return fact * j.rate / std::pow(d, order + 1);
          },
          [&](const DeterministicJumps& j) {
            return std::pow(j.value, order) * std::exp(theta * j.value);
          },
          [&](const GammaJumps& j) {
            const double base = 1.0 - theta / j.rate;
            double coef = 1.0;
            for (int i = 0; i < order; ++i) coef *= (j.shape + i) / j.rate;
            return coef * std::pow(base, -(j.shape + order));
          },
          [&](const TabulatedJumps& j) {
            double total = 0.0;
            for (std::size_t i = 1; i < j.x.size(); ++i) {
              const double density = (j.cdf[i] - j.cdf[i - 1]) / (j.x[i] - j.x[i - 1]);
              total += density * segment_moment(j.x[i - 1], j.x[i], theta, order);
            }
            return total;
          },
      },
      kind_);
}

double JumpLaw::cdf(double x) const {
  if (x < 0.0) return 0.0;
  return std::visit(
      overloaded{
          [&](const ExponentialJumps& j) { return -std::expm1(-j.rate * x); },
          [&](const DeterministicJumps& j) { return x >= j.value ? 1.0 : 0.0; },
          [&](const GammaJumps& j) { return boost::math::gamma_p(j.shape, j.rate * x); },
          [&](const TabulatedJumps& j) {
            if (x <= j.x.front()) return 0.0;
            if (x >= j.x.back()) return 1.0;
            const auto it = std::upper_bound(j.x.begin(), j.x.end(), x);
            const auto i = static_cast<std::size_t>(it - j.x.begin());
            const double t = (x - j.x[i - 1]) / (j.x[i] - j.x[i - 1]);
            return j.cdf[i - 1] + t * (j.cdf[i] - j.cdf[i - 1]);
          },
      },
      kind_);
}

double JumpLaw::stop_loss(double x) const {
  if (x < 0.0) return mean() - x;
  return std::visit(
      overloaded{
          [&](const ExponentialJumps& j) { return std::exp(-j.rate * x) / j.rate; },
          [&](const DeterministicJumps& j) { return std::max(0.0, j.value - x); },
          [&](const GammaJumps& j) {
            const double z = j.rate * x;
            const double v = j.shape / j.rate * boost::math::gamma_q(j.shape + 1.0, z) -
                             x * boost::math::gamma_q(j.shape, z);
            return std::max(0.0, v);
          },
          [&](const TabulatedJumps& j) {
            // The survival function is piecewise linear, so the trapezoid rule
            // is exact segment by segment.
            if (x >= j.x.back()) return 0.0;
            double total = 0.0;
            double left = std::max(x, 0.0);
            if (left < j.x.front()) total += j.x.front() - left;
            for (std::size_t i = 1; i < j.x.size(); ++i) {
              const double a = std::max(left, j.x[i - 1]);
              const double b = j.x[i];
              if (b <= a) continue;
              total += 0.5 * (b - a) * ((1.0 - cdf(a)) + (1.0 - j.cdf[i]));
            }
            return total;
          },
      },
      kind_);
}

double JumpLaw::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile: p must lie in [0, 1]");
  return std::visit(
      overloaded{
          [&](const ExponentialJumps& j) { return -std::log1p(-p) / j.rate; },
          [&](const DeterministicJumps& j) { return j.value; },
          [&](const GammaJumps& j) {
            if (p >= 1.0) return kInf;
            return boost::math::gamma_p_inv(j.shape, p) / j.rate;
          },
          [&](const TabulatedJumps& j) {
            if (p <= 0.0) return j.x.front();
            if (p >= 1.0) return j.x.back();
            const auto it = std::upper_bound(j.cdf.begin(), j.cdf.end(), p);
            const auto i = static_cast<std::size_t>(it - j.cdf.begin());
            const double t = (p - j.cdf[i - 1]) / (j.cdf[i] - j.cdf[i - 1]);
            return j.x[i - 1] + t * (j.x[i] - j.x[i - 1]);
          },
      },
      kind_);
}

double JumpLaw::sample(RngStream& rng) const {
  return std::visit(overloaded{
                        [&](const ExponentialJumps& j) { return twave::exponential(rng, j.rate); },
                        [&](const DeterministicJumps& j) { return j.value; },
                        [&](const GammaJumps& j) { return gamma_variate(rng, j.shape, j.rate); },
                        [&](const TabulatedJumps&) { return quantile(uniform01(rng)); },
                    },
                    kind_);
}

// ---------------------------------------------------------------------------

IntegratedTail::IntegratedTail(JumpLaw law) : law_(std::move(law)), mean_(law_.mean()) {
  if (!(mean_ > 0.0) || !std::isfinite(mean_)) {
    throw NumericalError("integrated tail undefined");
  }
  if (std::holds_alternative<ExponentialJumps>(law_.kind())) {
    mode_ = Mode::Exponential;
    return;
  }
  if (std::holds_alternative<DeterministicJumps>(law_.kind())) {
    mode_ = Mode::Uniform;
    return;
  }
  mode_ = Mode::Grid;
  double top = law_.support_max();
  if (!std::isfinite(top)) {
    // 0.999 quantile of the integrated tail: stop_loss(x) / mean = 1e-3.
    double lo = 0.0, hi = std::max(1.0, mean_);
    while (law_.stop_loss(hi) / mean_ > 1e-3) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (law_.stop_loss(mid) / mean_ > 1e-3) lo = mid; else hi = mid;
    }
    top = hi;
  }
  x_grid_.resize(kGridSize);
  cdf_grid_.resize(kGridSize);
  for (int i = 0; i < kGridSize; ++i) {
    const double x = top * i / (kGridSize - 1);
    x_grid_[i] = x;
    cdf_grid_[i] = std::clamp(1.0 - law_.stop_loss(x) / mean_, 0.0, 1.0);
  }
  const double tail_mass = law_.stop_loss(top);
  tail_hazard_ = tail_mass > 0.0 ? law_.survival(top) / tail_mass : 0.0;
}

double IntegratedTail::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  switch (mode_) {
    case Mode::Exponential:
      return -std::expm1(-std::get<ExponentialJumps>(law_.kind()).rate * x);
    case Mode::Uniform:
      return std::min(1.0, x / std::get<DeterministicJumps>(law_.kind()).value);
    case Mode::Grid:
      break;
  }
  return std::clamp(1.0 - law_.stop_loss(x) / mean_, 0.0, 1.0);
}

double IntegratedTail::tilted_laplace(double s, int order) const {
  if (order < 0 || order > 2) throw ValidationError("tilted_laplace: order must be 0, 1 or 2");
  if (s < 0.0) throw ValidationError("tilted_laplace: s must be nonnegative");
  if (mode_ == Mode::Exponential) {
    const double r = std::get<ExponentialJumps>(law_.kind()).rate;
    const double fact = order == 2 ? 2.0 : 1.0;
    return fact * r / std::pow(r + s, order + 1);
  }
  if (s < 1e-6) {
    // Series limit: E[Xbar^n] = E[X^{n+1}] / ((n+1) mean); first order in s.
    const double m1 = law_.tilted_moment(0.0, 1);
    const double m2 = law_.tilted_moment(0.0, 2);
    if (order == 0) return 1.0 - s * m2 / (2.0 * m1);
    if (order == 1) return m2 / (2.0 * m1);
  }
  // g(s) = (1 - L(s)) / (mean s) with L the Laplace transform of X.
  const double n0 = 1.0 - law_.laplace(s);
  const double m1 = law_.tilted_moment(-s, 1);
  const double m2 = law_.tilted_moment(-s, 2);
  switch (order) {
    case 0:
      return n0 / (mean_ * s);
    case 1:
      return (n0 - s * m1) / (mean_ * s * s);
    default:
      return (2.0 * n0 - 2.0 * s * m1 - s * s * m2) / (mean_ * s * s * s);
  }
}

double IntegratedTail::sample(RngStream& rng) const {
  switch (mode_) {
    case Mode::Exponential:
      return exponential(rng, std::get<ExponentialJumps>(law_.kind()).rate);
    case Mode::Uniform:
      return uniform01(rng) * std::get<DeterministicJumps>(law_.kind()).value;
    case Mode::Grid:
      break;
  }
  const double u = uniform01(rng);
  const double top_cdf = cdf_grid_.back();
  if (u >= top_cdf) {
    if (tail_hazard_ <= 0.0 || top_cdf >= 1.0) return x_grid_.back();
    return x_grid_.back() - std::log((1.0 - u) / (1.0 - top_cdf)) / tail_hazard_;
  }
  const auto it = std::upper_bound(cdf_grid_.begin(), cdf_grid_.end(), u);
  const auto i = static_cast<std::size_t>(it - cdf_grid_.begin());
  const double c0 = cdf_grid_[i - 1], c1 = cdf_grid_[i];
  const double t = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
  return x_grid_[i - 1] + t * (x_grid_[i] - x_grid_[i - 1]);
}

IntegratedTail integrated_tail(const JumpLaw& law) { return IntegratedTail(law); }

}  // namespace twave
