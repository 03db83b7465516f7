#include "twave/waves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twave/error.hpp"
#include "twave/parallel.hpp"
#include "twave/rng.hpp"

namespace twave {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kWaveDomain = 0x77617665ULL;
constexpr std::uint64_t kSyncDomain = 0x73796e63ULL;
constexpr std::uint64_t kPow2Domain = 0x706f7732ULL;
constexpr std::uint64_t kEquivDomain = 0x65717576ULL;
constexpr std::size_t kChunk = 16384;

constexpr double kWindowLo = 1e-5;
constexpr double kWindowHi = 1e-2;

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be positive");
}

void check_xi(std::span<const double> xi) {
  if (xi.size() < kMinVerifySamples) {
    throw ValidationError("fixed-point verification needs at least 100000 samples");
  }
}

// h(x) and 1 - h(x), both to full relative precision.
struct Tails {
  double h;
  double one_minus_h;
};

Tails functional(double v, double gamma, double x, Orientation o) {
  if (o == Orientation::SyncRight) {
    const double e = std::exp(-v * std::exp(-gamma * x));
    return {-std::expm1(-v * std::exp(-gamma * x)), e};
  }
  const double arg = v * std::exp(gamma * x);
  return {std::exp(-arg), -std::expm1(-arg)};
}

struct LogFit {
  double slope = kNaN;
  double prefactor = kNaN;
  std::size_t points = 0;
};

LogFit fit_window(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> xs, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] >= kWindowLo && y[i] <= kWindowHi) {
      xs.push_back(x[i]);
      ly.push_back(std::log(y[i]));
    }
  }
  LogFit f;
  f.points = xs.size();
  if (xs.size() < 3) return f;
  const auto lf = stats::least_squares(xs, ly);
  f.slope = lf.slope;
  f.prefactor = std::exp(lf.intercept);
  return f;
}

}  // namespace

std::string to_string(Orientation o) {
  return o == Orientation::SyncRight ? "sync_right" : "power2";
}

Orientation parse_orientation(const std::string& s) {
  if (s == "sync_right" || s == "sync") return Orientation::SyncRight;
  if (s == "power2") return Orientation::Power2;
  throw ValidationError("orientation must be 'sync_right' or 'power2' (got '" + s + "')");
}

double WaveProfile::survival(double x) const {
  if (grid.empty()) throw ValidationError("wave profile has an empty grid");
  if (x < grid.front()) return 1.0;
  if (x > grid.back()) return 0.0;
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  if (it == grid.end()) return values.back();
  const auto i = static_cast<std::size_t>(it - grid.begin());
  if (i == 0) return values.front();
  const double t = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
  return values[i - 1] + t * (values[i] - values[i - 1]);
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (n < 2 || !(hi > lo)) throw ValidationError("grid needs lo < hi and at least 2 points");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

WaveProfile profile_eval(std::span<const double> pool, double gamma, Orientation orientation,
                         std::span<const double> grid, int workers) {
  check_gamma(gamma);
  if (pool.empty()) throw ValidationError("pool is empty");
  if (!std::is_sorted(grid.begin(), grid.end())) throw ValidationError("grid must be sorted");
  WaveProfile p;
  p.gamma = gamma;
  p.orientation = orientation;
  p.pool_size = pool.size();
  p.pool_mean = stats::summarize(pool).mean;
  p.grid.assign(grid.begin(), grid.end());
  p.values.assign(grid.size(), 0.0);
  p.stderr_values.assign(grid.size(), 0.0);
  const double m = static_cast<double>(pool.size());
  for_each_chunk(grid.size(), 1, workers, [&](std::size_t, std::size_t i, std::size_t) {
    double s1 = 0.0, s2 = 0.0;
    for (double v : pool) {
      const double h = functional(v, gamma, grid[i], orientation).h;
      s1 += h;
      s2 += h * h;
    }
    const double mean = s1 / m;
    p.values[i] = std::clamp(mean, 0.0, 1.0);
    p.stderr_values[i] = pool.size() > 1
                             ? std::sqrt(std::max(0.0, (s2 - m * mean * mean) / (m - 1.0)) / m)
                             : 0.0;
  });
  return p;
}

WaveSamples sample_wave(std::span<const double> pool, double gamma, Orientation orientation,
                        std::size_t n, std::uint64_t seed, int workers) {
  check_gamma(gamma);
  if (pool.empty()) throw ValidationError("pool is empty");
  if (std::all_of(pool.begin(), pool.end(), [](double v) { return !(v > 0.0); })) {
    throw NumericalError("pool has no positive samples");
  }
  WaveSamples out;
  out.xi.resize(n);
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<std::size_t> rejections(chunks, 0);
  const RngStream base(seed, mix64(kWaveDomain));
  const double sign = orientation == Orientation::SyncRight ? 1.0 : -1.0;
  for_each_chunk(n, kChunk, workers, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    RngStream rng = base.split(chunk);
    for (std::size_t i = begin; i < end; ++i) {
      double w = pool[uniform_index(rng, pool.size())];
      while (!(w > 0.0)) {
        ++rejections[chunk];
        w = pool[uniform_index(rng, pool.size())];
      }
      out.xi[i] = sign * (std::log(w) + gumbel(rng)) / gamma;
    }
  });
  for (auto r : rejections) out.zero_rejections += r;
  return out;
}

stats::KsResult verify_fixed_point_sync(std::span<const double> xi, const IncrementLaw& inc,
                                        std::uint64_t seed, int k, double rhs_shift) {
  check_xi(xi);
  if (inc.is_power2()) throw ValidationError("verify_fixed_point_sync needs a synchronisation increment");
  if (k < 2) throw ValidationError("k must be at least 2");
  std::vector<double> rhs(xi.size());
  RngStream rng(seed, mix64(kSyncDomain));
  for (auto& r : rhs) {
    double m = xi[uniform_index(rng, xi.size())];
    for (int j = 1; j < k; ++j) m = std::max(m, xi[uniform_index(rng, xi.size())]);
    r = m - inc.sample(rng) + rhs_shift;
  }
  return stats::ks_test_two_sample(xi, rhs);
}

stats::KsResult verify_fixed_point_power2(std::span<const double> xi, const JumpLaw& jumps,
                                          double sigma2, std::uint64_t seed, double rho) {
  check_xi(xi);
  if (!(sigma2 >= 0.0)) throw ValidationError("sigma2 must be nonnegative");
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  const double sigma = std::sqrt(sigma2);
  std::vector<double> rhs(xi.size());
  RngStream rng(seed, mix64(kPow2Domain));
  for (auto& r : rhs) {
    const double a = xi[uniform_index(rng, xi.size())];
    const double b = xi[uniform_index(rng, xi.size())];
    const double t = exponential(rng, 2.0 * rho);
    double v = a - rho * t;
    if (a <= b) v += jumps.sample(rng);
    if (sigma > 0.0) v += sigma * std::sqrt(t) * standard_normal(rng);
    r = v;
  }
  return stats::ks_test_two_sample(xi, rhs);
}

stats::KsResult verify_equivalence_power2(std::span<const double> xi, const JumpLaw& jumps,
                                          double sigma2, std::uint64_t seed, bool include_z) {
  check_xi(xi);
  if (!(sigma2 >= 0.0)) throw ValidationError("sigma2 must be nonnegative");
  const IntegratedTail tail = integrated_tail(jumps);
  const double sigma = std::sqrt(sigma2);
  const std::size_t n = xi.size();
  std::vector<double> jump_form(n), tail_form(n);
  RngStream rng(seed, mix64(kEquivDomain));
  for (std::size_t i = 0; i < n; ++i) {
    const double a = xi[uniform_index(rng, n)];
    const double b = xi[uniform_index(rng, n)];
    const double t = exponential(rng, 2.0);
    double v = a - t;
    if (a <= b) v += jumps.sample(rng);
    if (sigma > 0.0) v += sigma * std::sqrt(t) * standard_normal(rng);
    jump_form[i] = v;

    const double c = xi[uniform_index(rng, n)];
    const double d = xi[uniform_index(rng, n)];
    double u = std::min(c, d) + tail.sample(rng);
    if (include_z && sigma2 > 0.0) u += exponential(rng, 2.0 / sigma2);
    tail_form[i] = u;
  }
  return stats::ks_test_two_sample(jump_form, tail_form);
}

double density_at_zero(std::span<const double> pool) {
  if (pool.size() < 2) throw ValidationError("density estimate needs at least 2 samples");
  std::vector<double> sorted(pool.begin(), pool.end());
  std::sort(sorted.begin(), sorted.end());
  const auto s = stats::summarize(sorted);
  const double iqr = stats::quantile_sorted(sorted, 0.75) - stats::quantile_sorted(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(s.stddev, iqr / 1.34) : s.stddev;
  const double n = static_cast<double>(sorted.size());
  const double bw = 0.9 * spread * std::pow(n, -0.2);
  if (!(bw > 0.0)) throw NumericalError("density estimate: degenerate pool");
  // Gaussian kernel reflected at 0: f(0+) = 2 / (n bw) sum K(v / bw).
  constexpr double kInvSqrt2Pi = 0.3989422804014327;
  double sum = 0.0;
  for (double v : sorted) {
    const double z = v / bw;
    if (z > 8.0) break;
    sum += kInvSqrt2Pi * std::exp(-0.5 * z * z);
  }
  return 2.0 * sum / (n * bw);
}

TailFit tail_asymptotics(std::span<const double> pool, double gamma, Orientation orientation,
                         int workers) {
  check_gamma(gamma);
  if (pool.empty()) throw ValidationError("pool is empty");
  TailFit out;
  out.pool_mean = stats::summarize(pool).mean;
  if (!(out.pool_mean > 0.0)) throw NumericalError("insufficient tail resolution: pool mean is 0");
  out.density_at_zero = density_at_zero(pool);

  // Centre where the leading asymptote crosses 1, then span 24/gamma each way.
  const double sign = orientation == Orientation::SyncRight ? 1.0 : -1.0;
  const double x0 = sign * std::log(out.pool_mean) / gamma;
  const auto grid = linear_grid(x0 - 24.0 / gamma, x0 + 24.0 / gamma, 481);
  std::vector<double> h(grid.size()), g(grid.size());
  const double m = static_cast<double>(pool.size());
  for_each_chunk(grid.size(), 1, workers, [&](std::size_t, std::size_t i, std::size_t) {
    double sh = 0.0, sg = 0.0;
    for (double v : pool) {
      const auto t = functional(v, gamma, grid[i], orientation);
      sh += t.h;
      sg += t.one_minus_h;
    }
    h[i] = sh / m;
    g[i] = sg / m;
  });

  const LogFit right = fit_window(grid, h);
  const LogFit left = fit_window(grid, g);
  out.right_slope = right.slope;
  out.right_prefactor = right.prefactor;
  out.right_points = right.points;
  out.left_slope = left.slope;
  out.left_prefactor = left.prefactor;
  out.left_points = left.points;
  const std::size_t governed = orientation == Orientation::SyncRight ? right.points : left.points;
  if (governed < 3) throw NumericalError("insufficient tail resolution");
  return out;
}

}  // namespace twave
