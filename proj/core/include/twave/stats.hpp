#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace twave::stats {

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;
  double stderr_mean = 0.0;
  std::size_t n = 0;
};

Summary summarize(std::span<const double> x);

/// Kolmogorov survival function Q(t) = P(K > t) = 2 sum (-1)^{k-1} e^{-2k^2 t^2}.
double kolmogorov_survival(double t);

/// Asymptotic two-sample KS critical value at significance alpha.
double ks_critical_two_sample(std::size_t n, std::size_t m, double alpha);
/// Asymptotic one-sample KS critical value.
double ks_critical_one_sample(std::size_t n, double alpha);

/// sup |F_n - G_m| for two samples. Both inputs must be sorted ascending.
double ks_two_sample_sorted(std::span<const double> a, std::span<const double> b);
/// Copies and sorts before comparing.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// sup |F_n - F| against a continuous reference CDF. Input must be sorted.
double ks_one_sample_sorted(std::span<const double> sorted,
                            const std::function<double(double)>& cdf);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double critical_value = 0.0;  // at alpha = 0.01
  bool pass = false;            // statistic below critical_value
};

KsResult ks_test_two_sample(std::span<const double> a, std::span<const double> b,
                            double alpha = 0.01);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Empirical p-quantile of a sorted sample (linear interpolation, type 7).
double quantile_sorted(std::span<const double> sorted, double p);

}  // namespace twave::stats
