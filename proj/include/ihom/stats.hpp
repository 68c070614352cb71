#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ihom {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

double compensated_sum(std::span<const double> xs);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean with the standard error s/√n (reduced in index order).
MeanEstimate mean_and_error(std::span<const double> xs);

/// sup_y |F_n(y) - F(y)| for the empirical CDF of `samples`.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Two-sample statistic sup |F_n - G_m|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Asymptotic one-sample critical value c(α)/√n (c = 1.628 at α = 0.01).
double ks_critical_value(std::size_t n, double alpha = 0.01);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};

/// Least squares fit of log y = intercept + slope·log x. Needs ≥ 3 positive
/// points; any exact zero raises DegenerateFit.
RateFit fit_rate(std::span<const double> xs, std::span<const double> ys);

/// Ordinary least squares y = a + b x; returns (a, b).
std::pair<double, double> linear_fit(std::span<const double> xs, std::span<const double> ys);

}  // namespace ihom
