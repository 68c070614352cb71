#include "ihom/stats.hpp"

#include <algorithm>
#include <cmath>

#include "ihom/errors.hpp"

namespace ihom {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    correction_ += (sum_ - t) + x;
  } else {
    correction_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

MeanEstimate mean_and_error(std::span<const double> xs) {
  const auto n = xs.size();
  if (n == 0) return {};
  const double mean = compensated_sum(xs) / static_cast<double>(n);
  if (n == 1) return {mean, 0.0};
  CompensatedSum sq;
  for (double x : xs) sq.add((x - mean) * (x - mean));
  const double var = sq.value() / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical_value(std::size_t n, double alpha) {
  // c(α) = sqrt(-ln(α/2)/2)
  const double c = std::sqrt(-0.5 * std::log(0.5 * alpha));
  return c / std::sqrt(static_cast<double>(n));
}

std::pair<double, double> linear_fit(std::span<const double> xs, std::span<const double> ys) {
  const auto n = static_cast<double>(xs.size());
  const double mx = compensated_sum(xs) / n;
  const double my = compensated_sum(ys) / n;
  CompensatedSum sxy;
  CompensatedSum sxx;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy.add((xs[i] - mx) * (ys[i] - my));
    sxx.add((xs[i] - mx) * (xs[i] - mx));
  }
  if (sxx.value() == 0.0) throw DomainError("linear fit needs distinct abscissae");
  const double b = sxy.value() / sxx.value();
  return {my - b * mx, b};
}

RateFit fit_rate(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DomainError("fit_rate: size mismatch");
  if (xs.size() < 3) throw DomainError("fit_rate needs at least three points");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (ys[i] == 0.0) throw DegenerateFit("exact zero in rate data");
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw DomainError("fit_rate needs positive data");
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  const auto [a, b] = linear_fit(lx, ly);
  const double my = compensated_sum(ly) / static_cast<double>(ly.size());
  CompensatedSum ss_res;
  CompensatedSum ss_tot;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (a + b * lx[i]);
    ss_res.add(r * r);
    ss_tot.add((ly[i] - my) * (ly[i] - my));
  }
  const double r2 = ss_tot.value() > 0.0 ? 1.0 - ss_res.value() / ss_tot.value() : 1.0;
  return {b, a, r2};
}

}  // namespace ihom
