#include "ihom/analytic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ihom/errors.hpp"
#include "ihom/homogenize.hpp"
#include "ihom/parallel.hpp"
#include "ihom/rng.hpp"
#include "ihom/stats.hpp"

namespace ihom {

// ---------------------------------------------------------------------------
// Scale function and exit probabilities

ScaleFunction::ScaleFunction(const DriftSpec& spec, double eps) : eps_(eps), integral_(spec, -1) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
}

double scale(const DriftSpec& spec, double eps, double x) { return ScaleFunction(spec, eps)(x); }

double exit_probability(const DriftSpec& spec, double eps, double x, double a, double b) {
  if (!(a < x && x < b)) throw DomainError("exit_probability needs a < x < b");
  const ScaleFunction s(spec, eps);
  const double sa = s(a);
  return (s(x) - sa) / (s(b) - sa);
}

ExitRateFit exit_rate_fit(const DriftSpec& spec, double x_scaled, std::vector<double> eps_grid) {
  if (eps_grid.size() < 3) throw DomainError("exit_rate_fit needs at least three eps values");
  ExitRateFit out;
  out.target = homogenized_params(spec).p_plus;
  out.eps = std::move(eps_grid);
  out.delta.resize(out.eps.size());
  out.probability.resize(out.eps.size());
  std::vector<double> err(out.eps.size());
  bool exact = true;
  for (std::size_t i = 0; i < out.eps.size(); ++i) {
    const double eps = out.eps[i];
    const double delta = std::sqrt(eps);
    out.delta[i] = delta;
    out.probability[i] = exit_probability(spec, eps, x_scaled * eps, -delta, delta);
    err[i] = std::abs(out.probability[i] - out.target);
    exact = exact && err[i] <= 1e-12;
  }
  if (exact) {
    out.exact = true;
    out.limit = out.probability.back();
    return out;
  }
  const auto fit = fit_rate(out.eps, err);
  out.alpha = fit.slope;
  std::vector<double> powers(out.eps.size());
  for (std::size_t i = 0; i < out.eps.size(); ++i) powers[i] = std::pow(out.eps[i], out.alpha);
  out.limit = linear_fit(powers, out.probability).first;
  return out;
}

// ---------------------------------------------------------------------------
// Resolvent

ResolventSolution::ResolventSolution(double eps, double delta, double lambda)
    : eps_(eps), delta_(delta), lambda_(lambda) {
  if (!(eps > 0.0 && delta > eps)) throw DomainError("resolvent needs 0 < eps < delta");
  if (!(lambda > 0.0)) throw DomainError("resolvent needs lambda > 0");
  r_ = std::sqrt(2.0 * lambda);
  const double root = std::sqrt(1.0 / (eps * eps) + 2.0 * lambda);
  gamma1_ = root + 1.0 / eps;
  // root - 1/ε without cancellation
  gamma2_ = 2.0 * lambda / (root + 1.0 / eps);

  const double E = std::exp(-r_ * (delta - eps));
  const double g1 = std::exp(gamma1_ * eps);
  const double g2 = std::exp(-gamma2_ * eps);
  Eigen::Matrix<double, 5, 5> M;
  Eigen::Matrix<double, 5, 1> rhs;
  // unknowns: b0, a1, b1, a2, b2
  M << 0, 0, 0, gamma1_, -gamma2_,                  //
      0, -E, -1, g1, g2,                            //
      0, -r_ * E, r_, gamma1_ * g1, -gamma2_ * g2,  //
      -1, 1, E, 0, 0,                               //
      r_, r_, -r_ * E, 0, 0;
  rhs << 0, 0, 0, -1.0 / lambda, 0;
  for (int i = 0; i < 5; ++i) {
    const double s = M.row(i).cwiseAbs().maxCoeff();
    M.row(i) /= s;
    rhs(i) /= s;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd{M});
  const Eigen::VectorXd sv = svd.singularValues();
  cond_ = sv(4) > 0.0 ? sv(0) / sv(4) : INFINITY;
  if (!(cond_ <= 1e12)) {
    throw SingularSystem("resolvent matching matrix has condition number " +
                         std::to_string(cond_));
  }
  const Eigen::Matrix<double, 5, 1> u = M.fullPivLu().solve(rhs);
  for (int i = 0; i < 5; ++i) scaled_[i] = u(i);
  coef_ = {u(0) * std::exp(r_ * delta), u(1) * std::exp(-r_ * delta), u(2) * std::exp(r_ * eps),
           u(3) / (eps * eps), u(4)};

  auto rel = [](double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s > 0.0 ? std::abs(a - b) / s : 0.0;
  };
  for (int order = 0; order < 2; ++order) {
    matching_residual_ = std::max(
        {matching_residual_, rel(eval(eps, order, Piece::inner), eval(eps, order, Piece::middle)),
         rel(eval(delta, order, Piece::middle), eval(delta, order, Piece::outer))});
  }

  constexpr int kPoints = 1000;
  const double outer_end = delta + 40.0 / r_;
  const std::array<std::pair<double, double>, 3> pieces{
      {{0.0, eps}, {eps, delta}, {delta, outer_end}}};
  sup_ = std::abs((*this)(0.0));
  for (const auto& [lo, hi] : pieces) {
    for (int k = 0; k < kPoints; ++k) {
      const double x = lo + (hi - lo) * (k + 0.5) / kPoints;
      const double b = x <= eps ? -1.0 / eps : 0.0;
      const double f = (*this)(x);
      const double res = lambda * f - 0.5 * second_derivative(x) - b * derivative(x) -
                         (x < delta ? 1.0 : 0.0);
      ode_residual_ = std::max(ode_residual_, std::abs(res));
      sup_ = std::max(sup_, std::abs(f));
    }
  }
}

ResolventSolution::Piece ResolventSolution::piece(double x) const {
  if (x <= eps_) return Piece::inner;
  if (x <= delta_) return Piece::middle;
  return Piece::outer;
}

double ResolventSolution::eval(double x, int order, Piece p) const {
  const double base = order == 0 ? 1.0 / lambda_ : 0.0;
  auto term = [&](double c, double rate, double shift) {
    return c * std::pow(rate, order) * std::exp(rate * (x - shift));
  };
  switch (p) {
    case Piece::inner:
      return base + term(scaled_[3], gamma1_, 0.0) + term(scaled_[4], -gamma2_, 0.0);
    case Piece::middle:
      return base + term(scaled_[1], r_, delta_) + term(scaled_[2], -r_, eps_);
    case Piece::outer:
      return term(scaled_[0], -r_, delta_);
  }
  return 0.0;
}

double ResolventSolution::operator()(double x) const {
  const double a = std::abs(x);
  return eval(a, 0, piece(a));
}

double ResolventSolution::derivative(double x) const {
  const double a = std::abs(x);
  const double d = eval(a, 1, piece(a));
  return x < 0.0 ? -d : d;
}

double ResolventSolution::second_derivative(double x) const {
  const double a = std::abs(x);
  return eval(a, 2, piece(a));
}

ResolventSolution resolvent_solve(double eps, double delta, double lambda) {
  return ResolventSolution(eps, delta, lambda);
}

std::array<double, 5> resolvent_lowest_order(double lambda) {
  const double s = -1.0 / (2.0 * lambda);
  return {0.0, s, s, s * lambda, 2.0 * s};
}

ResolventMC resolvent_mc_crosscheck(double eps, double delta, double lambda, std::size_t paths,
                                    std::uint64_t seed, double x0, unsigned workers) {
  if (!(eps > 0.0 && delta > eps)) throw DomainError("resolvent needs 0 < eps < delta");
  if (!(lambda > 0.0)) throw DomainError("resolvent needs lambda > 0");
  if (paths < 2) throw ConfigError("need at least two paths");
  const double horizon = std::log(1e6) / lambda;
  const double dt_min = eps * eps / 64.0;
  const double dt_max = 0.01;

  std::vector<double> values(paths);
  std::vector<std::uint64_t> steps(paths);
  parallel_for(paths, workers, [&](std::size_t i) {
    RandomStream rng(seed, StreamTag::resolvent, static_cast<std::uint32_t>(i));
    double x = x0;
    double t = 0.0;
    double discount = 1.0;
    CompensatedSum acc;
    std::uint64_t n = 0;
    while (t < horizon) {
      const double a = std::abs(x);
      const double d = std::min({a, std::abs(a - eps), std::abs(a - delta)});
      const double dt = std::min(std::clamp(d * d / 16.0, dt_min, dt_max), horizon - t);
      const double decay = std::exp(-lambda * dt);
      if (a < delta) acc.add(discount * (1.0 - decay) / lambda);
      const double b = (a > 0.0 && a <= eps) ? (x > 0.0 ? -1.0 : 1.0) / eps : 0.0;
      x += b * dt + std::sqrt(dt) * rng.normal();
      t += dt;
      discount *= decay;
      ++n;
    }
    values[i] = acc.value();
    steps[i] = n;
  });
  const auto m = mean_and_error(values);
  std::uint64_t total = 0;
  for (auto s : steps) total += s;
  return {m.mean, m.std_error, total};
}

}  // namespace ihom
