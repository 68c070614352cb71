#include "ihom/quadrature.hpp"

#include <numbers>

namespace ihom {
namespace {

struct Rule {
  std::array<double, GaussLegendre10::order> x{};
  std::array<double, GaussLegendre10::order> w{};

  Rule() {
    constexpr int n = GaussLegendre10::order;
    for (int i = 0; i < n; ++i) {
      // Newton iteration on P_n from the Chebyshev-like initial guess.
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = z;
        for (int k = 2; k <= n; ++k) {
          const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

const Rule& rule() {
  static const Rule r;
  return r;
}

}  // namespace

const std::array<double, GaussLegendre10::order>& GaussLegendre10::nodes() { return rule().x; }
const std::array<double, GaussLegendre10::order>& GaussLegendre10::weights() { return rule().w; }

}  // namespace ihom
