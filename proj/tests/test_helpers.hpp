#pragma once

#include <random>

#include "ihom/drift_model.hpp"

namespace ihom::testing {

inline DriftSpec asymmetric_spec() { return DriftSpec(PeriodicDrift{}, PeriodicDrift::sine(1.0)); }

inline DriftSpec symmetric_spec() {
  return DriftSpec(PeriodicDrift::sine(1.0), PeriodicDrift::sine(1.0));
}

/// β = 1 sine on both sides with a vanishing interface, i.e. the periodic drift.
inline DriftSpec periodic_spec() {
  return DriftSpec(PeriodicDrift::sine(1.0), PeriodicDrift::sine(1.0), 1e-6);
}

/// Random centred Fourier drift with up to four modes and sup|b| of order 2π.
inline PeriodicDrift random_drift(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> modes(1, 4);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const int n = modes(gen);
  std::vector<double> s(n);
  std::vector<double> c(n);
  for (int k = 0; k < n; ++k) {
    s[k] = 4.0 * coef(gen) / (k + 1);
    c[k] = 4.0 * coef(gen) / (k + 1);
  }
  return PeriodicDrift(s, c);
}

}  // namespace ihom::testing
