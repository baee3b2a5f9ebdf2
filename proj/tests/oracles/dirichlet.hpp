#pragma once

// Spectral formulas for Brownian motion killed at ±1. Eigenfunctions
// sin(nπ(x+1)/2), eigenvalues n²π²/8. Written independently of the library.

#include <cmath>
#include <numbers>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

/// P_x[τ > t].
inline double survival(double x, double t, int terms = 200) {
  double s = 0.0;
  for (int j = 0; j < terms; ++j) {
    const double k = 2.0 * j + 1.0;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    s += 4.0 / (kPi * k) * sign * std::cos(k * kPi * x / 2.0) * std::exp(-k * k * kPi * kPi * t / 8.0);
  }
  return s;
}

/// Killed transition density p_t(x, y).
inline double density(double x, double y, double t, int terms = 200) {
  double s = 0.0;
  for (int n = 1; n <= terms; ++n) {
    const double e = std::exp(-n * n * kPi * kPi * t / 8.0);
    if (e < 1e-300) break;
    s += std::sin(n * kPi * (x + 1.0) / 2.0) * std::sin(n * kPi * (y + 1.0) / 2.0) * e;
  }
  return s;
}

/// Conditioned density of X_t given τ > t, from x.
inline double conditioned_density(double x, double y, double t) { return density(x, y, t) / survival(x, t); }

/// Quasi-stationary density (π/4) cos(πx/2).
inline double qsd_density(double x) { return kPi / 4.0 * std::cos(kPi * x / 2.0); }

/// Quasi-ergodic density cos²(πx/2) on (−1, 1).
inline double qed_density(double x) {
  const double c = std::cos(kPi * x / 2.0);
  return c * c;
}

/// Dirichlet QED under radius z: cos²(πx/(2z))/z.
inline double qed_density(double x, double z) {
  const double c = std::cos(kPi * x / (2.0 * z));
  return c * c / z;
}

}  // namespace oracle
