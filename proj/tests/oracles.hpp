// Test-only oracles, independent of the library's discretization paths:
// Richardson-extrapolated derivatives of analytic functions, reference
// quadrature, and analytic map families used across the suites.
#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "hypsmap/maps.hpp"

namespace oracle {

using Fn = std::function<double(double)>;

/// Central difference with one Richardson step; ~1e-11 accurate for smooth f.
inline double derivative(const Fn& f, double x, double step = 1e-4) {
  auto d = [&](double hh) { return (f(x + hh) - f(x - hh)) / (2.0 * hh); };
  return (4.0 * d(step) - d(2.0 * step)) / 3.0;
}

inline double second_derivative(const Fn& f, double x, double step = 2e-4) {
  auto d = [&](double hh) {
    return (f(x + hh) - 2.0 * f(x) + f(x - hh)) / (hh * hh);
  };
  return (4.0 * d(step) - d(2.0 * step)) / 3.0;
}

/// Continuum radial operator d_rr + coth r d_r - m^2/sinh^2 r - V applied
/// to an analytic function at a point.
inline double radial_operator(const Fn& f, double r, int m, const Fn& V) {
  const double sh = std::sinh(r);
  double v = second_derivative(f, r) + std::cosh(r) / sh * derivative(f, r);
  v -= (double(m) * m / (sh * sh) + (V ? V(r) : 0.0)) * f(r);
  return v;
}

/// Composite Simpson reference quadrature (dense, independent of grid code).
inline double integrate(const Fn& f, double a, double b, int n = 200001) {
  if (n % 2 == 0) ++n;
  const double h = (b - a) / (n - 1);
  double s = f(a) + f(b);
  for (int i = 1; i < n - 1; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// --- analytic 1-equivariant map families ----------------------------------

/// Polar angle of Q_lambda: theta(r) = 2 atan(lambda tanh(r/2)).
inline Fn q_theta(double lambda) {
  return [lambda](double r) { return 2.0 * std::atan(lambda * std::tanh(0.5 * r)); };
}

/// Class-E_0 bump profile theta(r) = A r exp(-b r^2): theta(0) = 0,
/// theta(inf) = 0, odd in r (the regularity parity of a 1-equivariant map).
inline Fn bump_theta(double amplitude, double b) {
  return [amplitude, b](double r) { return amplitude * r * std::exp(-b * r * r); };
}

inline Fn sum_theta(Fn a, Fn b) {
  return [a = std::move(a), b = std::move(b)](double r) { return a(r) + b(r); };
}

/// Sample an analytic theta/phi pair onto a grid as a MapProfile.
inline hypsmap::MapProfile polar_map(const hypsmap::GridPtr& g, const Fn& theta,
                                     const Fn& phi = nullptr) {
  return hypsmap::make_polar_map(
      g, [&](double r) { return theta(r); },
      phi ? std::function<double(double)>([&](double r) { return phi(r); }) : nullptr);
}

/// Deterministic random E_0 bump map family for property-style tests.
struct MapSampler {
  std::mt19937_64 rng;
  explicit MapSampler(uint64_t seed) : rng(seed) {}

  Fn next_theta() {
    std::uniform_real_distribution<double> amp(0.1, 0.7), width(0.3, 0.8);
    return bump_theta(amp(rng), width(rng));
  }
  Fn next_phi() {
    std::uniform_real_distribution<double> amp(-0.5, 0.5), c(1.0, 3.0);
    const double a = amp(rng), cc = c(rng);
    return [a, cc](double r) { return a * std::exp(-(r - cc) * (r - cc)); };
  }
  hypsmap::MapProfile next_map(const hypsmap::GridPtr& g) {
    return polar_map(g, next_theta(), next_phi());
  }
};

}  // namespace oracle
