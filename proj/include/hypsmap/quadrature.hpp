// Quadrature building blocks for the kernel module: adaptive Simpson for
// endpoint-substituted near zones and a panelled 7-point Gauss rule with an
// embedded 3-point error estimate for oscillatory remainders.
#pragma once

#include <cmath>
#include <functional>

#include "hypsmap/common.hpp"

namespace hypsmap {

struct QuadResult {
  Complex value{0.0, 0.0};
  double est_error = 0.0;
  bool converged = true;
};

namespace detail {

template <class F>
void adaptive_simpson_rec(const F& f, double a, double b, Complex fa, Complex fm,
                          Complex fb, Complex whole, double tol, int depth,
                          QuadResult& out) {
  const double m = 0.5 * (a + b);
  const Complex flm = f(0.5 * (a + m));
  const Complex frm = f(0.5 * (m + b));
  const Complex left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const Complex right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const Complex delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    out.value += left + right + delta / 15.0;
    out.est_error += std::abs(delta) / 15.0;
    if (depth <= 0 && std::abs(delta) > 15.0 * tol) out.converged = false;
    return;
  }
  adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, out);
  adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, out);
}

}  // namespace detail

template <class F>
QuadResult adaptive_simpson(const F& f, double a, double b, double tol,
                            int max_depth = 28) {
  QuadResult out;
  if (a == b) return out;
  const Complex fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const Complex whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth, out);
  return out;
}

// 7-point Gauss-Legendre with embedded 3-point estimate.
inline constexpr double kGauss7X[7] = {
    -0.949107912342758524526189684047851, -0.741531185599394439863864773280788,
    -0.405845151377397166906606412076961, 0.0,
    0.405845151377397166906606412076961,  0.741531185599394439863864773280788,
    0.949107912342758524526189684047851};
inline constexpr double kGauss7W[7] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};
inline constexpr double kGauss3X[3] = {-0.774596669241483377035853079956480, 0.0,
                                       0.774596669241483377035853079956480};
inline constexpr double kGauss3W[3] = {0.555555555555555555555555555555556,
                                       0.888888888888888888888888888888889,
                                       0.555555555555555555555555555555556};

template <class F>
QuadResult gauss7_panel(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  Complex s7 = 0.0, s3 = 0.0;
  for (int k = 0; k < 7; ++k) s7 += kGauss7W[k] * f(c + hw * kGauss7X[k]);
  for (int k = 0; k < 3; ++k) s3 += kGauss3W[k] * f(c + hw * kGauss3X[k]);
  QuadResult out;
  out.value = hw * s7;
  out.est_error = std::abs(hw * (s7 - s3));
  return out;
}

/// Integrate f over [a, b] with panel widths chosen by `width_at(s)`.
template <class F, class W>
QuadResult panelled_integral(const F& f, double a, double b, const W& width_at) {
  QuadResult out;
  double s = a;
  while (s < b) {
    const double ds = std::min(width_at(s), b - s);
    const QuadResult p = gauss7_panel(f, s, s + ds);
    out.value += p.value;
    out.est_error += p.est_error;
    s += ds;
  }
  return out;
}

}  // namespace hypsmap
