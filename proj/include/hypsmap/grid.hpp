// Staggered radial discretization of the hyperbolic plane, quadrature,
// norms and the discrete radial Schrodinger operator.
#pragma once

#include <algorithm>
#include <cmath>
#include <memory>

#include "hypsmap/common.hpp"

namespace hypsmap {

// Nodes r[i] = (i + 1/2) h stay clear of the coordinate singularity at
// r = 0; quadrature weights carry the hyperbolic area element.
struct RadialGrid {
  int n_points = 0;
  double h = 0.0;
  double r_max = 0.0;
  RVec r;  // node radii
  RVec w;  // w[i] = 2*pi*sinh(r[i])*h

  double sinh_r(int i) const { return w[static_cast<size_t>(i)] / (2.0 * kPi * h); }
};

using GridPtr = std::shared_ptr<const RadialGrid>;

inline GridPtr build_grid(int n_points, double r_max) {
  if (n_points < 16) throw InvalidInput("build_grid: n_points must be >= 16");
  if (!std::isfinite(r_max) || r_max <= 0.0)
    throw InvalidInput("build_grid: r_max must be finite and positive");
  auto g = std::make_shared<RadialGrid>();
  g->n_points = n_points;
  g->r_max = r_max;
  g->h = r_max / n_points;
  g->r.resize(n_points);
  g->w.resize(n_points);
  for (int i = 0; i < n_points; ++i) {
    g->r[i] = (i + 0.5) * g->h;
    g->w[i] = 2.0 * kPi * std::sinh(g->r[i]) * g->h;
  }
  return g;
}

namespace detail {
inline void check_len(size_t len, const RadialGrid& g, const char* who) {
  if (len != static_cast<size_t>(g.n_points))
    throw InvalidInput(std::string(who) + ": field length does not match grid");
}
}  // namespace detail

/// Hyperbolic-area L2 norm, (sum w_i |f_i|^2)^(1/2).
template <class Field>
double l2_norm(const Field& f, const RadialGrid& g) {
  detail::check_len(f.size(), g, "l2_norm");
  double s = 0.0;
  for (size_t i = 0; i < f.size(); ++i) s += g.w[i] * std::norm(Complex(f[i]));
  return std::sqrt(s);
}

/// L^p norm with the same measure (p = 4 is the one diagnostics need).
template <class Field>
double lp_norm(const Field& f, const RadialGrid& g, double p) {
  detail::check_len(f.size(), g, "lp_norm");
  double s = 0.0;
  for (size_t i = 0; i < f.size(); ++i)
    s += g.w[i] * std::pow(std::abs(Complex(f[i])), p);
  return std::pow(s, 1.0 / p);
}

// The gauge-sector identities (E = pi*||psi||^2, the ||psi|| < 2
// reconstruction hypothesis) are stated in the radial measure sinh r dr
// without the angular 2*pi.
template <class Field>
double l2_norm_radial(const Field& f, const RadialGrid& g) {
  return l2_norm(f, g) / std::sqrt(2.0 * kPi);
}

template <class Field>
double lp_norm_radial(const Field& f, const RadialGrid& g, double p) {
  return lp_norm(f, g, p) / std::pow(2.0 * kPi, 1.0 / p);
}

/// Weighted inner product <f, g>_w = sum w_i f_i conj(g_i).
inline Complex dot_w(const CVec& a, const CVec& b, const RadialGrid& g) {
  detail::check_len(a.size(), g, "dot_w");
  detail::check_len(b.size(), g, "dot_w");
  Complex s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += g.w[i] * a[i] * std::conj(b[i]);
  return s;
}

/// Sup norm over a fixed interior window [r_lo, r_hi]; used wherever a
/// stencil's one-sided/near-axis rows must be excluded from an O(h^2)
/// refinement measurement.
template <class Field>
double interior_sup(const Field& f, const RadialGrid& g, double r_lo = 0.25,
                    double r_hi = -1.0) {
  detail::check_len(f.size(), g, "interior_sup");
  if (r_hi < 0.0) r_hi = g.r_max - 1.0;
  double m = 0.0;
  for (size_t i = 0; i < f.size(); ++i)
    if (g.r[i] >= r_lo && g.r[i] <= r_hi)
      m = std::max(m, std::abs(Complex(f[i])));
  return m;
}

// Tridiagonal representation of  d_rr + coth r d_r - m^2/sinh^2 r - V(r)
// on the staggered grid, assembled in sinh-flux (conservative) form:
//
//   (L f)_i = [ sinh(r_{i+1/2}) (f_{i+1}-f_i) - sinh(r_{i-1/2}) (f_i-f_{i-1}) ]
//             / (h^2 sinh r_i)  -  (m^2/sinh^2 r_i + V_i) f_i.
//
// The inner flux at r = 0 vanishes identically (sinh 0 = 0), which is the
// staggered-grid regularity closure for both parities: odd fields (m >= 1)
// have f(0) = 0 and even fields (m = 0) have f'(0) = 0, so the continuum
// flux sinh(r) f'(r) -> 0 either way.  Outer boundary is homogeneous
// Dirichlet (f_n = 0).  The flux form is exactly symmetric with respect to
// the w-weighted inner product.
struct RadialOperator {
  RVec sub, diag, super;  // sub[0] and super[n-1] are unused (zero)
  int m = 0;
  GridPtr grid;
};

inline RadialOperator build_operator(const GridPtr& g, int m, const RVec& V) {
  if (m < 0) throw InvalidInput("build_operator: m must be >= 0");
  detail::check_len(V.size(), *g, "build_operator");
  for (double v : V)
    if (!std::isfinite(v)) throw InvalidInput("build_operator: V must be finite");
  const int n = g->n_points;
  const double h = g->h;
  RadialOperator op;
  op.m = m;
  op.grid = g;
  op.sub.assign(n, 0.0);
  op.diag.assign(n, 0.0);
  op.super.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double sr = std::sinh(g->r[i]);
    const double flux_lo = std::sinh(i * h);        // r_{i-1/2}
    const double flux_hi = std::sinh((i + 1) * h);  // r_{i+1/2}
    const double scale = 1.0 / (h * h * sr);
    if (i > 0) op.sub[i] = flux_lo * scale;
    if (i < n - 1) op.super[i] = flux_hi * scale;
    op.diag[i] = -(flux_lo + flux_hi) * scale;
    const double sh2 = sr * sr;
    op.diag[i] -= static_cast<double>(m) * m / sh2 + V[i];
  }
  return op;
}

template <class Field>
Field apply_operator(const RadialOperator& op, const Field& f) {
  detail::check_len(f.size(), *op.grid, "apply_operator");
  const int n = op.grid->n_points;
  Field out(f.size());
  for (int i = 0; i < n; ++i) {
    auto v = op.diag[i] * f[i];
    if (i > 0) v += op.sub[i] * f[i - 1];
    if (i < n - 1) v += op.super[i] * f[i + 1];
    out[i] = v;
  }
  return out;
}

/// Thomas solve of (diag_i) x = rhs for a complex tridiagonal system given
/// by arrays (sub, diag, super).  No pivoting; the Crank-Nicolson matrices
/// this backs are strictly diagonally dominant.
inline CVec solve_tridiagonal(const CVec& sub, const CVec& diag, const CVec& super,
                              const CVec& rhs) {
  const size_t n = diag.size();
  CVec c(n), d(n), x(n);
  Complex piv = diag[0];
  if (std::abs(piv) < 1e-300) throw NumericalFailure("tridiagonal solve: zero pivot", 0);
  c[0] = super[0] / piv;
  d[0] = rhs[0] / piv;
  for (size_t i = 1; i < n; ++i) {
    piv = diag[i] - sub[i] * c[i - 1];
    if (std::abs(piv) < 1e-300)
      throw NumericalFailure("tridiagonal solve: zero pivot", static_cast<double>(i));
    c[i] = super[i] / piv;
    d[i] = (rhs[i] - sub[i] * d[i - 1]) / piv;
  }
  x[n - 1] = d[n - 1];
  for (size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

}  // namespace hypsmap
