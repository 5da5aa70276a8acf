// Equivariant map profiles into the sphere: soliton family, energy,
// tension field and the Schrodinger-map right-hand side.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "hypsmap/grid.hpp"
#include "hypsmap/vec3.hpp"

namespace hypsmap {

// Radial profile u(r) of the 1-equivariant map e^{m theta R} u(r); unit
// norm at every node.  Only m = 1 is exercised by the validated paths.
struct MapProfile {
  GridPtr grid;
  std::vector<Vec3> u;
  int m = 1;
};

/// Tangent vector field along a map (houses tension and J tau values).
struct TangentField {
  GridPtr grid;
  std::vector<Vec3> xi;
};

namespace stencil {

// Centered first derivative, one-sided second order at both ends.
template <class T>
std::vector<T> d1(const std::vector<T>& f, double h) {
  const size_t n = f.size();
  std::vector<T> out(n);
  out[0] = (f[0] * -3.0 + f[1] * 4.0 - f[2]) * (1.0 / (2.0 * h));
  for (size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) * (1.0 / (2.0 * h));
  out[n - 1] = (f[n - 1] * 3.0 - f[n - 2] * 4.0 + f[n - 3]) * (1.0 / (2.0 * h));
  return out;
}

// Centered second derivative, one-sided second order (4-point) at ends.
template <class T>
std::vector<T> d2(const std::vector<T>& f, double h) {
  const size_t n = f.size();
  const double ih2 = 1.0 / (h * h);
  std::vector<T> out(n);
  out[0] = (f[0] * 2.0 - f[1] * 5.0 + f[2] * 4.0 - f[3]) * ih2;
  for (size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i] * 2.0 + f[i - 1]) * ih2;
  out[n - 1] = (f[n - 1] * 2.0 - f[n - 2] * 5.0 + f[n - 3] * 4.0 - f[n - 4]) * ih2;
  return out;
}

}  // namespace stencil

// Profile continued through the axis: u(-r) = e^{m pi R} u(r), i.e. the
// equatorial components flip sign for odd m.  Feeding this ghost to the
// first-node centered stencil keeps the truncation error smooth up to the
// axis; a one-sided stencil there leaves an error kink that downstream
// 1/sinh^2-weighted quantities amplify to O(1).
inline Vec3 axis_ghost(const MapProfile& u) {
  const Vec3& f = u.u[0];
  const double s = (u.m % 2 == 0) ? 1.0 : -1.0;
  return {s * f.x, s * f.y, f.z};
}

/// Radial derivative of the profile at every node (equivariant reflection
/// at the inner node, one-sided second order at the outer node).
inline std::vector<Vec3> map_derivative(const MapProfile& u) {
  auto out = stencil::d1(u.u, u.grid->h);
  out[0] = (u.u[1] - axis_ghost(u)) * (1.0 / (2.0 * u.grid->h));
  return out;
}

/// Normalize raw vectors onto the sphere; rejects zero vectors.
inline MapProfile normalize(GridPtr g, std::vector<Vec3> raw, int m = 1) {
  detail::check_len(raw.size(), *g, "normalize");
  for (auto& v : raw) {
    const double n = norm(v);
    if (n < 1e-14) throw InvalidInput("normalize: zero vector in map data");
    v *= 1.0 / n;
  }
  return MapProfile{std::move(g), std::move(raw), m};
}

// Stationary soliton family: u = (2 L/(1+L^2), 0, (1-L^2)/(1+L^2)) with
// L = lambda tanh(r/2); exact unit norm by construction.
inline MapProfile q_lambda(double lambda, const GridPtr& g) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidInput("q_lambda: lambda must be >= 0");
  MapProfile u;
  u.grid = g;
  u.m = 1;
  u.u.resize(g->n_points);
  for (int i = 0; i < g->n_points; ++i) {
    const double L = lambda * std::tanh(0.5 * g->r[i]);
    const double den = 1.0 + L * L;
    u.u[i] = {2.0 * L / den, 0.0, (1.0 - L * L) / den};
  }
  return u;
}

/// Build a profile from polar angle theta(r) and azimuth phi(r):
/// u = (sin th cos ph, sin th sin ph, cos th).  theta(0)=0 keeps class E_0.
inline MapProfile make_polar_map(const GridPtr& g,
                                 const std::function<double(double)>& theta,
                                 const std::function<double(double)>& phi = nullptr) {
  MapProfile u;
  u.grid = g;
  u.m = 1;
  u.u.resize(g->n_points);
  for (int i = 0; i < g->n_points; ++i) {
    const double th = theta(g->r[i]);
    const double ph = phi ? phi(g->r[i]) : 0.0;
    u.u[i] = {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
  }
  return u;
}

/// Discrete energy E(u) = pi * int (|u'|^2 + m^2 (u1^2+u2^2)/sinh^2 r) sinh r dr.
inline double energy(const MapProfile& u) {
  const RadialGrid& g = *u.grid;
  const auto du = map_derivative(u);
  const double m2 = static_cast<double>(u.m) * u.m;
  double e = 0.0;
  for (int i = 0; i < g.n_points; ++i) {
    const double sh = std::sinh(g.r[i]);
    const double ang = (u.u[i].x * u.u[i].x + u.u[i].y * u.u[i].y) / (sh * sh);
    e += 0.5 * g.w[i] * (dot(du[i], du[i]) + m2 * ang);
  }
  return e;
}

namespace detail {

// Delta_m u: (d_rr + coth r d_r) componentwise, -m^2/sinh^2 r on the
// equatorial components.
inline std::vector<Vec3> laplacian_m(const MapProfile& u) {
  const RadialGrid& g = *u.grid;
  auto du = stencil::d1(u.u, g.h);
  auto ddu = stencil::d2(u.u, g.h);
  const Vec3 ghost = axis_ghost(u);
  du[0] = (u.u[1] - ghost) * (1.0 / (2.0 * g.h));
  ddu[0] = (u.u[1] - 2.0 * u.u[0] + ghost) * (1.0 / (g.h * g.h));
  const double m2 = static_cast<double>(u.m) * u.m;
  std::vector<Vec3> out(u.u.size());
  for (int i = 0; i < g.n_points; ++i) {
    const double sh = std::sinh(g.r[i]);
    const double coth = std::cosh(g.r[i]) / sh;
    Vec3 v = ddu[i] + coth * du[i];
    v.x -= m2 / (sh * sh) * u.u[i].x;
    v.y -= m2 / (sh * sh) * u.u[i].y;
    out[i] = v;
  }
  return out;
}

}  // namespace detail

/// Tension field tau(u) = Delta_m u + |du|^2_g u, projected tangentially
/// (removes the O(h^2) normal residue of the stencils).
inline TangentField tension(const MapProfile& u) {
  const RadialGrid& g = *u.grid;
  const auto du = map_derivative(u);
  auto lap = detail::laplacian_m(u);
  const double m2 = static_cast<double>(u.m) * u.m;
  TangentField out{u.grid, {}};
  out.xi.resize(u.u.size());
  for (int i = 0; i < g.n_points; ++i) {
    const double sh = std::sinh(g.r[i]);
    const double dens = dot(du[i], du[i]) +
                        m2 / (sh * sh) * (u.u[i].x * u.u[i].x + u.u[i].y * u.u[i].y);
    Vec3 t = lap[i] + dens * u.u[i];
    out.xi[i] = reject(t, u.u[i]);
  }
  return out;
}

/// Schrodinger-map right-hand side J tau(u) = u x Delta_m u (tangency is
/// automatic for the cross product).
inline TangentField schroedinger_rhs(const MapProfile& u) {
  auto lap = detail::laplacian_m(u);
  TangentField out{u.grid, {}};
  out.xi.resize(u.u.size());
  for (size_t i = 0; i < u.u.size(); ++i) out.xi[i] = cross(u.u[i], lap[i]);
  return out;
}

/// Largest deviation from the unit sphere (diagnostic).
inline double max_norm_defect(const MapProfile& u) {
  double d = 0.0;
  for (const auto& v : u.u) d = std::max(d, std::abs(norm(v) - 1.0));
  return d;
}

/// Sup of |xi| over the interior window (see grid.hpp interior_sup).
inline double interior_sup(const TangentField& f, double r_lo = 0.25,
                           double r_hi = -1.0) {
  const RadialGrid& g = *f.grid;
  if (r_hi < 0.0) r_hi = g.r_max - 1.0;
  double m = 0.0;
  for (size_t i = 0; i < f.xi.size(); ++i)
    if (g.r[i] >= r_lo && g.r[i] <= r_hi) m = std::max(m, norm(f.xi[i]));
  return m;
}

/// H^1-type distance between two profiles on the same grid:
/// (||d_r(u-v)||^2 + ||(u-v)/sinh r||^2)^(1/2) in the radial measure.
inline double map_h1_distance(const MapProfile& a, const MapProfile& b) {
  const RadialGrid& g = *a.grid;
  detail::check_len(b.u.size(), g, "map_h1_distance");
  std::vector<Vec3> diff(a.u.size());
  for (size_t i = 0; i < diff.size(); ++i) diff[i] = a.u[i] - b.u[i];
  const auto ddiff = stencil::d1(diff, g.h);
  double s = 0.0;
  for (int i = 0; i < g.n_points; ++i) {
    const double sh = std::sinh(g.r[i]);
    s += g.w[i] / (2.0 * kPi) * (dot(ddiff[i], ddiff[i]) + dot(diff[i], diff[i]) / (sh * sh));
  }
  return std::sqrt(s);
}

}  // namespace hypsmap
