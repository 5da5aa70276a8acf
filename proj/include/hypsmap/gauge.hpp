// Forward Coulomb-gauge transform: orthonormal frame along a map, the
// differentiated fields psi_1, psi_2, the variables psi+-, and the
// connection coefficients A_2, A_0.
#pragma once

#include <cmath>

#include "hypsmap/maps.hpp"
#include "hypsmap/ode.hpp"
#include "hypsmap/spline.hpp"

namespace hypsmap {

// Orthonormal tangent frame (v, w) along u with Coulomb condition
// d_r v . w = 0 and normalization (v, w) -> (i, j) at infinity.
struct Frame {
  GridPtr grid;
  std::vector<Vec3> v, w;
};

// psi+- are the primary fields; A_2, A_0 ride along.  psi_1, psi_2 are
// derived pointwise: psi_1 = (psi+ + psi-)/2, psi_2/sinh r = (psi+ - psi-)/(2i).
struct GaugeFields {
  GridPtr grid;
  CVec psi_plus, psi_minus;
  RVec a2;
  RVec a0;
};

inline CVec psi1_of(const GaugeFields& gf) {
  CVec out(gf.psi_plus.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = 0.5 * (gf.psi_plus[i] + gf.psi_minus[i]);
  return out;
}

inline CVec psi2_over_sinh_of(const GaugeFields& gf) {
  const Complex half_over_i{0.0, -0.5};  // 1/(2i)
  CVec out(gf.psi_plus.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = half_over_i * (gf.psi_plus[i] - gf.psi_minus[i]);
  return out;
}

inline CVec psi2_of(const GaugeFields& gf) {
  CVec out = psi2_over_sinh_of(gf);
  for (size_t i = 0; i < out.size(); ++i) out[i] *= std::sinh(gf.grid->r[i]);
  return out;
}

namespace detail {

// Forward cumulative integral int_0^{r_i} q ds on the staggered grid:
// midpoint rule on the full cells below node i plus the trailing half
// cell in a form exact for integrands vanishing linearly at the axis
// (every integrand here carries a sinh factor, so q(-r) = -q(r); the
// virtual q_{-1} = -q_0 closes the first half cell).  A right-endpoint
// rectangle there would double int_0^{r_0}, which the near-axis
// 1/sinh^2 r amplification of A_2 - 1 turns into an O(1) potential
// error at the first rows.
inline RVec cum_forward(const RVec& q, const RadialGrid& g) {
  RVec out(q.size());
  double acc = 0.0;
  for (size_t i = 0; i < q.size(); ++i) {
    const double q_prev = (i == 0) ? -q[0] : q[i - 1];
    out[i] = acc + g.h / 8.0 * (q_prev + 3.0 * q[i]);
    acc += g.h * q[i];
  }
  return out;
}

// Reverse cumulative integral int_{r_i}^{r_max} q ds (r_max plays
// infinity), with the matching half-cell closure.
inline RVec cum_reverse(const RVec& q, const RadialGrid& g) {
  RVec out(q.size());
  double acc = 0.0;
  for (size_t i = q.size(); i-- > 0;) {
    const double q_next = (i + 1 == q.size()) ? q[i] : q[i + 1];
    out[i] = acc + g.h / 8.0 * (3.0 * q[i] + q_next);
    acc += g.h * q[i];
  }
  return out;
}

inline void require_unit_sphere(const MapProfile& u, const char* who) {
  if (max_norm_defect(u) > 1e-9)
    throw InvalidInput(std::string(who) + ": map values are not on the unit sphere");
}

// v(r_max) = x-axis projected tangentially; for endpoints aligned with the
// x-axis (possible only outside class E_0) fall back to the y-axis.
inline Vec3 frame_hint_at(const Vec3& u_inf) {
  Vec3 v0 = reject(kXAxis, u_inf);
  if (norm(v0) < 0.1) v0 = reject(kYAxis, u_inf);
  return normalized(v0);
}

}  // namespace detail

/// Integrate the frame ODE d_r v = -(v . d_r u) u inward from r_max with
/// v(r_max) = (1,0,0) (projected tangentially), re-orthonormalizing against
/// u at every node; w = u x v.
inline Frame build_frame(const MapProfile& u) {
  detail::require_unit_sphere(u, "build_frame");
  const RadialGrid& g = *u.grid;
  RVec ux(g.n_points), uy(g.n_points), uz(g.n_points);
  for (int i = 0; i < g.n_points; ++i) {
    ux[i] = u.u[i].x;
    uy[i] = u.u[i].y;
    uz[i] = u.u[i].z;
  }
  const CubicSpline sx(g.r[0], g.h, ux), sy(g.r[0], g.h, uy), sz(g.r[0], g.h, uz);
  auto u_at = [&](double r) { return normalized(Vec3{sx(r), sy(r), sz(r)}); };
  auto du_at = [&](double r) {
    return Vec3{sx.derivative(r), sy.derivative(r), sz.derivative(r)};
  };
  auto rhs = [&](double r, const Vec3& v) { return -dot(v, du_at(r)) * u_at(r); };

  const Vec3 u_inf = u_at(g.r_max);
  const Vec3 v0 = detail::frame_hint_at(u_inf);

  Frame f{u.grid, {}, {}};
  f.v.resize(u.u.size());
  f.w.resize(u.u.size());
  auto post = [&](int i, Vec3& v) {
    const Vec3& un = u.u[static_cast<size_t>(i)];
    const double drift = std::abs(dot(v, un)) + std::abs(norm(v) - 1.0);
    if (drift > 1e-6)
      throw NumericalFailure("build_frame: orthonormality drift exceeds 1e-6", g.r[i]);
    v = normalized(reject(v, un));
    f.v[static_cast<size_t>(i)] = v;
    f.w[static_cast<size_t>(i)] = cross(un, v);
  };
  sweep_inward<Vec3>(g, v0, rhs, post);
  return f;
}

inline RVec a0_from_psi(const CVec& psi_plus, const CVec& psi_minus,
                        const RadialGrid& g);

/// Differentiated fields from a map and its frame:
/// psi_1 = d_r u . v + i d_r u . w,  psi_2 = w_3 - i v_3,  A_2 = u_3,
/// psi+- = psi_1 +- i psi_2 / sinh r, plus A_0 from the tail formula.
inline GaugeFields differentiate(const MapProfile& u, const Frame& f) {
  if (u.grid != f.grid) throw InvalidInput("differentiate: grid mismatch");
  detail::require_unit_sphere(u, "differentiate");
  const RadialGrid& g = *u.grid;
  const auto du = map_derivative(u);
  GaugeFields gf;
  gf.grid = u.grid;
  gf.psi_plus.resize(u.u.size());
  gf.psi_minus.resize(u.u.size());
  gf.a2.resize(u.u.size());
  for (int i = 0; i < g.n_points; ++i) {
    const Complex psi1{dot(du[i], f.v[i]), dot(du[i], f.w[i])};
    const Complex psi2{f.w[i].z, -f.v[i].z};
    const Complex ipsi2_over_sinh = Complex(0.0, 1.0) * psi2 / std::sinh(g.r[i]);
    gf.psi_plus[i] = psi1 + ipsi2_over_sinh;
    gf.psi_minus[i] = psi1 - ipsi2_over_sinh;
    gf.a2[i] = u.u[i].z;
  }
  gf.a0 = a0_from_psi(gf.psi_plus, gf.psi_minus, g);
  return gf;
}

/// A_0 = -1/2 Re(conj(psi+) psi-) + int_r^inf coth s Re(conj(psi+) psi-) ds.
inline RVec a0_from_psi(const CVec& psi_plus, const CVec& psi_minus,
                        const RadialGrid& g) {
  detail::check_len(psi_plus.size(), g, "a0_from_psi");
  detail::check_len(psi_minus.size(), g, "a0_from_psi");
  RVec cross_term(psi_plus.size()), integrand(psi_plus.size());
  for (size_t i = 0; i < psi_plus.size(); ++i) {
    cross_term[i] = std::real(std::conj(psi_plus[i]) * psi_minus[i]);
    integrand[i] = cross_term[i] * std::cosh(g.r[i]) / std::sinh(g.r[i]);
  }
  RVec tail = detail::cum_reverse(integrand, g);
  RVec out(psi_plus.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = -0.5 * cross_term[i] + tail[i];
  return out;
}

inline RVec a0_from_psi(const GaugeFields& gf) {
  return a0_from_psi(gf.psi_plus, gf.psi_minus, *gf.grid);
}

/// A_2 = 1 + int_0^r (|psi+|^2 - |psi-|^2)/4 sinh s ds.
inline RVec a2_from_psi(const CVec& psi_plus, const CVec& psi_minus,
                        const RadialGrid& g) {
  detail::check_len(psi_plus.size(), g, "a2_from_psi");
  detail::check_len(psi_minus.size(), g, "a2_from_psi");
  RVec q(psi_plus.size());
  for (size_t i = 0; i < q.size(); ++i)
    q[i] = 0.25 * (std::norm(psi_plus[i]) - std::norm(psi_minus[i])) *
           std::sinh(g.r[i]);
  RVec out = detail::cum_forward(q, g);
  for (double& v : out) v += 1.0;
  return out;
}

/// Time component of the flow in the frame:
/// psi_0 = i (d_r psi_1 + coth r psi_1 + i A_2 psi_2 / sinh^2 r).
/// Vanishes (to O(h^2)) exactly on harmonic maps.
inline CVec psi0(const GaugeFields& gf) {
  const RadialGrid& g = *gf.grid;
  const CVec psi1 = psi1_of(gf);
  const CVec psi2 = psi2_of(gf);
  const CVec dpsi1 = stencil::d1(psi1, g.h);
  CVec out(psi1.size());
  for (int i = 0; i < g.n_points; ++i) {
    const double sh = std::sinh(g.r[i]);
    const double coth = std::cosh(g.r[i]) / sh;
    out[i] = Complex(0.0, 1.0) *
             (dpsi1[i] + coth * psi1[i] +
              Complex(0.0, 1.0) * gf.a2[i] * psi2[i] / (sh * sh));
  }
  return out;
}

/// Gauge-sector mass ||psi||^2 in the radial measure (E(u) = pi * mass).
inline double gauge_mass(const CVec& psi, const RadialGrid& g) {
  const double n = l2_norm_radial(psi, g);
  return n * n;
}

/// Sup of |A_2^2 + |psi_2|^2 - 1| (the conservation law).
inline double conservation_defect(const GaugeFields& gf) {
  const CVec psi2 = psi2_of(gf);
  double d = 0.0;
  for (size_t i = 0; i < psi2.size(); ++i)
    d = std::max(d, std::abs(gf.a2[i] * gf.a2[i] + std::norm(psi2[i]) - 1.0));
  return d;
}

}  // namespace hypsmap
