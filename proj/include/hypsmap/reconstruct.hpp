// Inverse transform: from psi+ alone rebuild (A_2, psi_2), then the frame
// system U = (u, v, w), recovering the map.
#pragma once

#include <cmath>
#include <utility>

#include "hypsmap/gauge.hpp"
#include "hypsmap/maps.hpp"
#include "hypsmap/ode.hpp"
#include "hypsmap/spline.hpp"

namespace hypsmap {

struct A2Psi2 {
  RVec a2;
  CVec psi2;
};

// A_2 is recovered algebraically from |psi_2| (the conservation law holds
// exactly by construction); |psi_2| reaching 1 means the ||psi+|| < 2
// hypothesis is violated and is a structured failure, not a clamp.
inline A2Psi2 solve_a2_psi2(const CVec& psi_plus, const GridPtr& g) {
  detail::check_len(psi_plus.size(), *g, "solve_a2_psi2");
  const ComplexSpline sp(g->r[0], g->h, psi_plus);
  constexpr double kCollapse = 1e-10;
  auto a2_of = [&](const Complex& psi2, double r) {
    const double radicand = 1.0 - std::norm(psi2);
    if (radicand < kCollapse)
      throw NumericalFailure(
          "solve_a2_psi2: |psi_2| reached 1 (||psi+|| < 2 hypothesis violated)", r);
    return std::sqrt(std::min(1.0, radicand));
  };
  auto rhs = [&](double r, const Complex& psi2) {
    const double a2 = a2_of(psi2, r);
    return Complex(0.0, 1.0) * a2 * sp(r) + a2 * psi2 / std::sinh(r);
  };
  A2Psi2 out;
  out.a2.resize(psi_plus.size());
  out.psi2.resize(psi_plus.size());
  auto post = [&](int i, Complex& psi2) {
    out.psi2[static_cast<size_t>(i)] = psi2;
    out.a2[static_cast<size_t>(i)] = a2_of(psi2, g->r[i]);
  };
  sweep_inward<Complex>(*g, Complex(0.0, 0.0), rhs, post);
  return out;
}

/// Residual of the discarded d_r A_2 equation (diagnostic only):
/// L2 norm of d_r A_2 - Im(psi+ conj(psi_2)) + |psi_2|^2 / sinh r.
inline double a2_ode_residual(const A2Psi2& s, const CVec& psi_plus,
                              const RadialGrid& g) {
  const RVec da2 = stencil::d1(s.a2, g.h);
  RVec res(s.a2.size());
  for (size_t i = 0; i < res.size(); ++i) {
    const double rhs = std::imag(psi_plus[i] * std::conj(s.psi2[i])) -
                       std::norm(s.psi2[i]) / std::sinh(g.r[i]);
    res[i] = da2[i] - rhs;
  }
  return l2_norm(res, g);
}

/// psi- = psi+ - 2 i psi_2 / sinh r.
inline CVec psi_minus_of(const CVec& psi_plus, const CVec& psi2, const RadialGrid& g) {
  detail::check_len(psi_plus.size(), g, "psi_minus_of");
  detail::check_len(psi2.size(), g, "psi_minus_of");
  CVec out(psi_plus.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = psi_plus[i] - Complex(0.0, 2.0) * psi2[i] / std::sinh(g.r[i]);
  return out;
}

/// Boundary data for the frame-system sweep at r_max.  The canonical choice
/// ((0,0,1),(1,0,0),(0,1,0)) is the class-E_0 normalization at infinity.
struct FrameBoundary {
  Vec3 u = kNorthPole;
  Vec3 v = kXAxis;
  Vec3 w = kYAxis;
};

/// The boundary triple an inward frame sweep over `u` actually starts from
/// (u at r_max from its spline, v = x-axis projected tangentially).  Equals
/// the canonical boundary for class-E_0 maps; lets round trips be run on
/// maps whose endpoint at infinity is not the north pole.
inline FrameBoundary frame_boundary_of(const MapProfile& u) {
  const RadialGrid& g = *u.grid;
  RVec ux(g.n_points), uy(g.n_points), uz(g.n_points);
  for (int i = 0; i < g.n_points; ++i) {
    ux[i] = u.u[i].x;
    uy[i] = u.u[i].y;
    uz[i] = u.u[i].z;
  }
  const CubicSpline sx(g.r[0], g.h, ux), sy(g.r[0], g.h, uy), sz(g.r[0], g.h, uz);
  FrameBoundary b;
  b.u = normalized(Vec3{sx(g.r_max), sy(g.r_max), sz(g.r_max)});
  b.v = detail::frame_hint_at(b.u);
  b.w = cross(b.u, b.v);
  return b;
}

namespace detail {

struct FrameState {
  Vec3 u, v, w;
  FrameState operator+(const FrameState& o) const {
    return {u + o.u, v + o.v, w + o.w};
  }
};
inline FrameState operator*(double s, const FrameState& f) {
  return {s * f.u, s * f.v, s * f.w};
}

}  // namespace detail

struct FrameSystemResult {
  MapProfile u;
  Frame f;
  double a2_consistency = 0.0;  // sup |u_3 - A_2 input|
};

/// Integrate d_r (u,v,w) = M(psi_1) (u,v,w) inward with per-node
/// re-orthonormalization; drift beyond 1e-6 before correction is a
/// structured error.
inline FrameSystemResult solve_frame_system(const CVec& psi1, const RVec& a2,
                                            const CVec& psi2, const GridPtr& g,
                                            const FrameBoundary& boundary = {}) {
  detail::check_len(psi1.size(), *g, "solve_frame_system");
  detail::check_len(a2.size(), *g, "solve_frame_system");
  detail::check_len(psi2.size(), *g, "solve_frame_system");
  const ComplexSpline sp(g->r[0], g->h, psi1);
  auto rhs = [&](double r, const detail::FrameState& s) {
    const Complex p = sp(r);
    const double re = p.real(), im = p.imag();
    return detail::FrameState{re * s.v + im * s.w, -re * s.u, -im * s.u};
  };
  FrameSystemResult out;
  out.u.grid = g;
  out.u.m = 1;
  out.u.u.resize(psi1.size());
  out.f.grid = g;
  out.f.v.resize(psi1.size());
  out.f.w.resize(psi1.size());
  auto post = [&](int i, detail::FrameState& s) {
    const double drift = std::abs(dot(s.u, s.v)) + std::abs(dot(s.u, s.w)) +
                         std::abs(dot(s.v, s.w)) + std::abs(norm(s.u) - 1.0) +
                         std::abs(norm(s.v) - 1.0) + std::abs(norm(s.w) - 1.0);
    if (drift > 1e-6)
      throw NumericalFailure("solve_frame_system: orthogonality drift exceeds 1e-6",
                             g->r[i]);
    s.u = normalized(s.u);
    s.v = normalized(reject(s.v, s.u));
    s.w = cross(s.u, s.v);
    const size_t k = static_cast<size_t>(i);
    out.u.u[k] = s.u;
    out.f.v[k] = s.v;
    out.f.w[k] = s.w;
    out.a2_consistency = std::max(out.a2_consistency, std::abs(s.u.z - a2[k]));
  };
  sweep_inward<detail::FrameState>(
      *g, detail::FrameState{boundary.u, boundary.v, boundary.w}, rhs, post);
  return out;
}

struct ReconstructResult {
  MapProfile u;
  Frame f;
  double energy = 0.0;  // pi ||psi+||^2, the energy of the recovered map
};

/// Full inverse transform from psi+ alone (class E_0 boundary data).
inline ReconstructResult reconstruct_map(const CVec& psi_plus, const GridPtr& g) {
  const A2Psi2 s = solve_a2_psi2(psi_plus, g);
  CVec psi1(psi_plus.size());
  for (size_t i = 0; i < psi1.size(); ++i)
    psi1[i] = psi_plus[i] - Complex(0.0, 1.0) * s.psi2[i] / std::sinh(g->r[i]);
  FrameSystemResult fs = solve_frame_system(psi1, s.a2, s.psi2, g);
  ReconstructResult out;
  out.u = std::move(fs.u);
  out.f = std::move(fs.f);
  out.energy = kPi * gauge_mass(psi_plus, *g);
  return out;
}

}  // namespace hypsmap
