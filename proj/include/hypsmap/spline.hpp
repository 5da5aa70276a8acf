// Cubic spline interpolation on a uniform abscissa, used to feed the
// inward ODE sweeps (frame, gauge reconstruction) with off-node values.
#pragma once

#include <cmath>
#include <utility>

#include "hypsmap/common.hpp"

namespace hypsmap {

/// Not-a-knot cubic spline on x_i = x0 + i*dx.  Evaluation outside
/// [x0, x_last] continues the boundary cubic.
class CubicSpline {
 public:
  CubicSpline() = default;

  CubicSpline(double x0, double dx, RVec y) : x0_(x0), dx_(dx), y_(std::move(y)) {
    const size_t n = y_.size();
    if (n < 4) throw InvalidInput("CubicSpline: need at least 4 points");
    RVec d(n, 0.0);
    for (size_t i = 1; i + 1 < n; ++i)
      d[i] = 6.0 * (y_[i - 1] - 2.0 * y_[i] + y_[i + 1]) / (dx_ * dx_);
    m_.assign(n, 0.0);
    // On a uniform grid the not-a-knot conditions m0 - 2 m1 + m2 = 0 and
    // m_{n-3} - 2 m_{n-2} + m_{n-1} = 0 decouple the first and last
    // interior rows: 6 m1 = d1, 6 m_{n-2} = d_{n-2}.
    m_[1] = d[1] / 6.0;
    m_[n - 2] = d[n - 2] / 6.0;
    if (n > 4) {
      // Tridiagonal (1,4,1) solve for m_2 .. m_{n-3}.
      const size_t lo = 2, hi = n - 3;
      d[lo] -= m_[1];
      d[hi] -= m_[n - 2];
      RVec b(n, 4.0);
      for (size_t i = lo + 1; i <= hi; ++i) {
        const double w = 1.0 / b[i - 1];
        b[i] -= w;
        d[i] -= w * d[i - 1];
      }
      m_[hi] = d[hi] / b[hi];
      for (size_t i = hi; i-- > lo;) m_[i] = (d[i] - m_[i + 1]) / b[i];
    }
    m_[0] = 2.0 * m_[1] - m_[2];
    m_[n - 1] = 2.0 * m_[n - 2] - m_[n - 3];
  }

  double operator()(double x) const {
    const auto [i, t] = locate(x);
    const double dx2 = dx_ * dx_;
    const double A = 1.0 - t, B = t;
    return A * y_[i] + B * y_[i + 1] +
           ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * dx2 / 6.0;
  }

  double derivative(double x) const {
    const auto [i, t] = locate(x);
    const double A = 1.0 - t, B = t;
    return (y_[i + 1] - y_[i]) / dx_ +
           dx_ / 6.0 * ((3.0 * B * B - 1.0) * m_[i + 1] - (3.0 * A * A - 1.0) * m_[i]);
  }

 private:
  std::pair<size_t, double> locate(double x) const {
    const double u = (x - x0_) / dx_;
    const double fi = std::floor(u);
    const size_t i =
        static_cast<size_t>(std::max(0.0, std::min(fi, double(y_.size() - 2))));
    return {i, u - static_cast<double>(i)};
  }

  double x0_ = 0.0, dx_ = 1.0;
  RVec y_, m_;
};

class ComplexSpline {
 public:
  ComplexSpline() = default;
  ComplexSpline(double x0, double dx, const CVec& y) {
    RVec re(y.size()), im(y.size());
    for (size_t i = 0; i < y.size(); ++i) { re[i] = y[i].real(); im[i] = y[i].imag(); }
    re_ = CubicSpline(x0, dx, std::move(re));
    im_ = CubicSpline(x0, dx, std::move(im));
  }
  Complex operator()(double x) const { return {re_(x), im_(x)}; }
  Complex derivative(double x) const { return {re_.derivative(x), im_.derivative(x)}; }

 private:
  CubicSpline re_, im_;
};

}  // namespace hypsmap
