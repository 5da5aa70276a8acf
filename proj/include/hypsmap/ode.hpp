// Inward RK4 sweeps from r_max toward the axis.  All gauge boundary data
// live at infinity, imposed at r_max on the truncated domain.
#pragma once

#include <functional>
#include <vector>

#include "hypsmap/grid.hpp"

namespace hypsmap {

/// Integrate y' = rhs(r, y) from r_max down to every node of `g`, starting
/// from `y_at_rmax`.  `post(i, y)` runs after the state reaches node i
/// (descending), e.g. to re-orthonormalize.  Returns states in node order.
template <class State, class Rhs, class Post>
std::vector<State> sweep_inward(const RadialGrid& g, State y_at_rmax, const Rhs& rhs,
                                const Post& post) {
  const int n = g.n_points;
  std::vector<State> out(static_cast<size_t>(n));
  State y = y_at_rmax;
  auto rk4 = [&](double r, double step) {
    const State k1 = rhs(r, y);
    const State k2 = rhs(r + 0.5 * step, y + (0.5 * step) * k1);
    const State k3 = rhs(r + 0.5 * step, y + (0.5 * step) * k2);
    const State k4 = rhs(r + step, y + step * k3);
    y = y + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  rk4(g.r_max, -0.5 * g.h);
  post(n - 1, y);
  out[n - 1] = y;
  for (int i = n - 2; i >= 0; --i) {
    rk4(g.r[i + 1], -g.h);
    post(i, y);
    out[static_cast<size_t>(i)] = y;
  }
  return out;
}

}  // namespace hypsmap
