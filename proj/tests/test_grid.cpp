#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "hypsmap/grid.hpp"
#include "oracles.hpp"

using namespace hypsmap;

TEST_CASE("staggered grid layout") {
  auto g = build_grid(16, 8.0);
  CHECK(g->h == Catch::Approx(0.5));
  CHECK(g->r[0] == Catch::Approx(0.25));
  CHECK(g->r[15] == Catch::Approx(7.75));
  CHECK(g->r[15] + 0.5 * g->h == Catch::Approx(g->r_max));
  for (double w : g->w) CHECK(w > 0.0);
}

TEST_CASE("total weight approximates the hyperbolic disc area") {
  auto g = build_grid(4096, 20.0);
  double total = 0.0;
  for (double w : g->w) total += w;
  const double exact = 2.0 * kPi * (std::cosh(20.0) - 1.0);
  CHECK(std::abs(total - exact) / exact < 1e-3);
}

TEST_CASE("build_grid rejects bad input") {
  CHECK_THROWS_AS(build_grid(16, -1.0), InvalidInput);
  CHECK_THROWS_AS(build_grid(16, 0.0), InvalidInput);
  CHECK_THROWS_AS(build_grid(8, 10.0), InvalidInput);
  CHECK_THROWS_AS(build_grid(16, std::nan("")), InvalidInput);
}

TEST_CASE("l2 norm against closed forms") {
  SECTION("zero field") {
    auto g = build_grid(64, 5.0);
    CVec f(64, Complex{0.0, 0.0});
    CHECK(l2_norm(f, *g) == 0.0);
  }
  SECTION("exponential profile") {
    // int_0^inf e^{-2r} sinh r dr = 1/3
    auto g = build_grid(8192, 30.0);
    RVec f(8192);
    for (int i = 0; i < 8192; ++i) f[i] = std::exp(-g->r[i]);
    const double expected = std::sqrt(2.0 * kPi / 3.0);
    CHECK(std::abs(l2_norm(f, *g) - expected) < 1e-4);
    // cross-check the closed form with the independent quadrature oracle
    const double ref = oracle::integrate(
        [](double r) { return std::exp(-2.0 * r) * std::sinh(r); }, 0.0, 30.0);
    CHECK(std::abs(ref - 1.0 / 3.0) < 1e-10);
  }
  SECTION("constant on a short domain") {
    auto g = build_grid(4096, 2.0);
    RVec f(4096, 1.0);
    const double expected = std::sqrt(2.0 * kPi * (std::cosh(2.0) - 1.0));
    CHECK(std::abs(l2_norm(f, *g) - expected) < 1e-3);
  }
  SECTION("length mismatch") {
    auto g = build_grid(64, 5.0);
    RVec f(63, 1.0);
    CHECK_THROWS_AS(l2_norm(f, *g), InvalidInput);
  }
}

TEST_CASE("l4 norm against a closed form") {
  // int_0^inf e^{-4r} sinh r dr = 1/15
  auto g = build_grid(8192, 30.0);
  RVec f(8192);
  for (int i = 0; i < 8192; ++i) f[i] = std::exp(-g->r[i]);
  const double expected = std::pow(2.0 * kPi / 15.0, 0.25);
  CHECK(std::abs(lp_norm(f, *g, 4.0) - expected) < 1e-4);
  CHECK(l2_norm_radial(f, *g) ==
        Catch::Approx(l2_norm(f, *g) / std::sqrt(2.0 * kPi)));
}

TEST_CASE("quadrature is second order") {
  // e^{-r} decays well inside r_max but has a nonzero boundary derivative
  // at r = 0, so the midpoint error genuinely scales like h^2.  (For data
  // vanishing at both ends the midpoint rule is spectrally accurate and the
  // measured error is roundoff.)
  auto f_of = [](double r) { return std::exp(-r); };
  const double exact = oracle::integrate(
      [&](double r) {
        return 2.0 * kPi * f_of(r) * f_of(r) * std::sinh(r);
      },
      0.0, 20.0);
  std::vector<double> errs;
  for (int n : {512, 1024, 2048}) {
    auto g = build_grid(n, 20.0);
    RVec f(n);
    for (int i = 0; i < n; ++i) f[i] = f_of(g->r[i]);
    const double v = l2_norm(f, *g);
    errs.push_back(std::abs(v * v - exact));
  }
  CHECK(errs[0] / errs[1] > 3.5);
  CHECK(errs[0] / errs[1] < 4.5);
  CHECK(errs[1] / errs[2] > 3.5);
  CHECK(errs[1] / errs[2] < 4.5);
}

TEST_CASE("operator annihilates constants away from the outer boundary") {
  auto g = build_grid(512, 12.0);
  auto op = build_operator(g, 0, RVec(512, 0.0));
  RVec f(512, 1.0);
  auto lf = apply_operator(op, f);
  CHECK(interior_sup(lf, *g, 0.0, g->r_max - 1.0) < 1e-10);
}

TEST_CASE("operator matches the symbolic Laplacian of cosh r - 1") {
  // Delta (cosh r - 1) = cosh r + coth r sinh r = 2 cosh r
  std::vector<double> errs;
  for (int n : {512, 1024, 2048}) {
    auto g = build_grid(n, 12.0);
    auto op = build_operator(g, 0, RVec(n, 0.0));
    RVec f(n), exact(n);
    for (int i = 0; i < n; ++i) {
      f[i] = std::cosh(g->r[i]) - 1.0;
      exact[i] = 2.0 * std::cosh(g->r[i]);
    }
    auto lf = apply_operator(op, f);
    RVec diff(n);
    for (int i = 0; i < n; ++i) diff[i] = lf[i] - exact[i];
    errs.push_back(interior_sup(diff, *g));
  }
  CHECK(errs[0] / errs[1] > 3.5);
  CHECK(errs[0] / errs[1] < 4.5);
  CHECK(errs[1] / errs[2] > 3.5);
  CHECK(errs[1] / errs[2] < 4.5);
}

TEST_CASE("m=2 operator matches the independent differentiation oracle") {
  auto f_of = [](double r) {
    const double sh = std::sinh(r);
    return sh * sh * std::exp(-2.0 * std::cosh(r));
  };
  std::vector<double> errs;
  for (int n : {512, 1024, 2048}) {
    auto g = build_grid(n, 10.0);
    auto op = build_operator(g, 2, RVec(n, 0.0));
    RVec f(n);
    for (int i = 0; i < n; ++i) f[i] = f_of(g->r[i]);
    auto lf = apply_operator(op, f);
    RVec diff(n);
    for (int i = 0; i < n; ++i) {
      if (g->r[i] < 0.25 || g->r[i] > g->r_max - 1.0) {
        diff[i] = 0.0;
        continue;
      }
      diff[i] = lf[i] - oracle::radial_operator(f_of, g->r[i], 2, nullptr);
    }
    errs.push_back(interior_sup(diff, *g));
  }
  CHECK(errs[0] / errs[1] > 3.3);
  CHECK(errs[0] / errs[1] < 4.7);
  CHECK(errs[1] / errs[2] > 3.3);
  CHECK(errs[1] / errs[2] < 4.7);
}

TEST_CASE("operator is symmetric in the weighted inner product") {
  const int n = 512;
  auto g = build_grid(n, 15.0);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RVec V(n);
  for (int i = 0; i < n; ++i) V[i] = unif(rng);
  for (int m : {0, 1, 2}) {
    auto op = build_operator(g, m, V);
    // exact flux symmetry of the conjugated matrix
    double asym = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      const double a = g->w[i] * op.super[i];
      const double b = g->w[i + 1] * op.sub[i + 1];
      asym = std::max(asym, std::abs(a - b) / std::max(std::abs(a), 1e-300));
    }
    CHECK(asym < 1e-12);
    // <Lf, g> = <f, Lg> on random interior-supported fields
    CVec f(n, Complex{}), h(n, Complex{});
    for (int i = n / 8; i < n / 2; ++i) {
      f[i] = Complex(unif(rng) - 0.5, unif(rng) - 0.5);
      h[i] = Complex(unif(rng) - 0.5, unif(rng) - 0.5);
    }
    auto lf = apply_operator(op, f);
    auto lh = apply_operator(op, h);
    const double defect = std::abs(dot_w(lf, h, *g) - dot_w(f, lh, *g));
    CHECK(defect <= 1e-10 * l2_norm(f, *g) * l2_norm(h, *g) *
                        (std::abs(op.diag[0]) + 1.0));
  }
}

TEST_CASE("conjugated operator is negative semidefinite for V >= 0, m >= 1") {
  const int n = 384;
  auto g = build_grid(n, 12.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  RVec V(n);
  for (int i = 0; i < n; ++i) V[i] = unif(rng);
  for (int m : {1, 2}) {
    auto op = build_operator(g, m, V);
    // symmetric conjugated tridiagonal S = W^(1/2) L W^(-1/2)
    RVec diag(op.diag), off(n - 1);
    for (int i = 0; i + 1 < n; ++i)
      off[i] = op.super[i] * std::sqrt(g->w[i] / g->w[i + 1]);
    // power iteration on S + M I targets the largest eigenvalue of S
    double M = 0.0;
    for (int i = 0; i < n; ++i) {
      double row = std::abs(diag[i]);
      if (i > 0) row += std::abs(off[i - 1]);
      if (i + 1 < n) row += std::abs(off[i]);
      M = std::max(M, row);
    }
    RVec v(n);
    for (int i = 0; i < n; ++i) v[i] = unif(rng) + 0.1;
    double lambda = 0.0;
    for (int it = 0; it < 2000; ++it) {
      RVec nv(n);
      for (int i = 0; i < n; ++i) {
        double s = (diag[i] + M) * v[i];
        if (i > 0) s += off[i - 1] * v[i - 1];
        if (i + 1 < n) s += off[i] * v[i + 1];
        nv[i] = s;
      }
      double nn = 0.0;
      for (double x : nv) nn += x * x;
      nn = std::sqrt(nn);
      for (int i = 0; i < n; ++i) v[i] = nv[i] / nn;
      lambda = nn - M;
    }
    CHECK(lambda <= 1e-8 * M);
  }
}

TEST_CASE("build_operator rejects non-finite potentials") {
  auto g = build_grid(64, 8.0);
  RVec V(64, 0.0);
  V[10] = std::nan("");
  CHECK_THROWS_AS(build_operator(g, 0, V), InvalidInput);
  V[10] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(build_operator(g, 1, V), InvalidInput);
  CHECK_THROWS_AS(build_operator(g, -1, RVec(64, 0.0)), InvalidInput);
  CHECK_THROWS_AS(build_operator(g, 0, RVec(32, 0.0)), InvalidInput);
}

TEST_CASE("complex tridiagonal solve") {
  const int n = 200;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  CVec sub(n), diag(n), super(n), x(n);
  for (int i = 0; i < n; ++i) {
    sub[i] = Complex(unif(rng), unif(rng));
    super[i] = Complex(unif(rng), unif(rng));
    diag[i] = Complex(unif(rng), 4.0 + unif(rng));  // dominant
    x[i] = Complex(unif(rng), unif(rng));
  }
  sub[0] = super[n - 1] = 0.0;
  CVec rhs(n);
  for (int i = 0; i < n; ++i) {
    Complex v = diag[i] * x[i];
    if (i > 0) v += sub[i] * x[i - 1];
    if (i + 1 < n) v += super[i] * x[i + 1];
    rhs[i] = v;
  }
  auto sol = solve_tridiagonal(sub, diag, super, rhs);
  double err = 0.0;
  for (int i = 0; i < n; ++i) err = std::max(err, std::abs(sol[i] - x[i]));
  CHECK(err < 1e-12);
}
