// Library-level implementations of the CLI subcommands: each consumes a
// Config and writes manifest-stamped CSV, so the tool stays a thin shell
// and tests can drive the exact production paths.
#pragma once

#include <functional>
#include <ostream>
#include <random>

#include "hypsmap/config.hpp"
#include "hypsmap/evolve.hpp"
#include "hypsmap/kernel.hpp"
#include "hypsmap/reconstruct.hpp"

namespace hypsmap {

namespace detail {

inline GridPtr grid_from(const Config& cfg) {
  return build_grid(static_cast<int>(cfg.get_int("grid.n", 4096)),
                    cfg.get_double("grid.r_max", 20.0));
}

inline MapProfile map_from(const Config& cfg, const std::string& section,
                           const GridPtr& g) {
  const std::string kind = cfg.get_string(section + ".map", "bump");
  if (kind == "qsoliton") return q_lambda(cfg.get_double(section + ".lambda", 0.5), g);
  if (kind == "bump") {
    const double amplitude = cfg.get_double(section + ".amplitude", 0.5);
    const double width = cfg.get_double(section + ".width", 0.5);
    return make_polar_map(
        g, [=](double r) { return amplitude * r * std::exp(-width * r * r); });
  }
  throw ConfigError(section + ".map must be 'bump' or 'qsoliton'");
}

inline double sup_profile_dist(const MapProfile& a, const MapProfile& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.u.size(); ++i)
    worst = std::max(worst, sup_dist(a.u[i], b.u[i]));
  return worst;
}

}  // namespace detail

/// Soliton family survey: energy against the closed form, stationarity
/// residuals and the gauge mass identity, one CSV row per lambda.
inline void run_soliton_check(const Config& cfg, std::ostream& os) {
  auto g = detail::grid_from(cfg);
  const auto lambdas = cfg.get_list("soliton.lambdas", "0.25,0.5,1,2");
  write_manifest(os, cfg, "soliton-check");
  write_csv_row(os, {"lambda", "energy", "energy_formula", "energy_rel_err",
                     "rhs_sup", "tension_sup", "pi_mass_plus", "pi_mass_minus",
                     "chain_plus_resid", "chain_minus_resid", "conservation_defect"});
  for (double lam : lambdas) {
    auto u = q_lambda(lam, g);
    const double e = energy(u);
    const double exact = 4.0 * kPi * lam * lam / (1.0 + lam * lam);
    const double rel = exact > 0.0 ? std::abs(e - exact) / exact : std::abs(e);
    const double rhs_sup = interior_sup(schroedinger_rhs(u));
    const double tau_sup = interior_sup(tension(u));
    auto gf = differentiate(u, build_frame(u));
    const double mp = kPi * gauge_mass(gf.psi_plus, *g);
    const double mm = kPi * gauge_mass(gf.psi_minus, *g);
    const double jump = 2.0 * kPi * (u.u.back().z - 1.0);
    write_csv_row(os, {fmt(lam), fmt(e), fmt(exact), fmt(rel), fmt(rhs_sup),
                       fmt(tau_sup), fmt(mp), fmt(mm), fmt(std::abs(mp - (e + jump))),
                       fmt(std::abs(mm - (e - jump))), fmt(conservation_defect(gf))});
  }
}

/// Forward + inverse gauge transform with sup/L2 errors and a Lipschitz
/// probe table over seeded random perturbations.
inline void run_roundtrip(const Config& cfg, std::ostream& os) {
  auto g = detail::grid_from(cfg);
  auto u = detail::map_from(cfg, "roundtrip", g);
  const bool e0_class = sup_dist(u.u.back(), kNorthPole) < 1e-8;
  auto gf = differentiate(u, build_frame(u));

  write_manifest(os, cfg, "roundtrip");
  write_csv_row(os, {"quantity", "value"});
  write_csv_row(os, {"e0_class", e0_class ? "1" : "0"});
  MapProfile rec_u;
  if (e0_class) {
    auto rec = reconstruct_map(gf.psi_plus, g);
    rec_u = rec.u;
    write_csv_row(os, {"energy_pi_mass", fmt(rec.energy)});
  } else {
    // endpoint off the pole: invert from the full gauge data with the
    // map's own boundary frame
    const CVec psi1 = psi1_of(gf);
    const CVec psi2 = psi2_of(gf);
    auto fs = solve_frame_system(psi1, gf.a2, psi2, g, frame_boundary_of(u));
    rec_u = fs.u;
    write_csv_row(os, {"a2_consistency", fmt(fs.a2_consistency)});
  }
  write_csv_row(os, {"sup_error", fmt(detail::sup_profile_dist(rec_u, u))});
  write_csv_row(os, {"h1_error", fmt(map_h1_distance(rec_u, u))});
  write_csv_row(os, {"energy", fmt(energy(u))});

  if (e0_class) {
    const int probes = static_cast<int>(cfg.get_int("roundtrip.probes", 10));
    const double eps = cfg.get_double("roundtrip.probe_eps", 1e-3);
    std::mt19937_64 rng(static_cast<uint64_t>(cfg.get_int("roundtrip.seed", 1)));
    std::uniform_real_distribution<double> amp(0.1, 0.7), width(0.3, 0.8),
        phase(0.0, 2.0 * kPi);
    auto base = reconstruct_map(gf.psi_plus, g);
    write_csv_row(os, {"probe", "lipschitz_constant"});
    for (int k = 0; k < probes; ++k) {
      const double a = amp(rng), b = width(rng);
      const Complex dir = std::polar(1.0, phase(rng));
      CVec delta(gf.psi_plus.size());
      for (size_t i = 0; i < delta.size(); ++i)
        delta[i] = dir * (a * g->r[i] * std::exp(-b * g->r[i] * g->r[i]));
      const double dn = l2_norm_radial(delta, *g);
      CVec pert(gf.psi_plus.size());
      for (size_t i = 0; i < pert.size(); ++i)
        pert[i] = gf.psi_plus[i] + delta[i] * (eps / dn);
      auto rec = reconstruct_map(pert, g);
      write_csv_row(os, {fmt(double(k)), fmt(map_h1_distance(rec.u, base.u) / eps)});
    }
  }
}

inline GaugeFields initial_fields_from(const Config& cfg, const GridPtr& g) {
  const std::string kind = cfg.get_string("evolve.initial", "qsoliton");
  GaugeFields gf;
  if (kind == "qsoliton" || kind == "bump") {
    Config sub = cfg;
    sub.set("evolve.map=" + std::string(kind == "qsoliton" ? "qsoliton" : "bump"));
    auto u = detail::map_from(sub, "evolve", g);
    gf = differentiate(u, build_frame(u));
  } else if (kind == "gaussian-minus") {
    // pure psi- Gaussian bump (free-run cross checks)
    const double c = cfg.get_double("evolve.center", 2.0);
    const double w = cfg.get_double("evolve.gauss_width", 4.0);
    gf.grid = g;
    gf.psi_plus.assign(g->n_points, Complex{});
    gf.psi_minus.resize(g->n_points);
    for (int i = 0; i < g->n_points; ++i) {
      const double x = g->r[i] - c;
      gf.psi_minus[i] = std::exp(-w * x * x);
    }
  } else {
    throw ConfigError("evolve.initial must be qsoliton, bump or gaussian-minus");
  }
  if (cfg.has("evolve.norm")) {
    const double target = cfg.get_double("evolve.norm", 0.1);
    const double n0 = std::max(l2_norm(gf.psi_plus, *g), l2_norm(gf.psi_minus, *g));
    if (n0 > 0.0) {
      for (auto& v : gf.psi_plus) v *= target / n0;
      for (auto& v : gf.psi_minus) v *= target / n0;
    }
  }
  refresh_derived(gf);
  return gf;
}

/// Time evolution: trajectory CSV plus a final-state dump.
inline void run_evolve(const Config& cfg, std::ostream& os, std::ostream& final_os) {
  auto g = detail::grid_from(cfg);
  EvolveConfig ec;
  ec.dt = cfg.get_double("evolve.dt", 1e-3);
  ec.t_end = cfg.get_double("evolve.t_end", 1.0);
  ec.cadence = static_cast<int>(cfg.get_int("evolve.cadence", 100));
  const std::string pot = cfg.get_string("evolve.potentials", "full");
  if (pot == "full")
    ec.mode = PotentialMode::full;
  else if (pot == "free")
    ec.mode = PotentialMode::free_linear;
  else
    throw ConfigError("evolve.potentials must be 'full' or 'free'");
  auto gf0 = initial_fields_from(cfg, g);

  Evolver ev(g, ec.mode);
  auto traj = ev.run(ec, gf0);
  if (traj.aborted)
    throw NumericalFailure("evolve aborted: " + traj.note,
                           traj.snapshots.back().t);

  RVec mod0(gf0.psi_minus.size());
  for (size_t i = 0; i < mod0.size(); ++i) mod0[i] = std::abs(gf0.psi_minus[i]);
  const double m0p = traj.snapshots.front().ledger.mass_plus;
  const double m0m = traj.snapshots.front().ledger.mass_minus;

  write_manifest(os, cfg, "evolve");
  write_csv_row(os, {"t", "mass_plus", "mass_minus", "mass_drift_rel",
                     "compat_residual", "l4_accumulator", "modulus_deviation_sup",
                     "guard_tripped"});
  for (const auto& s : traj.snapshots) {
    double drift = 0.0;
    if (m0p > 0.0) drift = std::max(drift, std::abs(s.ledger.mass_plus - m0p) / m0p);
    if (m0m > 0.0) drift = std::max(drift, std::abs(s.ledger.mass_minus - m0m) / m0m);
    RVec dev(mod0.size());
    for (size_t i = 0; i < dev.size(); ++i)
      dev[i] = std::abs(s.gf.psi_minus[i]) - mod0[i];
    write_csv_row(os, {fmt(s.t), fmt(s.ledger.mass_plus), fmt(s.ledger.mass_minus),
                       fmt(drift), fmt(s.ledger.compat_residual),
                       fmt(s.ledger.l4_accumulator),
                       fmt(interior_sup(dev, *g)),
                       s.ledger.accuracy_guard_tripped ? "1" : "0"});
  }

  const auto& fin = traj.snapshots.back().gf;
  write_manifest(final_os, cfg, "evolve-final-state");
  write_csv_row(final_os, {"r", "re_psi_plus", "im_psi_plus", "re_psi_minus",
                           "im_psi_minus", "a2", "a0"});
  for (int i = 0; i < g->n_points; ++i)
    write_csv_row(final_os,
                  {fmt(g->r[i]), fmt(fin.psi_plus[i].real()),
                   fmt(fin.psi_plus[i].imag()), fmt(fin.psi_minus[i].real()),
                   fmt(fin.psi_minus[i].imag()), fmt(fin.a2[i]), fmt(fin.a0[i])});
}

/// Dispersive decay fits: one row per requested rho plus the sup-over-rho
/// small-time proxy row.
inline void run_kernel_decay(const Config& cfg, std::ostream& os) {
  const auto rhos = cfg.get_list("kernel.rho", "1.0");
  const auto ts = cfg.get_list("kernel.t_values", "2,4,8,16,32");
  write_manifest(os, cfg, "kernel-decay");
  write_csv_row(os, {"rho", "slope", "half_width", "kind"});
  for (double rho : rhos) {
    auto fit = decay_fit(rho, ts);
    write_csv_row(os, {fmt(rho), fmt(fit.slope), fmt(fit.half_width), "fixed_rho"});
  }
  const auto sup_ts = cfg.get_list("kernel.sup_t_values", "0.02,0.04,0.08,0.16");
  const double sup_rho_max = cfg.get_double("kernel.sup_rho_max", 3.0);
  std::vector<std::pair<double, double>> pts;
  for (double t : sup_ts) {
    double sup = 0.0;
    for (double rho = 0.0; rho <= sup_rho_max + 1e-12; rho += 0.25)
      sup = std::max(sup, std::abs(free_kernel(t, rho).value));
    pts.emplace_back(t, sup);
  }
  auto fit = fit_loglog(pts);
  write_csv_row(os, {fmt(sup_rho_max), fmt(fit.slope), fmt(fit.half_width),
                     "sup_over_rho"});
}

}  // namespace hypsmap
