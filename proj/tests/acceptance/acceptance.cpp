// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

// Acceptance gate: one PASS/FAIL line per criterion at the contract tolerances.
// Usage: acceptance [criterion ...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vtx/ansatz.hpp"
#include "vtx/evolution.hpp"
#include "vtx/snapshot.hpp"

using namespace vtx;

namespace {

const double kPi = std::numbers::pi;
const std::string kData = VTX_TEST_DATA_DIR;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  // Records one check; the detail line lists every measured value.
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double a) {
  char b[128];
  std::snprintf(b, sizeof b, f, a);
  return b;
}
std::string fmt(const char* f, double a, double c) {
  char b[160];
  std::snprintf(b, sizeof b, f, a, c);
  return b;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Evolution runs seen so far; the conservation criterion audits all of them.
struct EvolutionAudit {
  std::string name;
  double t_end, energy_rate, gauss_drift;
  bool charge_constant;
};
std::vector<EvolutionAudit> g_runs;

const ReducedMetric& coarse_table() {
  static ReducedMetric m = ReducedMetric::read_csv(kData + "/reduced_metric_h0.1.csv");
  return m;
}

const std::vector<VortexConfig>& solved_cases() {
  static std::vector<VortexConfig> v = [] {
    Grid g = Grid::square(12.0, 0.1);
    std::vector<VortexCenters> cases{{cplx(0.0, 0.0)},
                                     {cplx(-3.0, 0.0), cplx(3.0, 0.0)},
                                     {cplx(-3.0, 0.0), cplx(3.0, 0.0), cplx(0.0, 3.0)}};
    std::vector<VortexConfig> out;
    for (const auto& c : cases) out.push_back(solve_vortex(c, g));
    return out;
  }();
  return v;
}

Outcome flux_quantization() {
  Outcome o;
  Grid g = Grid::square(12.0, 0.1);
  std::vector<VortexCenters> cases{{cplx(0.0, 0.0)},
                                   {cplx(-3.0, 0.0), cplx(3.0, 0.0)},
                                   {cplx(-3.0, 0.0), cplx(3.0, 0.0), cplx(0.0, 3.0)}};
  for (const auto& c : cases) {
    auto t0 = std::chrono::steady_clock::now();
    VortexConfig v = solve_vortex(c, g);
    double secs = since(t0);
    int N = v.N();
    double rel = std::abs(flux(v) / (2 * kPi) - N) / N;
    o.check(v.report.converged && rel <= 0.005, "N=" + std::to_string(N) + fmt(" flux err %.2e", rel));
    o.check(secs <= 30.0, fmt("%.1fs", secs));
  }
  return o;
}

Outcome bogomolny_energy() {
  Outcome o;
  for (const auto& v : solved_cases()) {
    double rel = std::abs(energy(v) / (2 * kPi * v.N()) - 1.0);
    o.check(rel <= 0.01, "N=" + std::to_string(v.N()) + fmt(" E/2piN-1 %.2e", rel));
  }
  Grid g = Grid::square(12.0, 0.1);
  VortexConfig v = solve_vortex({cplx(-2.0, 0.5), cplx(1.5, -1.0)}, g);
  std::mt19937 rng(7);
  std::normal_distribution<double> nd;
  for (double amp : {0.01, 0.1}) {
    ComplexField phi = v.phi;
    GaugePotential a = v.alpha;
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto c = g.coords(i);
      double x = g.coord(0, c[0]), y = g.coord(1, c[1]);
      double w = amp * std::exp(-(x * x + y * y) / 16.0);
      phi.v[i] *= 1.0 + w * cplx(std::sin(x + y), std::cos(x - 0.5 * y));
      a[0].v[i] += w * std::cos(0.7 * y);
      a[1].v[i] += w * std::sin(0.4 * x);
    }
    auto r = completion(phi, a);
    o.check(r.defect <= 1e-6 && r.squares > 0, fmt("completion defect %.2e (amp %.2g)", r.defect, amp));
  }
  return o;
}

Outcome radial_oracle() {
  Outcome o;
  const VortexConfig& v = solved_cases()[0];
  const Grid& g = v.grid;
  RadialProfile P = radial_vortex(1);
  double mx = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto c = g.coords(i);
    double r = std::abs(cplx(g.coord(0, c[0]), g.coord(1, c[1])) - v.centers[0]);
    if (r <= 8.0) mx = std::max(mx, std::abs(std::abs(v.phi.v[i]) - P.rho_at(r)));
  }
  o.check(mx <= 1e-2, fmt("sup |rho_2D - rho_radial| %.2e", mx));
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double r = 5.0; r <= 9.0; r += 0.05) {
    double y = std::log(1.0 - P.rho_at(r));
    n += 1, sx += r, sy += y, sxx += r * r, sxy += r * y;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  o.check(slope >= -1.1 && slope <= -0.9, fmt("tail log-derivative %.4f", slope));
  return o;
}

Outcome decay_rates() {
  Outcome o;
  VortexConfig v = solve_vortex({0.0}, Grid::square(14.0, 0.1));
  DecayFit d = decay_fit(v);
  o.check(d.rate_potential >= 0.85 && d.rate_potential <= 1.1, fmt("1-|phi|^2 rate %.4f", d.rate_potential));
  o.check(d.rate_covariant >= 0.85 && d.rate_covariant <= 1.1, fmt("|D phi| rate %.4f", d.rate_covariant));
  return o;
}

TangentVector bump_tangent(const Grid& g, double x0, double y0, double s) {
  TangentVector t(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto c = g.coords(i);
    double x = g.coord(0, c[0]) - x0, y = g.coord(1, c[1]) - y0;
    double w = std::exp(-(x * x + y * y) / (s * s));
    t.phi.v[i] = w * cplx(std::cos(x + 0.3 * y), 0.5 * y);
    t.a.c[0].v[i] = w * (0.3 + x * y);
    t.a.c[1].v[i] = w * (x - 0.2);
  }
  return t;
}

Outcome zero_modes_coercivity() {
  Outcome o;
  struct Case {
    VortexCenters c;
    std::string name;
  };
  std::vector<Case> cases{{{cplx(0.0, 0.0)}, "N=1"},
                          {{cplx(0.0, 0.0), cplx(0.0, 0.0)}, "N=2 sep 0"},
                          {{cplx(-1.0, 0.0), cplx(1.0, 0.0)}, "N=2 sep 2"},
                          {{cplx(-3.0, 0.0), cplx(3.0, 0.0)}, "N=2 sep 6"}};
  for (const auto& cs : cases) {
    ZeroModeBasis B = zero_modes(cs.c, Grid::square(10.0, 0.1));
    CoercivityReport r = coercivity(B);
    int small = 0;
    double worst = 0.0;
    for (double l : r.near_zero) {
      small += std::abs(l) <= 1e-3;
      worst = std::max(worst, std::abs(l));
    }
    bool ok = r.converged && small == 2 * int(cs.c.size()) && r.gamma_min > 0.0;
    o.check(ok, cs.name + ": " + std::to_string(small) + fmt(" near-zero (max %.1e), gamma_min %.3f", worst, r.gamma_min));
  }
  Grid g = Grid::square(6.0, 0.1);
  ZeroModeBasis B = zero_modes({cplx(0.3, 0.1)}, g);
  TangentVector t = bump_tangent(g, 0.2, 0.1, 1.2);
  apply_mask(t, B.base.mask);
  double q = dot(t, apply_L(B.base, t)), d = D_form(apply_D(B.base, t));
  o.check(std::abs(q - d) <= 1e-6 * q, fmt("<t,Lt> vs int 4|D1|^2+16|D2|^2 rel gap %.2e", std::abs(q - d) / q));
  return o;
}

Outcome metric_asymptotics() {
  Outcome o;
  MetricPoint far = sample_metric_point(8.0);
  o.check(std::abs(far.F - 1.0) <= 0.05, fmt("F(8) %.4f", far.F));
  o.check(std::abs(far.G - 8.0) <= 0.4, fmt("G(8) %.4f", far.G));
  for (double r : {0.3, 0.6, 1.0}) {
    MetricPoint p = sample_metric_point(r);
    double ratio = p.G / p.F / r;
    o.check(std::abs(ratio - 1.0) <= 0.2, fmt("G/(F r) at %.1f: %.4f", r, ratio));
  }
  return o;
}

Outcome right_angle() {
  Outcome o;
  GeodesicState s;
  s.r = 4.0;
  s.p_r = -1.0;
  Trajectory tr = geodesic_integrate(coarse_table(), s, 8.0);
  double dev = std::abs(std::remainder(tr.back().theta - kPi / 2, kPi)) * 180 / kPi;
  o.check(dev <= 5.0 && tr.back().r > 4.0, fmt("geodesic outgoing angle %.3f deg", 90.0 + dev));
  auto t0 = std::chrono::steady_clock::now();
  ScatteringReport r = head_on_scattering(3.0, 0.3);
  g_runs.push_back({"head-on 2D", r.rows.back().t, r.energy_rate, r.gauss_drift, r.charge_constant});
  o.check(std::abs(r.angle_deg - 90.0) <= 8.0, fmt("2D tracked-zero angle %.3f deg (%.0fs)", r.angle_deg, since(t0)));
  return o;
}

Outcome attraction_repulsion() {
  Outcome o;
  GeodesicState s;
  s.r = 2.0;
  for (int l : {-1, +1}) {
    Trajectory tr = hamiltonian_integrate(coarse_table(), s, l, 0.1, l < 0 ? 1.0 : 3.0);
    // Skip the first tenth (start from rest) and require a strict sign afterwards.
    std::size_t start = tr.size() / 10;
    bool ok = true;
    double slope_min = 1e300, slope_max = -1e300;
    for (std::size_t i = std::max<std::size_t>(start, 1); i < tr.size(); ++i) {
      double dr = (tr[i].r - tr[i - 1].r) / (tr[i].tau - tr[i - 1].tau);
      slope_min = std::min(slope_min, dr);
      slope_max = std::max(slope_max, dr);
      ok = ok && (l < 0 ? dr < 0 : dr > 0);
    }
    o.check(ok, fmt("l=%+.0f dr/dtau in [%.3g, ", l, slope_min) + fmt("%.3g]", slope_max));
  }
  return o;
}

Outcome adiabatic_order() {
  Outcome o;
  const ReducedMetric& m = coarse_table();
  auto state = [&](double r, double rdot, double thdot) {
    GeodesicState g;
    g.r = r;
    g.p_r = m.F_at(r) * m.F_at(r) * rdot;
    g.p_theta = m.G_at(r) * m.G_at(r) * thdot;
    return g;
  };
  AdiabaticOptions opt;  // L = 12, h = 0.1 (240^2), CFL/2, tau in [0, 1]
  AdiabaticReport rep = adiabatic_experiment(m, state(3.0, -1.5, 0.2), {0.1, 0.05}, opt);
  for (const auto& r : rep.runs) {
    g_runs.push_back({fmt("adiabatic eps %.2f", r.epsilon), opt.tau_max / r.epsilon, r.energy_rate, r.gauss_drift,
                      r.charge_constant});
    o.check(r.wall_seconds <= 600.0, fmt("e(%.2f) = ", r.epsilon) + fmt("%.3e (%.0fs)", r.error, r.wall_seconds));
  }
  double ratio = rep.ratios.at(0);
  o.check(ratio >= 2.5 && ratio <= 6.0, fmt("ratio %.3f (r0=3, rdot=-1.5, thetadot=0.2)", ratio));
  AdiabaticReport near = adiabatic_experiment(m, state(2.0, -1.0, 0.25), {0.1, 0.05}, opt);
  for (const auto& r : near.runs)
    g_runs.push_back({fmt("adiabatic r0=2 eps %.2f", r.epsilon), opt.tau_max / r.epsilon, r.energy_rate,
                      r.gauss_drift, r.charge_constant});
  o.detail << "; info: r0=2 ratio " << fmt("%.3f", near.ratios.at(0)) << " (lattice force floor, not gated)";
  return o;
}

VortexCenters flat_wave(double t, double z) {
  return {cplx(0.1, 0.05) + cplx(0.5 * std::cos(t) * std::sin(z), 0.3 * std::sin(z - t))};
}

Outcome ansatz_orders() {
  Outcome o;
  AnsatzOptions opt;
  opt.tau0 = 0.3;
  opt.zeta0 = 0.4;
  auto reps = residual_scan(flat_wave, {0.1, 0.05}, opt);
  double rphi = reps[0].S.phi / reps[1].S.phi, ra0 = reps[0].S.a0 / reps[1].S.a0;
  o.check(rphi >= 11 && rphi <= 21, fmt("|S_phi| ratio %.3f", rphi));
  o.check(ra0 >= 5.5 && ra0 <= 11, fmt("|S_a0| ratio %.3f", ra0));
  for (const auto& r : reps)
    o.check(r.continuity.relative <= 1e-2, fmt("continuity rel %.2e (eps %.2f)", r.continuity.relative, r.epsilon));
  AnsatzOptions coarse = opt;
  coarse.d = 2 * opt.d;
  SliceCache cache(Grid::square(opt.L, opt.h));
  ResidualReport c = ansatz_residual(flat_wave, 0.1, coarse, &cache);
  double order = std::log2(c.continuity.residual / reps[0].continuity.residual);
  o.check(order >= 1.5 && order <= 2.5, fmt("continuity order %.2f under d halving", order));
  return o;
}

Outcome wave_map_detector() {
  Outcome o;
  ReducedMetric m = ReducedMetric::read_csv(kData + "/reduced_metric_dense_relaxed_h0.1.csv");
  GeodesicState s;
  s.r = 1.5;
  s.theta = 0.3;
  s.p_r = m.F_at(s.r) * m.F_at(s.r) * -0.5;
  s.p_theta = m.G_at(s.r) * m.G_at(s.r) * 0.3;
  const double tau0 = 0.5;
  Trajectory tr = geodesic_integrate(m, s, tau0);
  GeodesicState s1{tr.back().r, tr.back().theta, tr.back().p_r, tr.back().p_theta, tau0};
  DefectOptions d;
  d.L = 8.0;
  d.h = 0.1;
  d.delta = 0.02;
  SliceCache cache(Grid::square(d.L, d.h));
  DefectReport geo = defect_T(geodesic_wave_map(m, s), tau0, 0.0, d, &cache);
  DefectReport line = defect_T(straight_line_map(m, s1), tau0, 0.0, d, &cache);
  o.check(geo.max_pairing <= 1e-3, fmt("geodesic max pairing %.2e |T|", geo.max_pairing));
  double ratio = (line.max_pairing * line.norm) / (geo.max_pairing * geo.norm);
  o.check(ratio >= 10.0, fmt("violated map pairing %.2e |T|, ", line.max_pairing) + fmt("ratio %.0f", ratio));
  return o;
}

double max_abs_diff(const FieldPair& a, const FieldPair& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.phi.size(); ++i) m = std::max(m, std::abs(a.phi.v[i] - b.phi.v[i]));
  for (int j = 0; j < a.grid().dim; ++j)
    for (std::size_t i = 0; i < a.phi.size(); ++i) m = std::max(m, std::abs(a.a.c[j].v[i] - b.a.c[j].v[i]));
  return m;
}

Outcome conservation() {
  Outcome o;
  ZeroModeBasis B = zero_modes({cplx(0.03, 0.01)}, Grid::square(8.0, 0.1));
  EvolveOptions eo;
  eo.t_end = 10.0;
  eo.sample_dt = 0.5;
  EvolveResult r = evolve(init_adiabatic(B, {1.0, 0.5}, 0.1), eo);
  g_runs.push_back({"moving vortex 2D", eo.t_end, r.energy_rate, r.gauss_drift, r.charge_constant});
  Grid g3 = Grid::box(8.0, 4.0, 0.1);
  EvolState s3 = init_adiabatic_3d(
      B, g3, [](double z) { return std::vector<double>{1.0 + 0.5 * std::sin(kPi * z / 2.0), 0.0}; }, 0.1);
  EvolveOptions e3 = eo;
  e3.t_end = 8.0;  // a secular slope needs several oscillation periods of the O(dt^2) error
  e3.sample_dt = 0.25;
  EvolveResult r3 = evolve(s3, e3);
  g_runs.push_back({"modulated line 3D", e3.t_end, r3.energy_rate, r3.gauss_drift, r3.charge_constant});
  double worst_e = 0, worst_g = 0;
  bool charge = true;
  std::string worst_run;
  for (const auto& a : g_runs) {
    if (a.energy_rate > worst_e) worst_run = a.name;
    worst_e = std::max(worst_e, a.energy_rate);
    worst_g = std::max(worst_g, a.gauss_drift / a.t_end);
    charge = charge && a.charge_constant;
  }
  o.check(worst_e <= 1e-6, std::to_string(g_runs.size()) + fmt(" runs: energy drift/time max %.2e", worst_e) + " (" + worst_run + ")");
  o.check(worst_g <= 1e-8, fmt("Gauss drift/time max %.2e", worst_g));
  o.check(charge, "integer charge constant");
  EvolState s0 = init_adiabatic(B, {1.0, -0.3}, 0.2), s = s0;
  double dt = 0.5 * cfl_limit(s.grid());
  for (int n = 0; n < 300; ++n) leapfrog_step(s, dt);
  s.p *= -1.0;
  for (int n = 0; n < 300; ++n) leapfrog_step(s, dt);
  s.p *= -1.0;
  double rev = std::max(max_abs_diff(s.c, s0.c), max_abs_diff(s.p, s0.p));
  o.check(rev <= 1e-8, fmt("reversibility %.2e", rev));
  return o;
}

// Periodic leapfrog reference for f_tt - f_zz = w_t with zero data.
std::vector<double> wave_reference(const std::function<double(double, double)>& wt, double T, int nz, int nt) {
  const double dz = 2 * kPi / nz, dt = T / nt;
  std::vector<double> fm(nz, 0.0), f(nz), fp(nz);
  for (int j = 0; j < nz; ++j) f[j] = 0.5 * dt * dt * wt(0.0, j * dz);
  for (int n = 1; n < nt; ++n) {
    for (int j = 0; j < nz; ++j) {
      double lap = (f[(j + 1) % nz] - 2 * f[j] + f[(j + nz - 1) % nz]) / (dz * dz);
      fp[j] = 2 * f[j] - fm[j] + dt * dt * (lap + wt(n * dt, j * dz));
    }
    fm.swap(f);
    f.swap(fp);
  }
  return f;
}

Outcome dalembert() {
  Outcome o;
  auto w = [](double t, double z) { return std::sin(z) * std::exp(-t); };
  auto wt = [](double t, double z) { return -std::sin(z) * std::exp(-t); };
  auto s = SpaceTimeSamples::from(w, 1.0, 0.01, -1.5, 2 * kPi + 1.5, 0.01);
  const int nz = 628;
  auto ref = wave_reference(wt, 1.0, nz, 400);
  double err = 0;
  for (int j = 0; j < nz; j += 7) err = std::max(err, std::abs(dalembert_source(s, 1.0, j * 2 * kPi / nz) - ref[j]));
  o.check(err <= 1e-3, fmt("sup error vs finite-difference reference %.2e", err));
  return o;
}

Outcome properties() {
  Outcome o;
  {
    Grid g = Grid::square(4.0, 0.1);
    auto us = sample<double>(g, [](double x, double y, double) { return std::sin(x) * std::cos(0.5 * y) + 0.1 * x * y; });
    auto W = sample<double>(g, [](double x, double y, double) { return 1.0 - std::exp(-x * x - y * y); });
    ScalarField f = laplacian(us);
    for (std::size_t i = 0; i < f.size(); ++i) f.v[i] = g.on_boundary(i) ? 0.0 : -f.v[i] + W.v[i] * us.v[i];
    ScreenedProblem p{W, f};
    p.boundary = us;
    auto [u, rep] = solve_screened(p);
    u -= us;
    double e = norm_linf(u) / norm_linf(us);
    o.check(rep.converged && e <= 1e-9, fmt("manufactured solution %.1e", e));
  }
  {
    Grid g = Grid::square(6.0, 0.1);
    VortexSolveOptions so;
    so.snap_centers = false;
    StaticBase b = make_static_base(lattice_fields(solve_vortex({cplx(0.3, 0.1), cplx(-1.2, 0.4)}, g, so)));
    std::mt19937 rng(42);
    std::normal_distribution<double> nd;
    auto rnd = [&] {
      TangentVector t(g);
      for (std::size_t i = 0; i < g.size(); ++i) {
        auto c = g.coords(i);
        if (std::hypot(g.coord(0, c[0]), g.coord(1, c[1])) > 4.0) continue;
        t.phi.v[i] = cplx(nd(rng), nd(rng));
        t.a.c[0].v[i] = nd(rng);
        t.a.c[1].v[i] = nd(rng);
      }
      return t;
    };
    TangentVector t1 = rnd(), t2 = rnd();
    double l12 = dot(apply_L(b, t1), t2), l21 = dot(t1, apply_L(b, t2));
    o.check(std::abs(l12 - l21) <= 1e-9 * std::abs(l12), fmt("self-adjointness %.1e", std::abs(l12 - l21) / std::abs(l12)));
  }
  {
    ZeroModeBasis B = zero_modes({cplx(-0.5, 1.0), cplx(-0.5, -1.0)}, Grid::square(8.0, 0.1));
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(4, 4);
    R(0, 2) = 1, R(1, 3) = -1, R(2, 0) = 1, R(3, 1) = -1;
    double d = (R * B.gram * R.transpose() - B.gram).cwiseAbs().maxCoeff() / B.gram.cwiseAbs().maxCoeff();
    o.check(d <= 1e-6, fmt("reflection equivariance %.1e", d));
  }
  {
    Grid g = Grid::square(12.0, 0.1);
    VortexCenters cs{cplx(-1.5, 0.3), cplx(2.0, -0.6)};
    VortexSolveOptions o1, o2;
    o1.mu = 9.0;
    o2.mu = 11.0;
    auto a = solve_vortex(cs, g, o1), b = solve_vortex(cs, g, o2);
    double d = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      d = std::max(d, std::abs(a.phi.v[i] - b.phi.v[i]));
      d = std::max(d, std::abs(a.alpha[0].v[i] - b.alpha[0].v[i]));
      d = std::max(d, std::abs(a.alpha[1].v[i] - b.alpha[1].v[i]));
    }
    o.check(d <= 1e-8, fmt("mu independence %.1e", d));
  }
  {
    Grid g({7, 5}, {0.1, 0.2}, {-0.3, 1.0});
    std::mt19937 rng(11);
    std::normal_distribution<double> nd;
    ScalarField s(g);
    ComplexField c(g);
    for (auto& x : s.v) x = nd(rng);
    for (auto& z : c.v) z = cplx(nd(rng), nd(rng));
    auto path = (std::filesystem::temp_directory_path() / "vortexlab_acceptance.vxf").string();
    write_snapshot(path, {{"v", s}, {"phi", c}});
    Snapshot back = read_snapshot(path);
    bool same = back.grid == g &&
                std::memcmp(back.real("v").v.data(), s.v.data(), s.v.size() * sizeof(double)) == 0 &&
                std::memcmp(back.complex("phi").v.data(), c.v.data(), c.v.size() * sizeof(cplx)) == 0;
    std::filesystem::remove(path);
    o.check(same, "snapshot round trip bit-exact");
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "flux quantization", flux_quantization},
      {2, "Bogomolny energy and completion identity", bogomolny_energy},
      {3, "radial oracle", radial_oracle},
      {4, "decay rates", decay_rates},
      {5, "zero modes and coercivity", zero_modes_coercivity},
      {6, "metric asymptotics", metric_asymptotics},
      {7, "right-angle scattering", right_angle},
      {8, "attraction and repulsion", attraction_repulsion},
      {9, "adiabatic order", adiabatic_order},
      {10, "ansatz residual orders", ansatz_orders},
      {11, "wave-map detector", wave_map_detector},
      {12, "conservation", conservation},
      {13, "d'Alembert utility", dalembert},
      {14, "property suites", properties},
  };
  std::set<int> want;
  for (int i = 1; i < argc; ++i) want.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!want.empty() && !want.count(c.id)) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::printf("criterion %2d %s: %s (%.0fs) %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", since(t0),
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed ? 1 : 0;
}
