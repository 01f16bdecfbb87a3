// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "vtx/evolution.hpp"

using namespace vtx;

namespace {

const ZeroModeBasis& one_vortex() {
  static const ZeroModeBasis b = zero_modes({cplx(0.03, 0.01)}, Grid::square(8.0, 0.1));
  return b;
}

double max_abs_diff(const FieldPair& a, const FieldPair& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.phi.size(); ++i) m = std::max(m, std::abs(a.phi.v[i] - b.phi.v[i]));
  for (int j = 0; j < a.grid().dim; ++j)
    for (std::size_t i = 0; i < a.phi.size(); ++i) m = std::max(m, std::abs(a.a.c[j].v[i] - b.a.c[j].v[i]));
  return m;
}

TangentVector bump(const Grid& g, double s) {
  TangentVector t(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto c = g.coords(i);
    double x = g.coord(0, c[0]) - 0.4, y = g.coord(1, c[1]) + 0.2;
    double w = std::exp(-(x * x + y * y) / (s * s));
    t.phi.v[i] = w * cplx(std::cos(x + 0.3 * y), 0.5 * y);
    t.a.c[0].v[i] = w * (0.3 + x * y);
    t.a.c[1].v[i] = w * (x - 0.2);
  }
  return t;
}

}  // namespace

TEST_CASE("static vortex data stays put") {
  const auto& B = one_vortex();
  EvolState s = init_adiabatic(B, {0.0, 0.0}, 0.0);
  CHECK(s.gauss_initial <= 1e-9);
  EvolveOptions o;
  o.t_end = 10.0;
  o.sample_dt = 1.0;
  auto r = evolve(s, o);
  const cplx z0 = r.rows.front().positions.at(0);
  for (const auto& row : r.rows) {
    REQUIRE(row.positions.size() == 1);
    CHECK(std::abs(row.positions[0] - z0) <= 1e-3);
  }
  CHECK(std::abs(z0 - cplx(0.03, 0.01)) <= 1e-3);
  CHECK(r.energy_drift <= 1e-6);
  CHECK(r.charge_constant);
}

TEST_CASE("kinetic energy of adiabatic data is eps^2 times the metric") {
  const auto& B = one_vortex();
  const double eps = 0.1;
  for (int mu = 0; mu < 2; ++mu) {
    std::vector<double> q(2, 0.0);
    q[mu] = 1.0;
    EvolState s = init_adiabatic(B, q, eps);
    CHECK(std::abs(kinetic_energy(s) - eps * eps * B.gram(mu, mu)) <= 1e-2 * eps * eps * B.gram(mu, mu));
    CHECK(s.gauss_initial <= 1e-6);
  }
}

TEST_CASE("moving vortex conserves energy, constraint and charge") {
  const auto& B = one_vortex();
  EvolState s = init_adiabatic(B, {1.0, 0.5}, 0.1);
  const double E0 = total_energy(s);
  EvolveOptions o;
  o.t_end = 10.0;
  o.sample_dt = 0.5;
  auto r = evolve(s, o);
  CHECK(r.steps >= 283);
  CHECK(r.energy_drift / o.t_end <= 1e-6);
  CHECK(r.energy_rate <= 1e-6);
  CHECK(r.gauss_drift / o.t_end <= 1e-8);
  CHECK(r.charge_constant);
  CHECK(std::abs(total_energy(r.state) - E0) <= 1e-6 * E0 * o.t_end);
  // Moves roughly at the imposed velocity.
  cplx d = r.rows.back().positions.at(0) - r.rows.front().positions.at(0);
  CHECK(std::abs(d - cplx(1.0, 0.5)) <= 0.02);
}

TEST_CASE("Gauss residual drift over a thousand steps") {
  const auto& B = one_vortex();
  EvolState s = init_adiabatic(B, {-0.7, 0.4}, 0.2);
  const double E0 = total_energy(s);
  const double G0 = gauss_residual(s);
  const double dt = 0.5 * cfl_limit(s.grid());
  for (int n = 0; n < 1000; ++n) leapfrog_step(s, dt);
  CHECK(std::abs(gauss_residual(s) - G0) / E0 / s.t <= 1e-8);
}

TEST_CASE("forward then backward integration returns the initial state") {
  const auto& B = one_vortex();
  EvolState s0 = init_adiabatic(B, {1.0, -0.3}, 0.2);
  EvolState s = s0;
  const double dt = 0.5 * cfl_limit(s.grid());
  for (int n = 0; n < 300; ++n) leapfrog_step(s, dt);
  CHECK(max_abs_diff(s.c, s0.c) > 1e-2);
  s.p *= -1.0;
  for (int n = 0; n < 300; ++n) leapfrog_step(s, dt);
  s.p *= -1.0;
  CHECK(max_abs_diff(s.c, s0.c) <= 1e-8);
  CHECK(max_abs_diff(s.p, s0.p) <= 1e-8);
}

TEST_CASE("Higgs mode dispersion about the vacuum") {
  // Standing wave vanishing on the innermost frozen nodes: an exact eigenmode of
  // the linearized lattice operator with omega^2 = 1 + sum (2/h sin(k h/2))^2.
  const double h = 0.1, L = 6.0, delta = 1e-5;
  Grid g = Grid::square(L, h);
  const double x1 = g.coord(0, 1), len = g.coord(0, g.n[0] - 2) - x1;
  const double kx = 3 * std::numbers::pi / len, ky = std::numbers::pi / len;
  FieldPair c(g), p(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto co = g.coords(i);
    double x = g.coord(0, co[0]) - x1, y = g.coord(1, co[1]) - x1;
    c.phi.v[i] = 1.0 + delta * std::sin(kx * x) * std::sin(ky * y);
  }
  EvolState s = make_evol_state(c, p);
  const std::size_t probe = g.index(int(std::lround((len / 6) / h)) + 1, g.n[1] / 2);
  const double dt = 0.5 * cfl_limit(g);
  double prev = s.c.phi.v[probe].real() - 1.0, tprev = 0.0;
  std::vector<double> crossings;
  while (s.t < 40.0) {
    leapfrog_step(s, dt);
    double v = s.c.phi.v[probe].real() - 1.0;
    if ((prev > 0) != (v > 0)) crossings.push_back(tprev + dt * prev / (prev - v));
    prev = v;
    tprev = s.t;
  }
  REQUIRE(crossings.size() >= 6);
  double omega = std::numbers::pi * double(crossings.size() - 1) / (crossings.back() - crossings.front());
  double k2 = kx * kx + ky * ky;
  CHECK(std::abs(omega * omega - (k2 + 1.0)) <= 0.02 * (k2 + 1.0));
  double sx = 2 / h * std::sin(kx * h / 2), sy = 2 / h * std::sin(ky * h / 2);
  CHECK(std::abs(omega * omega - (1.0 + sx * sx + sy * sy)) <= 1e-3 * (k2 + 1.0));
}

TEST_CASE("corrupted electric field is flagged") {
  const auto& B = one_vortex();
  EvolState s = init_adiabatic(B, {1.0, 0.0}, 0.1);
  const double clean = gauss_residual(s);
  std::mt19937 rng(7);
  std::normal_distribution<double> nd;
  for (auto& x : s.p.a.c[0].v) x += 0.01 * nd(rng);
  apply_mask(s.p, s.mask);
  CHECK(clean <= 1e-6);
  CHECK(gauss_residual(s) >= 1e-2);
}

TEST_CASE("CFL violation and non-finite fields abort") {
  const auto& B = one_vortex();
  EvolState s = init_adiabatic(B, {0.0, 0.0}, 0.0);
  CHECK_THROWS_AS(leapfrog_step(s, 1.01 * cfl_limit(s.grid())), EvolutionError);
  EvolState bad = s;
  bad.p.phi.v[bad.grid().index(40, 40)] = cplx(std::nan(""), 0.0);
  try {
    leapfrog_step(bad, 0.01);
    FAIL("expected an abort");
  } catch (const EvolutionError& e) {
    REQUIRE(e.last_good.has_value());
    CHECK(e.last_good->t == 0.0);
  }
}

TEST_CASE("zero on a lattice edge is counted once") {
  Grid g = Grid::square(2.0, 0.1);
  for (double x0 : {0.05, 0.0, 0.1 / 3}) {
    ComplexField phi = sample<cplx>(g, [&](double x, double y, double) { return cplx(x - x0, y); });
    auto z = higgs_zeros(phi);
    REQUIRE(z.size() == 1);
    CHECK(std::abs(z[0].z - cplx(x0, 0.0)) <= 1e-12);
    CHECK(plaquette_winding_total(phi) == 1);
  }
}

TEST_CASE("projection onto zero modes") {
  const auto& B = one_vortex();
  EvolState s = init_adiabatic(B, {0.0, 0.0}, 0.0);
  for (double c : project_c_mu(s, B)) CHECK(std::abs(c) <= 1e-12);
  EvolState t = s;
  t.c.axpy(1e-3, B.modes[0]);
  auto c = project_c_mu(t, B);
  CHECK(std::abs(c[0] - 1e-3) <= 1e-6);
  CHECK(std::abs(c[1]) <= 1e-6);
}

TEST_CASE("perturbation energies") {
  const auto& B = one_vortex();
  EvolState s = init_adiabatic(B, {0.0, 0.0}, 0.0);
  auto q0 = energies_Q(s, B);
  CHECK(q0.Q1 == 0.0);
  CHECK(q0.Q2 == 0.0);

  // Zero modes are in the kernel.
  for (const auto& n : B.modes) CHECK(std::abs(dot(apply_M(B, n), n)) <= 1e-3 * dot(n, n));

  // Coercivity: Q1 >= gamma_min ||u||^2 in the discrete H1 form for u orthogonal to the modes.
  auto rep = coercivity(B);
  REQUIRE(rep.gamma_min > 0.0);
  TangentVector u = bump(B.base.grid(), 1.0);
  apply_mask(u, B.base.mask);
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& n : B.modes) u.axpy(-dot(n, u), n);
  u *= 1e-3 / norm(u);
  EvolState t = s;
  t.c += u;
  auto q = energies_Q(t, B);
  DstPreconditioner pre(B.base.mask, 1.0);
  Vec x = flatten(u), y;
  pre.apply_forward(x, y);
  double h1 = 0.0, l2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    h1 += x[i] * y[i];
    l2 += x[i] * x[i];
  }
  h1 *= dot(u, u) / l2;  // same weights as dot
  CHECK(q.Q1 >= rep.gamma_min * h1 * (1.0 - 1e-6));
  CHECK(q.Q2 > 0.0);
}

TEST_CASE("three-dimensional modulated line") {
  // The z extent covers one wavelength of the modulation q(eps z).
  auto B = zero_modes({cplx(0.0, 0.0)}, Grid::square(4.0, 0.1));
  Grid g3 = Grid::box(4.0, 4.0, 0.1);
  const double eps = 0.25;
  auto qdot = [&](double z) { return std::vector<double>{std::sin(2 * std::numbers::pi * eps * z), 0.0}; };
  EvolState s = init_adiabatic_3d(B, g3, qdot, eps);
  CHECK(s.gauss_initial <= 1e-6);
  EvolveOptions o;
  o.t_end = 4.0;
  o.sample_dt = 0.25;
  auto r = evolve(s, o);
  CHECK(r.energy_rate <= 1e-6);
  CHECK(r.energy_drift <= 2e-5);  // bounded leapfrog oscillation
  CHECK(r.gauss_drift / o.t_end <= 1e-8);
  CHECK(r.charge_constant);
  for (const auto& row : r.rows) CHECK(row.positions.size() == 1);
  auto c = project_c_mu_slices(r.state, B);
  CHECK(c.size() == std::size_t(g3.n[2]));
  for (const auto& v : c)
    for (double x : v) CHECK(std::isfinite(x));
  auto u = apply_M(B, r.state.p);
  CHECK(std::isfinite(norm(u)));
}

TEST_CASE("adiabatic harness at zero speed") {
  auto m = ReducedMetric::read_csv(VTX_TEST_DATA_DIR "/reduced_metric_h0.1.csv");
  GeodesicState g;
  g.r = 2.0;
  AdiabaticOptions o;
  o.L = 8.0;
  auto rep = adiabatic_experiment(m, g, {0.0}, o);
  REQUIRE(rep.runs.size() == 1);
  CHECK(rep.runs[0].error <= 1e-3);
  CHECK(rep.runs[0].charge_constant);
}
