// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#include "vtx/evolution.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numbers>

namespace vtx {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite(const FieldPair& f) {
  for (const auto& z : f.phi.v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  for (const auto& c : f.a.c)
    for (double x : c.v)
      if (!std::isfinite(x)) return false;
  return true;
}

Grid xy_grid(const Grid& g) { return Grid({g.n[0], g.n[1]}, {g.h[0], g.h[1]}, {g.origin[0], g.origin[1]}); }

bool same_xy(const Grid& g2, const Grid& g3) {
  return g2.dim == 2 && g3.dim == 3 && g2.n[0] == g3.n[0] && g2.n[1] == g3.n[1] && g2.h[0] == g3.h[0] &&
         g2.h[1] == g3.h[1] && g2.origin[0] == g3.origin[0] && g2.origin[1] == g3.origin[1];
}

// Components (phi, a_1, a_2) of a 3D pair on slice k as a 2D pair.
FieldPair slice_pair(const FieldPair& f, int k) {
  const Grid& g = f.grid();
  FieldPair out(xy_grid(g));
  const std::size_t n2 = std::size_t(g.n[0]) * g.n[1];
  const std::size_t off = std::size_t(k) * n2;
  for (std::size_t i = 0; i < n2; ++i) {
    out.phi.v[i] = f.phi.v[off + i];
    out.a.c[0].v[i] = f.a.c[0].v[off + i];
    out.a.c[1].v[i] = f.a.c[1].v[off + i];
  }
  return out;
}

void insert_slice(FieldPair& f, const FieldPair& s, int k) {
  const Grid& g = f.grid();
  const std::size_t n2 = std::size_t(g.n[0]) * g.n[1];
  const std::size_t off = std::size_t(k) * n2;
  for (std::size_t i = 0; i < n2; ++i) {
    f.phi.v[off + i] = s.phi.v[i];
    f.a.c[0].v[off + i] = s.a.c[0].v[i];
    f.a.c[1].v[off + i] = s.a.c[1].v[i];
  }
}

// Difference of a state from a z-independent 2D reference.
FieldPair deviation(const EvolState& s, const ZeroModeBasis& ref) {
  const Grid& g = s.grid();
  const FieldPair& r = ref.base.c;
  FieldPair u = s.c;
  if (g.dim == 2) {
    require_same_grid(g, r.grid(), "deviation");
    u -= r;
    return u;
  }
  if (!same_xy(r.grid(), g)) throw EvolutionError("reference and state lattices differ");
  for (int k = 0; k < g.n[2]; ++k) {
    FieldPair sl = slice_pair(u, k);
    sl -= r;
    insert_slice(u, sl, k);
  }
  return u;
}

int winding_sum(const std::vector<HiggsZero>& z) {
  int w = 0;
  for (const auto& q : z) w += q.winding;
  return w;
}

}  // namespace

double cfl_limit(const Grid& g) { return g.spacing() / std::sqrt(double(g.dim)); }

EvolState make_evol_state(const FieldPair& c, const FieldPair& p, double lambda, int ring) {
  require_same_grid(c.grid(), p.grid(), "make_evol_state");
  EvolState s;
  s.c = c;
  s.p = p;
  s.lambda = lambda;
  s.mask = make_mask(c.grid(), ring);
  apply_mask(s.p, s.mask);
  s.gauss_initial = gauss_residual(s);
  return s;
}

EvolState init_adiabatic(const ZeroModeBasis& basis, const std::vector<double>& qdot, double eps, double lambda) {
  if (qdot.size() != basis.tangents.size()) throw EvolutionError("init_adiabatic: velocity has the wrong length");
  FieldPair p(basis.base.grid());
  for (std::size_t mu = 0; mu < qdot.size(); ++mu) p.axpy(eps * qdot[mu], basis.tangents[mu]);
  return make_evol_state(basis.base.c, p, lambda);
}

EvolState init_adiabatic_3d(const ZeroModeBasis& basis, const Grid& g3,
                            const std::function<std::vector<double>(double)>& qdot, double eps, double lambda) {
  if (!same_xy(basis.base.grid(), g3)) throw EvolutionError("init_adiabatic_3d: x-y lattice must match the basis");
  FieldPair c(g3), p(g3);
  for (int k = 0; k < g3.n[2]; ++k) {
    auto q = qdot(g3.coord(2, k));
    if (q.size() != basis.tangents.size()) throw EvolutionError("init_adiabatic_3d: velocity has the wrong length");
    FieldPair v(basis.base.grid());
    for (std::size_t mu = 0; mu < q.size(); ++mu) v.axpy(eps * q[mu], basis.tangents[mu]);
    insert_slice(c, basis.base.c, k);
    insert_slice(p, v, k);
  }
  return make_evol_state(c, p, lambda);
}

void leapfrog_step(EvolState& s, double dt) {
  if (!(dt > 0.0) || dt > cfl_limit(s.grid()) * (1.0 + 1e-12))
    throw EvolutionError("time step violates the CFL bound dt <= h / sqrt(d)");
  EvolState good = s;
  FieldPair R = static_gradient(s.c, s.lambda, s.mask);
  s.p.axpy(-0.5 * dt, R);
  s.c.axpy(dt, s.p);
  R = static_gradient(s.c, s.lambda, s.mask);
  s.p.axpy(-0.5 * dt, R);
  s.t += dt;
  if (!finite(s.c) || !finite(s.p))
    throw EvolutionError("non-finite field at t = " + std::to_string(s.t), std::move(good));
}

double kinetic_energy(const EvolState& s) { return dot(s.p, s.p); }

double total_energy(const EvolState& s) { return kinetic_energy(s) + lattice_energy(s.c, s.lambda); }

double gauss_residual(const EvolState& s) {
  ScalarField G = gauss_field(s.c, s.p, s.mask);
  double acc = 0.0;
  for (double x : G.v) acc += x * x;
  return std::sqrt(acc * s.grid().cell_volume());
}

ComplexField z_slice(const ComplexField& phi, int k) {
  const Grid& g = phi.grid;
  if (g.dim == 2) return phi;
  if (k < 0 || k >= g.n[2]) throw EvolutionError("z slice out of range");
  ComplexField out(xy_grid(g));
  const std::size_t n2 = out.size();
  std::copy_n(phi.v.begin() + std::ptrdiff_t(std::size_t(k) * n2), n2, out.v.begin());
  return out;
}

int topological_charge(const EvolState& s) {
  return plaquette_winding_total(z_slice(s.c.phi, s.grid().dim == 3 ? s.grid().n[2] / 2 : 0));
}

std::vector<HiggsZero> track_vortices(const EvolState& s, int slice) {
  if (s.grid().dim == 2) return higgs_zeros(s.c.phi);
  return higgs_zeros(z_slice(s.c.phi, slice < 0 ? s.grid().n[2] / 2 : slice));
}

std::vector<double> project_c_mu(const EvolState& s, const ZeroModeBasis& ref) {
  if (s.grid().dim != 2) throw EvolutionError("project_c_mu: use project_c_mu_slices in 3D");
  FieldPair u = deviation(s, ref);
  std::vector<double> c;
  for (const auto& n : ref.modes) c.push_back(dot(u, n));
  return c;
}

std::vector<std::vector<double>> project_c_mu_slices(const EvolState& s, const ZeroModeBasis& ref) {
  if (s.grid().dim != 3) throw EvolutionError("project_c_mu_slices needs a 3D state");
  FieldPair u = deviation(s, ref);
  std::vector<std::vector<double>> out;
  for (int k = 0; k < s.grid().n[2]; ++k) {
    FieldPair sl = slice_pair(u, k);
    std::vector<double> c;
    for (const auto& n : ref.modes) c.push_back(dot(sl, n));
    out.push_back(std::move(c));
  }
  return out;
}

FieldPair apply_M(const ZeroModeBasis& ref, const FieldPair& u) {
  const Grid& g = u.grid();
  if (g.dim == 2) return apply_L(ref.base, u);
  if (!same_xy(ref.base.grid(), g)) throw EvolutionError("apply_M: lattices differ");
  const double h = g.spacing(), h2 = h * h;
  const int nz = g.n[2];
  const auto sz = g.stride(2);
  FieldPair out(g);
  for (int k = 0; k < nz; ++k) insert_slice(out, apply_L(ref.base, slice_pair(u, k)), k);
  // -d_z^2 on (phi~, a~_1, a~_2), zero outside the box.
  const std::size_t n2 = std::size_t(g.n[0]) * g.n[1];
  for (int k = 0; k < nz; ++k)
    for (std::size_t i = 0; i < n2; ++i) {
      std::size_t idx = std::size_t(k) * n2 + i;
      auto lap = [&](auto get) {
        auto c = 2.0 * get(idx);
        if (k > 0) c -= get(idx - sz);
        if (k + 1 < nz) c -= get(idx + sz);
        return c / h2;
      };
      out.phi.v[idx] += lap([&](std::size_t j) { return u.phi.v[j]; });
      out.a.c[0].v[idx] += lap([&](std::size_t j) { return u.a.c[0].v[j]; });
      out.a.c[1].v[idx] += lap([&](std::size_t j) { return u.a.c[1].v[j]; });
    }
  // (-Delta + |phi|^2) on a~_3, seven-point stencil.
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    auto co = g.coords(idx);
    double v = u.a.c[2].v[idx];
    double acc = 0.0;
    for (int j = 0; j < 3; ++j) {
      acc += 2.0 * v;
      if (co[j] > 0) acc -= u.a.c[2].v[idx - g.stride(j)];
      if (co[j] + 1 < g.n[j]) acc -= u.a.c[2].v[idx + g.stride(j)];
    }
    out.a.c[2].v[idx] = acc / h2 + std::norm(ref.base.c.phi.v[idx % n2]) * v;
  }
  auto m = make_mask(g, 2);
  apply_mask(out, m);
  return out;
}

QEnergies energies_Q(const EvolState& s, const ZeroModeBasis& ref) {
  FieldPair u = deviation(s, ref);
  FieldPair Mu = apply_M(ref, u);
  FieldPair Mut = apply_M(ref, s.p);
  FieldPair MMu = apply_M(ref, Mu);
  QEnergies q;
  q.Q1 = dot(s.p, s.p) + dot(Mu, u);
  q.Q2 = dot(Mut, Mut) + dot(MMu, Mu);
  return q;
}

EvolveResult evolve(EvolState s, const EvolveOptions& opt) {
  const double limit = cfl_limit(s.grid());
  double dt = opt.dt.value_or(0.5 * limit);
  if (!(opt.t_end >= 0.0)) throw EvolutionError("t_end must be non-negative");
  const int nsteps = opt.t_end > 0.0 ? int(std::ceil(opt.t_end / dt - 1e-9)) : 0;
  if (nsteps > 0) dt = opt.t_end / nsteps;
  const int every = std::max(1, int(std::lround(opt.sample_dt / std::max(dt, 1e-300))));

  EvolveResult res;
  const double E0 = total_energy(s);
  const ScalarField G0 = gauss_field(s.c, s.p, s.mask);
  const int Q0 = topological_charge(s);
  double rmax = 0.0;
  for (const auto& z : track_vortices(s)) rmax = std::max(rmax, std::abs(z.z));
  double half = 1e300;
  for (int a = 0; a < s.grid().dim; ++a) {
    if (a == 2) continue;
    half = std::min(half, 0.5 * (s.grid().n[a] - 1) * s.grid().h[a]);
  }
  res.horizon = 2.0 * std::max(0.0, half - rmax);

  auto sample = [&]() {
    DiagnosticsRow row;
    row.t = s.t;
    row.energy = total_energy(s);
    ScalarField G = gauss_field(s.c, s.p, s.mask);
    double acc = 0.0;
    for (std::size_t i = 0; i < G.v.size(); ++i) acc += (G.v[i] - G0.v[i]) * (G.v[i] - G0.v[i]);
    row.gauss = std::sqrt(acc * s.grid().cell_volume());
    row.charge = topological_charge(s);
    if (opt.track) {
      auto zs = track_vortices(s);
      for (const auto& z : zs) row.positions.push_back(z.z);
      if (int(zs.size()) != std::abs(row.charge) || winding_sum(zs) != row.charge)
        throw EvolutionError("topology violation: zero count differs from winding at t = " + std::to_string(s.t),
                             s);
    }
    if (opt.reference && s.grid().dim == 2) {
      row.c_mu = project_c_mu(s, *opt.reference);
      auto q = energies_Q(s, *opt.reference);
      row.Q1 = q.Q1;
      row.Q2 = q.Q2;
    }
    res.energy_drift = std::max(res.energy_drift, std::abs(row.energy - E0) / std::abs(E0));
    res.gauss_drift = std::max(res.gauss_drift, row.gauss / std::abs(E0));
    if (row.charge != Q0) res.charge_constant = false;
    if (opt.on_sample) opt.on_sample(s, row);
    res.rows.push_back(std::move(row));
  };

  sample();
  for (int n = 1; n <= nsteps; ++n) {
    leapfrog_step(s, dt);
    if (n % every == 0 || n == nsteps) sample();
  }
  if (res.rows.size() > 1) {
    double mt = 0.0, me = 0.0;
    for (const auto& r : res.rows) {
      mt += r.t;
      me += (r.energy - E0) / E0;
    }
    mt /= double(res.rows.size());
    me /= double(res.rows.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& r : res.rows) {
      sxy += (r.t - mt) * ((r.energy - E0) / E0 - me);
      sxx += (r.t - mt) * (r.t - mt);
    }
    if (sxx > 0.0) res.energy_rate = std::abs(sxy / sxx);
  }
  res.steps = nsteps;
  res.state = std::move(s);
  return res;
}

std::vector<double> center_velocities(const ReducedMetric& m, const GeodesicState& g) {
  double F = m.F_at(g.r), G = m.G_at(g.r);
  double rdot = g.p_r / (F * F);
  double thdot = g.p_theta / (G * G);
  cplx Zdot = cplx(rdot, g.r * thdot) * std::polar(1.0, g.theta);
  return {Zdot.real(), Zdot.imag(), -Zdot.real(), -Zdot.imag()};
}

namespace {

// Max over vortices of |a_k - b_k| with the better of the two pairings.
double pair_error(const std::vector<cplx>& a, const std::vector<cplx>& b, bool* swapped = nullptr) {
  if (a.size() != 2 || b.size() != 2) return 1e300;
  double d0 = std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1]));
  double d1 = std::max(std::abs(a[0] - b[1]), std::abs(a[1] - b[0]));
  if (swapped) *swapped = d1 < d0;
  return std::min(d0, d1);
}

AdiabaticRun adiabatic_run(const ZeroModeBasis& basis, const ReducedMetric& m, const GeodesicState& init,
                           double eps, const AdiabaticOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  AdiabaticRun run;
  run.epsilon = eps;
  const int S = std::max(1, opt.samples);
  const int sub = 50;
  IntegrateOptions io;
  io.dtau = opt.tau_max / (S * sub);
  io.sample_every = sub;
  Trajectory traj = geodesic_integrate(m, init, opt.tau_max, io);

  EvolState s = init_adiabatic(basis, center_velocities(m, init), eps);
  const double limit = cfl_limit(s.grid());
  const double t_end = eps > 0.0 ? opt.tau_max / eps : 0.0;
  const double dt_sample = t_end / S;
  int per = eps > 0.0 ? int(std::ceil(dt_sample / (opt.cfl_fraction * limit) - 1e-9)) : 0;
  EvolveOptions eo;
  eo.t_end = t_end;
  eo.dt = per > 0 ? dt_sample / per : opt.cfl_fraction * limit;
  eo.sample_dt = dt_sample > 0.0 ? dt_sample : 1.0;
  EvolveResult er = evolve(std::move(s), eo);
  run.energy_drift = er.energy_drift;
  run.energy_rate = er.energy_rate;
  run.gauss_drift = er.gauss_drift;
  run.charge_constant = er.charge_constant;

  for (std::size_t k = 0; k < er.rows.size() && k < traj.size(); ++k) {
    const auto& row = traj[k];
    cplx Z = std::polar(row.r, row.theta);
    std::vector<cplx> pred{Z, -Z};
    std::vector<cplx> got = er.rows[k].positions;
    bool sw = false;
    run.error = std::max(run.error, pair_error(got, pred, &sw));
    if (got.size() == 2 && sw) std::swap(got[0], got[1]);
    run.tau.push_back(row.tau);
    run.tracked.push_back(got);
    run.predicted.push_back(pred);
    if (eps == 0.0) break;
  }
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

}  // namespace

AdiabaticReport adiabatic_experiment(const ReducedMetric& m, const GeodesicState& init,
                                     const std::vector<double>& eps, const AdiabaticOptions& opt) {
  cplx Z = std::polar(init.r, init.theta);
  ZeroModeOptions zo;
  zo.coefficient_chart = false;
  ZeroModeBasis basis = zero_modes({Z, -Z}, Grid::square(opt.L, opt.h), zo);
  AdiabaticReport rep;
  rep.runs.resize(eps.size());
  if (opt.jobs > 1) {
    std::vector<std::future<AdiabaticRun>> fut;
    for (double e : eps) fut.push_back(std::async(std::launch::async, adiabatic_run, std::cref(basis), std::cref(m),
                                                  std::cref(init), e, std::cref(opt)));
    for (std::size_t i = 0; i < eps.size(); ++i) rep.runs[i] = fut[i].get();
  } else {
    for (std::size_t i = 0; i < eps.size(); ++i) rep.runs[i] = adiabatic_run(basis, m, init, eps[i], opt);
  }
  for (std::size_t i = 0; i + 1 < rep.runs.size(); ++i)
    rep.ratios.push_back(rep.runs[i].error / rep.runs[i + 1].error);
  return rep;
}

ScatteringReport head_on_scattering(double r0, double v, double L, double h) {
  ZeroModeOptions zo;
  zo.coefficient_chart = false;
  ZeroModeBasis basis = zero_modes({cplx(r0, 0), cplx(-r0, 0)}, Grid::square(L, h), zo);
  EvolState s = init_adiabatic(basis, {-1.0, 0.0, 1.0, 0.0}, v);
  EvolveOptions eo;
  eo.t_end = 2.0 * r0 / v;
  eo.sample_dt = 0.25;
  EvolveResult er = evolve(std::move(s), eo);
  ScatteringReport rep;
  rep.energy_drift = er.energy_drift;
  rep.energy_rate = er.energy_rate;
  rep.gauss_drift = er.gauss_drift;
  rep.charge_constant = er.charge_constant;
  rep.rows = er.rows;
  const auto& last = er.rows.back().positions;
  if (last.size() == 2) {
    cplx rel = 0.5 * (last[0] - last[1]);
    double ang = std::arg(rel) * 180.0 / kPi;
    ang = std::fmod(ang + 360.0, 180.0);
    rep.angle_deg = ang;
  }
  return rep;
}

}  // namespace vtx
