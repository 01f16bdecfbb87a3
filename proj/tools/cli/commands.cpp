// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#include "commands.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "output.hpp"
#include "vtx/ansatz.hpp"
#include "vtx/evolution.hpp"
#include "vtx/snapshot.hpp"

namespace vcli {

namespace fs = std::filesystem;
using namespace vtx;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = std::numbers::pi;

// Diagnostics that may legitimately fail on small domains are recorded as NaN.
template <class F>
double or_nan(F&& f) {
  try {
    return double(f());
  } catch (const SolverError&) {
    return kNaN;
  }
}

void finish_csv(Run& run, CsvWriter& w, const std::string& name, const std::string& title) {
  w.close();
  if (run.config().boolean("emit_plots")) run.plot_script(name, title);
}

Grid square_grid(const RunConfig& c) { return Grid::square(c.real("L"), c.real("h")); }

int cmd_solve(Run& run) {
  const RunConfig& c = run.config();
  VortexSolveOptions o;
  o.mu = c.real("mu");
  o.tolerance = c.real("tol");
  o.max_newton_steps = c.integer("max_iterations");
  VortexConfig v = solve_vortex(c.centers("centers"), square_grid(c), o);
  double N = v.N();
  bool ok = v.report.converged;
  DecayFit fit;
  bool have_fit = ok;
  if (ok) {
    try {
      fit = decay_fit(v);
    } catch (const SolverError&) {
      have_fit = false;
    }
  }
  double E = energy(v);
  CsvWriter w(run, "solve.csv",
              {"N", "L", "h", "mu", "converged", "newton_steps", "taubes_residual", "flux_over_2pi", "winding",
               "energy", "energy_over_2piN", "bogomolny_residual", "rate_potential", "rate_covariant"});
  w.row({N, c.real("L"), c.real("h"), v.mu, ok ? 1.0 : 0.0, double(v.report.iterations), v.report.residual,
         flux(v) / (2 * kPi), or_nan([&] { return winding(v); }), E, E / (2 * kPi * N), bogomolny_residual(v),
         have_fit ? fit.rate_potential : kNaN, have_fit ? fit.rate_covariant : kNaN});
  w.close();
  write_snapshot(run.path("solve.vxf").string(),
                 {{"phi", v.phi}, {"alpha_x", v.alpha[0]}, {"alpha_y", v.alpha[1]}, {"v", v.v}});
  run.add_file("solve.vxf");
  if (!ok) throw SolverError("Newton iteration did not converge: " + v.report.message);
  return kOk;
}

int cmd_radial(Run& run) {
  const RunConfig& c = run.config();
  RadialProfile p = radial_vortex(c.integer("n"), c.real("r_max"), c.integer("nodes"));
  CsvWriter w(run, "radial.csv", {"r", "rho", "a"});
  int every = c.integer("sample_every");
  for (std::size_t i = 0; i < p.r.size(); i += every) w.row({p.r[i], p.rho[i], p.a[i]});
  finish_csv(run, w, "radial.csv", "radial profile");
  // Least-squares slope of log(1 - rho) on the tail window [r_max/4, r_max/2].
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < p.r.size(); ++i) {
    double r = p.r[i], y = 1.0 - p.rho[i];
    if (r < 0.25 * c.real("r_max") || r > 0.5 * c.real("r_max") || !(y > 0)) continue;
    sx += r, sy += std::log(y), sxx += r * r, sxy += r * std::log(y), ++n;
  }
  double slope = n >= 3 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : kNaN;
  CsvWriter s(run, "radial_summary.csv", {"n", "A", "residual", "newton_steps", "tail_log_derivative"});
  s.row({double(p.n), p.A, p.residual, double(p.newton_steps), slope});
  s.close();
  return kOk;
}

ZeroModeBasis basis_from(const RunConfig& c) {
  ZeroModeOptions o;
  o.relax = c.boolean("relax");
  return zero_modes(c.centers("centers"), square_grid(c), o);
}

int cmd_modes(Run& run) {
  const RunConfig& c = run.config();
  ZeroModeBasis B = basis_from(c);
  CsvWriter g(run, "gram.csv", {"i", "j", "gram"});
  for (int i = 0; i < B.gram.rows(); ++i)
    for (int j = 0; j < B.gram.cols(); ++j) g.row({double(i), double(j), B.gram(i, j)});
  g.close();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B.gram);
  CsvWriter m(run, "modes.csv", {"index", "gram_eigenvalue", "gauge_residual", "raw_gauge_residual"});
  for (std::size_t i = 0; i < B.tangents.size(); ++i)
    m.row({double(i), es.eigenvalues()(Eigen::Index(i)), B.gauge_residuals[i], B.raw_gauge_residuals[i]});
  finish_csv(run, m, "modes.csv", "zero modes");
  return kOk;
}

int cmd_coercivity(Run& run) {
  const RunConfig& c = run.config();
  ZeroModeBasis B = basis_from(c);
  CoercivityOptions o;
  o.shift = c.real("shift");
  o.eig_tolerance = c.real("eig_tol");
  o.seed = unsigned(c.integer("seed"));
  CoercivityReport r = coercivity(B, o);
  std::size_t n = std::max({r.near_zero.size(), r.spectrum_head.size(), r.gamma_head.size()});
  auto at = [](const std::vector<double>& v, std::size_t i) { return i < v.size() ? v[i] : kNaN; };
  CsvWriter s(run, "spectrum.csv", {"index", "near_zero", "ritz", "gamma"});
  for (std::size_t i = 0; i < n; ++i) s.row({double(i), at(r.near_zero, i), at(r.spectrum_head, i), at(r.gamma_head, i)});
  finish_csv(run, s, "spectrum.csv", "spectrum of the corrected Hessian");
  CsvWriter w(run, "coercivity.csv", {"N", "gamma_min", "converged", "iterations_kernel", "iterations_gamma"});
  w.row({double(B.config.N()), r.gamma_min, r.converged ? 1.0 : 0.0, double(r.iterations_kernel),
         double(r.iterations_gamma)});
  w.close();
  if (!r.converged) throw SolverError("eigenvalue iteration did not converge");
  return kOk;
}

int cmd_metric(Run& run) {
  const RunConfig& c = run.config();
  MetricSampleOptions o;
  o.margin = c.real("margin");
  o.h = c.real("h");
  o.jobs = run.jobs();
  o.modes.relax = c.boolean("relax");
  ReducedMetric m = sample_reduced_metric(c.list("r"), o);
  m.write_csv(run.path("metric.csv").string(), run.provenance());
  run.add_file("metric.csv");
  if (c.boolean("emit_plots")) run.plot_script("metric.csv", "reduced metric");
  return kOk;
}

GeodesicState reduced_state(const RunConfig& c) {
  GeodesicState s;
  s.r = c.real("r");
  s.theta = c.real("theta");
  s.p_r = c.real("p_r");
  s.p_theta = c.real("p_theta");
  return s;
}

void write_trajectory(Run& run, const Trajectory& t) {
  CsvWriter w(run, "trajectory.csv", {"tau", "r", "theta", "p_r", "p_theta", "H", "w_chart"});
  for (const auto& row : t) w.row({row.tau, row.r, row.theta, row.p_r, row.p_theta, row.H, row.w_chart ? 1.0 : 0.0});
  finish_csv(run, w, "trajectory.csv", "reduced trajectory");
}

IntegrateOptions integrate_options(const RunConfig& c) {
  IntegrateOptions o;
  o.dtau = c.real("dtau");
  o.sample_every = c.integer("sample_every");
  return o;
}

int cmd_geodesic(Run& run) {
  const RunConfig& c = run.config();
  ReducedMetric m = ReducedMetric::read_csv(c.text("metric"));
  write_trajectory(run, geodesic_integrate(m, reduced_state(c), c.real("tau_span"), integrate_options(c)));
  return kOk;
}

int cmd_hamiltonian(Run& run) {
  const RunConfig& c = run.config();
  ReducedMetric m = ReducedMetric::read_csv(c.text("metric"));
  write_trajectory(run, hamiltonian_integrate(m, reduced_state(c), c.integer("l"), c.real("epsilon"),
                                              c.real("tau_span"), integrate_options(c)));
  return kOk;
}

int cmd_wavemap(Run& run) {
  const RunConfig& c = run.config();
  ReducedMetric m = ReducedMetric::read_csv(c.text("metric"));
  double z0 = c.real("zeta0"), z1 = c.real("zeta1");
  cplx base = w_of(c.real("r"), c.real("theta"));
  auto bump = [&](double z) {
    double s = std::sin(kPi * (z - z0) / (z1 - z0));
    return s * s;
  };
  double amp = c.real("amplitude"), vel = c.real("velocity");
  WaveMapState s = make_wave_map(
      z0, z1, c.integer("nodes"),
      [&](double z) { return Eigen::Vector2d(base.real() + amp * bump(z), base.imag()); },
      [&](double z) { return Eigen::Vector2d(vel * bump(z), 0.0); });
  CsvWriter w(run, "wavemap.csv", {"tau", "zeta", "w_re", "w_im"});
  CsvWriter e(run, "wavemap_energy.csv", {"tau", "energy"});
  auto emit = [&] {
    for (std::size_t i = 0; i < s.size(); ++i) w.row({s.tau, s.zeta0 + double(i) * s.dzeta, s.q[i](0), s.q[i](1)});
    e.row({s.tau, wave_map_energy(m, s)});
  };
  double dtau = c.real("dtau");
  int steps = int(std::llround(c.real("tau_span") / dtau)), every = c.integer("sample_every");
  emit();
  for (int k = 1; k <= steps; ++k) {
    wave_map_step(m, s, dtau);
    if (k % every == 0 || k == steps) emit();
  }
  w.close();
  finish_csv(run, e, "wavemap_energy.csv", "wave map energy");
  return kOk;
}

std::vector<NamedField> state_fields(const EvolState& s) {
  std::vector<NamedField> f{{"Phi", s.c.phi}, {"Pi", s.p.phi}};
  const char* axis[3] = {"x", "y", "z"};
  for (int j = 0; j < s.grid().dim; ++j) {
    f.push_back({std::string("A_") + axis[j], s.c.a[j]});
    f.push_back({std::string("E_") + axis[j], s.p.a[j]});
  }
  return f;
}

int evolve_common(Run& run, bool three_d) {
  const RunConfig& c = run.config();
  ZeroModeOptions zo;
  ZeroModeBasis B = zero_modes(c.centers("centers"), square_grid(c), zo);
  std::size_t n = 2 * c.centers("centers").size();
  std::vector<double> qdot = c.has("velocities") ? c.list("velocities") : std::vector<double>(n, 0.0);
  double eps = c.real("epsilon"), lambda = c.real("lambda");
  EvolState s0;
  if (three_d) {
    double Lz = c.real("Lz"), mod = c.real("modulation");
    Grid g3 = Grid::box(c.real("L"), Lz, c.real("h"));
    s0 = init_adiabatic_3d(
        B, g3,
        [&](double z) {
          std::vector<double> q = qdot;
          for (double& x : q) x *= 1.0 + mod * std::sin(2 * kPi * z / Lz);
          return q;
        },
        eps, lambda);
  } else {
    s0 = init_adiabatic(B, qdot, eps, lambda);
  }
  int N = int(n / 2);
  std::vector<std::string> cols{"t", "energy", "gauss", "charge"};
  for (int k = 0; k < N; ++k) {
    cols.push_back("x" + std::to_string(k + 1));
    cols.push_back("y" + std::to_string(k + 1));
  }
  if (!three_d) {
    for (std::size_t m = 0; m < n; ++m) cols.push_back("c" + std::to_string(m + 1));
    cols.push_back("Q1");
    cols.push_back("Q2");
  }
  CsvWriter w(run, "diagnostics.csv", cols);
  EvolveOptions o;
  o.dt = c.real("cfl_fraction") * cfl_limit(s0.grid());
  o.t_end = c.real("t_end");
  o.sample_dt = c.real("sample_dt");
  if (!three_d) o.reference = &B;
  int every = c.integer("snapshot_every"), sample = 0;
  o.on_sample = [&](const EvolState& s, const DiagnosticsRow& r) {
    std::vector<double> row{r.t, r.energy, r.gauss, double(r.charge)};
    bool match = int(r.positions.size()) == N;
    for (int k = 0; k < N; ++k) {
      row.push_back(match ? r.positions[k].real() : kNaN);
      row.push_back(match ? r.positions[k].imag() : kNaN);
    }
    if (!three_d) {
      for (std::size_t m = 0; m < n; ++m) row.push_back(m < r.c_mu.size() ? r.c_mu[m] : kNaN);
      row.push_back(r.Q1);
      row.push_back(r.Q2);
    }
    w.row(row);
    if (every > 0 && sample % every == 0) {
      std::string name = "snapshot_" + std::to_string(sample) + ".vxf";
      write_snapshot(run.path(name).string(), state_fields(s));
      run.add_file(name);
    }
    ++sample;
  };
  EvolveResult res;
  try {
    res = evolve(s0, o);
  } catch (const EvolutionError& e) {
    if (e.last_good) {
      write_snapshot(run.path("last_good.vxf").string(), state_fields(*e.last_good));
      run.add_file("last_good.vxf");
    }
    throw;
  }
  finish_csv(run, w, "diagnostics.csv", three_d ? "3D evolution" : "2D evolution");
  write_snapshot(run.path("final.vxf").string(), state_fields(res.state));
  run.add_file("final.vxf");
  CsvWriter sm(run, "summary.csv",
               {"steps", "energy_drift", "energy_rate", "gauss_drift", "charge_constant", "horizon"});
  sm.row({double(res.steps), res.energy_drift, res.energy_rate, res.gauss_drift, res.charge_constant ? 1.0 : 0.0,
          res.horizon});
  sm.close();
  return kOk;
}

// Wave map sampled on a uniform (tau, zeta) grid: columns tau, zeta, x1, y1, x2, y2, ...
WaveMapFn wave_map_from_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("key 'source': cannot read '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header = false;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::vector<double> r;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        r.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("key 'source': malformed number '" + tok + "'");
      }
    }
    rows.push_back(r);
  }
  if (rows.empty() || rows[0].size() < 4 || rows[0].size() % 2)
    throw ConfigError("key 'source': expected columns tau,zeta,x1,y1,...");
  std::set<double> ts, zs;
  for (const auto& r : rows) {
    if (r.size() != rows[0].size()) throw ConfigError("key 'source': ragged rows");
    ts.insert(r[0]);
    zs.insert(r[1]);
  }
  int nt = int(ts.size()), nz = int(zs.size());
  if (nt < 2 || nz < 2 || std::size_t(nt * nz) != rows.size())
    throw ConfigError("key 'source': samples must fill a (tau, zeta) grid");
  double t0 = *ts.begin(), z0 = *zs.begin();
  double dt = (*ts.rbegin() - t0) / (nt - 1), dz = (*zs.rbegin() - z0) / (nz - 1);
  std::size_t comps = rows[0].size() - 2;
  std::vector<SpaceTimeSamples> s(comps);
  for (auto& x : s) {
    x.t0 = t0, x.dt = dt, x.z0 = z0, x.dz = dz, x.nt = nt, x.nz = nz;
    x.v.assign(std::size_t(nt * nz), 0.0);
  }
  for (const auto& r : rows) {
    int i = int(std::lround((r[0] - t0) / dt)), j = int(std::lround((r[1] - z0) / dz));
    if (std::abs(r[0] - (t0 + i * dt)) > 1e-9 * (1 + std::abs(r[0])) ||
        std::abs(r[1] - (z0 + j * dz)) > 1e-9 * (1 + std::abs(r[1])))
      throw ConfigError("key 'source': samples must lie on a uniform grid");
    for (std::size_t k = 0; k < comps; ++k) s[k].v[std::size_t(i * nz + j)] = r[k + 2];
  }
  return [s](double t, double z) {
    VortexCenters q;
    for (std::size_t k = 0; k + 1 < s.size(); k += 2) q.emplace_back(s[k](t, z), s[k + 1](t, z));
    return q;
  };
}

WaveMapFn ansatz_source(const RunConfig& c) {
  const std::string& src = c.text("source");
  if (src == "geodesic") {
    ReducedMetric m = ReducedMetric::read_csv(c.text("metric"));
    GeodesicState s;
    s.r = c.real("r");
    s.theta = c.real("theta");
    s.p_r = std::pow(m.F_at(s.r), 2) * c.real("rdot");
    s.p_theta = std::pow(m.G_at(s.r), 2) * c.real("thetadot");
    return geodesic_wave_map(m, s);
  }
  if (src == "flat") {
    VortexCenters base = c.centers("centers");
    return [base](double t, double z) {
      VortexCenters q = base;
      for (auto& x : q) x += cplx(0.5 * std::cos(t) * std::sin(z), 0.3 * std::sin(z - t));
      return q;
    };
  }
  return wave_map_from_csv(src);
}

int cmd_ansatz(Run& run) {
  const RunConfig& c = run.config();
  AnsatzOptions o;
  o.L = c.real("L");
  o.h = c.real("h");
  o.d = c.real("d");
  o.tau0 = c.real("tau0");
  o.zeta0 = c.real("zeta0");
  o.margin = c.real("margin");
  o.psi_tolerance = c.real("psi_tol");
  o.jobs = run.jobs();
  auto reps = residual_scan(ansatz_source(c), c.list("eps"), o);
  CsvWriter w(run, "ansatz_residual.csv",
              {"epsilon", "S_phi", "S_a1", "S_a2", "S_a0", "S_a3", "S0_phi", "S0_a1", "S0_a2", "S0_a0", "S0_a3",
               "continuity_residual", "continuity_relative", "max_T_pairing", "max_psi_residual",
               "max_psi_leakage", "max_psi_mode_overlap", "max_psi_gauge", "max_gauge_field_residual",
               "psi_tail_rate", "a0_tail_power"});
  for (const auto& r : reps)
    w.row({r.epsilon, r.S.phi, r.S.a1, r.S.a2, r.S.a0, r.S.a3, r.S_zeroth.phi, r.S_zeroth.a1, r.S_zeroth.a2,
           r.S_zeroth.a0, r.S_zeroth.a3, r.continuity.residual, r.continuity.relative, r.max_T_pairing,
           r.max_psi_residual, r.max_psi_leakage, r.max_psi_mode_overlap, r.max_psi_gauge,
           r.max_gauge_field_residual, r.psi_tail_rate, r.a0_tail_power});
  finish_csv(run, w, "ansatz_residual.csv", "ansatz residual norms");
  if (reps.size() >= 2) {
    CsvWriter q(run, "ansatz_ratios.csv", {"epsilon", "epsilon_next", "S_phi", "S_a1", "S_a2", "S_a0", "S_a3"});
    for (std::size_t i = 0; i + 1 < reps.size(); ++i) {
      const auto &a = reps[i].S, &b = reps[i + 1].S;
      q.row({reps[i].epsilon, reps[i + 1].epsilon, a.phi / b.phi, a.a1 / b.a1, a.a2 / b.a2, a.a0 / b.a0,
             a.a3 / b.a3});
    }
    q.close();
  }
  return kOk;
}

// Merges every CSV under `dir` into long format: source, config_sha256, row, column, value.
int cmd_report(Run& run) {
  const RunConfig& c = run.config();
  fs::path dir = c.text("dir");
  fs::path out = fs::weakly_canonical(run.dir());
  std::vector<fs::path> csvs;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
    fs::path p = fs::weakly_canonical(e.path());
    auto rel = p.lexically_relative(out);
    if (!rel.empty() && *rel.begin() != "..") continue;  // our own output
    csvs.push_back(e.path());
  }
  std::sort(csvs.begin(), csvs.end());
  std::ofstream f(run.path("report.csv"), std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write report.csv");
  run.add_file("report.csv");
  f << "# " << run.provenance() << "\n" << "source,config_sha256,row,column,value\n";
  for (const auto& p : csvs) {
    std::ifstream in(p);
    std::string line, hash = "unknown", src = p.lexically_relative(dir).generic_string();
    std::vector<std::string> cols;
    int row = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line[0] == '#') {
        auto k = line.find("config_sha256=");
        if (k != std::string::npos) hash = line.substr(k + 14, line.find(' ', k) - k - 14);
        continue;
      }
      std::vector<std::string> toks;
      std::stringstream ss(line);
      std::string t;
      while (std::getline(ss, t, ',')) toks.push_back(t);
      if (cols.empty()) {
        cols = toks;
        continue;
      }
      for (std::size_t i = 0; i < toks.size() && i < cols.size(); ++i)
        f << src << "," << hash << "," << row << "," << cols[i] << "," << toks[i] << "\n";
      ++row;
    }
    std::string gp = "plot_" + std::to_string(&p - csvs.data()) + ".gp";
    std::ofstream g(run.path(gp));
    std::string rel = fs::relative(fs::absolute(p), fs::absolute(run.dir())).generic_string();
    g << "# " << run.provenance() << "\n"
      << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set title '" << src << "'\n"
      << "set terminal pngcairo size 900,600\n"
      << "set output '" << fs::path(gp).replace_extension(".png").string() << "'\n"
      << "stats '" << rel << "' nooutput\n"
      << "plot for [i=2:STATS_columns] '" << rel << "' using 1:i with linespoints\n";
    run.add_file(gp);
  }
  if (!f) throw std::runtime_error("write failed: report.csv");
  return kOk;
}

int dispatch(Run& run) {
  const std::string& c = run.config().command;
  if (c == "solve") return cmd_solve(run);
  if (c == "radial") return cmd_radial(run);
  if (c == "modes") return cmd_modes(run);
  if (c == "coercivity") return cmd_coercivity(run);
  if (c == "metric") return cmd_metric(run);
  if (c == "geodesic") return cmd_geodesic(run);
  if (c == "hamiltonian") return cmd_hamiltonian(run);
  if (c == "wavemap") return cmd_wavemap(run);
  if (c == "evolve2d") return evolve_common(run, false);
  if (c == "evolve3d") return evolve_common(run, true);
  if (c == "ansatz-residual") return cmd_ansatz(run);
  if (c == "report") return cmd_report(run);
  throw ConfigError("unknown command '" + c + "'");
}

std::string flag_names(const std::string& key) {
  std::string n = "--" + key;
  std::string dashed = key;
  std::replace(dashed.begin(), dashed.end(), '_', '-');
  if (dashed != key) n += ",--" + dashed;
  return n;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"vortexlab: critical-coupling Abelian Higgs vortices", "vortex"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help and exit");  // "-h" would clash with the spacing key
  app.set_version_flag("--version", kVersion);
  std::optional<std::string> config_path;
  std::map<std::string, std::string> text;
  std::map<std::string, bool> flags;
  std::map<std::string, CLI::Option*> options;
  for (const auto& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "TOML file (top-level keys or a [" + name + "] table)");
    for (const auto& k : schema(name)) {
      std::string help = k.help + (k.fallback ? " (default " + *k.fallback + ")" : "");
      std::string id = name + "/" + k.key;
      if (k.kind == Kind::Bool) options[id] = sub->add_flag(flag_names(k.key), flags[id], help);
      else options[id] = sub->add_option(flag_names(k.key), text[id], help);
    }
  }
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }
  std::string command = app.get_subcommands().front()->get_name();
  std::map<std::string, std::string> given;
  for (const auto& k : schema(command)) {
    std::string id = command + "/" + k.key;
    if (options[id]->count() == 0) continue;
    given[k.key] = k.kind == Kind::Bool ? (flags[id] ? "true" : "false") : text[id];
  }

  RunConfig cfg;
  try {
    cfg = parse_config(command, config_path, given);
  } catch (const ConfigError& e) {
    std::cerr << "vortex " << command << ": " << e.what() << "\n";
    return kInvalid;
  }
  Run run(cfg);
  auto fail = [&](const char* status, int code, const std::string& msg) {
    std::cerr << "vortex " << command << ": " << msg << "\n";
    try {
      run.finish(status, code, msg);
    } catch (const std::exception& e) {
      std::cerr << "vortex " << command << ": manifest: " << e.what() << "\n";
    }
    return code;
  };
  try {
    int code = dispatch(run);
    run.finish("ok", code);
    return code;
  } catch (const ConfigError& e) {
    return fail("invalid", kInvalid, e.what());
  } catch (const GridError& e) {
    return fail("invalid", kInvalid, e.what());
  } catch (const AnsatzError& e) {
    return fail("invalid", kInvalid, e.what());
  } catch (const SolverError& e) {
    return fail("not_converged", kNotConverged, e.what());
  } catch (const EvolutionError& e) {
    return fail("invariant_violation", kInvariant, e.what());
  } catch (const std::exception& e) {
    return fail("invariant_violation", kInvariant, e.what());
  }
}

}  // namespace vcli
