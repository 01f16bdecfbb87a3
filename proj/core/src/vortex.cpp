// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#include "vtx/vortex.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "vtx/lattice.hpp"

namespace vtx {

namespace {
constexpr double kPi = std::numbers::pi;

inline cplx phase_safe(cplx z) { return z == cplx(0.0, 0.0) ? cplx(1e-200, 0.0) : z; }
}  // namespace

VortexCenters centers_from_coefficients(const std::vector<cplx>& c) {
  const int N = int(c.size());
  if (N == 0) return {};
  if (N == 1) return {-c[0]};
  if (N == 2) {
    // z^2 + c1 z + c0
    cplx disc = std::sqrt(c[1] * c[1] - 4.0 * c[0]);
    return {0.5 * (-c[1] + disc), 0.5 * (-c[1] - disc)};
  }
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(N, N);
  for (int i = 1; i < N; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < N; ++i) comp(i, N - 1) = -c[i];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  VortexCenters out;
  for (int i = 0; i < N; ++i) out.push_back(es.eigenvalues()[i]);
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

std::vector<cplx> coefficients_from_centers(const VortexCenters& z) {
  std::vector<cplx> p{1.0};  // highest degree last
  for (cplx zk : z) {
    std::vector<cplx> q(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      q[i + 1] += p[i];
      q[i] -= zk * p[i];
    }
    p = q;
  }
  p.pop_back();
  return p;
}

std::pair<ScalarField, ScalarField> theta_derivatives(const VortexCenters& centers, const Grid& g) {
  ScalarField d1(g, 0.0), d2(g, 0.0);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    auto c = g.coords(idx);
    double x = g.coord(0, c[0]), y = g.coord(1, c[1]);
    for (cplx zk : centers) {
      double dx = x - zk.real(), dy = y - zk.imag();
      double r2 = dx * dx + dy * dy;
      if (r2 == 0.0) throw GridError("grid node coincides with a vortex center");
      d1.v[idx] += -2.0 * dy / r2;
      d2.v[idx] += 2.0 * dx / r2;
    }
  }
  return {std::move(d1), std::move(d2)};
}

TaubesData taubes_data(const VortexCenters& centers, double mu, const Grid& g) {
  const double N = double(centers.size());
  if (!(mu > 4.0 * N)) throw SolverError("Taubes regularization requires mu > 4N");
  TaubesData td;
  td.mu = mu;
  td.u0 = ScalarField(g, 0.0);
  td.exp_u0 = ScalarField(g, 1.0);
  td.g0 = ScalarField(g, 0.0);
  td.s0 = ScalarField(g, 0.0);
  td.ds0[0] = ScalarField(g, 0.0);
  td.ds0[1] = ScalarField(g, 0.0);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    auto c = g.coords(idx);
    double x = g.coord(0, c[0]), y = g.coord(1, c[1]);
    double e = 1.0, g0 = 0.0, s0 = 0.0, sx = 0.0, sy = 0.0;
    for (cplx zk : centers) {
      double dx = x - zk.real(), dy = y - zk.imag();
      double r2 = dx * dx + dy * dy;
      double q = r2 + mu;
      e *= r2 / q;
      g0 += 4.0 * mu / (q * q);
      s0 -= std::log(q);
      sx -= 2.0 * dx / q;
      sy -= 2.0 * dy / q;
    }
    td.exp_u0.v[idx] = e;
    td.u0.v[idx] = e > 0.0 ? std::max(std::log(e), -700.0) : -700.0;
    td.g0.v[idx] = g0;
    td.s0.v[idx] = s0;
    td.ds0[0].v[idx] = sx;
    td.ds0[1].v[idx] = sy;
  }
  td.g0_h = laplacian(td.s0);
  for (std::size_t idx = 0; idx < g.size(); ++idx)
    td.g0_h.v[idx] = g.on_boundary(idx) ? td.g0.v[idx] : -td.g0_h.v[idx];
  return td;
}

cplx snap_to_half_cell(cplx z, const Grid& g) {
  double x = (std::floor((z.real() - g.origin[0]) / g.h[0]) + 0.5) * g.h[0] + g.origin[0];
  double y = (std::floor((z.imag() - g.origin[1]) / g.h[1]) + 0.5) * g.h[1] + g.origin[1];
  return {x, y};
}

ScalarField taubes_residual(const TaubesData& td, const ScalarField& v) {
  ScalarField r = laplacian(v);
  const Grid& g = v.grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.on_boundary(i)) {
      r.v[i] = 0.0;
      continue;
    }
    r.v[i] = -r.v[i] + td.exp_u0.v[i] * std::exp(v.v[i]) + td.g0_h.v[i] - 1.0;
  }
  return r;
}

double taubes_functional(const TaubesData& td, const ScalarField& v) {
  const Grid& g = v.grid;
  double s = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    auto c = g.coords(idx);
    for (int a = 0; a < g.dim; ++a) {
      if (c[a] == g.n[a] - 1) continue;
      double d = (v.v[idx + g.stride(a)] - v.v[idx]) / g.h[a];
      s += 0.5 * d * d;
    }
    if (!g.on_boundary(idx))
      s += v.v[idx] * (td.g0_h.v[idx] - 1.0) + td.exp_u0.v[idx] * std::expm1(v.v[idx]);
  }
  return s * g.cell_volume();
}

void reconstruct(VortexConfig& cfg, const TaubesData& td) {
  const Grid& g = cfg.grid;
  cfg.phi = ComplexField(g);
  cfg.alpha = GaugePotential(g);
  ScalarField s = cfg.v;
  s += td.s0;
  ScalarField ds_0 = partial(s, 0), ds_1 = partial(s, 1);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    auto c = g.coords(idx);
    cplx z(g.coord(0, c[0]), g.coord(1, c[1]));
    cplx p = 1.0;
    for (cplx zk : cfg.centers) p *= (z - zk);
    cfg.phi.v[idx] = p * std::exp(0.5 * (cfg.v.v[idx] + td.s0.v[idx]));
    cfg.alpha.c[0].v[idx] = 0.5 * ds_1.v[idx];
    cfg.alpha.c[1].v[idx] = -0.5 * ds_0.v[idx];
  }
}

VortexConfig solve_vortex(const VortexCenters& centers_in, const Grid& g, const VortexSolveOptions& opt) {
  if (g.dim != 2) throw GridError("vortex solves need a 2D grid");
  VortexConfig cfg;
  cfg.grid = g;
  cfg.centers = centers_in;
  const int N = int(centers_in.size());
  if (opt.snap_centers)
    for (auto& z : cfg.centers) z = snap_to_half_cell(z, g);
  double xlo = g.origin[0], xhi = g.coord(0, g.n[0] - 1);
  double ylo = g.origin[1], yhi = g.coord(1, g.n[1] - 1);
  for (cplx z : cfg.centers) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw SolverError("vortex center is not finite");
    double dist = std::min({z.real() - xlo, xhi - z.real(), z.imag() - ylo, yhi - z.imag()});
    if (dist < 2.0) throw SolverError("vortex center closer than 2 correlation lengths to the boundary");
  }
  cfg.mu = opt.mu.value_or(4.0 * N + 1.0);
  TaubesData td = taubes_data(cfg.centers, cfg.mu, g);
  ScalarField v0(g, 0.0);
  if (opt.initial_v) {
    require_same_grid(g, opt.initial_v->grid, "solve_vortex initial guess");
    v0 = *opt.initial_v;
  }
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.on_boundary(i)) v0.v[i] = -td.u0.v[i];
  NewtonProblem prob;
  prob.residual = [&](const ScalarField& v) { return taubes_residual(td, v); };
  prob.jacobian_weight = [&](const ScalarField& v) {
    ScalarField w(g);
    for (std::size_t i = 0; i < g.size(); ++i) w.v[i] = td.exp_u0.v[i] * std::exp(v.v[i]);
    return w;
  };
  prob.functional = [&](const ScalarField& v) { return taubes_functional(td, v); };
  NewtonOptions nopt;
  nopt.max_steps = opt.max_newton_steps;
  nopt.functional_trace = opt.functional_trace;
  auto [v, rep] = newton_screened(prob, std::move(v0), opt.tolerance, nopt);
  cfg.v = std::move(v);
  cfg.report = rep;
  reconstruct(cfg, td);
  return cfg;
}

double flux(const VortexConfig& cfg) { return integrate(field_strength(cfg.alpha)); }

int winding(const VortexConfig& cfg, WindingReport* report) {
  WindingReport w;
  w.from_flux = int(std::lround(flux(cfg) / (2 * kPi)));
  w.from_phase = plaquette_winding_total(cfg.phi);
  if (report) *report = w;
  if (w.from_flux != w.from_phase)
    throw SolverError("flux winding and boundary phase winding disagree (domain under-resolved)");
  return w.from_flux;
}

namespace {

const double kGx[3] = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};
const double kGw[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

struct Q1Point {
  cplx phi, dphi[2];
  double a[2], F;
};

struct Q1Cell {
  cplx p00, p10, p01, p11;
  double a00[2], a10[2], a01[2], a11[2];
  double h;

  Q1Point eval(double s, double t) const {
    Q1Point q;
    q.phi = (1 - s) * (1 - t) * p00 + s * (1 - t) * p10 + (1 - s) * t * p01 + s * t * p11;
    q.dphi[0] = ((1 - t) * (p10 - p00) + t * (p11 - p01)) / h;
    q.dphi[1] = ((1 - s) * (p01 - p00) + s * (p11 - p10)) / h;
    double da2dx = 0, da1dy = 0;
    for (int c = 0; c < 2; ++c)
      q.a[c] = (1 - s) * (1 - t) * a00[c] + s * (1 - t) * a10[c] + (1 - s) * t * a01[c] + s * t * a11[c];
    da2dx = ((1 - t) * (a10[1] - a00[1]) + t * (a11[1] - a01[1])) / h;
    da1dy = ((1 - s) * (a01[0] - a00[0]) + s * (a11[0] - a10[0])) / h;
    q.F = da2dx - da1dy;
    return q;
  }
};

Q1Cell cell_at(const ComplexField& phi, const GaugePotential& al, int i, int j) {
  Q1Cell c;
  c.h = phi.grid.spacing();
  c.p00 = phi.at(i, j);
  c.p10 = phi.at(i + 1, j);
  c.p01 = phi.at(i, j + 1);
  c.p11 = phi.at(i + 1, j + 1);
  for (int k = 0; k < 2; ++k) {
    c.a00[k] = al.c[k].at(i, j);
    c.a10[k] = al.c[k].at(i + 1, j);
    c.a01[k] = al.c[k].at(i, j + 1);
    c.a11[k] = al.c[k].at(i + 1, j + 1);
  }
  return c;
}

}  // namespace

double energy(const ComplexField& phi, const GaugePotential& alpha, double lambda) {
  const Grid& g = phi.grid;
  require_same_grid(g, alpha.grid, "energy");
  double h = g.spacing();
  double E = 0.0;
  for (int j = 0; j + 1 < g.n[1]; ++j)
    for (int i = 0; i + 1 < g.n[0]; ++i) {
      Q1Cell c = cell_at(phi, alpha, i, j);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          Q1Point q = c.eval(kGx[a], kGx[b]);
          cplx D1 = q.dphi[0] - cplx(0, q.a[0]) * q.phi;
          cplx D2 = q.dphi[1] - cplx(0, q.a[1]) * q.phi;
          double pot = std::norm(q.phi) - 1.0;
          E += kGw[a] * kGw[b] * (std::norm(D1) + std::norm(D2) + q.F * q.F + 0.25 * lambda * pot * pot);
        }
    }
  return E * h * h;
}

double energy(const VortexConfig& cfg) { return energy(cfg.phi, cfg.alpha, 1.0); }

CompletionReport completion(const ComplexField& phi, const GaugePotential& alpha) {
  const Grid& g = phi.grid;
  double h = g.spacing();
  CompletionReport rep;
  for (int j = 0; j + 1 < g.n[1]; ++j)
    for (int i = 0; i + 1 < g.n[0]; ++i) {
      Q1Cell c = cell_at(phi, alpha, i, j);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          Q1Point q = c.eval(kGx[a], kGx[b]);
          cplx D1 = q.dphi[0] - cplx(0, q.a[0]) * q.phi;
          cplx D2 = q.dphi[1] - cplx(0, q.a[1]) * q.phi;
          double m2 = std::norm(q.phi);
          double w = kGw[a] * kGw[b] * h * h;
          rep.energy += w * (std::norm(D1) + std::norm(D2) + q.F * q.F + 0.25 * (m2 - 1) * (m2 - 1));
          double bog = q.F - 0.5 * (1.0 - m2);
          rep.squares += w * (std::norm(D1 + cplx(0, 1) * D2) + bog * bog);
          rep.flux_term += w * q.F;
        }
    }
  // Counter-clockwise boundary circulation of J = Im(conj(phi) D phi).
  auto edge = [&](int i0, int j0, int i1, int j1, int axis, double sign) {
    cplx p0 = phi.at(i0, j0), p1 = phi.at(i1, j1);
    double a0 = alpha.c[axis].at(i0, j0), a1 = alpha.c[axis].at(i1, j1);
    double s = 0.0;
    for (int k = 0; k < 3; ++k) {
      double t = kGx[k];
      cplx p = (1 - t) * p0 + t * p1;
      cplx dp = (p1 - p0) / h;
      double at = (1 - t) * a0 + t * a1;
      s += kGw[k] * std::imag(std::conj(p) * (dp - cplx(0, at) * p));
    }
    return sign * s * h;
  };
  int nx = g.n[0], ny = g.n[1];
  for (int i = 0; i + 1 < nx; ++i) rep.boundary_current += edge(i, 0, i + 1, 0, 0, 1.0);
  for (int j = 0; j + 1 < ny; ++j) rep.boundary_current += edge(nx - 1, j, nx - 1, j + 1, 1, 1.0);
  for (int i = 0; i + 1 < nx; ++i) rep.boundary_current += edge(i, ny - 1, i + 1, ny - 1, 0, -1.0);
  for (int j = 0; j + 1 < ny; ++j) rep.boundary_current += edge(0, j, 0, j + 1, 1, -1.0);
  double rhs = rep.squares + rep.flux_term + rep.boundary_current;
  rep.defect = std::abs(rep.energy - rhs) / std::max(std::abs(rep.energy), 1e-300);
  return rep;
}

double bogomolny_residual(const VortexConfig& cfg) {
  ComplexField d1 = covariant_derivative(cfg.phi, cfg.alpha, 0);
  ComplexField d2 = covariant_derivative(cfg.phi, cfg.alpha, 1);
  ScalarField F = field_strength(cfg.alpha);
  ComplexField b(cfg.grid);
  ScalarField f(cfg.grid);
  for (std::size_t i = 0; i < b.size(); ++i) {
    b.v[i] = d1.v[i] + cplx(0, 1) * d2.v[i];
    f.v[i] = F.v[i] + 0.5 * (std::norm(cfg.phi.v[i]) - 1.0);
  }
  return std::sqrt(inner_product_l2(b, b) + inner_product_l2(f, f));
}

DecayFit decay_fit(const VortexConfig& cfg) {
  const Grid& g = cfg.grid;
  cplx c0 = 0.0;
  for (cplx z : cfg.centers) c0 += z;
  if (!cfg.centers.empty()) c0 /= double(cfg.centers.size());
  double L = 0.5 * std::min((g.n[0] - 1) * g.h[0], (g.n[1] - 1) * g.h[1]);
  double rlo = 0.4 * L, rhi = 0.75 * L;
  ComplexField d1 = covariant_derivative(cfg.phi, cfg.alpha, 0);
  ComplexField d2 = covariant_derivative(cfg.phi, cfg.alpha, 1);
  std::vector<double> rs, lp, ld;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    auto c = g.coords(idx);
    double r = std::abs(cplx(g.coord(0, c[0]), g.coord(1, c[1])) - c0);
    if (r < rlo || r > rhi) continue;
    double qp = 1.0 - std::norm(cfg.phi.v[idx]);
    double qd = std::sqrt(std::norm(d1.v[idx]) + std::norm(d2.v[idx]));
    if (!(qp > 1e-13) || !(qd > 1e-13)) throw SolverError("decay fit window reaches the floor-noise level");
    rs.push_back(r);
    lp.push_back(std::log(qp));
    ld.push_back(std::log(qd));
  }
  if (rs.size() < 3) throw SolverError("decay fit window has too few samples");
  auto slope = [&](const std::vector<double>& y) {
    double n = double(rs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      sx += rs[i];
      sy += y[i];
      sxx += rs[i] * rs[i];
      sxy += rs[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  DecayFit out;
  out.rate_potential = -slope(lp);
  out.rate_covariant = -slope(ld);
  out.samples = int(rs.size());
  return out;
}

std::vector<HiggsZero> higgs_zeros(const ComplexField& phi) {
  const Grid& g = phi.grid;
  std::vector<HiggsZero> out;
  for (int j = 0; j + 1 < g.n[1]; ++j)
    for (int i = 0; i + 1 < g.n[0]; ++i) {
      cplx c[4] = {phi.at(i, j), phi.at(i + 1, j), phi.at(i + 1, j + 1), phi.at(i, j + 1)};
      // Each edge phase is taken in its canonical (+x or +y) direction and
      // negated when traversed backwards, so that a zero sitting exactly on an
      // edge is assigned to one plaquette only. Exact zeros on nodes get a
      // fixed tiny real value for the same reason.
      auto edge = [](cplx from, cplx to) { return std::arg(phase_safe(to) * std::conj(phase_safe(from))); };
      double w = edge(c[0], c[1]) + edge(c[1], c[2]) - edge(c[3], c[2]) - edge(c[0], c[3]);
      int wind = int(std::lround(w / (2 * kPi)));
      if (wind == 0) continue;
      // Bilinear zero by Newton from the cell center.
      double s = 0.5, t = 0.5;
      for (int it = 0; it < 30; ++it) {
        cplx P = (1 - s) * (1 - t) * c[0] + s * (1 - t) * c[1] + s * t * c[2] + (1 - s) * t * c[3];
        cplx Ps = (1 - t) * (c[1] - c[0]) + t * (c[2] - c[3]);
        cplx Pt = (1 - s) * (c[3] - c[0]) + s * (c[2] - c[1]);
        double det = Ps.real() * Pt.imag() - Ps.imag() * Pt.real();
        if (std::abs(det) < 1e-300) break;
        double ds = (P.real() * Pt.imag() - P.imag() * Pt.real()) / det;
        double dt = (Ps.real() * P.imag() - Ps.imag() * P.real()) / det;
        s -= ds;
        t -= dt;
        if (std::abs(ds) + std::abs(dt) < 1e-14) break;
      }
      if (!(s > -0.5 && s < 1.5 && t > -0.5 && t < 1.5)) s = t = 0.5;
      cplx z(g.coord(0, i) + s * g.h[0], g.coord(1, j) + t * g.h[1]);
      for (int k = 0; k < std::abs(wind); ++k) out.push_back({z, wind > 0 ? 1 : -1});
    }
  return out;
}

double RadialProfile::rho_at(double x) const {
  if (x <= r.front()) return rho.front() * std::pow(std::max(x, 0.0) / r.front(), n);
  if (x >= r.back()) return rho.back();
  auto it = std::upper_bound(r.begin(), r.end(), x);
  std::size_t i = std::size_t(it - r.begin()) - 1;
  double t = (x - r[i]) / (r[i + 1] - r[i]);
  return (1 - t) * rho[i] + t * rho[i + 1];
}

double RadialProfile::a_at(double x) const {
  if (x <= r.front()) return a.front() * (x * x) / (r.front() * r.front());
  if (x >= r.back()) return a.back();
  auto it = std::upper_bound(r.begin(), r.end(), x);
  std::size_t i = std::size_t(it - r.begin()) - 1;
  double t = (x - r[i]) / (r[i + 1] - r[i]);
  return (1 - t) * a[i] + t * a[i + 1];
}

RadialProfile radial_vortex(int n, double r_max, int nodes) {
  if (n < 1) throw SolverError("radial vortex needs winding n >= 1");
  if (nodes < 10) throw SolverError("radial vortex needs at least 10 nodes");
  RadialProfile P;
  P.n = n;
  const int M = nodes - 1;
  // First node away from 0 with a mild mesh ratio there, so rho ~ A r^n is
  // resolved; a(r0) comes from the leading series a ~ r^2/(4n).
  const double r0 = 1e-2;
  P.r.resize(nodes);
  for (int i = 0; i <= M; ++i) P.r[i] = r0 + (r_max - r0) * std::pow(double(i) / M, 1.5);
  Eigen::VectorXd y(2 * nodes);
  for (int i = 0; i <= M; ++i) {
    double r = P.r[i];
    y[2 * i] = std::pow(std::tanh(r / std::sqrt(double(n))), n);
    y[2 * i + 1] = r * r / (4.0 * n + r * r);
  }
  auto residual = [&](const Eigen::VectorXd& u, Eigen::VectorXd& F) {
    F.resize(2 * nodes);
    F[0] = u[1] - P.r[0] * P.r[0] / (4.0 * n);
    for (int i = 0; i < M; ++i) {
      double d = P.r[i + 1] - P.r[i], rm = 0.5 * (P.r[i] + P.r[i + 1]);
      double pm = 0.5 * (u[2 * i] + u[2 * i + 2]), am = 0.5 * (u[2 * i + 1] + u[2 * i + 3]);
      F[2 * i + 1] = rm * (u[2 * i + 2] - u[2 * i]) / d - n * (1.0 - am) * pm;
      F[2 * i + 2] = 2.0 * n * (u[2 * i + 3] - u[2 * i + 1]) / d - rm * (1.0 - pm * pm);
    }
    F[2 * M + 1] = u[2 * M] - 1.0;
  };
  Eigen::VectorXd F;
  residual(y, F);
  int steps = 0;
  while (F.cwiseAbs().maxCoeff() > 1e-12 && steps < 100) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.emplace_back(0, 1, 1.0);
    for (int i = 0; i < M; ++i) {
      double d = P.r[i + 1] - P.r[i], rm = 0.5 * (P.r[i] + P.r[i + 1]);
      double pm = 0.5 * (y[2 * i] + y[2 * i + 2]), am = 0.5 * (y[2 * i + 1] + y[2 * i + 3]);
      int r1 = 2 * i + 1, r2 = 2 * i + 2;
      trip.emplace_back(r1, 2 * i, -rm / d - 0.5 * n * (1 - am));
      trip.emplace_back(r1, 2 * i + 2, rm / d - 0.5 * n * (1 - am));
      trip.emplace_back(r1, 2 * i + 1, 0.5 * n * pm);
      trip.emplace_back(r1, 2 * i + 3, 0.5 * n * pm);
      trip.emplace_back(r2, 2 * i + 1, -2.0 * n / d);
      trip.emplace_back(r2, 2 * i + 3, 2.0 * n / d);
      trip.emplace_back(r2, 2 * i, rm * pm);
      trip.emplace_back(r2, 2 * i + 2, rm * pm);
    }
    trip.emplace_back(2 * M + 1, 2 * M, 1.0);
    Eigen::SparseMatrix<double> J(2 * nodes, 2 * nodes);
    J.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) throw SolverError("radial relaxation: singular Jacobian");
    Eigen::VectorXd dy = lu.solve(-F);
    double f0 = F.norm(), t = 1.0;
    Eigen::VectorXd yt, Ft;
    while (t > 1e-6) {
      yt = y + t * dy;
      residual(yt, Ft);
      if (Ft.norm() < f0 || t < 1e-3) break;
      t *= 0.5;
    }
    y = yt;
    F = Ft;
    ++steps;
  }
  P.residual = F.cwiseAbs().maxCoeff();
  if (!(P.residual <= 1e-8)) throw SolverError("radial relaxation did not converge");
  P.newton_steps = steps;
  P.rho.resize(nodes);
  P.a.resize(nodes);
  for (int i = 0; i <= M; ++i) {
    P.rho[i] = y[2 * i];
    P.a[i] = y[2 * i + 1];
  }
  P.A = P.rho[0] / std::pow(P.r[0], n);
  return P;
}

}  // namespace vtx
