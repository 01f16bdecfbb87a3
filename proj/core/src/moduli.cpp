// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#include "vtx/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace vtx {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double xi_of(double r) {
  double t = r * r * r * r;
  return t / std::pow(1.0 + t, 0.75);
}

// Monotone piecewise cubic Hermite interpolation (Fritsch-Butland slopes).
double pchip(const std::vector<double>& x, const std::vector<double>& y, double xq) {
  const std::size_t n = x.size();
  if (n == 1) return y[0];
  auto it = std::upper_bound(x.begin(), x.end(), xq);
  std::size_t k = it == x.begin() ? 0 : std::size_t(it - x.begin()) - 1;
  k = std::min(k, n - 2);
  auto delta = [&](std::size_t i) { return (y[i + 1] - y[i]) / (x[i + 1] - x[i]); };
  auto slope = [&](std::size_t i) -> double {
    if (n == 2) return delta(0);
    if (i == 0 || i == n - 1) {
      // Three-point end formula, limited to keep monotonicity.
      std::size_t a = i == 0 ? 0 : n - 2, b = i == 0 ? 1 : n - 3;
      double h0 = std::abs(x[a + 1] - x[a]), h1 = std::abs(x[b + 1] - x[b]);
      double d0 = delta(a), d1 = delta(b);
      double d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
      if (d * d0 <= 0) return 0.0;
      if (d0 * d1 < 0 && std::abs(d) > 3 * std::abs(d0)) return 3 * d0;
      return d;
    }
    double d0 = delta(i - 1), d1 = delta(i);
    if (d0 * d1 <= 0) return 0.0;
    double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
    double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
    return (w1 + w2) / (w1 / d0 + w2 / d1);
  };
  double h = x[k + 1] - x[k];
  double t = (xq - x[k]) / h;
  double m0 = slope(k), m1 = slope(k + 1);
  double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y[k] + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * y[k + 1] +
         (t3 - t2) * h * m1;
}

void check_range(const ReducedMetric& m, double r) {
  if (!(r >= m.r_min() - 1e-12 && r <= m.r_max() + 1e-12))
    throw ModuliError("reduced metric: r = " + std::to_string(r) + " leaves the table range");
}

std::vector<double> xis(const ReducedMetric& m) {
  std::vector<double> x(m.r.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = xi_of(m.r[i]);
  return x;
}

}  // namespace

double ReducedMetric::A_at(double rq) const {
  check_range(*this, rq);
  return pchip(xis(*this), A, xi_of(rq));
}
double ReducedMetric::B_at(double rq) const {
  check_range(*this, rq);
  return pchip(xis(*this), B, xi_of(rq));
}
double ReducedMetric::u_at(double rq) const {
  check_range(*this, rq);
  return pchip(xis(*this), u, xi_of(rq));
}
double ReducedMetric::F_at(double rq) const { return 2.0 * rq * std::sqrt(A_at(rq)); }
double ReducedMetric::G_at(double rq) const { return 2.0 * rq * rq * std::sqrt(B_at(rq)); }

void ReducedMetric::write_csv(const std::string& path, const std::string& provenance) const {
  std::ofstream f(path);
  if (!f) throw ModuliError("cannot write " + path);
  f << "# " << (provenance.empty() ? "reduced metric" : provenance) << "\n";
  f << std::setprecision(17) << "# margin=" << L << " h=" << h << " r_switch=" << r_switch << "\n";
  f << "r,F,G,A,B,u\n";
  for (std::size_t i = 0; i < r.size(); ++i)
    f << r[i] << "," << F[i] << "," << G[i] << "," << A[i] << "," << B[i] << "," << u[i] << "\n";
  if (!f) throw ModuliError("write failed: " + path);
}

ReducedMetric ReducedMetric::read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ModuliError("cannot read " + path);
  ReducedMetric m;
  std::string line;
  bool header = false;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream is(line.substr(1));
      std::string tok;
      while (is >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        std::string k = tok.substr(0, eq);
        double v = std::stod(tok.substr(eq + 1));
        if (k == "margin") m.L = v;
        if (k == "h") m.h = v;
        if (k == "r_switch") m.r_switch = v;
      }
      continue;
    }
    if (!header) {
      if (line.rfind("r,F,G,A,B,u", 0) != 0) throw ModuliError("unexpected metric header in " + path);
      header = true;
      continue;
    }
    std::istringstream is(line);
    std::string cell;
    double vals[6];
    for (double& v : vals) {
      if (!std::getline(is, cell, ',')) throw ModuliError("short metric row in " + path);
      v = std::stod(cell);
    }
    m.r.push_back(vals[0]);
    m.F.push_back(vals[1]);
    m.G.push_back(vals[2]);
    m.A.push_back(vals[3]);
    m.B.push_back(vals[4]);
    m.u.push_back(vals[5]);
  }
  if (m.r.size() < 2) throw ModuliError("metric table needs at least two rows: " + path);
  return m;
}

MetricPoint sample_metric_point(double r, const MetricSampleOptions& opt) {
  if (r < 0) throw ModuliError("negative half-separation");
  const double h = opt.h;
  double hx = std::ceil((r + opt.margin) / h - 1e-9) * h;
  double hy = std::ceil(opt.margin / h - 1e-9) * h;
  int nx = int(std::lround(2 * hx / h)) + 1, ny = int(std::lround(2 * hy / h)) + 1;
  Grid g({nx, ny}, {h, h}, {-hx, -hy});
  MetricPoint p;
  p.r = r;
  p.coefficient_chart = r < opt.r_switch;
  ZeroModeOptions zo = opt.modes;
  zo.coefficient_chart = p.coefficient_chart;
  auto B = zero_modes({cplx(r, 0.0), cplx(-r, 0.0)}, g, zo);
  p.gram = B.gram;
  if (p.coefficient_chart) {
    // c0 = -w, so the (Re c0, Im c0) block is the w-chart metric at w = r^2.
    p.A = B.gram(0, 0) / kTwoPi;
    p.B = B.gram(1, 1) / kTwoPi;
    if (r == 0.0) p.A = p.B = 0.5 * (p.A + p.B);
    p.F = 2 * r * std::sqrt(p.A);
    p.G = 2 * r * r * std::sqrt(p.B);
  } else {
    Eigen::Vector4d dr(1, 0, -1, 0), dth(0, r, 0, -r);
    p.F = std::sqrt(dr.dot(B.gram * dr) / kTwoPi);
    p.G = std::sqrt(dth.dot(B.gram * dth) / kTwoPi);
    p.A = p.F * p.F / (4 * r * r);
    p.B = p.G * p.G / (4 * r * r * r * r);
  }
  ScalarField dens(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double d = 1.0 - std::norm(B.config.phi.v[i]);
    dens.v[i] = d * d / 8.0;
  }
  p.u = integrate(dens);
  return p;
}

ReducedMetric sample_reduced_metric(const std::vector<double>& r, const MetricSampleOptions& opt) {
  if (r.empty()) throw ModuliError("no r samples");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) throw ModuliError("r samples must be strictly increasing");
  std::vector<MetricPoint> pts(r.size());
  const int jobs = std::max(1, opt.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < r.size(); ++i) pts[i] = sample_metric_point(r[i], opt);
  } else {
    for (std::size_t start = 0; start < r.size(); start += std::size_t(jobs)) {
      std::vector<std::future<MetricPoint>> fs;
      for (std::size_t i = start; i < std::min(r.size(), start + std::size_t(jobs)); ++i)
        fs.push_back(std::async(std::launch::async, [&, i] { return sample_metric_point(r[i], opt); }));
      for (std::size_t i = 0; i < fs.size(); ++i) pts[start + i] = fs[i].get();
    }
  }
  ReducedMetric m;
  m.L = opt.margin;
  m.h = opt.h;
  m.r_switch = opt.r_switch;
  for (const auto& p : pts) {
    m.r.push_back(p.r);
    m.F.push_back(p.F);
    m.G.push_back(p.G);
    m.A.push_back(p.A);
    m.B.push_back(p.B);
    m.u.push_back(p.u);
  }
  return m;
}

cplx w_of(double r, double theta) { return std::polar(r * r, 2 * theta); }

Eigen::Matrix2d w_metric(const ReducedMetric& m, cplx w) {
  double s = std::abs(w);
  double r = std::sqrt(s);
  double A = m.A_at(r), B = m.B_at(r);
  Eigen::Matrix2d g = B * Eigen::Matrix2d::Identity();
  if (s > 0) {
    Eigen::Vector2d e(w.real() / s, w.imag() / s);
    g += (A - B) * e * e.transpose();
  }
  return g;
}

namespace {

double potential_w(const ReducedMetric& m, cplx w, int l) {
  return l == 0 ? 0.0 : l * m.u_at(std::sqrt(std::abs(w))) / kTwoPi;
}

using Y = std::array<double, 4>;

Y axpy(const Y& a, double s, const Y& b) {
  Y r;
  for (int i = 0; i < 4; ++i) r[i] = a[i] + s * b[i];
  return r;
}

Y rk4(const std::function<Y(const Y&)>& f, const Y& y, double dt) {
  Y k1 = f(y);
  Y k2 = f(axpy(y, 0.5 * dt, k1));
  Y k3 = f(axpy(y, 0.5 * dt, k2));
  Y k4 = f(axpy(y, dt, k3));
  Y out;
  for (int i = 0; i < 4; ++i) out[i] = y[i] + dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return out;
}

// Polar chart: y = (r, theta, p_r, p_theta).
Y polar_rhs(const ReducedMetric& m, int l, const Y& y) {
  const double r = y[0], d = m.fd_step();
  check_range(m, r - d);
  check_range(m, r + d);
  auto iF2 = [&](double x) { double F = m.F_at(x); return 1.0 / (F * F); };
  auto iG2 = [&](double x) { double G = m.G_at(x); return 1.0 / (G * G); };
  double dF = (iF2(r + d) - iF2(r - d)) / (2 * d);
  double dG = (iG2(r + d) - iG2(r - d)) / (2 * d);
  double du = l == 0 ? 0.0 : l * (m.u_at(r + d) - m.u_at(r - d)) / (2 * d) / kTwoPi;
  return {y[2] * iF2(r), y[3] * iG2(r), -0.5 * y[2] * y[2] * dF - 0.5 * y[3] * y[3] * dG - du, 0.0};
}

Eigen::Matrix2d w_inverse_metric(const ReducedMetric& m, cplx w) { return w_metric(m, w).inverse(); }

// w chart: y = (w1, w2, P1, P2).
Y w_rhs(const ReducedMetric& m, int l, const Y& y) {
  const double d = m.fd_step();
  cplx w(y[0], y[1]);
  Eigen::Vector2d P(y[2], y[3]);
  Eigen::Vector2d v = w_inverse_metric(m, w) * P;
  Y out{v[0], v[1], 0, 0};
  for (int k = 0; k < 2; ++k) {
    cplx e = k == 0 ? cplx(d, 0) : cplx(0, d);
    Eigen::Matrix2d dgi = (w_inverse_metric(m, w + e) - w_inverse_metric(m, w - e)) / (2 * d);
    double dV = (potential_w(m, w + e, l) - potential_w(m, w - e, l)) / (2 * d);
    out[2 + k] = -0.5 * P.dot(dgi * P) - dV;
  }
  return out;
}

Y polar_to_w(const Y& p) {
  double r = p[0], th = p[1];
  cplx w = w_of(r, th);
  cplx X(p[2] / (2 * r), -p[3] / (2 * r * r));
  cplx P = std::conj(X) * std::polar(1.0, 2 * th);
  return {w.real(), w.imag(), P.real(), P.imag()};
}

Y w_to_polar(const Y& q, double theta_ref) {
  cplx w(q[0], q[1]), P(q[2], q[3]);
  double r = std::sqrt(std::abs(w));
  double th = 0.5 * std::arg(w);
  th += std::numbers::pi * std::round((theta_ref - th) / std::numbers::pi);
  cplx X = std::conj(P) * std::polar(1.0, 2 * th);
  return {r, th, 2 * r * X.real(), -2 * r * r * X.imag()};
}

double polar_H(const ReducedMetric& m, const Y& y, int l) {
  double F = m.F_at(y[0]), G = m.G_at(y[0]);
  return 0.5 * (y[2] * y[2] / (F * F) + y[3] * y[3] / (G * G)) + (l == 0 ? 0.0 : l * m.u_at(y[0]) / kTwoPi);
}

double w_H(const ReducedMetric& m, const Y& y, int l) {
  cplx w(y[0], y[1]);
  Eigen::Vector2d P(y[2], y[3]);
  return 0.5 * P.dot(w_inverse_metric(m, w) * P) + potential_w(m, w, l);
}

Trajectory integrate(const ReducedMetric& m, const GeodesicState& s0, int l, double tau_span,
                     const IntegrateOptions& opt) {
  if (!(opt.dtau != 0.0) || !std::isfinite(opt.dtau)) throw ModuliError("dtau must be nonzero");
  if (s0.r < 0) throw ModuliError("r must be nonnegative");
  long steps = std::max(1L, std::lround(std::abs(tau_span / opt.dtau)));
  double dt = tau_span / double(steps);
  bool wchart = s0.r < m.r_switch;
  Y y{s0.r, s0.theta, s0.p_r, s0.p_theta};
  double theta = s0.theta;
  if (wchart) {
    if (s0.r == 0.0) throw ModuliError("start at coincidence: give a nonzero r");
    y = polar_to_w(y);
  }
  Trajectory out;
  auto record = [&](double tau) {
    Y p = wchart ? w_to_polar(y, theta) : y;
    double H = wchart ? w_H(m, y, l) : polar_H(m, y, l);
    out.push_back({tau, p[0], p[1], p[2], p[3], H, wchart});
  };
  record(s0.tau);
  auto fp = [&](const Y& x) { return polar_rhs(m, l, x); };
  auto fw = [&](const Y& x) { return w_rhs(m, l, x); };
  for (long n = 1; n <= steps; ++n) {
    y = rk4(wchart ? std::function<Y(const Y&)>(fw) : std::function<Y(const Y&)>(fp), y, dt);
    for (double v : y)
      if (!std::isfinite(v)) throw ModuliError("non-finite reduced state");
    if (wchart) {
      Y p = w_to_polar(y, theta);
      theta = p[1];
      if (p[0] > 1.2 * m.r_switch) {
        y = p;
        wchart = false;
      }
    } else {
      theta = y[1];
      if (y[0] < m.r_switch) {
        y = polar_to_w(y);
        wchart = true;
      }
    }
    if (n % opt.sample_every == 0 || n == steps) record(s0.tau + double(n) * dt);
  }
  return out;
}

}  // namespace

double reduced_hamiltonian(const ReducedMetric& m, const GeodesicState& s, int l) {
  Y y{s.r, s.theta, s.p_r, s.p_theta};
  if (s.r < m.r_switch) return w_H(m, polar_to_w(y), l);
  return polar_H(m, y, l);
}

Trajectory geodesic_integrate(const ReducedMetric& m, const GeodesicState& s0, double tau_span,
                              const IntegrateOptions& opt) {
  return integrate(m, s0, 0, tau_span, opt);
}

Trajectory hamiltonian_integrate(const ReducedMetric& m, const GeodesicState& s0, int l, double epsilon,
                                 double tau_span, const IntegrateOptions& opt) {
  if (l != 1 && l != -1) throw ModuliError("sign l must be +1 or -1");
  if (!(epsilon >= 0.0)) throw ModuliError("epsilon must be nonnegative");
  return integrate(m, s0, l, tau_span, opt);
}

std::array<Eigen::Matrix2d, 2> w_christoffel(const ReducedMetric& m, cplx w) {
  const double d = m.fd_step();
  Eigen::Matrix2d gi = w_inverse_metric(m, w);
  std::array<Eigen::Matrix2d, 2> dg;
  for (int k = 0; k < 2; ++k) {
    cplx e = k == 0 ? cplx(d, 0) : cplx(0, d);
    dg[k] = (w_metric(m, w + e) - w_metric(m, w - e)) / (2 * d);
  }
  std::array<Eigen::Matrix2d, 2> G;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        double s = 0;
        for (int e = 0; e < 2; ++e) s += gi(a, e) * (dg[b](e, c) + dg[c](e, b) - dg[e](b, c));
        G[a](b, c) = 0.5 * s;
      }
  return G;
}

WaveMapState make_wave_map(double zeta0, double zeta1, int nodes, const std::function<Eigen::Vector2d(double)>& q,
                           const std::function<Eigen::Vector2d(double)>& q_tau) {
  if (nodes < 3 || !(zeta1 > zeta0)) throw ModuliError("wave map needs at least 3 nodes on a nonempty interval");
  WaveMapState s;
  s.zeta0 = zeta0;
  s.dzeta = (zeta1 - zeta0) / (nodes - 1);
  for (int j = 0; j < nodes; ++j) {
    double z = zeta0 + j * s.dzeta;
    s.q.push_back(q(z));
    s.q_tau.push_back(q_tau(z));
  }
  s.left = s.q.front();
  s.right = s.q.back();
  s.q_tau.front().setZero();
  s.q_tau.back().setZero();
  return s;
}

namespace {

Eigen::Vector2d gamma_term(const std::array<Eigen::Matrix2d, 2>& G, const Eigen::Vector2d& v,
                           const Eigen::Vector2d& z) {
  return {v.dot(G[0] * v) - z.dot(G[0] * z), v.dot(G[1] * v) - z.dot(G[1] * z)};
}

}  // namespace

void wave_map_step(const ReducedMetric& m, WaveMapState& s, double dtau) {
  if (!(dtau > 0) || dtau > s.dzeta * (1 + 1e-12)) throw ModuliError("wave map: CFL requires 0 < dtau <= dzeta");
  const std::size_t n = s.size();
  const double dz = s.dzeta, dt = dtau;
  std::vector<std::array<Eigen::Matrix2d, 2>> G(n);
  std::vector<Eigen::Vector2d> qz(n, Eigen::Vector2d::Zero()), lap(n, Eigen::Vector2d::Zero());
  for (std::size_t j = 1; j + 1 < n; ++j) {
    G[j] = w_christoffel(m, cplx(s.q[j][0], s.q[j][1]));
    qz[j] = (s.q[j + 1] - s.q[j - 1]) / (2 * dz);
    lap[j] = (s.q[j + 1] - 2 * s.q[j] + s.q[j - 1]) / (dz * dz);
  }
  // Previous level: Taylor start on the first step or after a step-size change.
  std::vector<Eigen::Vector2d> qm(n);
  bool restart = s.q_prev.empty() || std::abs(s.dtau_prev - dt) > 1e-15 * dt;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == 0 || j + 1 == n) {
      qm[j] = s.q[j];
      continue;
    }
    if (restart) {
      Eigen::Vector2d a = lap[j] - gamma_term(G[j], s.q_tau[j], qz[j]);
      qm[j] = s.q[j] - dt * s.q_tau[j] + 0.5 * dt * dt * a;
    } else {
      qm[j] = s.q_prev[j];
    }
  }
  std::vector<Eigen::Vector2d> qp(n);
  qp.front() = s.left;
  qp.back() = s.right;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    Eigen::Vector2d v = restart ? s.q_tau[j] : (s.q[j] - qm[j]) / dt;
    Eigen::Vector2d next;
    for (int it = 0; it < 100; ++it) {
      next = 2 * s.q[j] - qm[j] + dt * dt * (lap[j] - gamma_term(G[j], v, qz[j]));
      Eigen::Vector2d vn = (next - qm[j]) / (2 * dt);
      double change = (vn - v).norm();
      v = vn;
      if (change <= 1e-14 * (1.0 + v.norm())) break;
    }
    qp[j] = 2 * s.q[j] - qm[j] + dt * dt * (lap[j] - gamma_term(G[j], v, qz[j]));
    if (!std::isfinite(qp[j][0]) || !std::isfinite(qp[j][1])) throw ModuliError("wave map: non-finite state");
  }
  for (std::size_t j = 0; j < n; ++j) {
    Eigen::Vector2d vt = (3 * qp[j] - 4 * s.q[j] + qm[j]) / (2 * dt);
    s.q_tau[j] = (j == 0 || j + 1 == n) ? Eigen::Vector2d::Zero() : vt;
  }
  s.q_prev = s.q;
  s.q = qp;
  s.tau += dt;
  s.dtau_prev = dt;
}

double wave_map_energy(const ReducedMetric& m, const WaveMapState& s) {
  // Kinetic part by trapezoid at nodes, gradient part on cells with the
  // metric averaged over the two endpoints (the form the 3-point stencil conserves).
  const std::size_t n = s.size();
  std::vector<Eigen::Matrix2d> g(n);
  for (std::size_t j = 0; j < n; ++j) g[j] = w_metric(m, cplx(s.q[j][0], s.q[j][1]));
  double e = 0;
  for (std::size_t j = 0; j < n; ++j) {
    double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
    e += w * s.q_tau[j].dot(g[j] * s.q_tau[j]);
  }
  for (std::size_t j = 0; j + 1 < n; ++j) {
    Eigen::Vector2d qz = (s.q[j + 1] - s.q[j]) / s.dzeta;
    e += qz.dot(0.5 * (g[j] + g[j + 1]) * qz);
  }
  return e * s.dzeta;
}

double SpaceTimeSamples::operator()(double t, double z) const {
  double x = (t - t0) / dt, y = (z - z0) / dz;
  const double tol = 1e-9;
  if (x < -tol || y < -tol || x > nt - 1 + tol || y > nz - 1 + tol)
    throw ModuliError("d'Alembert: dependence cone exceeds the sample domain");
  x = std::clamp(x, 0.0, double(nt - 1));
  y = std::clamp(y, 0.0, double(nz - 1));
  int i = std::min(int(x), nt - 2), j = std::min(int(y), nz - 2);
  double fx = x - i, fy = y - j;
  auto at = [&](int a, int b) { return v[std::size_t(a) * nz + b]; };
  return (1 - fx) * ((1 - fy) * at(i, j) + fy * at(i, j + 1)) + fx * ((1 - fy) * at(i + 1, j) + fy * at(i + 1, j + 1));
}

SpaceTimeSamples SpaceTimeSamples::from(const std::function<double(double, double)>& w, double t1, double dt,
                                        double z0, double z1, double dz) {
  SpaceTimeSamples s;
  s.t0 = 0.0;
  s.dt = dt;
  s.z0 = z0;
  s.dz = dz;
  s.nt = int(std::lround(t1 / dt)) + 1;
  s.nz = int(std::lround((z1 - z0) / dz)) + 1;
  if (s.nt < 2 || s.nz < 2) throw ModuliError("d'Alembert: need at least 2x2 samples");
  s.v.resize(std::size_t(s.nt) * s.nz);
  for (int i = 0; i < s.nt; ++i)
    for (int j = 0; j < s.nz; ++j) s.v[std::size_t(i) * s.nz + j] = w(i * dt, z0 + j * dz);
  return s;
}

double dalembert_source(const SpaceTimeSamples& w, double t, double z, int steps) {
  if (t < 0) throw ModuliError("d'Alembert: t must be nonnegative");
  if (t == 0) return 0.0;
  auto trap = [&](const std::function<double(double)>& f, double a, double b) {
    double hh = (b - a) / steps, s = 0.5 * (f(a) + f(b));
    for (int k = 1; k < steps; ++k) s += f(a + k * hh);
    return s * hh;
  };
  double i0 = trap([&](double x) { return w(0.0, x); }, z - t, z + t);
  double i1 = trap([&](double x) { return w(x, z - t + x); }, 0.0, t);
  double i2 = trap([&](double x) { return w(x, z + t - x); }, 0.0, t);
  return -0.5 * i0 + 0.5 * i1 + 0.5 * i2;
}

}  // namespace vtx
