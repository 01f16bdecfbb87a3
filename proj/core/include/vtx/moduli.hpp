// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vtx/linearization.hpp"

namespace vtx {

// Reduced two-vortex geometry for centers +Z and -Z, Z = r e^{i theta}:
//   ds^2 = F(r)^2 dr^2 + G(r)^2 dtheta^2,
// normalized by the mass scale 2 pi so that F -> 1 and G/r -> 1 far apart.
// In the regular chart w = Z^2 the metric is A(s) on the radial direction of w
// and B(s) on the angular one, s = r^2 = |w|, with F^2 = 4 s A and G^2 = 4 s^2 B.
// u(r) is V = (1/8) int (1 - |phi|^2)^2.
struct ReducedMetric {
  std::vector<double> r, F, G, A, B, u;
  double L = 0.0;  // margin around the centers of the sampling boxes
  double h = 0.0;
  double r_switch = 0.5;

  // Monotone cubic interpolation of A, B and u in xi = r^4 / (1 + r^4)^{3/4}:
  // smooth in |w|^2 near coincidence (as rotation invariance requires) and
  // close to r far apart.
  double A_at(double r) const;
  double B_at(double r) const;
  double u_at(double r) const;
  double F_at(double r) const;
  double G_at(double r) const;
  double r_min() const { return r.front(); }
  double r_max() const { return r.back(); }
  // Step for centered differences of interpolated quantities. The interpolant
  // is C1, so a small step reproduces its exact gradient and the discrete
  // flow conserves the interpolated Hamiltonian.
  double fd_step() const { return 1e-6 * (r_max() - r_min()); }

  void write_csv(const std::string& path, const std::string& provenance = "") const;
  static ReducedMetric read_csv(const std::string& path);
};

struct MetricSampleOptions {
  double margin = 7.0;  // box half-widths: r + margin along x, margin along y
  double h = 0.1;
  double r_switch = 0.5;  // below this the coefficient (w) chart is differenced
  int jobs = 1;           // concurrent r samples
  ZeroModeOptions modes = [] {
    ZeroModeOptions o;
    o.relax = false;
    return o;
  }();
};

struct MetricPoint {
  double r = 0.0, F = 0.0, G = 0.0, A = 0.0, B = 0.0, u = 0.0;
  Eigen::MatrixXd gram;
  bool coefficient_chart = false;
};
MetricPoint sample_metric_point(double r, const MetricSampleOptions& opt = {});
// Samples must be strictly increasing; r = 0 is allowed and sampled in the w chart.
ReducedMetric sample_reduced_metric(const std::vector<double>& r, const MetricSampleOptions& opt = {});

// Reduced phase space point. tau is slow time.
struct GeodesicState {
  double r = 0.0, theta = 0.0, p_r = 0.0, p_theta = 0.0, tau = 0.0;
};
struct TrajectoryRow {
  double tau, r, theta, p_r, p_theta, H;
  bool w_chart;
};
using Trajectory = std::vector<TrajectoryRow>;

class ModuliError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// H = (p_r^2 / F^2 + p_theta^2 / G^2) / 2 + l u(r) / (2 pi).
double reduced_hamiltonian(const ReducedMetric& m, const GeodesicState& s, int l = 0);

struct IntegrateOptions {
  double dtau = 1e-3;
  int sample_every = 1;  // trajectory rows every this many steps
};
// RK4 in (r, theta) for r >= r_switch and in w = r^2 e^{2 i theta} below,
// switching back above 1.2 r_switch. theta is carried continuously mod pi.
Trajectory geodesic_integrate(const ReducedMetric& m, const GeodesicState& s0, double tau_span,
                              const IntegrateOptions& opt = {});
// Same flow with the potential l u(r) / (2 pi), l = +1 for lambda > 1 and -1 for lambda < 1.
// epsilon only labels the run: the reduced equations are written in slow time.
Trajectory hamiltonian_integrate(const ReducedMetric& m, const GeodesicState& s0, int l, double epsilon,
                                 double tau_span, const IntegrateOptions& opt = {});

// Chart helpers. Centers are (+Z, -Z) with Z = r e^{i theta}.
cplx w_of(double r, double theta);
// 2x2 metric in the w chart at w, normalized.
Eigen::Matrix2d w_metric(const ReducedMetric& m, cplx w);

// 1+1 wave map into the relative moduli space, written in the global w chart:
//   q_tt - q_zz + Gamma(q)(q_t q_t - q_z q_z) = 0,
// leapfrog in tau with the velocity in Gamma taken implicitly (centered).
struct WaveMapState {
  double zeta0 = 0.0, dzeta = 0.1;
  std::vector<Eigen::Vector2d> q, q_tau;
  std::vector<Eigen::Vector2d> q_prev;  // previous level, empty before the first step
  double dtau_prev = 0.0;
  double tau = 0.0;
  Eigen::Vector2d left, right;  // pinned boundary values
  std::size_t size() const { return q.size(); }
};
// Builds a state with q(zeta), q_tau(zeta) evaluated at nodes; ends pinned to q.
WaveMapState make_wave_map(double zeta0, double zeta1, int nodes,
                           const std::function<Eigen::Vector2d(double)>& q,
                           const std::function<Eigen::Vector2d(double)>& q_tau);
void wave_map_step(const ReducedMetric& m, WaveMapState& s, double dtau);
// int g(q_tau, q_tau) + g(q_z, q_z) dzeta (trapezoid, normalized metric).
double wave_map_energy(const ReducedMetric& m, const WaveMapState& s);
// Christoffel symbols Gamma^a_{bc} of the w-chart metric at w.
std::array<Eigen::Matrix2d, 2> w_christoffel(const ReducedMetric& m, cplx w);

// Space-time samples w(t_i, z_j) on a uniform grid, bilinear in between.
struct SpaceTimeSamples {
  double t0 = 0.0, dt = 0.1, z0 = 0.0, dz = 0.1;
  int nt = 0, nz = 0;
  std::vector<double> v;  // index i * nz + j
  double operator()(double t, double z) const;
  static SpaceTimeSamples from(const std::function<double(double, double)>& w, double t1, double dt,
                               double z0, double z1, double dz);
};
// f(t,z) = -1/2 int_{z-t}^{z+t} w(0,s) ds + 1/2 int_0^t w(s, z-t+s) ds + 1/2 int_0^t w(s, z+t-s) ds,
// the solution of f_tt - f_zz = w_t with zero data. Trapezoid with `steps` panels per integral.
double dalembert_source(const SpaceTimeSamples& w, double t, double z, int steps = 400);

}  // namespace vtx
