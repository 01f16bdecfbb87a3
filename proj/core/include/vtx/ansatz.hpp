// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "vtx/linearization.hpp"
#include "vtx/moduli.hpp"

namespace vtx {

class AnsatzError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Slow-variable map (tau, zeta) -> vortex centers.
using WaveMapFn = std::function<VortexCenters(double tau, double zeta)>;

// Relaxed lattice statics and their zero-mode bases, cached by centers.
class SliceCache {
 public:
  SliceCache(const Grid& g, ZeroModeOptions opt = {});
  const Grid& grid() const { return g_; }
  // Static at q: solve, then Newton-relax against the approximate modes (the
  // same recipe as zero_modes with relaxation, so the bases agree bitwise).
  const FieldPair& eta(const VortexCenters& q);
  const ZeroModeBasis& basis(const VortexCenters& q);
  // Builds the listed statics, `jobs` at a time.
  void prefetch(const std::vector<VortexCenters>& qs, int jobs = 1);
  std::size_t size() const { return eta_.size(); }

 private:
  using Key = std::vector<double>;
  static Key key(const VortexCenters& q);
  FieldPair build(const VortexCenters& q) const;
  Grid g_;
  ZeroModeOptions opt_;
  std::map<Key, FieldPair> eta_;
  std::map<Key, std::unique_ptr<ZeroModeBasis>> basis_;
};

// a~ = (1/2) rho dTheta + b with Theta = 2 sum arg(z - z_k) and rho a quintic
// step from 0 (r < R) to 1 (r > 2R), R = max |z_k| + margin; b solves
// (-Delta + |phi|^2) b = rhs with Dirichlet data matching the tangent's phase.
// The result makes (d phi - i a~ phi, d alpha - grad a~) gauge orthogonal.
struct GaugeFieldResult {
  ScalarField a;           // a~ on nodes
  TangentVector velocity;  // gauge-fixed tangent, masked
  double residual = 0.0;   // max |(-Delta + |phi|^2) a~ + G(raw)| on interior nodes
  double gauge_residual = 0.0;  // relative gauge residual of `velocity`
  double R = 0.0;
  SolveReport report;
};
// raw: finite-difference derivative of the statics; dq: the matching center derivative.
GaugeFieldResult gauge_fields_03(const StaticBase& base, const TangentVector& raw, const VortexCenters& q,
                                 const std::vector<cplx>& dq, double margin = 2.0, double tolerance = 1e-11);
// (1/2) dTheta at the nodes for centers q moving with dq.
ScalarField half_theta_derivative(const VortexCenters& q, const std::vector<cplx>& dq, const Grid& g);

struct DefectReport {
  TangentVector T;
  double norm = 0.0;
  std::vector<double> pairings;  // <T, e_beta> with the orthonormal modes
  double max_pairing = 0.0;      // max |pairing| / ||T||
  GaugeFieldResult g0, g3;       // tau and zeta velocities at the point
};
struct DefectOptions {
  double L = 6.0, h = 0.2;
  double delta = 0.02;  // slow-variable difference step
  double margin = 2.0;
};
// T = d0 D0 eta - d3 D3 eta - (i (a0 D0 - a3 D3) phi, 0), with D_j eta the
// gauge-fixed velocities and all slow derivatives centered differences of step delta.
DefectReport defect_T(const WaveMapFn& q, double tau, double zeta, const DefectOptions& opt = {},
                      SliceCache* cache = nullptr);
std::vector<double> mode_pairings(const TangentVector& T, const ZeroModeBasis& basis);

struct Psi1Result {
  TangentVector psi;
  std::vector<double> removed_pairings;  // mode components of T taken out
  double removed_gauge = 0.0;            // norm of the gauge component of T taken out, / ||T||
  double residual = 0.0;                 // ||P (L psi + T_proj)|| / ||T||, P off the modes
  double modal_leakage = 0.0;            // ||(1 - P) L psi|| / ||T||: L is only near-singular on the modes
  double mode_overlap = 0.0;             // max |<psi, e_mu>| / ||psi||
  double gauge_residual = 0.0;           // ||G(psi)|| / ||psi||
  int iterations = 0;
};
// L psi = -T_proj on the complement of the modes; T_proj is T with its gauge
// and zero-mode components removed.
Psi1Result solve_psi1(const TangentVector& T, const ZeroModeBasis& basis, double tolerance = 1e-10);

// Fields of one (t, z) stencil point: Phi and A_1, A_2 on the xy lattice,
// A_0 and A_3 on its nodes.
struct SpaceTimeSlice {
  FieldPair c;
  ScalarField a0, a3;
};
// Stencil points (a, b) at t = a d, z = b d.
struct Stencil {
  double d = 0.1;
  double lambda = 1.0;
  std::map<std::pair<int, int>, SpaceTimeSlice> slices;
  const SpaceTimeSlice& at(int a, int b) const;
  const Grid& grid() const { return slices.begin()->second.c.grid(); }
};
// Offsets needed for S at the centre and its four neighbours.
std::vector<std::pair<int, int>> stencil_points(bool with_continuity = true);

struct SComponents {
  ComplexField phi;
  ScalarField a1, a2;  // link values (component j at the link's lower node)
  ScalarField a0, a3;  // nodes
};
// S_phi = D0 D0 Phi - D3 D3 Phi + R_phi, S_aj = d0 F0j - d3 F3j + R_Aj (j = 1, 2),
// S_a0 = -sum dk Fk0 - d3 F30 - Im(conj Phi D0 Phi), S_a3 = d0 F03 - sum dk Fk3 - Im(conj Phi D3 Phi);
// xy on the lattice, t and z by centered differences. Zero on the frozen ring.
SComponents evaluate_S(const Stencil& st, int a = 0, int b = 0);

struct SNorms {
  double phi = 0.0, a1 = 0.0, a2 = 0.0, a0 = 0.0, a3 = 0.0;
};
SNorms s_norms(const SComponents& s);

struct ContinuityReport {
  double residual = 0.0;  // L2 norm of (S_phi, i Phi) + d0 S_a0 - sum dj S_aj at the centre
  double scale = 0.0;     // largest L2 norm among the four terms
  double relative = 0.0;  // residual / scale (0 when every term vanishes)
};
ContinuityReport continuity_check(const Stencil& st);

struct AnsatzOptions {
  double L = 6.0, h = 0.2;
  double d = 0.05;  // physical stencil spacing in t and z
  double tau0 = 0.0, zeta0 = 0.0;
  double margin = 2.0;
  double psi_tolerance = 1e-10;
  bool continuity = true;
  int jobs = 1;
};
struct ResidualReport {
  double epsilon = 0.0;
  SNorms S;          // first-order ansatz
  SNorms S_zeroth;   // psi1 and a~ omitted
  ContinuityReport continuity;
  double max_T_pairing = 0.0;  // over stencil points, relative
  double max_psi_residual = 0.0, max_psi_leakage = 0.0, max_psi_mode_overlap = 0.0, max_psi_gauge = 0.0;
  double max_psi_removed_gauge = 0.0;
  double max_gauge_field_residual = 0.0;
  // Tail fits at the centre point on [R, half-width - 1], R = max |z_k| + margin.
  double psi_tail_rate = 0.0;  // exponential rate of |psi1|
  double a0_tail_power = 0.0;  // power of |a0~| in (r + 1)
  double wall_seconds = 0.0;
};
// The stencil of first-order fields Phi = eta(q) + eps^2 phi1, A = alpha + eps^2 a1,
// A0 = eps a0~, A3 = eps a3~ around (tau0, zeta0); zeroth order drops phi1, a1, a~.
Stencil ansatz_stencil(const WaveMapFn& q, double eps, const AnsatzOptions& opt, bool first_order,
                       SliceCache& cache, ResidualReport* diag = nullptr);
ResidualReport ansatz_residual(const WaveMapFn& q, double eps, const AnsatzOptions& opt = {},
                               SliceCache* cache = nullptr);
// Halving ratios norm(eps_i) / norm(eps_{i+1}) are left to the caller.
std::vector<ResidualReport> residual_scan(const WaveMapFn& q, const std::vector<double>& eps,
                                          const AnsatzOptions& opt = {});

// Reduced geodesic from s0 as a zeta-independent map (tau >= 0), centers (+Z, -Z).
WaveMapFn geodesic_wave_map(const ReducedMetric& m, const GeodesicState& s0, double dtau = 1e-3);
// Same initial point and velocity, zero acceleration in the center chart.
WaveMapFn straight_line_map(const ReducedMetric& m, const GeodesicState& s0);

// Tail fits of node magnitudes binned by distance from `center` on [r0, r1]:
// the exponential rate -d log|f| / dr and the power -d log|f| / d log(r + 1).
double tail_exponential_rate(const ScalarField& magnitude, cplx center, double r0, double r1);
double tail_power(const ScalarField& magnitude, cplx center, double r0, double r1);
// Pointwise magnitude of a tangent (phi~ and the node-indexed link values).
ScalarField tangent_magnitude(const TangentVector& t);

}  // namespace vtx
