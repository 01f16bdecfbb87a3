// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "vtx/elliptic.hpp"
#include "vtx/grid.hpp"

namespace vtx {

// Vortex centers z_k as complex numbers; multiplicity by repetition.
using VortexCenters = std::vector<cplx>;

// Roots of z^N + c[N-1] z^(N-1) + ... + c[0].
VortexCenters centers_from_coefficients(const std::vector<cplx>& coeffs);
// Coefficients c[0..N-1] of prod (z - z_k).
std::vector<cplx> coefficients_from_centers(const VortexCenters& centers);

struct TaubesData {
  double mu = 0.0;
  ScalarField u0;      // -sum log(1 + mu/|z-z_k|^2), clamped to stay finite on centers
  ScalarField exp_u0;  // prod |z-z_k|^2 / (|z-z_k|^2 + mu), smooth
  ScalarField g0;      // 4 sum mu/(|z-z_k|^2 + mu)^2
  ScalarField s0;      // -sum log(|z-z_k|^2 + mu)
  ScalarField ds0[2];  // analytic gradient of s0
  // -Delta_h s0 on interior nodes (g0 elsewhere). The solver uses this form so
  // that the discrete problem for s = v + s0 does not depend on mu.
  ScalarField g0_h;
};

std::pair<ScalarField, ScalarField> theta_derivatives(const VortexCenters& centers, const Grid& g);
TaubesData taubes_data(const VortexCenters& centers, double mu, const Grid& g);

struct VortexSolveOptions {
  std::optional<double> mu;  // default 4N + 1
  double tolerance = 1e-10;
  bool snap_centers = true;
  int max_newton_steps = 50;
  std::optional<ScalarField> initial_v;
  std::vector<double>* functional_trace = nullptr;
};

struct VortexConfig {
  Grid grid;
  VortexCenters centers;
  double mu = 0.0;
  ComplexField phi;
  GaugePotential alpha;  // node values
  ScalarField v;
  SolveReport report;
  int N() const { return int(centers.size()); }
};

// Snap to the nearest half-cell point so no node sits on a center.
cplx snap_to_half_cell(cplx z, const Grid& g);

// Discrete Taubes residual -Delta v + e^{u0} e^v + g0 - 1 on interior nodes.
ScalarField taubes_residual(const TaubesData& td, const ScalarField& v);
double taubes_functional(const TaubesData& td, const ScalarField& v);

VortexConfig solve_vortex(const VortexCenters& centers, const Grid& g, const VortexSolveOptions& opt = {});
// Reconstruction phi = prod(z - z_k) exp((v + s0)/2), alpha = (d2 s, -d1 s)/2.
void reconstruct(VortexConfig& cfg, const TaubesData& td);

double flux(const VortexConfig& cfg);
struct WindingReport {
  int from_flux = 0;
  int from_phase = 0;
};
// Throws when the flux and the boundary phase winding disagree.
int winding(const VortexConfig& cfg, WindingReport* report = nullptr);

// Energy with bilinear (Q1) interpolation of the node fields, integrated by
// 3x3 Gauss quadrature per cell (exact for the interpolated fields).
double energy(const ComplexField& phi, const GaugePotential& alpha, double lambda = 1.0);
double energy(const VortexConfig& cfg);

struct CompletionReport {
  double energy = 0.0;
  double squares = 0.0;          // int |(D1+iD2)phi|^2 + (F12 - (1-|phi|^2)/2)^2
  double flux_term = 0.0;        // int F12
  double boundary_current = 0.0; // boundary circulation of Im(conj(phi) D phi)
  double defect = 0.0;           // |E - squares - flux - boundary| / E
};
CompletionReport completion(const ComplexField& phi, const GaugePotential& alpha);

// Discrete L2 norm of ((D1 + i D2) phi, F12 + (|phi|^2 - 1)/2), centered differences.
double bogomolny_residual(const VortexConfig& cfg);

struct DecayFit {
  double rate_potential = 0.0;   // for 1 - |phi|^2
  double rate_covariant = 0.0;   // for |D phi|
  int samples = 0;
};
// Least-squares slope of log quantities against distance from the centroid of
// the centers over the window [0.4 L, 0.75 L] (L = half-width).
DecayFit decay_fit(const VortexConfig& cfg);

struct HiggsZero {
  cplx z;
  int winding = 0;
};
std::vector<HiggsZero> higgs_zeros(const ComplexField& phi);

struct RadialProfile {
  int n = 1;
  std::vector<double> r, rho, a;
  double A = 0.0;          // rho / r^n near the origin
  double residual = 0.0;   // max discrete residual
  int newton_steps = 0;
  double rho_at(double r) const;
  double a_at(double r) const;
};
RadialProfile radial_vortex(int n, double r_max = 20.0, int nodes = 4000);

}  // namespace vtx
