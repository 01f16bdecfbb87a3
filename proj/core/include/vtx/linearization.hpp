// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "vtx/elliptic.hpp"
#include "vtx/krylov.hpp"
#include "vtx/lattice.hpp"
#include "vtx/vortex.hpp"

namespace vtx {

// Tangent vectors (phi~ on nodes, a~ on links) share the FieldPair layout.
using TangentVector = FieldPair;

// Lattice fields of a solved configuration: phi on nodes, alpha averaged onto links.
FieldPair lattice_fields(const VortexConfig& cfg);

// Base point of the linearization with cached link phases U = exp(-i h a).
struct StaticBase {
  FieldPair c;
  LatticeMask mask;
  double lambda = 1.0;
  std::vector<cplx> U[3];

  const Grid& grid() const { return c.grid(); }
};
StaticBase make_static_base(const FieldPair& c, int ring = 1, double lambda = 1.0);

// Hessian of the lattice energy (Jacobian of static_gradient) on active variables.
TangentVector apply_calL(const StaticBase& b, const TangentVector& t);
// Corrected Hessian: calL minus the gauge column, L t = calL t - (i phi G, grad G).
// Its quadratic form is <t, calL t> + ||G_t||^2.
TangentVector apply_L(const StaticBase& b, const TangentVector& t);
// Gauge function G_t = div a~ - (i phi, phi~) on active nodes.
ScalarField gauge_function(const StaticBase& b, const TangentVector& t);
double gauge_residual(const StaticBase& b, const TangentVector& t);

// First-order operator, node-centered:
//   first  = ((D1 + i D2) phi~ - i (a1~ + i a2~) phi) / 2
//   second = ([div a~ - (i phi, phi~)] + i [curl a~ + (phi, phi~)]) / 4
// The corrected Hessian form equals int 4|first|^2 + 16|second|^2 up to O(h^2).
struct DImage {
  ComplexField first, second;
};
DImage apply_D(const StaticBase& b, const TangentVector& t);
double D_form(const DImage& d);
// Plain L2 norm of the pair (first, second).
double D_norm(const DImage& d);

struct GaugeFixResult {
  TangentVector t;
  ScalarField chi;
  SolveReport report;
  double residual_before = 0.0;
  double residual_after = 0.0;
};
// Adds the gauge direction (i phi chi, grad chi) with (-Delta + |phi|^2) chi = G_raw,
// chi = -Im(phi~/phi) on the frozen ring; the result is masked.
GaugeFixResult gauge_fix(const StaticBase& b, const TangentVector& raw, double tolerance = 1e-10);

// (-Delta_5 + shift)^{-1} per component on the active boxes, by DST-I.
class DstPreconditioner {
 public:
  DstPreconditioner(const LatticeMask& m, double shift = 1.0);
  ~DstPreconditioner();
  DstPreconditioner(const DstPreconditioner&) = delete;
  DstPreconditioner& operator=(const DstPreconditioner&) = delete;
  void apply(const Vec& r, Vec& z) const;
  // (-Delta_5 + shift) on the same boxes (the H1-type form used for coercivity).
  void apply_forward(const Vec& x, Vec& y) const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

// Orthonormal (in dot) set used for deflation.
struct Deflation {
  std::vector<Vec> q;
  void project(Vec& x) const;
};
Deflation make_deflation(const std::vector<TangentVector>& modes);

// Solve P L P x = P rhs on the complement of the deflation space.
CGResult solve_L(const StaticBase& b, const DstPreconditioner& pre, const Deflation* defl, const Vec& rhs, Vec& x,
                 double tol, int max_it = 5000, double shift = 0.0);

struct RelaxOptions {
  double tolerance = 1e-9;  // on the max-norm of the projected static gradient
  int max_steps = 12;
  double linear_tolerance = 1e-10;
};
struct RelaxReport {
  int steps = 0;
  double residual = 0.0;        // projected, max-norm
  double modal_residual = 0.0;  // part along the deflated modes, L2
  bool converged = false;
  bool floored = false;  // stopped at the modal leakage floor rather than at tolerance
};
// Newton correction of a lattice configuration to a zero of the static gradient,
// keeping the moduli point: updates are L2-orthogonal to `modes`.
RelaxReport relax(FieldPair& c, const std::vector<TangentVector>& modes, const RelaxOptions& opt = {},
                  int ring = 1, double lambda = 1.0);

struct ZeroModeOptions {
  std::optional<double> delta;  // moduli step, default h/5
  // Newton-correct the base and the displaced configurations to exact lattice
  // statics before differencing.
  bool relax = true;
  RelaxOptions relax_options;
  double gauge_tolerance = 1e-10;
  double solve_tolerance = 1e-11;
  // Use the symmetric-polynomial chart (coefficients of prod(z - z_k)) instead of
  // center coordinates. Chosen automatically when two centers are closer than 2h.
  std::optional<bool> coefficient_chart;
};
struct ZeroModeBasis {
  StaticBase base;
  VortexConfig config;
  bool coefficient_chart = false;
  std::vector<TangentVector> tangents;  // gauge-fixed, before orthonormalization
  std::vector<TangentVector> modes;     // Gram-Schmidt orthonormal
  Eigen::MatrixXd gram;                 // <tangent_i, tangent_j>
  std::vector<double> gauge_residuals;  // per tangent, relative
  std::vector<double> raw_gauge_residuals;
  std::vector<RelaxReport> relax_reports;  // base first, then each displaced solve
};
// Centers are used exactly as given (no snapping), so that differencing is consistent.
ZeroModeBasis zero_modes(const VortexCenters& centers, const Grid& g, const ZeroModeOptions& opt = {});

struct CoercivityOptions {
  double shift = 0.01;
  int extra = 2;  // block size beyond 2N for the near-kernel iteration
  double eig_tolerance = 1e-6;
  int max_iterations = 60;
  double linear_tolerance = 1e-8;
  int gamma_block = 3;
  unsigned seed = 12345;
};
struct CoercivityReport {
  std::vector<double> near_zero;      // 2N smallest eigenvalues of L (L2 normalized)
  std::vector<double> spectrum_head;  // all Ritz values of the block
  double gamma_min = 0.0;             // min <x,Lx>/<x,L_vac x> over x L2-orthogonal to modes
  std::vector<double> gamma_head;
  TangentVector gamma_vector;  // minimizer of the deflated quotient
  int iterations_kernel = 0;
  int iterations_gamma = 0;
  bool converged = false;
};
CoercivityReport coercivity(const ZeroModeBasis& basis, const CoercivityOptions& opt = {});

}  // namespace vtx
