// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vtx/linearization.hpp"
#include "vtx/moduli.hpp"

namespace vtx {

// Temporal-gauge lattice evolution: c = (Phi on nodes, A on links) and its
// velocity p = (Pi, E). Equations Pi' = -R_phi(c), E' = -R_A(c) with R the
// halved lattice energy gradient; nodes and links inside `ring` layers of the
// edge stay frozen.
struct EvolState {
  FieldPair c, p;
  double t = 0.0;
  double lambda = 1.0;
  LatticeMask mask;
  double gauss_initial = 0.0;
  const Grid& grid() const { return c.grid(); }
};

class EvolutionError : public std::runtime_error {
 public:
  EvolutionError(const std::string& what, std::optional<EvolState> last_good = std::nullopt)
      : std::runtime_error(what), last_good(std::move(last_good)) {}
  std::optional<EvolState> last_good;
};

EvolState make_evol_state(const FieldPair& c, const FieldPair& p, double lambda = 1.0, int ring = 2);

// Static fields from the basis with velocities eps * sum_mu qdot^mu n_mu, using
// the gauge-fixed tangents (so qdot are moduli velocities of the centers).
EvolState init_adiabatic(const ZeroModeBasis& basis, const std::vector<double>& qdot, double eps,
                         double lambda = 1.0);
// 3D: the 2D configuration extruded along z on g3 (same x-y lattice), velocities
// eps * sum qdot^mu(z) n_mu with A_3 = E_3 = 0.
EvolState init_adiabatic_3d(const ZeroModeBasis& basis, const Grid& g3,
                            const std::function<std::vector<double>(double z)>& qdot, double eps,
                            double lambda = 1.0);

// Kick-drift-kick leapfrog. Throws EvolutionError (with the pre-step state) on
// CFL violation or non-finite fields.
void leapfrog_step(EvolState& s, double dt);
double cfl_limit(const Grid& g);

// dot(p, p) + lattice static energy.
double total_energy(const EvolState& s);
double kinetic_energy(const EvolState& s);
// L2 norm of sum_k grad_k^- E_k - Im(conj(Phi) Pi) on active nodes.
double gauss_residual(const EvolState& s);
// Plaquette winding (2D) or winding of the middle z-slice (3D).
int topological_charge(const EvolState& s);

ComplexField z_slice(const ComplexField& phi, int k);
// Zeros of Phi (2D) or of the z-slice `slice` (3D, default middle).
std::vector<HiggsZero> track_vortices(const EvolState& s, int slice = -1);
// c_mu = <(Phi - phi_ref, A - a_ref), n_mu> with the orthonormal modes (2D).
std::vector<double> project_c_mu(const EvolState& s, const ZeroModeBasis& ref);
// Per z-slice coefficients (3D): result[k][mu].
std::vector<std::vector<double>> project_c_mu_slices(const EvolState& s, const ZeroModeBasis& ref);

// M u: the corrected Hessian L on (phi~, a~_1, a~_2) plus -d_z^2 in 3D, and
// (-Delta + |phi|^2) on a~_3. The reference is z-independent.
FieldPair apply_M(const ZeroModeBasis& ref, const FieldPair& u);
struct QEnergies {
  double Q1 = 0.0, Q2 = 0.0;
};
// u = state - reference, u_t = p. Q1 = |u_t|^2 + <Mu, u>, Q2 = |M u_t|^2 + <M Mu, Mu>.
QEnergies energies_Q(const EvolState& s, const ZeroModeBasis& ref);

struct DiagnosticsRow {
  double t = 0.0;
  double energy = 0.0;
  double gauss = 0.0;
  int charge = 0;
  std::vector<cplx> positions;
  std::vector<double> c_mu;
  double Q1 = 0.0, Q2 = 0.0;
};

struct EvolveOptions {
  std::optional<double> dt;  // default: half the CFL limit
  double t_end = 1.0;
  double sample_dt = 0.5;
  bool track = true;
  const ZeroModeBasis* reference = nullptr;  // enables c_mu, Q1, Q2 (2D)
  std::function<void(const EvolState&, const DiagnosticsRow&)> on_sample;
};
struct EvolveResult {
  EvolState state;
  std::vector<DiagnosticsRow> rows;
  double energy_drift = 0.0;  // max relative deviation from the initial energy
  // |least-squares slope| of the relative energy deviation over the samples: the
  // secular drift per unit time (the leapfrog error itself is a bounded O(dt^2) oscillation).
  double energy_rate = 0.0;
  double gauss_drift = 0.0;   // max |G(t) - G(0)| / initial energy
  bool charge_constant = true;
  double horizon = 0.0;  // time after which boundary reflections can reach the centre
  int steps = 0;
};
// Throws EvolutionError when the zero count disagrees with the winding.
EvolveResult evolve(EvolState s, const EvolveOptions& opt);

// Moduli velocity of the centers (+Z, -Z) for a reduced state, Z = r e^{i theta}.
std::vector<double> center_velocities(const ReducedMetric& m, const GeodesicState& g);

struct AdiabaticOptions {
  double L = 12.0, h = 0.1;
  double cfl_fraction = 0.5;
  double tau_max = 1.0;
  int samples = 20;
  int jobs = 1;
};
struct AdiabaticRun {
  double epsilon = 0.0;
  double error = 0.0;  // max distance of tracked zeros from the predicted centers
  double energy_drift = 0.0, energy_rate = 0.0, gauss_drift = 0.0;
  bool charge_constant = true;
  double wall_seconds = 0.0;
  std::vector<double> tau;
  std::vector<std::vector<cplx>> tracked, predicted;
};
struct AdiabaticReport {
  std::vector<AdiabaticRun> runs;
  std::vector<double> ratios;  // error(eps_i) / error(eps_{i+1})
};
AdiabaticReport adiabatic_experiment(const ReducedMetric& m, const GeodesicState& init,
                                     const std::vector<double>& eps, const AdiabaticOptions& opt = {});

struct ScatteringReport {
  double angle_deg = 0.0;  // outgoing direction of the relative position, in [0, 180)
  double energy_drift = 0.0, energy_rate = 0.0, gauss_drift = 0.0;
  bool charge_constant = true;
  std::vector<DiagnosticsRow> rows;
};
// Head-on collision from centers (+-r0, 0) with speed v each.
ScatteringReport head_on_scattering(double r0, double v, double L = 12.0, double h = 0.1);

}  // namespace vtx
