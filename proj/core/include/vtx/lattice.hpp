// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <cstdint>
#include <vector>

#include "vtx/grid.hpp"

namespace vtx {

// Higgs samples on nodes and one real gauge value per link. The link from
// node x to x + e_j is stored at index x of component j; links leaving the
// grid are unused and kept at zero.
struct FieldPair {
  ComplexField phi;
  GaugePotential a;

  FieldPair() = default;
  explicit FieldPair(const Grid& g) : phi(g), a(g) {}
  const Grid& grid() const { return phi.grid; }
  std::size_t dof() const { return phi.size() * std::size_t(2 + grid().dim); }

  FieldPair& operator+=(const FieldPair& o);
  FieldPair& operator-=(const FieldPair& o);
  FieldPair& operator*=(double s);
  void axpy(double s, const FieldPair& x);
};

// h^d * sum over nodes and links of Re(p conj q) + a b.
double dot(const FieldPair& p, const FieldPair& q);
double norm(const FieldPair& p);

// Flat layout: interleaved (re, im) of phi, then each link component.
std::vector<double> flatten(const FieldPair& p);
void unflatten(const double* data, FieldPair& p);

// Which nodes and links are evolved/solved for. Nodes within `ring` layers of
// the edge are frozen; a link is active when either endpoint is active.
struct LatticeMask {
  Grid grid;
  int ring = 1;
  std::vector<std::uint8_t> node;
  std::vector<std::uint8_t> link[3];
};

LatticeMask make_mask(const Grid& g, int ring);
void apply_mask(FieldPair& p, const LatticeMask& m);

// Lattice static energy: h^d [ sum_x lambda/4 (|phi|^2-1)^2
//   + sum_links |U phi(x+e) - phi(x)|^2 / h^2 + sum_plaquettes F^2 ],
// U = exp(-i h A). Node-local terms at every node, link and plaquette terms
// wherever they fit in the grid.
double lattice_energy(const FieldPair& c, double lambda);

// Pointwise energy density at nodes (forward link/plaquette terms attached
// to their base node), so that h^d * sum = lattice_energy.
ScalarField lattice_energy_density(const FieldPair& c, double lambda);

// Gradient of the lattice energy in the L2 pairing of `dot`, halved:
// R_phi = -Delta_A phi + lambda/2 (|phi|^2 - 1) phi,
// R_A   = -sum_k grad_k^- F_kj - Im(conj(phi) U phi(x+e)) / h,
// evaluated on active variables (zero elsewhere).
FieldPair static_gradient(const FieldPair& c, double lambda, const LatticeMask& m);

// Gauss function sum_j grad_j^- a_j - Im(conj(phi) phi_t) on active nodes.
ScalarField gauss_field(const FieldPair& base, const FieldPair& t, const LatticeMask& m);

// Infinitesimal gauge direction (i phi chi, grad^+ chi) on all in-grid links.
FieldPair gauge_direction(const FieldPair& base, const ScalarField& chi);

// Node/link conversion by averaging the two endpoints / the two links.
GaugePotential nodes_to_links(const GaugePotential& alpha);
GaugePotential links_to_nodes(const GaugePotential& links);

// Sum over plaquettes (in the (a,b) plane) of the phase winding of phi.
int plaquette_winding_total(const ComplexField& phi);

}  // namespace vtx
