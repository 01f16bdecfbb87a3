// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#include "vtx/lattice.hpp"

#include <cmath>
#include <numbers>

namespace vtx {

FieldPair& FieldPair::operator+=(const FieldPair& o) {
  phi += o.phi;
  for (std::size_t j = 0; j < a.c.size(); ++j) a.c[j] += o.a.c[j];
  return *this;
}

FieldPair& FieldPair::operator-=(const FieldPair& o) {
  phi -= o.phi;
  for (std::size_t j = 0; j < a.c.size(); ++j) a.c[j] -= o.a.c[j];
  return *this;
}

FieldPair& FieldPair::operator*=(double s) {
  phi *= s;
  for (auto& c : a.c) c *= s;
  return *this;
}

void FieldPair::axpy(double s, const FieldPair& x) {
  for (std::size_t i = 0; i < phi.size(); ++i) phi.v[i] += s * x.phi.v[i];
  for (std::size_t j = 0; j < a.c.size(); ++j)
    for (std::size_t i = 0; i < phi.size(); ++i) a.c[j].v[i] += s * x.a.c[j].v[i];
}

double dot(const FieldPair& p, const FieldPair& q) {
  require_same_grid(p.grid(), q.grid(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < p.phi.size(); ++i)
    s += p.phi.v[i].real() * q.phi.v[i].real() + p.phi.v[i].imag() * q.phi.v[i].imag();
  for (std::size_t j = 0; j < p.a.c.size(); ++j)
    for (std::size_t i = 0; i < p.phi.size(); ++i) s += p.a.c[j].v[i] * q.a.c[j].v[i];
  return s * p.grid().cell_volume();
}

double norm(const FieldPair& p) { return std::sqrt(dot(p, p)); }

std::vector<double> flatten(const FieldPair& p) {
  std::vector<double> out(p.dof());
  std::size_t n = p.phi.size();
  for (std::size_t i = 0; i < n; ++i) {
    out[2 * i] = p.phi.v[i].real();
    out[2 * i + 1] = p.phi.v[i].imag();
  }
  for (std::size_t j = 0; j < p.a.c.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) out[(2 + j) * n + i] = p.a.c[j].v[i];
  return out;
}

void unflatten(const double* data, FieldPair& p) {
  std::size_t n = p.phi.size();
  for (std::size_t i = 0; i < n; ++i) p.phi.v[i] = cplx(data[2 * i], data[2 * i + 1]);
  for (std::size_t j = 0; j < p.a.c.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) p.a.c[j].v[i] = data[(2 + j) * n + i];
}

LatticeMask make_mask(const Grid& g, int ring) {
  LatticeMask m;
  m.grid = g;
  m.ring = ring;
  m.node.assign(g.size(), 0);
  for (std::size_t idx = 0; idx < g.size(); ++idx) m.node[idx] = g.on_boundary(idx, ring) ? 0 : 1;
  for (int j = 0; j < g.dim; ++j) {
    m.link[j].assign(g.size(), 0);
    auto st = g.stride(j);
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      if (g.coords(idx)[j] == g.n[j] - 1) continue;
      m.link[j][idx] = (m.node[idx] || m.node[idx + st]) ? 1 : 0;
    }
  }
  return m;
}

void apply_mask(FieldPair& p, const LatticeMask& m) {
  for (std::size_t i = 0; i < p.phi.size(); ++i)
    if (!m.node[i]) p.phi.v[i] = 0.0;
  for (int j = 0; j < p.grid().dim; ++j)
    for (std::size_t i = 0; i < p.phi.size(); ++i)
      if (!m.link[j][i]) p.a.c[j].v[i] = 0.0;
}

namespace {

inline double sq(double x) { return x * x; }

// Plaquette field F_kj at base node idx (requires idx + e_k + e_j in grid).
inline double plaquette(const GaugePotential& a, std::size_t idx, int k, int j, std::ptrdiff_t sk,
                        std::ptrdiff_t sj, double h) {
  return (a.c[j].v[idx + sk] - a.c[j].v[idx] - a.c[k].v[idx + sj] + a.c[k].v[idx]) / h;
}

}  // namespace

ScalarField lattice_energy_density(const FieldPair& c, double lambda) {
  const Grid& g = c.grid();
  double h = g.spacing();
  ScalarField e(g, 0.0);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    auto co = g.coords(idx);
    double s = 0.25 * lambda * sq(std::norm(c.phi.v[idx]) - 1.0);
    for (int j = 0; j < g.dim; ++j) {
      if (co[j] == g.n[j] - 1) continue;
      auto sj = g.stride(j);
      cplx U = std::polar(1.0, -h * c.a.c[j].v[idx]);
      s += std::norm(U * c.phi.v[idx + sj] - c.phi.v[idx]) / (h * h);
      for (int k = j + 1; k < g.dim; ++k) {
        if (co[k] == g.n[k] - 1) continue;
        s += sq(plaquette(c.a, idx, j, k, sj, g.stride(k), h));
      }
    }
    e.v[idx] = s;
  }
  return e;
}

double lattice_energy(const FieldPair& c, double lambda) {
  auto e = lattice_energy_density(c, lambda);
  double s = 0.0;
  for (double x : e.v) s += x;
  return s * c.grid().cell_volume();
}

FieldPair static_gradient(const FieldPair& c, double lambda, const LatticeMask& m) {
  const Grid& g = c.grid();
  double h = g.spacing();
  double ih2 = 1.0 / (h * h);
  FieldPair r(g);
  const int d = g.dim;
  std::vector<cplx> U[3];
  for (int j = 0; j < d; ++j) {
    U[j].resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) U[j][i] = std::polar(1.0, -h * c.a.c[j].v[i]);
  }
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (m.node[idx]) {
      cplx p = c.phi.v[idx];
      cplx s = (0.5 * lambda * (std::norm(p) - 1.0)) * p;
      for (int j = 0; j < d; ++j) {
        auto sj = g.stride(j);
        s += (2.0 * p - U[j][idx] * c.phi.v[idx + sj] - std::conj(U[j][idx - sj]) * c.phi.v[idx - sj]) * ih2;
      }
      r.phi.v[idx] = s;
    }
    for (int j = 0; j < d; ++j) {
      if (!m.link[j][idx]) continue;
      auto sj = g.stride(j);
      double s = -std::imag(std::conj(c.phi.v[idx]) * U[j][idx] * c.phi.v[idx + sj]) / h;
      for (int k = 0; k < d; ++k) {
        if (k == j) continue;
        auto sk = g.stride(k);
        double fp = plaquette(c.a, idx, k, j, sk, sj, h);
        double fm = plaquette(c.a, idx - sk, k, j, sk, sj, h);
        s -= (fp - fm) / h;
      }
      r.a.c[j].v[idx] = s;
    }
  }
  return r;
}

ScalarField gauss_field(const FieldPair& base, const FieldPair& t, const LatticeMask& m) {
  const Grid& g = base.grid();
  double h = g.spacing();
  ScalarField G(g, 0.0);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (!m.node[idx]) continue;
    double s = -std::imag(std::conj(base.phi.v[idx]) * t.phi.v[idx]);
    for (int j = 0; j < g.dim; ++j) s += (t.a.c[j].v[idx] - t.a.c[j].v[idx - g.stride(j)]) / h;
    G.v[idx] = s;
  }
  return G;
}

FieldPair gauge_direction(const FieldPair& base, const ScalarField& chi) {
  const Grid& g = base.grid();
  double h = g.spacing();
  FieldPair t(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    t.phi.v[idx] = cplx(0.0, chi.v[idx]) * base.phi.v[idx];
    auto co = g.coords(idx);
    for (int j = 0; j < g.dim; ++j)
      if (co[j] < g.n[j] - 1) t.a.c[j].v[idx] = (chi.v[idx + g.stride(j)] - chi.v[idx]) / h;
  }
  return t;
}

GaugePotential nodes_to_links(const GaugePotential& alpha) {
  const Grid& g = alpha.grid;
  GaugePotential out(g);
  for (int j = 0; j < g.dim; ++j)
    for (std::size_t idx = 0; idx < g.size(); ++idx)
      if (g.coords(idx)[j] < g.n[j] - 1)
        out.c[j].v[idx] = 0.5 * (alpha.c[j].v[idx] + alpha.c[j].v[idx + g.stride(j)]);
  return out;
}

GaugePotential links_to_nodes(const GaugePotential& links) {
  const Grid& g = links.grid;
  GaugePotential out(g);
  for (int j = 0; j < g.dim; ++j)
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      int i = g.coords(idx)[j];
      auto st = g.stride(j);
      if (i == 0)
        out.c[j].v[idx] = links.c[j].v[idx];
      else if (i == g.n[j] - 1)
        out.c[j].v[idx] = links.c[j].v[idx - st];
      else
        out.c[j].v[idx] = 0.5 * (links.c[j].v[idx] + links.c[j].v[idx - st]);
    }
  return out;
}

int plaquette_winding_total(const ComplexField& phi) {
  const Grid& g = phi.grid;
  if (g.dim != 2) throw GridError("plaquette winding needs a 2D field");
  // Phase winding around the outer boundary loop (counter-clockwise), with
  // edge phases in the canonical +x/+y direction as in the plaquette count.
  auto safe = [](cplx z) { return z == cplx(0.0, 0.0) ? cplx(1e-200, 0.0) : z; };
  auto edge = [&](cplx from, cplx to) { return std::arg(safe(to) * std::conj(safe(from))); };
  int nx = g.n[0], ny = g.n[1];
  double w = 0.0;
  for (int i = 0; i + 1 < nx; ++i) w += edge(phi.at(i, 0), phi.at(i + 1, 0)) - edge(phi.at(i, ny - 1), phi.at(i + 1, ny - 1));
  for (int j = 0; j + 1 < ny; ++j) w += edge(phi.at(nx - 1, j), phi.at(nx - 1, j + 1)) - edge(phi.at(0, j), phi.at(0, j + 1));
  return int(std::lround(w / (2 * std::numbers::pi)));
}

}  // namespace vtx
