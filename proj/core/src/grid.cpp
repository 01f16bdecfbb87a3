// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#include "vtx/grid.hpp"

#include <cmath>

namespace vtx {

Grid::Grid(const std::vector<int>& dims, const std::vector<double>& spacing,
           const std::vector<double>& org) {
  if (dims.empty() || dims.size() > 3) throw GridError("grid must have 1 to 3 axes");
  if (spacing.size() != dims.size() || org.size() != dims.size())
    throw GridError("grid spacing/origin length must match dims");
  dim = int(dims.size());
  for (int a = 0; a < dim; ++a) {
    if (dims[a] < 3) throw GridError("every axis needs at least 3 nodes");
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a])) throw GridError("spacing must be positive");
    n[a] = dims[a];
    h[a] = spacing[a];
    origin[a] = org[a];
  }
}

Grid Grid::square(double L, double h) {
  if (!(L > 0) || !(h > 0)) throw GridError("square grid needs L > 0 and h > 0");
  int m = int(std::lround(2.0 * L / h));
  return Grid({m + 1, m + 1}, {h, h}, {-L, -L});
}

Grid Grid::box(double L, double Lz, double h) {
  int m = int(std::lround(2.0 * L / h));
  int mz = int(std::lround(Lz / h));
  return Grid({m + 1, m + 1, mz + 1}, {h, h, h}, {-L, -L, 0.0});
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= h[a];
  return v;
}

double Grid::spacing() const {
  for (int a = 1; a < dim; ++a)
    if (std::abs(h[a] - h[0]) > 1e-14 * h[0]) throw GridError("operation requires uniform spacing");
  return h[0];
}

bool Grid::on_boundary(std::size_t idx, int ring) const {
  auto c = coords(idx);
  for (int a = 0; a < dim; ++a)
    if (c[a] < ring || c[a] > n[a] - 1 - ring) return true;
  return false;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) throw GridError(std::string("grid mismatch in ") + what);
}

namespace {

template <class T>
Field<T> laplacian_impl(const Field<T>& f) {
  const Grid& g = f.grid;
  Field<T> out(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (g.on_boundary(idx)) continue;
    T s{};
    for (int a = 0; a < g.dim; ++a) {
      auto st = g.stride(a);
      s += (f.v[idx + st] - 2.0 * f.v[idx] + f.v[idx - st]) / (g.h[a] * g.h[a]);
    }
    out.v[idx] = s;
  }
  return out;
}

template <class T>
Field<T> partial_impl(const Field<T>& f, int axis) {
  const Grid& g = f.grid;
  if (axis < 0 || axis >= g.dim) throw GridError("axis out of range");
  Field<T> out(g);
  auto st = g.stride(axis);
  double h = g.h[axis];
  int n = g.n[axis];
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    int i = g.coords(idx)[axis];
    if (i == 0)
      out.v[idx] = (-3.0 * f.v[idx] + 4.0 * f.v[idx + st] - f.v[idx + 2 * st]) / (2.0 * h);
    else if (i == n - 1)
      out.v[idx] = (3.0 * f.v[idx] - 4.0 * f.v[idx - st] + f.v[idx - 2 * st]) / (2.0 * h);
    else
      out.v[idx] = (f.v[idx + st] - f.v[idx - st]) / (2.0 * h);
  }
  return out;
}

}  // namespace

ScalarField laplacian(const ScalarField& f) { return laplacian_impl(f); }
ComplexField laplacian(const ComplexField& f) { return laplacian_impl(f); }
ScalarField partial(const ScalarField& f, int axis) { return partial_impl(f, axis); }
ComplexField partial(const ComplexField& f, int axis) { return partial_impl(f, axis); }

ComplexField covariant_derivative(const ComplexField& phi, const GaugePotential& alpha, int axis) {
  require_same_grid(phi.grid, alpha.grid, "covariant_derivative");
  if (axis < 0 || axis >= phi.grid.dim) throw GridError("axis out of range");
  ComplexField d = partial(phi, axis);
  const auto& a = alpha.c[axis].v;
  for (std::size_t i = 0; i < d.size(); ++i) d.v[i] -= cplx(0.0, a[i]) * phi.v[i];
  return d;
}

ScalarField field_strength(const GaugePotential& alpha, int a, int b) {
  if (alpha.grid.dim < 2) throw GridError("field strength needs a 2D or 3D potential");
  if (a == b || a < 0 || b < 0 || a >= alpha.grid.dim || b >= alpha.grid.dim)
    throw GridError("invalid field strength axes");
  ScalarField f = partial(alpha.c[b], a);
  f -= partial(alpha.c[a], b);
  return f;
}

ScalarField quadrature_weights(const Grid& g) {
  ScalarField w(g, 0.0);
  double vol = g.cell_volume();
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    auto c = g.coords(idx);
    double wt = vol;
    for (int a = 0; a < g.dim; ++a)
      if (c[a] == 0 || c[a] == g.n[a] - 1) wt *= 0.5;
    w.v[idx] = wt;
  }
  return w;
}

namespace {
// Product weight without building a field.
inline double trap_weight(const Grid& g, std::size_t idx) {
  auto c = g.coords(idx);
  double wt = g.cell_volume();
  for (int a = 0; a < g.dim; ++a)
    if (c[a] == 0 || c[a] == g.n[a] - 1) wt *= 0.5;
  return wt;
}
}  // namespace

double integrate(const ScalarField& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += trap_weight(f.grid, i) * f.v[i];
  return s;
}

double inner_product_l2(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "inner_product_l2");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += trap_weight(a.grid, i) * a.v[i] * b.v[i];
  return s;
}

double inner_product_l2(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a.grid, b.grid, "inner_product_l2");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += trap_weight(a.grid, i) * (a.v[i].real() * b.v[i].real() + a.v[i].imag() * b.v[i].imag());
  return s;
}

double norm_l2(const ScalarField& f) { return std::sqrt(inner_product_l2(f, f)); }
double norm_l2(const ComplexField& f) { return std::sqrt(inner_product_l2(f, f)); }

double norm_h1(const ScalarField& f) {
  double s = inner_product_l2(f, f);
  for (int a = 0; a < f.grid.dim; ++a) {
    auto d = partial(f, a);
    s += inner_product_l2(d, d);
  }
  return std::sqrt(s);
}

double norm_h1(const ComplexField& f) {
  double s = inner_product_l2(f, f);
  for (int a = 0; a < f.grid.dim; ++a) {
    auto d = partial(f, a);
    s += inner_product_l2(d, d);
  }
  return std::sqrt(s);
}

double norm_linf(const ScalarField& f) {
  double m = 0.0;
  for (double x : f.v) m = std::max(m, std::abs(x));
  return m;
}

double norm_linf(const ComplexField& f) {
  double m = 0.0;
  for (const auto& x : f.v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(const ScalarField& f) {
  for (double x : f.v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool all_finite(const ComplexField& f) {
  for (const auto& x : f.v)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
  return true;
}

}  // namespace vtx
