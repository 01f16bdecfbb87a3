// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vtx {

using cplx = std::complex<double>;

class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Uniform rectangular lattice. Node (i,j,k) sits at origin + index*spacing.
// Storage is row-major over (k, j, i), so axis 0 is the fastest index.
struct Grid {
  int dim = 2;
  std::array<int, 3> n{1, 1, 1};
  std::array<double, 3> h{1.0, 1.0, 1.0};
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  Grid() = default;
  Grid(const std::vector<int>& dims, const std::vector<double>& spacing,
       const std::vector<double>& origin);

  // [-L, L]^2 with spacing h (2L/h must be an integer up to rounding).
  static Grid square(double L, double h);
  // [-L, L]^2 x [0, Lz) periodic-free box used by the 3D runs.
  static Grid box(double L, double Lz, double h);

  std::size_t size() const { return std::size_t(n[0]) * n[1] * n[2]; }
  std::size_t index(int i, int j, int k = 0) const {
    return (std::size_t(k) * n[1] + j) * n[0] + i;
  }
  std::array<int, 3> coords(std::size_t idx) const {
    int i = int(idx % n[0]);
    std::size_t r = idx / n[0];
    int j = int(r % n[1]);
    int k = int(r / n[1]);
    return {i, j, k};
  }
  std::ptrdiff_t stride(int axis) const {
    if (axis == 0) return 1;
    if (axis == 1) return n[0];
    return std::ptrdiff_t(n[0]) * n[1];
  }
  double coord(int axis, int i) const { return origin[axis] + i * h[axis]; }
  double cell_volume() const;
  // Uniform spacing (throws if axes differ).
  double spacing() const;
  bool on_boundary(std::size_t idx, int ring = 1) const;

  bool operator==(const Grid& o) const {
    return dim == o.dim && n == o.n && h == o.h && origin == o.origin;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

template <class T>
struct Field {
  Grid grid;
  std::vector<T> v;

  Field() = default;
  explicit Field(const Grid& g, T init = T{}) : grid(g), v(g.size(), init) {}

  std::size_t size() const { return v.size(); }
  T& operator[](std::size_t i) { return v[i]; }
  const T& operator[](std::size_t i) const { return v[i]; }
  T& at(int i, int j, int k = 0) { return v[grid.index(i, j, k)]; }
  const T& at(int i, int j, int k = 0) const { return v[grid.index(i, j, k)]; }

  Field& operator+=(const Field& o) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
    return *this;
  }
  Field& operator*=(double s) {
    for (auto& x : v) x *= s;
    return *this;
  }
};

using ScalarField = Field<double>;
using ComplexField = Field<cplx>;

struct GaugePotential {
  Grid grid;
  std::vector<ScalarField> c;

  GaugePotential() = default;
  explicit GaugePotential(const Grid& g) : grid(g), c(g.dim, ScalarField(g)) {}
  ScalarField& operator[](int a) { return c[a]; }
  const ScalarField& operator[](int a) const { return c[a]; }
};

void require_same_grid(const Grid& a, const Grid& b, const char* what);

// Sample a function of the node coordinates.
template <class T, class F>
Field<T> sample(const Grid& g, F&& f) {
  Field<T> out(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    auto c = g.coords(idx);
    out.v[idx] = f(g.coord(0, c[0]), g.coord(1, c[1]), g.dim > 2 ? g.coord(2, c[2]) : 0.0);
  }
  return out;
}

// Second-order centered Laplacian; boundary nodes are set to zero
// (homogeneous Dirichlet rows).
ScalarField laplacian(const ScalarField& f);
ComplexField laplacian(const ComplexField& f);

// Centered first derivative; second-order one-sided on the boundary layer.
ScalarField partial(const ScalarField& f, int axis);
ComplexField partial(const ComplexField& f, int axis);

ComplexField covariant_derivative(const ComplexField& phi, const GaugePotential& alpha, int axis);
ScalarField field_strength(const GaugePotential& alpha, int a = 0, int b = 1);

// Trapezoid weights (product of 1D weights times cell volume).
ScalarField quadrature_weights(const Grid& g);
double integrate(const ScalarField& f);
double inner_product_l2(const ScalarField& a, const ScalarField& b);
double inner_product_l2(const ComplexField& a, const ComplexField& b);
double norm_l2(const ScalarField& f);
double norm_l2(const ComplexField& f);
double norm_h1(const ScalarField& f);
double norm_h1(const ComplexField& f);
double norm_linf(const ScalarField& f);
double norm_linf(const ComplexField& f);

bool all_finite(const ScalarField& f);
bool all_finite(const ComplexField& f);

}  // namespace vtx
