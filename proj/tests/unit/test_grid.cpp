// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "vtx/grid.hpp"
#include "vtx/lattice.hpp"
#include "vtx/snapshot.hpp"

using namespace vtx;
constexpr double kPi = std::numbers::pi;

namespace {
double interior_max(const ScalarField& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!f.grid.on_boundary(i)) m = std::max(m, std::abs(f.v[i]));
  return m;
}
double interior_max(const ComplexField& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!f.grid.on_boundary(i)) m = std::max(m, std::abs(f.v[i]));
  return m;
}
}  // namespace

TEST_CASE("grid construction and coordinates") {
  Grid g = Grid::square(2.0, 0.5);
  CHECK(g.n[0] == 9);
  CHECK(g.n[1] == 9);
  CHECK(g.coord(0, 0) == -2.0);
  CHECK(g.coord(0, 8) == 2.0);
  CHECK(g.index(3, 2) == 2 * 9 + 3);
  auto c = g.coords(g.index(3, 2));
  CHECK(c[0] == 3);
  CHECK(c[1] == 2);
  CHECK_THROWS_AS(Grid({2, 5}, {0.1, 0.1}, {0, 0}), GridError);
  CHECK_THROWS_AS(Grid({5, 5}, {0.1, -0.1}, {0, 0}), GridError);
}

TEST_CASE("laplacian is exact on quadratics and kills constants") {
  Grid g = Grid::square(3.0, 0.25);
  auto q = sample<double>(g, [](double x, double y, double) { return x * x + y * y; });
  auto lq = laplacian(q);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!g.on_boundary(i)) CHECK(lq.v[i] == doctest::Approx(4.0).epsilon(1e-12));
  ScalarField one(g, 3.7);
  CHECK(interior_max(laplacian(one)) < 1e-12);
}

TEST_CASE("laplacian converges at second order") {
  double err[2];
  int k = 0;
  for (double h : {0.2, 0.1}) {
    Grid g = Grid::square(3.0, h);
    auto f = sample<double>(g, [](double x, double y, double) { return std::sin(x) * std::sin(y); });
    auto ex = sample<double>(g, [](double x, double y, double) { return -2.0 * std::sin(x) * std::sin(y); });
    auto d = laplacian(f);
    d -= ex;
    err[k++] = interior_max(d);
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("covariant derivative and field strength") {
  Grid g = Grid::square(3.0, 0.1);
  auto phi = sample<cplx>(g, [](double x, double y, double) { return cplx(std::cos(x) + y, x * y); });
  GaugePotential zero(g);
  auto d = covariant_derivative(phi, zero, 0);
  auto p = partial(phi, 0);
  d -= p;
  CHECK(norm_linf(d) == 0.0);
  CHECK_THROWS(covariant_derivative(phi, zero, 2));

  // alpha = (-y/2, x/2): constant unit field.
  GaugePotential a(g);
  a[0] = sample<double>(g, [](double, double y, double) { return -0.5 * y; });
  a[1] = sample<double>(g, [](double x, double, double) { return 0.5 * x; });
  auto F = field_strength(a);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!g.on_boundary(i)) CHECK(F.v[i] == doctest::Approx(1.0).epsilon(1e-12));

  // Pure gauge from a quadratic chi.
  GaugePotential pg(g);
  pg[0] = sample<double>(g, [](double x, double y, double) { return 2 * x + 3 * y; });
  pg[1] = sample<double>(g, [](double x, double y, double) { return 3 * x - 4 * y; });
  CHECK(interior_max(field_strength(pg)) < 1e-12);
}

TEST_CASE("gauge covariance of the centered covariant derivative is second order") {
  // For linear chi the centered difference of exp(i chi) picks up sin(kh)/h
  // instead of k, so covariance holds up to O(h^2); check the rate.
  double err[2];
  int n = 0;
  for (double h : {0.1, 0.05}) {
    Grid g = Grid::square(3.0, h);
    const double kx = 0.7, ky = -0.4;
    auto chi = [&](double x, double y) { return kx * x + ky * y; };
    auto phi = sample<cplx>(g, [](double x, double y, double) { return cplx(1.0 + 0.2 * x, 0.3 * y * y); });
    GaugePotential al(g);
    al[0] = sample<double>(g, [](double x, double y, double) { return 0.1 * y; });
    al[1] = sample<double>(g, [](double x, double, double) { return -0.2 * x; });
    ComplexField phig(g);
    GaugePotential alg = al;
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto c = g.coords(i);
      double x = g.coord(0, c[0]), y = g.coord(1, c[1]);
      phig.v[i] = std::exp(cplx(0, chi(x, y))) * phi.v[i];
      alg[0].v[i] += kx;
      alg[1].v[i] += ky;
    }
    double e = 0;
    for (int ax = 0; ax < 2; ++ax) {
      auto d = covariant_derivative(phi, al, ax);
      auto dg = covariant_derivative(phig, alg, ax);
      for (std::size_t i = 0; i < g.size(); ++i) {
        auto c = g.coords(i);
        dg.v[i] -= std::exp(cplx(0, chi(g.coord(0, c[0]), g.coord(1, c[1])))) * d.v[i];
      }
      e = std::max(e, interior_max(dg));
    }
    err[n++] = e;
  }
  CHECK(err[0] < 1e-2);
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("lattice link derivative is exactly gauge covariant") {
  Grid g = Grid::square(2.0, 0.1);
  FieldPair c(g);
  std::mt19937 rng(3);
  std::normal_distribution<double> nd;
  for (auto& z : c.phi.v) z = cplx(nd(rng), nd(rng));
  for (auto& comp : c.a.c)
    for (auto& x : comp.v) x = nd(rng);
  FieldPair t = c;
  ScalarField chi(g);
  for (auto& x : chi.v) x = nd(rng);
  for (std::size_t i = 0; i < g.size(); ++i) t.phi.v[i] *= std::exp(cplx(0, chi.v[i]));
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto cc = g.coords(i);
    for (int ax = 0; ax < 2; ++ax)
      if (cc[ax] + 1 < g.n[ax]) t.a.c[ax].v[i] += (chi.v[i + g.stride(ax)] - chi.v[i]) / g.h[ax];
  }
  double e0 = lattice_energy(c, 1.0), e1 = lattice_energy(t, 1.0);
  CHECK(std::abs(e0 - e1) <= 1e-10 * e0);
}

TEST_CASE("inner products and norms") {
  Grid g = Grid::square(12.0, 0.1);
  auto f = sample<double>(g, [](double x, double y, double) { return std::exp(-(x * x + y * y) / 2); });
  CHECK(std::abs(inner_product_l2(f, f) - kPi) < 1e-6);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  ScalarField a(g), b(g);
  for (auto& x : a.v) x = u(rng);
  for (auto& x : b.v) x = u(rng);
  CHECK(inner_product_l2(a, b) == doctest::Approx(inner_product_l2(b, a)).epsilon(1e-14));
  CHECK(inner_product_l2(a, a) > 0.0);
  ScalarField z(g, 0.0);
  CHECK(inner_product_l2(z, z) == 0.0);
  CHECK(norm_h1(a) >= norm_l2(a));
  CHECK_THROWS_AS(inner_product_l2(a, ScalarField(Grid::square(1.0, 0.1))), GridError);
}

TEST_CASE("discrete integration by parts") {
  Grid g = Grid::square(2.0, 0.1);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  ScalarField a(g, 0.0), b(g, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!g.on_boundary(i, 2)) {
      a.v[i] = u(rng);
      b.v[i] = u(rng);
    }
  double l = inner_product_l2(laplacian(a), b), r = inner_product_l2(a, laplacian(b));
  CHECK(std::abs(l - r) <= 1e-12 * std::abs(l));
}

TEST_CASE("snapshot round trip and corruption") {
  namespace fs = std::filesystem;
  Grid g({7, 5}, {0.1, 0.2}, {-0.3, 1.0});
  std::mt19937 rng(11);
  std::normal_distribution<double> nd;
  ScalarField s(g);
  ComplexField c(g);
  for (auto& x : s.v) x = nd(rng);
  for (auto& z : c.v) z = cplx(nd(rng), nd(rng));
  auto dir = fs::temp_directory_path() / "vtx_snapshot_test";
  fs::create_directories(dir);
  auto path = (dir / "a.vtxf").string();
  write_snapshot(path, {{"v", s}, {"phi", c}});
  Snapshot back = read_snapshot(path);
  CHECK(back.grid == g);
  CHECK(std::memcmp(back.real("v").v.data(), s.v.data(), s.v.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(back.complex("phi").v.data(), c.v.data(), c.v.size() * sizeof(cplx)) == 0);

  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto bad = (dir / "bad.vtxf").string();
  {
    std::string b = bytes;
    b[0] = 'X';
    std::ofstream(bad, std::ios::binary) << b;
    CHECK_THROWS_AS(read_snapshot(bad), SnapshotError);
  }
  {
    std::string b = bytes.substr(0, bytes.size() - 8);
    std::ofstream(bad, std::ios::binary) << b;
    CHECK_THROWS_AS(read_snapshot(bad), SnapshotError);
  }
  {
    std::string b = bytes + std::string(8, '\0');
    std::ofstream(bad, std::ios::binary) << b;
    CHECK_THROWS_AS(read_snapshot(bad), SnapshotError);
  }
  fs::remove_all(dir);
}
