// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#include <cmath>
#include <random>

#include "doctest.h"
#include "vtx/linearization.hpp"

using namespace vtx;

namespace {

VortexConfig solved(const VortexCenters& cs, const Grid& g) {
  VortexSolveOptions so;
  so.snap_centers = false;
  return solve_vortex(cs, g, so);
}

// Smooth tangent supported well inside the domain.
TangentVector bump_tangent(const Grid& g, double x0, double y0, double s) {
  TangentVector t(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto c = g.coords(i);
    double x = g.coord(0, c[0]) - x0, y = g.coord(1, c[1]) - y0;
    double w = std::exp(-(x * x + y * y) / (s * s));
    t.phi.v[i] = w * cplx(std::cos(x + 0.3 * y), 0.5 * y);
    t.a.c[0].v[i] = w * (0.3 + x * y);
    t.a.c[1].v[i] = w * (x - 0.2);
  }
  return t;
}

TangentVector random_compact(const Grid& g, std::mt19937& rng, double radius) {
  std::normal_distribution<double> nd;
  TangentVector t(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto c = g.coords(i);
    if (std::hypot(g.coord(0, c[0]), g.coord(1, c[1])) > radius) continue;
    t.phi.v[i] = cplx(nd(rng), nd(rng));
    t.a.c[0].v[i] = nd(rng);
    t.a.c[1].v[i] = nd(rng);
  }
  return t;
}

ScalarField bump_scalar(const Grid& g, double s) {
  return sample<double>(g, [s](double x, double y, double) { return std::exp(-(x * x + y * y) / (s * s)) * (1 + 0.3 * x); });
}

}  // namespace

TEST_CASE("vacuum linearization reduces to -Delta + 1 on the Higgs row") {
  Grid g = Grid::square(3.0, 0.1);
  FieldPair vac(g);
  for (auto& z : vac.phi.v) z = 1.0;
  StaticBase b = make_static_base(vac);
  TangentVector t = bump_tangent(g, 0.2, -0.1, 0.8);
  for (auto& c : t.a.c) c = ScalarField(g, 0.0);
  apply_mask(t, b.mask);
  auto Lt = apply_L(b, t);
  auto lap = laplacian(t.phi);
  double err = 0, scale = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!b.mask.node[i]) continue;
    cplx expect = -lap.v[i] + t.phi.v[i];
    err = std::max(err, std::abs(Lt.phi.v[i] - expect));
    scale = std::max(scale, std::abs(expect));
  }
  CHECK(err <= 1e-12 * scale);
}

TEST_CASE("zero input gives zero output") {
  Grid g = Grid::square(6.0, 0.1);
  auto b = make_static_base(lattice_fields(solved({cplx(0.3, 0.1)}, g)));
  TangentVector z(g);
  CHECK(norm(apply_L(b, z)) == 0.0);
  CHECK(norm(apply_calL(b, z)) == 0.0);
  CHECK(D_norm(apply_D(b, z)) == 0.0);
}

TEST_CASE("self-adjointness and the gauge split of the quadratic form") {
  Grid g = Grid::square(6.0, 0.1);
  auto b = make_static_base(lattice_fields(solved({cplx(0.3, 0.1), cplx(-1.2, 0.4)}, g)));
  std::mt19937 rng(42);
  auto t1 = random_compact(g, rng, 4.0), t2 = random_compact(g, rng, 4.0);
  double l12 = dot(apply_L(b, t1), t2), l21 = dot(t1, apply_L(b, t2));
  CHECK(std::abs(l12 - l21) <= 1e-9 * std::abs(l12));
  double c12 = dot(apply_calL(b, t1), t2), c21 = dot(t1, apply_calL(b, t2));
  CHECK(std::abs(c12 - c21) <= 1e-9 * std::abs(c12));
  // <t, calL t> = <t, L t> - ||G_t||^2.
  for (auto* t : {&t1, &t2}) {
    double q = dot(*t, apply_L(b, *t)), c = dot(*t, apply_calL(b, *t));
    double G = gauge_residual(b, *t);
    CHECK(std::abs(c - (q - G * G)) <= 1e-8 * std::abs(q));
  }
}

TEST_CASE("infinitesimal gauge invariance of calL") {
  Grid g = Grid::square(8.0, 0.1);
  FieldPair c = lattice_fields(solved({cplx(0.3, 0.1)}, g));
  ScalarField chi = bump_scalar(g, 1.5);
  {
    auto b = make_static_base(c);
    auto gd = gauge_direction(b.c, chi);
    apply_mask(gd, b.mask);
    CHECK(norm(apply_calL(b, gd)) <= 1e-3 * norm(gd));
  }
  // At an exact lattice static solution the identity holds to roundoff.
  auto basis = zero_modes({cplx(0.3, 0.1)}, g);
  auto gd = gauge_direction(basis.base.c, chi);
  apply_mask(gd, basis.base.mask);
  CHECK(norm(apply_calL(basis.base, gd)) <= 1e-8 * norm(gd));
  // The corrected form is strictly positive on gauge directions.
  CHECK(dot(gd, apply_L(basis.base, gd)) > 0.0);
  // Gauge-orthogonal input: calL and L agree.
  auto fixed = gauge_fix(basis.base, bump_tangent(g, 0.5, 0.0, 1.0));
  auto diff = apply_calL(basis.base, fixed.t);
  diff -= apply_L(basis.base, fixed.t);
  CHECK(norm(diff) <= 1e-8 * norm(fixed.t));
}

TEST_CASE("gauge fixing") {
  Grid g = Grid::square(8.0, 0.1);
  auto b = make_static_base(lattice_fields(solved({cplx(0.3, 0.1)}, g)));
  auto once = gauge_fix(b, bump_tangent(g, 0.5, 0.0, 1.0));
  CHECK(once.residual_after <= 10 * 1e-10 * std::max(once.residual_before, 1.0));
  // Idempotent.
  auto twice = gauge_fix(b, once.t);
  CHECK(norm_linf(twice.chi) <= 1e-9);
  auto d = twice.t;
  d -= once.t;
  CHECK(norm(d) <= 1e-9 * norm(once.t));
  // Pure gauge content is removed.
  auto pg = gauge_direction(b.c, bump_scalar(g, 1.2));
  apply_mask(pg, b.mask);
  auto removed = gauge_fix(b, pg);
  CHECK(norm(removed.t) <= 1e-8 * norm(pg));
}

TEST_CASE("zero modes of one vortex") {
  Grid g = Grid::square(12.0, 0.1);
  auto B = zero_modes({cplx(0.0, 0.0)}, g);
  REQUIRE(B.modes.size() == 2);
  CHECK(B.gram(0, 0) > 0.0);
  CHECK(std::abs(B.gram(0, 0) - B.gram(1, 1)) <= 1e-4 * B.gram(0, 0));
  CHECK(std::abs(B.gram(0, 1)) <= 1e-4 * B.gram(0, 0));
  for (std::size_t i = 0; i < B.tangents.size(); ++i) {
    const auto& n = B.tangents[i];
    CHECK(norm(apply_L(B.base, n)) <= 1e-3 * norm(n));
    CHECK(D_norm(apply_D(B.base, n)) <= 1e-3 * norm(n));
    CHECK(B.gauge_residuals[i] <= 1e-8);
    // Fixing reduces the gauge residual of the raw difference quotient by >= 1e3.
    CHECK(B.gauge_residuals[i] * 1e3 <= B.raw_gauge_residuals[i]);
  }
}

TEST_CASE("two far-separated vortices give a nearly block-diagonal metric") {
  Grid g = Grid::square(12.0, 0.1);
  auto B2 = zero_modes({cplx(-4.0, 0.0), cplx(4.0, 0.0)}, g);
  auto B1 = zero_modes({cplx(0.0, 0.0)}, g);
  double m = B1.gram(0, 0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double expect = (i == j) ? m : 0.0;
      CHECK(std::abs(B2.gram(i, j) - expect) <= 0.02 * m);
    }
  // Symmetric and positive definite.
  CHECK((B2.gram - B2.gram.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * m);
  CHECK(Eigen::LLT<Eigen::MatrixXd>(B2.gram).info() == Eigen::Success);
}

TEST_CASE("reflection equivariance of the metric") {
  Grid g = Grid::square(8.0, 0.1);
  auto B = zero_modes({cplx(-0.5, 1.0), cplx(-0.5, -1.0)}, g);
  // y -> -y swaps the centers: (x1, y1, x2, y2) -> (x2, -y2, x1, -y1).
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(4, 4);
  R(0, 2) = 1;
  R(1, 3) = -1;
  R(2, 0) = 1;
  R(3, 1) = -1;
  Eigen::MatrixXd d = R * B.gram * R.transpose() - B.gram;
  CHECK(d.cwiseAbs().maxCoeff() <= 1e-6 * B.gram.cwiseAbs().maxCoeff());
}

TEST_CASE("quadratic form identity with the first-order operator") {
  Grid g = Grid::square(6.0, 0.1);
  auto B = zero_modes({cplx(0.3, 0.1)}, g);
  TangentVector t = bump_tangent(g, 0.2, 0.1, 1.2);
  apply_mask(t, B.base.mask);
  double q = dot(t, apply_L(B.base, t));
  double d = D_form(apply_D(B.base, t));
  CHECK(std::abs(q - d) <= 1e-6 * q);
}

TEST_CASE("coercivity of one vortex") {
  Grid g = Grid::square(8.0, 0.1);
  auto B = zero_modes({cplx(0.0, 0.0)}, g);
  auto rep = coercivity(B);
  CHECK(rep.converged);
  REQUIRE(rep.near_zero.size() == 2);
  for (double v : rep.near_zero) CHECK(std::abs(v) <= 1e-3);
  CHECK(rep.gamma_min > 0.0);
  CHECK(rep.spectrum_head[2] > 0.1);
}
