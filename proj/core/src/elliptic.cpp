// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#include "vtx/elliptic.hpp"

#include <cmath>

#include "vtx/krylov.hpp"

namespace vtx {

namespace {

struct Stencil {
  const Grid& g;
  std::vector<std::uint8_t> interior;
  std::vector<std::ptrdiff_t> strides;
  std::vector<double> ih2;

  explicit Stencil(const Grid& grid) : g(grid), interior(grid.size()) {
    for (std::size_t i = 0; i < g.size(); ++i) interior[i] = g.on_boundary(i) ? 0 : 1;
    for (int a = 0; a < g.dim; ++a) {
      strides.push_back(g.stride(a));
      ih2.push_back(1.0 / (g.h[a] * g.h[a]));
    }
  }

  // out = (-Delta + W) u on interior nodes, zero on the boundary.
  void apply(const std::vector<double>& W, const Vec& u, Vec& out) const {
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (!interior[i]) {
        out[i] = 0.0;
        continue;
      }
      double s = W[i] * u[i];
      for (std::size_t a = 0; a < strides.size(); ++a)
        s += (2.0 * u[i] - u[i + strides[a]] - u[i - strides[a]]) * ih2[a];
      out[i] = s;
    }
  }
};

}  // namespace

double interior_linf(const ScalarField& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!f.grid.on_boundary(i)) m = std::max(m, std::abs(f.v[i]));
  return m;
}

std::pair<ScalarField, SolveReport> solve_screened(const ScreenedProblem& p) {
  const Grid& g = p.f.grid;
  require_same_grid(g, p.W.grid, "solve_screened");
  if (p.boundary) require_same_grid(g, p.boundary->grid, "solve_screened boundary");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (p.W.v[i] < 0.0) throw SolverError("screening weight W is negative somewhere");
    if (!std::isfinite(p.W.v[i]) || !std::isfinite(p.f.v[i])) throw SolverError("non-finite screened problem data");
  }
  if (p.core_radius >= 0.0) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto c = g.coords(i);
      double r2 = 0.0;
      for (int a = 0; a < g.dim; ++a) r2 += std::pow(g.coord(a, c[a]), 2);
      if (r2 > p.core_radius * p.core_radius && p.W.v[i] < p.w0)
        throw SolverError("screening weight below w0 outside the declared core radius");
    }
  }
  Stencil st(g);
  const std::size_t n = g.size();
  // Lift boundary values, solve for the zero-boundary correction.
  Vec lift(n, 0.0);
  if (p.boundary)
    for (std::size_t i = 0; i < n; ++i)
      if (!st.interior[i]) lift[i] = p.boundary->v[i];
  Vec Alift(n);
  st.apply(p.W.v, lift, Alift);
  Vec b(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (st.interior[i]) b[i] = p.f.v[i] - Alift[i];
  Vec diag(n, 1.0);
  double dsum = 0.0;
  for (double x : st.ih2) dsum += 2.0 * x;
  for (std::size_t i = 0; i < n; ++i)
    if (st.interior[i]) diag[i] = dsum + p.W.v[i];
  Vec x(n, 0.0);
  if (p.initial_guess)
    for (std::size_t i = 0; i < n; ++i)
      if (st.interior[i]) x[i] = p.initial_guess->v[i] - lift[i];
  LinearOp A = [&](const Vec& u, Vec& out) { st.apply(p.W.v, u, out); };
  LinearOp M = [&](const Vec& r, Vec& z) {
    for (std::size_t i = 0; i < n; ++i) z[i] = st.interior[i] ? r[i] / diag[i] : 0.0;
  };
  // Relative residual measured against the full right-hand side f.
  double fnorm = 0.0, bnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (st.interior[i]) {
      fnorm += p.f.v[i] * p.f.v[i];
      bnorm += b[i] * b[i];
    }
  fnorm = std::sqrt(fnorm);
  bnorm = std::sqrt(bnorm);
  double tol = p.tolerance;
  if (bnorm > 0.0 && fnorm > 0.0) tol = p.tolerance * std::max(fnorm, bnorm) / bnorm;
  auto cg = pcg(A, M, b, x, tol, p.max_iterations);
  ScalarField u(g);
  for (std::size_t i = 0; i < n; ++i) u.v[i] = x[i] + lift[i];
  SolveReport rep;
  rep.iterations = cg.iterations;
  rep.residual = cg.rel_residual * (bnorm > 0 && fnorm > 0 ? bnorm / std::max(fnorm, bnorm) : 1.0);
  rep.converged = cg.converged;
  if (!cg.converged) rep.message = "conjugate gradients did not reach the tolerance";
  return {std::move(u), rep};
}

std::pair<ScalarField, SolveReport> newton_screened(const NewtonProblem& prob, ScalarField v, double tolerance,
                                                    const NewtonOptions& opt) {
  const Grid& g = v.grid;
  SolveReport rep;
  ScalarField res = prob.residual(v);
  double T = prob.functional(v);
  if (opt.functional_trace) opt.functional_trace->push_back(T);
  double rinf = interior_linf(res);
  int steps = 0;
  while (rinf > tolerance) {
    if (steps >= opt.max_steps) {
      rep.message = "Newton iteration did not converge within the step limit";
      rep.iterations = steps;
      rep.residual = rinf;
      rep.converged = false;
      return {std::move(v), rep};
    }
    ScreenedProblem sp;
    sp.W = prob.jacobian_weight(v);
    sp.f = res;
    sp.f *= -1.0;
    sp.tolerance = opt.inner_tolerance;
    sp.max_iterations = opt.inner_max_iterations;
    auto [delta, inner] = solve_screened(sp);
    if (!inner.converged && inner.residual > 1e-6) throw SolverError("inner screened solve failed in Newton step");
    double slope = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!g.on_boundary(i)) slope += res.v[i] * delta.v[i];
    slope *= g.cell_volume();
    double t = 1.0;
    bool accepted = false;
    ScalarField trial(g);
    ScalarField tres;
    double Tt = 0.0;
    while (t >= opt.min_step) {
      for (std::size_t i = 0; i < g.size(); ++i) trial.v[i] = v.v[i] + t * delta.v[i];
      Tt = prob.functional(trial);
      if (std::isfinite(Tt)) {
        if (Tt <= T + opt.armijo * t * slope) {
          accepted = true;
          break;
        }
        // Near convergence the functional decrease drops below roundoff;
        // accept a full step that reduces the residual without raising T.
        if (t == 1.0 && Tt <= T + 1e-13 * std::max(1.0, std::abs(T))) {
          tres = prob.residual(trial);
          if (interior_linf(tres) < rinf) {
            accepted = true;
            break;
          }
          tres = ScalarField();
        }
      }
      t *= 0.5;
    }
    if (!accepted) throw SolverError("Newton line search failed (step below minimum)");
    v = trial;
    T = Tt;
    if (opt.functional_trace) opt.functional_trace->push_back(Tt);
    res = tres.size() ? tres : prob.residual(v);
    rinf = interior_linf(res);
    ++steps;
  }
  rep.iterations = steps;
  rep.residual = rinf;
  rep.converged = true;
  return {std::move(v), rep};
}

}  // namespace vtx
