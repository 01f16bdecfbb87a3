// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace vtx {

using Vec = std::vector<double>;
using LinearOp = std::function<void(const Vec&, Vec&)>;

struct CGResult {
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

inline double vdot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Preconditioned conjugate gradients for a symmetric positive (semi)definite
// operator. `x` holds the initial guess on entry. Stops on ||b - Ax|| <= tol ||b||.
inline CGResult pcg(const LinearOp& A, const LinearOp& Minv, const Vec& b, Vec& x, double tol, int max_it) {
  const std::size_t n = b.size();
  CGResult res;
  Vec r(n), z(n), p(n), q(n);
  A(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  double bnorm = std::sqrt(vdot(b, b));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }
  double rnorm = std::sqrt(vdot(r, r));
  if (rnorm <= tol * bnorm) {
    res.rel_residual = rnorm / bnorm;
    res.converged = true;
    return res;
  }
  Minv(r, z);
  p = z;
  double rz = vdot(r, z);
  for (int it = 1; it <= max_it; ++it) {
    A(p, q);
    double pq = vdot(p, q);
    if (!(pq > 0.0)) {
      res.iterations = it;
      res.rel_residual = rnorm / bnorm;
      return res;
    }
    double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    rnorm = std::sqrt(vdot(r, r));
    res.iterations = it;
    res.rel_residual = rnorm / bnorm;
    if (rnorm <= tol * bnorm) {
      // Guard against drift of the recursive residual.
      A(x, q);
      double tr = 0.0;
      for (std::size_t i = 0; i < n; ++i) tr += (b[i] - q[i]) * (b[i] - q[i]);
      tr = std::sqrt(tr);
      res.rel_residual = tr / bnorm;
      if (tr <= 2.0 * tol * bnorm) {
        res.converged = true;
        return res;
      }
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
      rnorm = tr;
    }
    Minv(r, z);
    double rz_new = vdot(r, z);
    double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return res;
}

}  // namespace vtx
