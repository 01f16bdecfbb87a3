// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "vtx/grid.hpp"

namespace vtx {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// (-Delta + W) u = f on interior nodes, u = boundary values on the outer layer.
struct ScreenedProblem {
  ScalarField W;
  ScalarField f;
  std::optional<ScalarField> boundary;  // only outer-layer samples are read
  double tolerance = 1e-10;
  int max_iterations = 20000;
  // Optional positivity check: W >= w0 wherever |x| > core_radius.
  double core_radius = -1.0;
  double w0 = 0.0;
  std::optional<ScalarField> initial_guess;
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::string message;
};

std::pair<ScalarField, SolveReport> solve_screened(const ScreenedProblem& problem);

struct NewtonProblem {
  // Discrete residual on interior nodes (boundary entries ignored).
  std::function<ScalarField(const ScalarField&)> residual;
  // Positive diagonal weight of the linearization, -Delta + W.
  std::function<ScalarField(const ScalarField&)> jacobian_weight;
  // Functional whose gradient (divided by the cell volume) is the residual.
  std::function<double(const ScalarField&)> functional;
};

struct NewtonOptions {
  int max_steps = 50;
  double inner_tolerance = 1e-12;
  int inner_max_iterations = 20000;
  double min_step = 1e-12;
  double armijo = 1e-4;
  // Trace of accepted functional values (for convexity checks).
  std::vector<double>* functional_trace = nullptr;
};

// Damped Newton iteration; boundary samples of v0 are held fixed.
std::pair<ScalarField, SolveReport> newton_screened(const NewtonProblem& problem, ScalarField v0, double tolerance,
                                                    const NewtonOptions& options = {});

// Interior-only max norm.
double interior_linf(const ScalarField& f);

}  // namespace vtx
