#pragma once

#include "lpnorm/conic.hpp"

namespace lpnorm {

struct SolverOptions {
  double tol = 1e-8;        // feasibility and gap tolerance
  int max_iters = 200;
  bool verbose = false;
  double step_damping = 0.99;
  double static_reg = 1e-9;
  int refinement_rounds = 2;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, SolverStats stats)
      : Error(what), stats(std::move(stats)) {}
  SolverStats stats;
};

/// Solves the program with a Nesterov-Todd scaled predictor-corrector
/// interior-point method on the homogeneous self-dual embedding. Supports
/// nonnegative, second-order and semidefinite cones. Deterministic for a
/// fixed input.
SolveResult solve(const ConicProgram& prog, const SolverOptions& opts = {});

/// Largest uniform slack by which all inequality/cone constraints of `prog`
/// can be tightened while staying feasible (equalities are kept exact).
/// Nonnegative iff the constraint set is nonempty (closed); the returned
/// margin is capped at +1 so the phase-1 program is always bounded.
double feasibility_margin(const ConicProgram& prog, const SolverOptions& opts = {});

}  // namespace lpnorm
