#pragma once

#include <optional>
#include <vector>

#include "dmcalc/conditional.hpp"

namespace dmcalc {

/// Outcome of the fixed-point inversion recovering D(B) from D(A|B).
struct InversionResult {
  Density estimate;
  int iterations = 0;
  double final_step_norm = 0.0;
  bool converged = false;
  std::optional<JointDensity> reconstructed_joint;  // set when converged
  std::vector<double> step_norms;                   // per-iteration history
};

/// One fixed-point step:
/// W' = tr_A(C (.) (I_A (x) W)) / tr(C (.) (I_A (x) W)).
Density em_step(const FullConditional& c, const Density& w);

/// Iterates em_step from w0 until the step norm drops below tol or max_iter
/// is reached. Non-convergence is reported, not thrown.
InversionResult em_invert(const FullConditional& c, const Density& w0,
                          double tol = 1e-10, int max_iter = 10000);

}  // namespace dmcalc
