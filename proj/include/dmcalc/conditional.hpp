#pragma once

#include "dmcalc/odot.hpp"
#include "dmcalc/tensor.hpp"

namespace dmcalc {

/// D(A|B): PSD matrix on the joint space, trace unconstrained.
struct FullConditional {
  SpectralMatrix matrix;
  Eigen::Index n_a = 0;
  Eigen::Index n_b = 0;
  /// Set when D(B) was singular and the pseudo-inverse path was taken.
  bool degenerate_marginal = false;
};

/// D(A|B) = J (.) (I_A (x) D(B))^{-1}. A singular D(B) goes through the
/// pseudo-inverse and the range-intersection form of (.) and is flagged.
FullConditional cond_full(const JointDensity& j);

/// D(A|b) = D(A, b) / tr(D(A, b)). Throws ZeroConditioningMass when the
/// slice mass vanishes.
Density cond_given_b(const JointDensity& j, const UnitVector& b);

struct ConditionalSlice {
  SpectralMatrix matrix;  // on the B-space
  bool degenerate_marginal = false;
};

/// D(a|B) = D(a, B) (.) D(B)^{-1}.
ConditionalSlice cond_given_a(const JointDensity& j, const UnitVector& a);

/// D(a|b) = D(a, b) / D(b).
double cond_scalar(const JointDensity& j, const UnitVector& a,
                   const UnitVector& b);

/// tr(D(A|b) a a^T); the licensed marginalization of a vector conditional.
double marginalize_cond(const Density& cond_b, const UnitVector& a);

/// lambda_max of D(A|B). A value above 1 + 1e-8 certifies the joint is
/// non-separable; values at or below 1 are inconclusive.
double separability_witness(const JointDensity& j);

}  // namespace dmcalc
