#pragma once

#include "dmcalc/symmat.hpp"

namespace dmcalc {

/// Result of the commutative product S (.) T = exp(log S + log T).
struct OdotResult {
  SpectralMatrix matrix;
  Eigen::Index common_range_dim = 0;
  /// Set when the rank-deficient log+/range-intersection form was taken.
  bool used_limit_form = false;
};

/// Orthonormal columns spanning range(S) intersect range(T). Computed from
/// the spectrum of (P_S + P_T)/2: eigenvalue near 1 marks the intersection.
Eigen::MatrixXd range_intersection_basis(const SpectralMatrix& s,
                                         const SpectralMatrix& t);

/// exp(log S + log T) for strictly PD inputs; for rank-deficient inputs the
/// log+ form restricted to the common range. Empty intersection gives the
/// zero matrix.
OdotResult odot(const SpectralMatrix& s, const SpectralMatrix& t);

/// Convenience accessor for the product matrix alone.
SpectralMatrix odot_mat(const SpectralMatrix& s, const SpectralMatrix& t);

struct LieLimitResult {
  SpectralMatrix matrix;      // symmetrized (M + M^T)/2
  double asymmetry = 0.0;     // ||M - M^T||_F before symmetrization
};

/// (S^{1/2^k} T^{1/2^k})^{2^k} via k repeated squarings.
LieLimitResult odot_lie_limit(const SpectralMatrix& s, const SpectralMatrix& t,
                              int k);

/// tr(S T) - tr(S (.) T); nonnegative up to roundoff (Golden-Thompson).
double golden_thompson_gap(const SpectralMatrix& s, const SpectralMatrix& t);

}  // namespace dmcalc
