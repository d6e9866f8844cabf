#pragma once

#include <vector>

#include "dmcalc/gleason.hpp"
#include "dmcalc/symmat.hpp"

namespace dmcalc {

/// Which factor a partial trace sums out.
enum class TraceSide { over_a, over_b };

/// Kronecker (tensor) product, A-major: joint index i_A * n_B + i_B.
SpectralMatrix kron(const SpectralMatrix& e, const SpectralMatrix& f);

/// Kronecker product of vectors, same index convention.
Eigen::VectorXd kron_vec(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Partial trace of a matrix on the joint space: over_a sums the diagonal
/// blocks (result n_B x n_B); over_b takes the trace of each block (n_A x
/// n_A).
SpectralMatrix partial_trace(const SpectralMatrix& g, Eigen::Index n_a,
                             Eigen::Index n_b, TraceSide side);

/// Density on a tensor-product space with recorded factor dimensions.
class JointDensity {
 public:
  JointDensity(const Density& d, Eigen::Index n_a, Eigen::Index n_b,
               bool separable_by_construction = false);

  static JointDensity product(const Density& a, const Density& b);
  static JointDensity from_matrix(const SpectralMatrix& m, Eigen::Index n_a,
                                  Eigen::Index n_b);

  const Density& density() const { return d_; }
  const SpectralMatrix& mat() const { return d_.mat(); }
  Eigen::Index dim_a() const { return n_a_; }
  Eigen::Index dim_b() const { return n_b_; }
  bool separable_by_construction() const { return separable_; }

  /// Same joint with the factor order swapped (B-major relabeling).
  JointDensity swapped() const;

 private:
  Density d_;
  Eigen::Index n_a_;
  Eigen::Index n_b_;
  bool separable_ = false;
};

/// D(A, b) or D(a, B): PSD matrix on the remaining factor, trace <= 1.
struct Slice {
  SpectralMatrix matrix;
  double mass = 0.0;  // tr(matrix)
};

/// Joint probability tr(J (a a^T (x) b b^T)).
double joint_prob(const JointDensity& j, const UnitVector& a,
                  const UnitVector& b);

/// D(A, b) = tr_B(J (I_A (x) b b^T)).
Slice slice_b(const JointDensity& j, const UnitVector& b);

/// D(a, B) = tr_A(J (a a^T (x) I_B)).
Slice slice_a(const JointDensity& j, const UnitVector& a);

/// Marginal density via the partial trace over the other factor.
Density marginal(const JointDensity& j, TraceSide keep);
Density marginal_a(const JointDensity& j);
Density marginal_b(const JointDensity& j);

/// Sum_k c_k (a_k (x) b_k)(a_k (x) b_k)^T; flagged separable.
JointDensity separable_joint(const std::vector<double>& weights,
                             const std::vector<UnitVector>& a_dirs,
                             const std::vector<UnitVector>& b_dirs);

/// True iff ||J - marginal_A (x) marginal_B||_F <= tol.
bool is_independent(const JointDensity& j, double tol);

/// The Bell joint psi psi^T with psi = (e1 (x) e1 + e2 (x) e2)/sqrt(2).
JointDensity bell_joint();

}  // namespace dmcalc
