#include "dmcalc/tensor.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <cmath>

namespace dmcalc {

SpectralMatrix kron(const SpectralMatrix& e, const SpectralMatrix& f) {
  return SpectralMatrix::from_symmetric(
      Eigen::kroneckerProduct(e.matrix(), f.matrix()));
}

Eigen::VectorXd kron_vec(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

SpectralMatrix partial_trace(const SpectralMatrix& g, Eigen::Index n_a,
                             Eigen::Index n_b, TraceSide side) {
  if (g.dim() != n_a * n_b) {
    throw DimensionMismatch("partial_trace: joint dimension " +
                            std::to_string(g.dim()) + " != " +
                            std::to_string(n_a) + "*" + std::to_string(n_b));
  }
  const Eigen::MatrixXd& m = g.matrix();
  if (side == TraceSide::over_a) {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n_b, n_b);
    for (Eigen::Index i = 0; i < n_a; ++i) {
      sum += m.block(i * n_b, i * n_b, n_b, n_b);
    }
    return SpectralMatrix::from_symmetric(sum);
  }
  Eigen::MatrixXd out(n_a, n_a);
  for (Eigen::Index i = 0; i < n_a; ++i) {
    for (Eigen::Index j = 0; j < n_a; ++j) {
      out(i, j) = m.block(i * n_b, j * n_b, n_b, n_b).trace();
    }
  }
  return SpectralMatrix::from_symmetric(out);
}

JointDensity::JointDensity(const Density& d, Eigen::Index n_a,
                           Eigen::Index n_b, bool separable_by_construction)
    : d_(d), n_a_(n_a), n_b_(n_b), separable_(separable_by_construction) {
  if (d.dim() != n_a * n_b) {
    throw DimensionMismatch("JointDensity: dimension does not factor as " +
                            std::to_string(n_a) + "x" + std::to_string(n_b));
  }
}

JointDensity JointDensity::product(const Density& a, const Density& b) {
  return JointDensity(Density(kron(a.mat(), b.mat())), a.dim(), b.dim(),
                      /*separable_by_construction=*/true);
}

JointDensity JointDensity::from_matrix(const SpectralMatrix& m,
                                       Eigen::Index n_a, Eigen::Index n_b) {
  return JointDensity(Density(m), n_a, n_b);
}

JointDensity JointDensity::swapped() const {
  const Eigen::MatrixXd& m = d_.mat().matrix();
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index ia = 0; ia < n_a_; ++ia) {
    for (Eigen::Index ib = 0; ib < n_b_; ++ib) {
      for (Eigen::Index ja = 0; ja < n_a_; ++ja) {
        for (Eigen::Index jb = 0; jb < n_b_; ++jb) {
          out(ib * n_a_ + ia, jb * n_a_ + ja) =
              m(ia * n_b_ + ib, ja * n_b_ + jb);
        }
      }
    }
  }
  return JointDensity(Density(SpectralMatrix::from_symmetric(out)), n_b_,
                      n_a_, separable_);
}

double joint_prob(const JointDensity& j, const UnitVector& a,
                  const UnitVector& b) {
  if (a.dim() != j.dim_a() || b.dim() != j.dim_b()) {
    throw DimensionMismatch("joint_prob: factor dimensions differ");
  }
  Eigen::VectorXd ab = kron_vec(a.vec(), b.vec());
  return ab.dot(j.mat().matrix() * ab);
}

Slice slice_b(const JointDensity& j, const UnitVector& b) {
  if (b.dim() != j.dim_b()) {
    throw DimensionMismatch("slice_b: direction dimension differs");
  }
  Eigen::MatrixXd lift = Eigen::kroneckerProduct(
      Eigen::MatrixXd::Identity(j.dim_a(), j.dim_a()),
      Eigen::MatrixXd(b.vec() * b.vec().transpose()));
  SpectralMatrix prod =
      SpectralMatrix::from_symmetric(j.mat().matrix() * lift);
  SpectralMatrix out =
      partial_trace(prod, j.dim_a(), j.dim_b(), TraceSide::over_b);
  return Slice{out, out.trace()};
}

Slice slice_a(const JointDensity& j, const UnitVector& a) {
  if (a.dim() != j.dim_a()) {
    throw DimensionMismatch("slice_a: direction dimension differs");
  }
  Eigen::MatrixXd lift = Eigen::kroneckerProduct(
      Eigen::MatrixXd(a.vec() * a.vec().transpose()),
      Eigen::MatrixXd::Identity(j.dim_b(), j.dim_b()));
  SpectralMatrix prod =
      SpectralMatrix::from_symmetric(j.mat().matrix() * lift);
  SpectralMatrix out =
      partial_trace(prod, j.dim_a(), j.dim_b(), TraceSide::over_a);
  return Slice{out, out.trace()};
}

Density marginal(const JointDensity& j, TraceSide keep) {
  TraceSide sum_out =
      keep == TraceSide::over_a ? TraceSide::over_b : TraceSide::over_a;
  return Density(
      partial_trace(j.mat(), j.dim_a(), j.dim_b(), sum_out));
}

Density marginal_a(const JointDensity& j) {
  return marginal(j, TraceSide::over_a);
}

Density marginal_b(const JointDensity& j) {
  return marginal(j, TraceSide::over_b);
}

JointDensity separable_joint(const std::vector<double>& weights,
                             const std::vector<UnitVector>& a_dirs,
                             const std::vector<UnitVector>& b_dirs) {
  if (weights.size() != a_dirs.size() || weights.size() != b_dirs.size() ||
      weights.empty()) {
    throw DimensionMismatch("separable_joint: component count mismatch");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) {
      throw BadWeights("separable_joint: negative weight");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw BadWeights("separable_joint: weights sum to " + std::to_string(sum));
  }
  const Eigen::Index n_a = a_dirs.front().dim();
  const Eigen::Index n_b = b_dirs.front().dim();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n_a * n_b, n_a * n_b);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (a_dirs[k].dim() != n_a || b_dirs[k].dim() != n_b) {
      throw DimensionMismatch("separable_joint: mixed factor dimensions");
    }
    Eigen::VectorXd ab = kron_vec(a_dirs[k].vec(), b_dirs[k].vec());
    acc += weights[k] * ab * ab.transpose();
  }
  return JointDensity(Density(SpectralMatrix::from_symmetric(acc)), n_a, n_b,
                      /*separable_by_construction=*/true);
}

bool is_independent(const JointDensity& j, double tol) {
  SpectralMatrix product = kron(marginal_a(j).mat(), marginal_b(j).mat());
  return (j.mat().matrix() - product.matrix()).norm() <= tol;
}

JointDensity bell_joint() {
  Eigen::VectorXd psi(4);
  psi << 1.0, 0.0, 0.0, 1.0;
  psi /= std::sqrt(2.0);
  return JointDensity(
      Density(SpectralMatrix::from_symmetric(psi * psi.transpose())), 2, 2);
}

}  // namespace dmcalc
