#include "dmcalc/conditional.hpp"

namespace dmcalc {

FullConditional cond_full(const JointDensity& j) {
  Density d_b = marginal_b(j);
  const bool degenerate = !is_strictly_pd(d_b.mat());
  SpectralMatrix lifted_inv =
      kron(SpectralMatrix::identity(j.dim_a()), pseudo_inverse(d_b.mat()));
  OdotResult r = odot(j.mat(), lifted_inv);
  return FullConditional{r.matrix, j.dim_a(), j.dim_b(), degenerate};
}

Density cond_given_b(const JointDensity& j, const UnitVector& b) {
  Slice s = slice_b(j, b);
  if (s.mass <= 1e-12) {
    throw ZeroConditioningMass("cond_given_b: conditioning mass " +
                               std::to_string(s.mass));
  }
  return Density(
      SpectralMatrix::from_symmetric(s.matrix.matrix() / s.mass));
}

ConditionalSlice cond_given_a(const JointDensity& j, const UnitVector& a) {
  Slice s = slice_a(j, a);
  Density d_b = marginal_b(j);
  const bool degenerate = !is_strictly_pd(d_b.mat());
  OdotResult r = odot(s.matrix, pseudo_inverse(d_b.mat()));
  return ConditionalSlice{r.matrix, degenerate};
}

double cond_scalar(const JointDensity& j, const UnitVector& a,
                   const UnitVector& b) {
  const double mass_b = prob(marginal_b(j), b);
  if (mass_b <= 1e-12) {
    throw ZeroConditioningMass("cond_scalar: D(b) = " +
                               std::to_string(mass_b));
  }
  return joint_prob(j, a, b) / mass_b;
}

double marginalize_cond(const Density& cond_b, const UnitVector& a) {
  return prob(cond_b, a);
}

double separability_witness(const JointDensity& j) {
  return cond_full(j).matrix.max_eigenvalue();
}

}  // namespace dmcalc
