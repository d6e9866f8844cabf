#include "dmcalc/em_invert.hpp"

namespace dmcalc {

Density em_step(const FullConditional& c, const Density& w) {
  if (w.dim() != c.n_b) {
    throw DimensionMismatch("em_step: estimate dimension differs from B-space");
  }
  SpectralMatrix lifted = kron(SpectralMatrix::identity(c.n_a), w.mat());
  SpectralMatrix joint = odot_mat(c.matrix, lifted);
  const double mass = joint.trace();
  if (mass <= 1e-300) {
    throw ZeroMass("em_step: tr(C (.) (I_A (x) W)) underflows");
  }
  SpectralMatrix reduced =
      partial_trace(joint, c.n_a, c.n_b, TraceSide::over_a);
  return Density(
      SpectralMatrix::from_symmetric(reduced.matrix() / mass));
}

InversionResult em_invert(const FullConditional& c, const Density& w0,
                          double tol, int max_iter) {
  Density w = w0;
  std::vector<double> history;
  history.reserve(16);
  bool converged = false;
  double last_step = 0.0;
  int iterations = 0;
  for (int t = 0; t < max_iter; ++t) {
    Density next = em_step(c, w);
    last_step = (next.mat().matrix() - w.mat().matrix()).norm();
    history.push_back(last_step);
    w = next;
    ++iterations;
    if (last_step <= tol) {
      converged = true;
      break;
    }
  }
  InversionResult result{w, iterations, last_step, converged, std::nullopt,
                         std::move(history)};
  if (converged) {
    SpectralMatrix lifted = kron(SpectralMatrix::identity(c.n_a), w.mat());
    SpectralMatrix joint = odot_mat(c.matrix, lifted);
    const double tr = joint.trace();
    result.reconstructed_joint = JointDensity::from_matrix(
        SpectralMatrix::from_symmetric(joint.matrix() / tr), c.n_a, c.n_b);
  }
  return result;
}

}  // namespace dmcalc
