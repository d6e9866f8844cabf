#include "dmcalc/bayes.hpp"

#include <cmath>
#include <limits>

namespace dmcalc {

namespace {

double top_eigvec_overlap(const SpectralMatrix& a, const SpectralMatrix& b) {
  return std::abs(
      a.spectrum().eigenvectors.col(0).dot(b.spectrum().eigenvectors.col(0)));
}

}  // namespace

BayesUpdate bayes_main(const Density& prior,
                       const SpectralMatrix& likelihood) {
  if (prior.dim() != likelihood.dim()) {
    throw DimensionMismatch("bayes_main: dimensions differ");
  }
  require_psd(likelihood, "bayes_main");
  SpectralMatrix joint = odot_mat(prior.mat(), likelihood);
  const double evidence = joint.trace();
  if (evidence <= 1e-300) {
    throw ZeroEvidence("bayes_main: evidence underflows (disjoint ranges)");
  }
  Density posterior(
      SpectralMatrix::from_symmetric(joint.matrix() / evidence));
  return BayesUpdate{prior, likelihood, posterior, evidence};
}

FlowTrace bayes_iterate(const Density& prior,
                        const SpectralMatrix& likelihood, int steps) {
  if (!is_strictly_pd(likelihood)) {
    throw NotStrictlyPd("bayes_iterate: likelihood must be strictly PD");
  }
  FlowTrace trace;
  Density state = prior;
  trace.steps.push_back(FlowStep{0.0, state, 0.0,
                                 top_eigvec_overlap(state.mat(), likelihood),
                                 0.0});
  // For a strictly PD prior the iteration telescopes to
  // exp(log P + t log L) / Z. Accumulating in log space keeps the eigensystem
  // rotating long after the posterior's eigenvalue ratio underflows; taking
  // the log of each collapsed posterior instead would freeze it at the rank
  // cutoff. Rank-deficient priors go through the step-by-step rule.
  const bool log_path = is_strictly_pd(prior.mat());
  const Eigen::MatrixXd log_l = mat_log_plus(likelihood).matrix();
  Eigen::MatrixXd x = log_path ? mat_log_plus(prior.mat()).matrix()
                               : Eigen::MatrixXd();
  for (int t = 1; t <= steps; ++t) {
    Density next = state;
    if (log_path) {
      x += log_l;
      SpectralMatrix shifted = SpectralMatrix::from_symmetric(x);
      const double shift = shifted.spectrum().eigenvalues(0);
      SpectralMatrix unnorm = mat_exp(SpectralMatrix::from_symmetric(
          x - shift * Eigen::MatrixXd::Identity(x.rows(), x.cols())));
      next = Density(
          SpectralMatrix::from_symmetric(unnorm.matrix() / unnorm.trace()));
    } else {
      next = bayes_main(state, likelihood).posterior;
    }
    const double step_norm = (next.mat().matrix() - state.mat().matrix()).norm();
    state = next;
    trace.steps.push_back(
        FlowStep{static_cast<double>(t), state,
                 std::abs(state.mat().trace() - 1.0),
                 top_eigvec_overlap(state.mat(), likelihood), step_norm});
  }
  return trace;
}

FullConditional bayes_full_swap(const Density& d_b,
                                const FullConditional& cond_ab) {
  const Eigen::Index n_a = cond_ab.n_a;
  const Eigen::Index n_b = cond_ab.n_b;
  if (d_b.dim() != n_b) {
    throw DimensionMismatch("bayes_full_swap: D(B) dimension differs");
  }
  SpectralMatrix lifted = kron(SpectralMatrix::identity(n_a), d_b.mat());
  SpectralMatrix joint = odot_mat(lifted, cond_ab.matrix);
  SpectralMatrix d_a = partial_trace(joint, n_a, n_b, TraceSide::over_b);
  const bool degenerate =
      cond_ab.degenerate_marginal || !is_strictly_pd(d_a);
  SpectralMatrix norm_inv =
      kron(pseudo_inverse(d_a), SpectralMatrix::identity(n_b));
  return FullConditional{odot_mat(joint, norm_inv), n_a, n_b, degenerate};
}

SpectralMatrix bayes_slice_given_a_space(const JointDensity& j,
                                         const UnitVector& b) {
  const double mass_b = prob(marginal_b(j), b);
  if (mass_b <= 1e-12) {
    throw ZeroConditioningMass("bayes_slice_given_a_space: D(b) = " +
                               std::to_string(mass_b));
  }
  Density cond_b = cond_given_b(j, b);
  SpectralMatrix numerator =
      SpectralMatrix::from_symmetric(mass_b * cond_b.mat().matrix());
  // The normalizer tr_B(D(A|B) (.) (I_A (x) D(B))) is D(A) by the matrix
  // form of the Theorem of Total Probability.
  FullConditional c = cond_full(j);
  SpectralMatrix lifted = kron(SpectralMatrix::identity(j.dim_a()),
                               marginal_b(j).mat());
  SpectralMatrix d_a = partial_trace(odot_mat(c.matrix, lifted), j.dim_a(),
                                     j.dim_b(), TraceSide::over_b);
  return odot_mat(numerator, pseudo_inverse(d_a));
}

BayesUpdate bayes_posterior_given_a(const Density& d_b,
                                    const SpectralMatrix& cond_a_given_B) {
  return bayes_main(d_b, cond_a_given_B);
}

double bayes_scalar(const JointDensity& j, const UnitVector& a,
                    const UnitVector& b, const Eigen::MatrixXd& basis) {
  if (basis.rows() != j.dim_b() || basis.cols() != j.dim_b()) {
    throw DimensionMismatch("bayes_scalar: basis shape differs from B-space");
  }
  if ((basis.transpose() * basis -
       Eigen::MatrixXd::Identity(basis.cols(), basis.cols()))
          .norm() > 1e-8) {
    throw NotOrthogonal("bayes_scalar: basis is not orthonormal");
  }
  // D(b_i) D(a|b_i) = D(a, b_i), so the normalizer is a basis sum of joint
  // probabilities (and equals D(a) for every orthonormal basis).
  double normalizer = 0.0;
  for (Eigen::Index i = 0; i < basis.cols(); ++i) {
    normalizer += joint_prob(j, a, UnitVector(basis.col(i)));
  }
  if (normalizer <= 1e-300) {
    throw ZeroEvidence("bayes_scalar: D(a) underflows");
  }
  return joint_prob(j, a, b) / normalizer;
}

TotalProbabilityReport total_probability_report(const JointDensity& j,
                                                std::uint64_t basis_seed) {
  Density d_a_marg = marginal_a(j);
  Density d_b_marg = marginal_b(j);
  if (!is_strictly_pd(d_b_marg.mat())) {
    throw DegenerateMarginal(
        "total_probability_report: D(B) is singular; fancy forms undefined");
  }
  TotalProbabilityReport rep;

  // Basic form 1: sum of D(a_i) over a random orthonormal basis of A.
  Eigen::MatrixXd basis_a = random_orthogonal(j.dim_a(), basis_seed);
  double sum_a = 0.0;
  for (Eigen::Index i = 0; i < basis_a.cols(); ++i) {
    sum_a += prob(d_a_marg, UnitVector(basis_a.col(i)));
  }
  rep.basic_basis_sum = std::abs(1.0 - sum_a);

  // Basic form 2: D(a) = Sum_i D(a|b_i) D(b_i).
  UnitVector a = random_unit_vector(j.dim_a(), basis_seed ^ 0x51ed2701u);
  Eigen::MatrixXd basis_b =
      random_orthogonal(j.dim_b(), basis_seed ^ 0xaa03c173u);
  const double d_a = slice_a(j, a).mass;
  double sum_cond = 0.0;
  for (Eigen::Index i = 0; i < basis_b.cols(); ++i) {
    UnitVector bi(basis_b.col(i));
    sum_cond += cond_scalar(j, a, bi) * prob(d_b_marg, bi);
  }
  rep.basic_conditional = std::abs(d_a - sum_cond);

  // Fancy form 1: D(a) = tr(D(a|B) (.) D(B)).
  ConditionalSlice ca = cond_given_a(j, a);
  rep.fancy_scalar =
      std::abs(d_a - odot_mat(ca.matrix, d_b_marg.mat()).trace());

  // Fancy form 2: D(A) = tr_B(D(A|B) (.) (I_A (x) D(B))).
  FullConditional c = cond_full(j);
  SpectralMatrix lifted =
      kron(SpectralMatrix::identity(j.dim_a()), d_b_marg.mat());
  SpectralMatrix recon = partial_trace(odot_mat(c.matrix, lifted), j.dim_a(),
                                       j.dim_b(), TraceSide::over_b);
  rep.fancy_matrix = (recon.matrix() - d_a_marg.mat().matrix()).norm();
  return rep;
}

BoundReport bound_report(const Density& prior,
                         const SpectralMatrix& likelihood) {
  if (prior.dim() != likelihood.dim()) {
    throw DimensionMismatch("bound_report: dimensions differ");
  }
  if (!is_strictly_pd(prior.mat()) || !is_strictly_pd(likelihood)) {
    throw NotStrictlyPd("bound_report: inputs must be strictly PD");
  }
  SpectralMatrix log_sum = SpectralMatrix::from_symmetric(
      mat_log_plus(prior.mat()).matrix() + mat_log_plus(likelihood).matrix());
  BoundReport rep;
  rep.prob_evidence = mat_exp(log_sum).trace();
  rep.nll_evidence = -std::log(rep.prob_evidence);
  // The minimizing unit vector is the top eigenvector of log L + log P.
  rep.nll_map = -log_sum.max_eigenvalue();
  rep.prob_trace_product = (likelihood.matrix() * prior.mat().matrix()).trace();
  const Spectrum& ps = prior.mat().spectrum();
  Eigen::VectorXd rayleigh(ps.eigenvalues.size());
  for (Eigen::Index i = 0; i < rayleigh.size(); ++i) {
    rayleigh(i) = ps.eigenvectors.col(i).dot(likelihood.matrix() *
                                             ps.eigenvectors.col(i));
  }
  const double top = rayleigh.maxCoeff();
  // Lowest index wins among values within 1e-12 of the maximum.
  Eigen::Index best = 0;
  while (rayleigh(best) < top - 1e-12) {
    ++best;
  }
  rep.argmax_index = best;
  rep.prob_bound = rayleigh(best);
  return rep;
}

}  // namespace dmcalc
