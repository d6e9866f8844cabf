#pragma once

#include <cstdint>

#include "dmcalc/conditional.hpp"
#include "dmcalc/flow_trace.hpp"
#include "dmcalc/odot.hpp"

namespace dmcalc {

/// One application of the generalized Bayes rule
/// posterior = (prior (.) likelihood) / tr(prior (.) likelihood).
struct BayesUpdate {
  Density prior;
  SpectralMatrix likelihood;
  Density posterior;
  double evidence = 0.0;  // tr(prior (.) likelihood)
};

BayesUpdate bayes_main(const Density& prior, const SpectralMatrix& likelihood);

/// Repeated bayes_main with the same likelihood; the posterior drifts toward
/// the likelihood's top eigenvector.
FlowTrace bayes_iterate(const Density& prior, const SpectralMatrix& likelihood,
                        int steps);

/// D(B|A) = (I_A (x) D(B)) (.) D(A|B) (.) (tr_B(...) (x) I_B)^{-1}.
FullConditional bayes_full_swap(const Density& d_b,
                                const FullConditional& cond_ab);

/// D(b|A) = D(b) D(A|b) (.) (tr_B(D(A|B) (.) (I_A (x) D(B))))^{-1},
/// an n_A x n_A PSD matrix; derived from the joint.
SpectralMatrix bayes_slice_given_a_space(const JointDensity& j,
                                         const UnitVector& b);

/// D(B|a) = (D(B) (.) D(a|B)) / tr(...); a thin wrapper over bayes_main.
BayesUpdate bayes_posterior_given_a(const Density& d_b,
                                    const SpectralMatrix& cond_a_given_B);

/// D(b|a) = D(b) D(a|b) / Sum_i D(b_i) D(a|b_i) over an orthonormal basis
/// given as matrix columns. The normalizer equals D(a) for any basis.
double bayes_scalar(const JointDensity& j, const UnitVector& a,
                    const UnitVector& b, const Eigen::MatrixXd& basis);

/// Residuals of the four total-probability identities on one joint.
struct TotalProbabilityReport {
  double basic_basis_sum = 0.0;    // |1 - Sum_i D(a_i)|
  double basic_conditional = 0.0;  // |D(a) - Sum_i D(a|b_i) D(b_i)|
  double fancy_scalar = 0.0;       // |D(a) - tr(D(a|B) (.) D(B))|
  double fancy_matrix = 0.0;  // ||D(A) - tr_B(D(A|B) (.) (I_A (x) D(B)))||_F
};

TotalProbabilityReport total_probability_report(const JointDensity& j,
                                                std::uint64_t basis_seed);

/// The MAP bound chains: the log-domain chain
///   -log tr(L (.) P) <= min_m(-m^T log L m - m^T log P m)
/// and the probability-domain chain
///   tr(L (.) P) <= tr(L P) <= m_j^T L m_j over prior eigenvectors m_i.
struct BoundReport {
  double nll_evidence = 0.0;  // -log tr(prior (.) likelihood)
  double nll_map = 0.0;       // -lambda_max(log L + log P)
  double prob_evidence = 0.0;
  double prob_trace_product = 0.0;  // tr(L P), the Golden-Thompson link
  double prob_bound = 0.0;          // m_j^T L m_j
  Eigen::Index argmax_index = 0;
};

BoundReport bound_report(const Density& prior,
                         const SpectralMatrix& likelihood);

}  // namespace dmcalc
