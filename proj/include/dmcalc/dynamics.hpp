#pragma once

#include "dmcalc/flow_trace.hpp"
#include "dmcalc/symmat.hpp"

namespace dmcalc {

/// Closed-form flow (prior (.) likelihood^t) / tr(...), i.e.
/// exp(log P + t log L) trace-normalized. t = 1 is the Bayes posterior.
Density flow_generalized(const Density& prior, const SpectralMatrix& likelihood,
                         double t);

/// Conventional flow p_i(t) = p_i(0) l_i^t / Sum_j p_j(0) l_j^t.
Eigen::VectorXd flow_conventional(const Eigen::VectorXd& p0,
                                  const Eigen::VectorXd& likelihood, double t);

/// Fixed-step RK4 integration of
///   d log D / dt = log L - tr(D log L)
/// in log space; the scalar term acts as that multiple of the identity.
FlowTrace integrate_log_ode(const Density& prior,
                            const SpectralMatrix& likelihood, double t_end,
                            int steps);

/// exp(tK) d0 exp(tK)^T for skew-symmetric K; preserves the spectrum.
Density conjugate_flow(const Density& d0, const Eigen::MatrixXd& skew,
                       double t);

/// Q d0 Q^T for an orthogonal Q (covers reflections like the swap matrix).
Density conjugate(const Density& d0, const Eigen::MatrixXd& q);

}  // namespace dmcalc
