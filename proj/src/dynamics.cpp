#include "dmcalc/dynamics.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

namespace dmcalc {

namespace {

void require_flow_inputs(const Density& prior,
                         const SpectralMatrix& likelihood,
                         const char* where) {
  if (prior.dim() != likelihood.dim()) {
    throw DimensionMismatch(std::string(where) + ": dimensions differ");
  }
  if (!is_strictly_pd(prior.mat()) || !is_strictly_pd(likelihood)) {
    throw NotStrictlyPd(std::string(where) +
                        ": prior and likelihood must be strictly PD");
  }
}

double overlap_with_top(const SpectralMatrix& state,
                        const SpectralMatrix& target) {
  return std::abs(state.spectrum().eigenvectors.col(0).dot(
      target.spectrum().eigenvectors.col(0)));
}

}  // namespace

Density flow_generalized(const Density& prior,
                         const SpectralMatrix& likelihood, double t) {
  require_flow_inputs(prior, likelihood, "flow_generalized");
  if (!std::isfinite(t)) {
    throw BadDistribution("flow_generalized: t must be finite");
  }
  SpectralMatrix log_state = SpectralMatrix::from_symmetric(
      mat_log_plus(prior.mat()).matrix() +
      t * mat_log_plus(likelihood).matrix());
  SpectralMatrix unnorm = mat_exp(log_state);
  return Density(
      SpectralMatrix::from_symmetric(unnorm.matrix() / unnorm.trace()));
}

Eigen::VectorXd flow_conventional(const Eigen::VectorXd& p0,
                                  const Eigen::VectorXd& likelihood,
                                  double t) {
  if (p0.size() != likelihood.size()) {
    throw DimensionMismatch("flow_conventional: sizes differ");
  }
  if (p0.minCoeff() < 0.0 || std::abs(p0.sum() - 1.0) > 1e-12) {
    throw BadDistribution("flow_conventional: p0 is not a distribution");
  }
  if (likelihood.minCoeff() <= 0.0) {
    throw BadDistribution("flow_conventional: likelihood must be positive");
  }
  // Work in log space and shift by the max exponent for stability at large t.
  Eigen::VectorXd log_terms(p0.size());
  for (Eigen::Index i = 0; i < p0.size(); ++i) {
    log_terms(i) = (p0(i) > 0 ? std::log(p0(i)) : -1e308) +
                   t * std::log(likelihood(i));
  }
  const double shift = log_terms.maxCoeff();
  Eigen::VectorXd out = (log_terms.array() - shift).exp();
  return out / out.sum();
}

FlowTrace integrate_log_ode(const Density& prior,
                            const SpectralMatrix& likelihood, double t_end,
                            int steps) {
  require_flow_inputs(prior, likelihood, "integrate_log_ode");
  if (steps < 1) {
    throw BadDistribution("integrate_log_ode: steps must be >= 1");
  }
  const Eigen::Index n = prior.dim();
  const Eigen::MatrixXd log_l = mat_log_plus(likelihood).matrix();
  const double h = t_end / static_cast<double>(steps);

  auto rhs = [&](const Eigen::MatrixXd& x) -> Eigen::MatrixXd {
    SpectralMatrix state = mat_exp(SpectralMatrix::from_symmetric(x));
    const double avg = (state.matrix() * log_l).trace();
    return log_l - avg * Eigen::MatrixXd::Identity(n, n);
  };

  FlowTrace trace;
  Eigen::MatrixXd x = mat_log_plus(prior.mat()).matrix();
  Density state = prior;
  trace.steps.push_back(FlowStep{0.0, state, 0.0,
                                 overlap_with_top(state.mat(), likelihood),
                                 0.0});
  for (int k = 1; k <= steps; ++k) {
    Eigen::MatrixXd k1 = rhs(x);
    Eigen::MatrixXd k2 = rhs(x + 0.5 * h * k1);
    Eigen::MatrixXd k3 = rhs(x + 0.5 * h * k2);
    Eigen::MatrixXd k4 = rhs(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    SpectralMatrix d = mat_exp(SpectralMatrix::from_symmetric(x));
    const double drift = std::abs(d.trace() - 1.0);
    Density next(
        SpectralMatrix::from_symmetric(d.matrix() / d.trace()));
    const double step_norm =
        (next.mat().matrix() - state.mat().matrix()).norm();
    state = next;
    trace.steps.push_back(FlowStep{h * static_cast<double>(k), state, drift,
                                   overlap_with_top(state.mat(), likelihood),
                                   step_norm});
  }
  return trace;
}

Density conjugate(const Density& d0, const Eigen::MatrixXd& q) {
  if (q.rows() != d0.dim() || q.cols() != d0.dim()) {
    throw DimensionMismatch("conjugate: dimensions differ");
  }
  if ((q.transpose() * q - Eigen::MatrixXd::Identity(q.rows(), q.cols()))
          .norm() > 1e-10) {
    throw NotOrthogonal("conjugate: Q is not orthogonal");
  }
  return Density(SpectralMatrix::from_symmetric(
      q * d0.mat().matrix() * q.transpose()));
}

Density conjugate_flow(const Density& d0, const Eigen::MatrixXd& skew,
                       double t) {
  if (skew.rows() != d0.dim() || skew.cols() != d0.dim()) {
    throw DimensionMismatch("conjugate_flow: dimensions differ");
  }
  if ((skew + skew.transpose()).norm() > 1e-10) {
    throw NotSkew("conjugate_flow: K is not skew-symmetric");
  }
  Eigen::MatrixXd rot = (t * skew).exp();
  return Density(SpectralMatrix::from_symmetric(
      rot * d0.mat().matrix() * rot.transpose()));
}

}  // namespace dmcalc
