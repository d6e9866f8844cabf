#pragma once

#include <cstdint>
#include <vector>

#include "dmcalc/symmat.hpp"

namespace dmcalc {

/// Unit column vector; the elementary event is its dyad u u^T.
class UnitVector {
 public:
  explicit UnitVector(Eigen::VectorXd v);

  const Eigen::VectorXd& vec() const { return v_; }
  Eigen::Index dim() const { return v_.size(); }

  /// The rank-one projector u u^T.
  SpectralMatrix dyad() const;

  static UnitVector standard_basis(Eigen::Index n, Eigen::Index i);

 private:
  Eigen::VectorXd v_;
};

/// Trace-one PSD matrix; the generalized probability distribution.
class Density {
 public:
  /// Validates PSD and trace within drift tolerance 1e-8, then clamps
  /// eigenvalues to [0,1] and renormalizes the trace.
  explicit Density(const SpectralMatrix& m);

  static Density uniform(Eigen::Index n);
  static Density diagonal(const Eigen::VectorXd& probabilities);

  const SpectralMatrix& mat() const { return m_; }
  Eigen::Index dim() const { return m_.dim(); }

 private:
  SpectralMatrix m_;
};

/// Projection matrix (eigenvalues in {0,1}); the generalized event.
class EventProjector {
 public:
  /// From a raw symmetric matrix; checks idempotence ||S^2 - S||_F <= 1e-8.
  explicit EventProjector(const SpectralMatrix& m);

  /// Sum of dyads of an orthonormal direction subset.
  static EventProjector from_directions(const std::vector<UnitVector>& dirs);

  const SpectralMatrix& mat() const { return m_; }
  Eigen::Index dim() const { return m_.dim(); }

 private:
  SpectralMatrix m_;
};

/// Arbitrary symmetric matrix; the generalized random variable.
class Observable {
 public:
  explicit Observable(SpectralMatrix m) : m_(std::move(m)) {}

  const SpectralMatrix& mat() const { return m_; }
  Eigen::Index dim() const { return m_.dim(); }

 private:
  SpectralMatrix m_;
};

/// Sum_i alpha_i a_i a_i^T. Weights must be nonnegative and sum to one.
Density mixture_density(const std::vector<double>& weights,
                        const std::vector<UnitVector>& directions);

/// Generalized probability tr(A u u^T) = u^T A u.
double prob(const Density& d, const UnitVector& u);

/// Event probability tr(A S).
double event_prob(const Density& d, const EventProjector& s);

/// Expectation tr(A S) of a random variable.
double expectation(const Density& d, const Observable& obs);

struct SphereAverage {
  double estimate;
  double std_error;
  std::int64_t samples;
};

/// Monte Carlo mean of u^T A u over uniform unit vectors; converges to
/// tr(A)/n. Works for any symmetric A, not just densities.
SphereAverage sphere_average(const SpectralMatrix& a, std::int64_t samples,
                             std::uint64_t seed);

/// Uniform random unit vector (normalized Gaussian).
UnitVector random_unit_vector(Eigen::Index n, std::uint64_t seed);

/// Random trace-one PSD matrix of full rank.
Density random_density(Eigen::Index n, std::uint64_t seed);

}  // namespace dmcalc
