#include "dmcalc/gleason.hpp"

#include <cmath>
#include <random>

namespace dmcalc {

UnitVector::UnitVector(Eigen::VectorXd v) : v_(std::move(v)) {
  const double norm = v_.norm();
  if (std::abs(norm - 1.0) > 1e-12) {
    throw BadDistribution("UnitVector: norm " + std::to_string(norm) +
                          " is not 1");
  }
}

SpectralMatrix UnitVector::dyad() const {
  return SpectralMatrix::from_symmetric(v_ * v_.transpose());
}

UnitVector UnitVector::standard_basis(Eigen::Index n, Eigen::Index i) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v(i) = 1.0;
  return UnitVector(std::move(v));
}

Density::Density(const SpectralMatrix& m) : m_(m) {
  require_psd(m, "Density");
  const double tr = m.trace();
  if (std::abs(tr - 1.0) > 1e-8) {
    throw BadDistribution("Density: trace " + std::to_string(tr) +
                          " drifts too far from 1");
  }
  const Spectrum& s = m.spectrum();
  const bool clean = s.eigenvalues.minCoeff() >= 0.0 &&
                     s.eigenvalues.maxCoeff() <= 1.0 &&
                     std::abs(tr - 1.0) <= 1e-15;
  if (!clean) {
    Eigen::VectorXd ev =
        s.eigenvalues.cwiseMax(0.0).cwiseMin(1.0 + 1e-15);
    ev /= ev.sum();
    m_ = SpectralMatrix::from_symmetric(s.eigenvectors * ev.asDiagonal() *
                                        s.eigenvectors.transpose());
  }
}

Density Density::uniform(Eigen::Index n) {
  return Density(SpectralMatrix::from_symmetric(
      Eigen::MatrixXd::Identity(n, n) / static_cast<double>(n)));
}

Density Density::diagonal(const Eigen::VectorXd& probabilities) {
  return Density(SpectralMatrix::diagonal(probabilities));
}

EventProjector::EventProjector(const SpectralMatrix& m) : m_(m) {
  const Eigen::MatrixXd& s = m.matrix();
  if ((s * s - s).norm() > 1e-8) {
    throw NotProjector("EventProjector: matrix is not idempotent");
  }
}

EventProjector EventProjector::from_directions(
    const std::vector<UnitVector>& dirs) {
  if (dirs.empty()) {
    throw DimensionMismatch("EventProjector: empty direction set");
  }
  const Eigen::Index n = dirs.front().dim();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  for (const UnitVector& u : dirs) {
    if (u.dim() != n) {
      throw DimensionMismatch("EventProjector: mixed dimensions");
    }
    sum += u.vec() * u.vec().transpose();
  }
  return EventProjector(SpectralMatrix::from_symmetric(sum));
}

Density mixture_density(const std::vector<double>& weights,
                        const std::vector<UnitVector>& directions) {
  if (weights.size() != directions.size() || weights.empty()) {
    throw DimensionMismatch("mixture_density: weight/direction count mismatch");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) {
      throw BadWeights("mixture_density: negative weight");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw BadWeights("mixture_density: weights sum to " + std::to_string(sum));
  }
  const Eigen::Index n = directions.front().dim();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (directions[i].dim() != n) {
      throw DimensionMismatch("mixture_density: mixed direction dimensions");
    }
    acc += weights[i] * directions[i].vec() * directions[i].vec().transpose();
  }
  return Density(SpectralMatrix::from_symmetric(acc));
}

double prob(const Density& d, const UnitVector& u) {
  if (d.dim() != u.dim()) {
    throw DimensionMismatch("prob: density and direction dimensions differ");
  }
  return u.vec().dot(d.mat().matrix() * u.vec());
}

double event_prob(const Density& d, const EventProjector& s) {
  if (d.dim() != s.dim()) {
    throw DimensionMismatch("event_prob: dimensions differ");
  }
  return (d.mat().matrix() * s.mat().matrix()).trace();
}

double expectation(const Density& d, const Observable& obs) {
  if (d.dim() != obs.dim()) {
    throw DimensionMismatch("expectation: dimensions differ");
  }
  return (d.mat().matrix() * obs.mat().matrix()).trace();
}

UnitVector random_unit_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(n);
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < n; ++i) {
      v(i) = gauss(rng);
    }
    norm = v.norm();
  } while (norm < 1e-8);
  return UnitVector(v / norm);
}

SphereAverage sphere_average(const SpectralMatrix& a, std::int64_t samples,
                             std::uint64_t seed) {
  if (samples < 1) {
    throw BadDistribution("sphere_average: samples must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::Index n = a.dim();
  Eigen::VectorXd v(n);
  double sum = 0.0;
  double sumsq = 0.0;
  for (std::int64_t k = 0; k < samples; ++k) {
    double norm = 0.0;
    do {
      for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = gauss(rng);
      }
      norm = v.norm();
    } while (norm < 1e-8);
    v /= norm;
    const double x = v.dot(a.matrix() * v);
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / static_cast<double>(samples);
  double stderr_est = 0.0;
  if (samples > 1) {
    const double var =
        (sumsq - static_cast<double>(samples) * mean * mean) /
        static_cast<double>(samples - 1);
    stderr_est = std::sqrt(std::max(var, 0.0) / static_cast<double>(samples));
  }
  return SphereAverage{mean, stderr_est, samples};
}

Density random_density(Eigen::Index n, std::uint64_t seed) {
  SpectralMatrix p = random_psd(n, n, seed);
  return Density(
      SpectralMatrix::from_symmetric(p.matrix() / p.trace()));
}

}  // namespace dmcalc
