#include "dmcalc/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace dmcalc {

SpectralMatrix::SpectralMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {}

SpectralMatrix SpectralMatrix::from_raw(const Eigen::MatrixXd& raw) {
  if (raw.rows() != raw.cols()) {
    throw NonSquare("symmetrize_build: input is " + std::to_string(raw.rows()) +
                    "x" + std::to_string(raw.cols()));
  }
  const double scale = std::max(1.0, raw.cwiseAbs().maxCoeff());
  const double asym = (raw - raw.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale) {
    throw AsymmetricInput("symmetrize_build: asymmetry " + std::to_string(asym) +
                          " exceeds tolerance");
  }
  return SpectralMatrix(0.5 * (raw + raw.transpose()));
}

SpectralMatrix SpectralMatrix::from_symmetric(const Eigen::MatrixXd& m) {
  return SpectralMatrix(0.5 * (m + m.transpose()));
}

SpectralMatrix SpectralMatrix::zero(Eigen::Index n) {
  return SpectralMatrix(Eigen::MatrixXd::Zero(n, n));
}

SpectralMatrix SpectralMatrix::identity(Eigen::Index n) {
  return SpectralMatrix(Eigen::MatrixXd::Identity(n, n));
}

SpectralMatrix SpectralMatrix::diagonal(const Eigen::VectorXd& d) {
  return SpectralMatrix(Eigen::MatrixXd(d.asDiagonal()));
}

const Spectrum& SpectralMatrix::spectrum() const {
  std::call_once(cache_->once, [this] {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m_);
    if (solver.info() != Eigen::Success) {
      throw ConvergenceFailure("eigendecompose: solver did not converge");
    }
    // Eigen returns ascending order; flip to descending.
    Spectrum s;
    s.eigenvalues = solver.eigenvalues().reverse();
    s.eigenvectors = solver.eigenvectors().rowwise().reverse();
    cache_->spectrum = std::move(s);
  });
  return *cache_->spectrum;
}

double zero_threshold(double lambda_max, double rel_zero_tol) {
  if (lambda_max <= 1e-4) {
    return kAbsZeroTolFloor;
  }
  return rel_zero_tol * lambda_max;
}

Eigen::Index psd_rank(const SpectralMatrix& m, double rel_zero_tol) {
  const auto& ev = m.spectrum().eigenvalues;
  const double cut = zero_threshold(ev.size() ? ev(0) : 0.0, rel_zero_tol);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > cut) ++r;
  }
  return r;
}

bool is_psd(const SpectralMatrix& m) {
  if (m.dim() == 0) return true;
  const double lmax = m.max_eigenvalue();
  return m.min_eigenvalue() >= -1e-9 * std::max(1.0, lmax);
}

void require_psd(const SpectralMatrix& m, const char* where) {
  if (!is_psd(m)) {
    throw NotPsd(std::string(where) + ": min eigenvalue " +
                 std::to_string(m.min_eigenvalue()) + " is materially negative");
  }
}

bool is_strictly_pd(const SpectralMatrix& m, double rel_zero_tol) {
  if (m.dim() == 0) return false;
  const double lmax = m.max_eigenvalue();
  return lmax > 0 && m.min_eigenvalue() > zero_threshold(lmax, rel_zero_tol);
}

namespace {

SpectralMatrix apply_to_eigenvalues(const SpectralMatrix& m,
                                    const std::function<double(double)>& f) {
  const Spectrum& s = m.spectrum();
  Eigen::VectorXd mapped(s.eigenvalues.size());
  for (Eigen::Index i = 0; i < mapped.size(); ++i) {
    mapped(i) = f(s.eigenvalues(i));
  }
  return SpectralMatrix::from_symmetric(
      s.eigenvectors * mapped.asDiagonal() * s.eigenvectors.transpose());
}

}  // namespace

SpectralMatrix mat_exp(const SpectralMatrix& m) {
  return apply_to_eigenvalues(m, [](double x) { return std::exp(x); });
}

SpectralMatrix mat_log_plus(const SpectralMatrix& m, double rel_zero_tol) {
  require_psd(m, "mat_log_plus");
  const double cut =
      zero_threshold(std::max(m.max_eigenvalue(), 0.0), rel_zero_tol);
  return apply_to_eigenvalues(
      m, [cut](double x) { return x > cut ? std::log(x) : 0.0; });
}

SpectralMatrix pseudo_inverse(const SpectralMatrix& m, double rel_zero_tol) {
  require_psd(m, "pseudo_inverse");
  const double cut =
      zero_threshold(std::max(m.max_eigenvalue(), 0.0), rel_zero_tol);
  return apply_to_eigenvalues(
      m, [cut](double x) { return x > cut ? 1.0 / x : 0.0; });
}

SpectralMatrix mat_power(const SpectralMatrix& m, double p) {
  require_psd(m, "mat_power");
  return apply_to_eigenvalues(
      m, [p](double x) { return x > 0 ? std::pow(x, p) : 0.0; });
}

Eigen::MatrixXd random_orthogonal(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      g(i, j) = gauss(rng);
    }
  }
  // Thin QR; fix column signs so the result is deterministic.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

SpectralMatrix random_psd(Eigen::Index n, Eigen::Index rank,
                          std::uint64_t seed) {
  if (rank < 1 || rank > n) {
    throw BadRank("random_psd: rank " + std::to_string(rank) +
                  " out of range for n=" + std::to_string(n));
  }
  Eigen::MatrixXd q = random_orthogonal(n, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < rank; ++i) {
    // Keep eigenvalues away from the rank cutoff.
    d(i) = 0.05 + 0.95 * unif(rng);
  }
  return SpectralMatrix::from_symmetric(q * d.asDiagonal() * q.transpose());
}

SpectralMatrix random_spd(Eigen::Index n, std::uint64_t seed, double lo,
                          double hi) {
  Eigen::MatrixXd q = random_orthogonal(n, seed);
  std::mt19937_64 rng(seed ^ 0xda942042e4dd58b5ull);
  std::uniform_real_distribution<double> unif(lo, hi);
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i) = unif(rng);
  }
  return SpectralMatrix::from_symmetric(q * d.asDiagonal() * q.transpose());
}

}  // namespace dmcalc
