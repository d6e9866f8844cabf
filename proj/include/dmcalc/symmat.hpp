#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>

#include "dmcalc/errors.hpp"

namespace dmcalc {

/// Eigendecomposition of a symmetric matrix: eigenvalues sorted descending,
/// eigenvector columns orthonormal and matching the eigenvalue order.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

/// Dense real symmetric matrix with an on-demand, shared eigendecomposition
/// cache. Immutable after construction; copies share the cache.
class SpectralMatrix {
 public:
  SpectralMatrix() = default;

  /// Builds from a raw square matrix, averaging (M + M^T)/2. Rejects input
  /// whose asymmetry exceeds 1e-9 relative to the largest entry.
  static SpectralMatrix from_raw(const Eigen::MatrixXd& raw);

  /// Trusted constructor for matrices that are symmetric by construction;
  /// still averages to kill roundoff asymmetry but never throws.
  static SpectralMatrix from_symmetric(const Eigen::MatrixXd& m);

  static SpectralMatrix zero(Eigen::Index n);
  static SpectralMatrix identity(Eigen::Index n);
  static SpectralMatrix diagonal(const Eigen::VectorXd& d);

  const Eigen::MatrixXd& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  double trace() const { return m_.trace(); }
  double norm() const { return m_.norm(); }

  /// Eigendecomposition, computed once per value and cached.
  const Spectrum& spectrum() const;

  double max_eigenvalue() const { return spectrum().eigenvalues(0); }
  double min_eigenvalue() const {
    return spectrum().eigenvalues(dim() - 1);
  }

 private:
  explicit SpectralMatrix(Eigen::MatrixXd m);

  struct Cache {
    std::once_flag once;
    std::optional<Spectrum> spectrum;
  };

  Eigen::MatrixXd m_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

/// Relative cutoff separating true nullspace from roundoff. Relative to the
/// largest eigenvalue; switches to an absolute floor for tiny matrices.
inline constexpr double kRelZeroTol = 1e-10;
inline constexpr double kAbsZeroTolFloor = 1e-14;

/// Eigenvalue magnitude below which it counts as zero for rank decisions.
double zero_threshold(double lambda_max, double rel_zero_tol = kRelZeroTol);

/// Rank with respect to the zero threshold.
Eigen::Index psd_rank(const SpectralMatrix& m,
                      double rel_zero_tol = kRelZeroTol);

/// True when eigenvalues are nonnegative within the clamping tolerance
/// lambda_min >= -1e-9 * max(1, lambda_max).
bool is_psd(const SpectralMatrix& m);

/// Throws NotPsd unless is_psd holds.
void require_psd(const SpectralMatrix& m, const char* where);

/// True when lambda_min > rel_zero_tol * lambda_max (and lambda_max > 0).
bool is_strictly_pd(const SpectralMatrix& m,
                    double rel_zero_tol = kRelZeroTol);

/// exp applied to the eigenvalues on the same eigenvectors.
SpectralMatrix mat_exp(const SpectralMatrix& m);

/// log applied to nonzero eigenvalues; eigenvalues within the zero threshold
/// map to 0. Throws NotPsd on materially negative eigenvalues.
SpectralMatrix mat_log_plus(const SpectralMatrix& m,
                            double rel_zero_tol = kRelZeroTol);

/// Moore-Penrose inverse via the spectrum: nonzero eigenvalues inverted,
/// near-zero eigenvalues kept at zero.
SpectralMatrix pseudo_inverse(const SpectralMatrix& m,
                              double rel_zero_tol = kRelZeroTol);

/// m^p for PSD m: eigenvalues raised to p (negative roundoff clamped to 0).
SpectralMatrix mat_power(const SpectralMatrix& m, double p);

/// Haar-ish random orthogonal matrix from Gram-Schmidt on Gaussian columns.
/// Deterministic per seed.
Eigen::MatrixXd random_orthogonal(Eigen::Index n, std::uint64_t seed);

/// Q diag(u) Q^T with u uniform on [0,1] for `rank` entries, zero elsewhere.
SpectralMatrix random_psd(Eigen::Index n, Eigen::Index rank,
                          std::uint64_t seed);

/// Strictly positive definite sample: eigenvalues uniform on [lo, hi].
SpectralMatrix random_spd(Eigen::Index n, std::uint64_t seed, double lo = 0.1,
                          double hi = 3.0);

}  // namespace dmcalc
