#include "dmcalc/odot.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <vector>

namespace dmcalc {

namespace {

// Orthogonal projector onto the range of a PSD matrix.
Eigen::MatrixXd range_projector(const SpectralMatrix& m) {
  const Spectrum& s = m.spectrum();
  const double cut = zero_threshold(std::max(s.eigenvalues(0), 0.0));
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m.dim(), m.dim());
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    if (s.eigenvalues(i) > cut) {
      p += s.eigenvectors.col(i) * s.eigenvectors.col(i).transpose();
    }
  }
  return p;
}

using Quad = boost::multiprecision::cpp_bin_float_quad;
using QuadMat = std::vector<Quad>;  // n*n, row-major

QuadMat quad_mul(const QuadMat& a, const QuadMat& b, int n) {
  QuadMat out(static_cast<std::size_t>(n) * n, Quad(0));
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < n; ++l) {
      const Quad aik = a[i * n + l];
      for (int j = 0; j < n; ++j) {
        out[i * n + j] += aik * b[l * n + j];
      }
    }
  }
  return out;
}

// Cyclic Jacobi on a symmetric quad matrix; returns eigenvalues on the
// diagonal of `a` and accumulates rotations into `v`.
void quad_jacobi(QuadMat& a, QuadMat& v, int n) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      v[i * n + j] = (i == j) ? Quad(1) : Quad(0);
    }
  }
  const Quad tol("1e-60");
  for (int sweep = 0; sweep < 100; ++sweep) {
    Quad off = 0;
    for (int p = 0; p < n; ++p) {
      for (int r = p + 1; r < n; ++r) {
        off += a[p * n + r] * a[p * n + r];
      }
    }
    if (off < tol) return;
    for (int p = 0; p < n - 1; ++p) {
      for (int r = p + 1; r < n; ++r) {
        const Quad apq = a[p * n + r];
        if (apq == 0) continue;
        const Quad theta = (a[r * n + r] - a[p * n + p]) / (2 * apq);
        const Quad sign = theta >= 0 ? Quad(1) : Quad(-1);
        const Quad t_rot =
            sign / (sign * theta +
                    boost::multiprecision::sqrt(1 + theta * theta));
        const Quad c = 1 / boost::multiprecision::sqrt(1 + t_rot * t_rot);
        const Quad s_rot = t_rot * c;
        for (int i = 0; i < n; ++i) {
          const Quad aip = a[i * n + p];
          const Quad aiq = a[i * n + r];
          a[i * n + p] = c * aip - s_rot * aiq;
          a[i * n + r] = s_rot * aip + c * aiq;
        }
        for (int j = 0; j < n; ++j) {
          const Quad apj = a[p * n + j];
          const Quad aqj = a[r * n + j];
          a[p * n + j] = c * apj - s_rot * aqj;
          a[r * n + j] = s_rot * apj + c * aqj;
        }
        for (int i = 0; i < n; ++i) {
          const Quad vip = v[i * n + p];
          const Quad viq = v[i * n + r];
          v[i * n + p] = c * vip - s_rot * viq;
          v[i * n + r] = s_rot * vip + c * viq;
        }
      }
    }
  }
  throw ConvergenceFailure("odot_lie_limit: quad Jacobi sweep budget spent");
}

// x^{1/2^k} for PSD x, elementwise on the quad spectrum.
QuadMat quad_frac_power(const Eigen::MatrixXd& x, int k) {
  const int n = static_cast<int>(x.rows());
  QuadMat a(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      a[i * n + j] = Quad(x(i, j));
    }
  }
  QuadMat v(a.size());
  quad_jacobi(a, v, n);
  const Quad frac = boost::multiprecision::ldexp(Quad(1), -k);
  QuadMat scaled(a.size(), Quad(0));
  for (int c = 0; c < n; ++c) {
    const Quad lambda = a[c * n + c];
    const Quad powed =
        lambda > 0 ? boost::multiprecision::pow(lambda, frac) : Quad(0);
    for (int i = 0; i < n; ++i) {
      scaled[i * n + c] = v[i * n + c] * powed;
    }
  }
  // scaled * v^T
  QuadMat out(a.size(), Quad(0));
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < n; ++c) {
      const Quad sic = scaled[i * n + c];
      for (int j = 0; j < n; ++j) {
        out[i * n + j] += sic * v[j * n + c];
      }
    }
  }
  return out;
}

void check_pair(const SpectralMatrix& s, const SpectralMatrix& t,
                const char* where) {
  if (s.dim() != t.dim()) {
    throw DimensionMismatch(std::string(where) + ": dimensions differ");
  }
  require_psd(s, where);
  require_psd(t, where);
}

}  // namespace

Eigen::MatrixXd range_intersection_basis(const SpectralMatrix& s,
                                         const SpectralMatrix& t) {
  check_pair(s, t, "range_intersection_basis");
  SpectralMatrix avg = SpectralMatrix::from_symmetric(
      0.5 * (range_projector(s) + range_projector(t)));
  const Spectrum& sp = avg.spectrum();
  Eigen::Index k = 0;
  while (k < sp.eigenvalues.size() && sp.eigenvalues(k) > 1.0 - 1e-8) {
    ++k;
  }
  return sp.eigenvectors.leftCols(k);
}

OdotResult odot(const SpectralMatrix& s, const SpectralMatrix& t) {
  check_pair(s, t, "odot");
  const Eigen::Index n = s.dim();
  if (is_strictly_pd(s) && is_strictly_pd(t)) {
    SpectralMatrix sum = SpectralMatrix::from_symmetric(
        mat_log_plus(s).matrix() + mat_log_plus(t).matrix());
    return OdotResult{mat_exp(sum), n, false};
  }
  Eigen::MatrixXd b = range_intersection_basis(s, t);
  const Eigen::Index k = b.cols();
  if (k == 0) {
    return OdotResult{SpectralMatrix::zero(n), 0, true};
  }
  Eigen::MatrixXd logsum =
      mat_log_plus(s).matrix() + mat_log_plus(t).matrix();
  SpectralMatrix core =
      SpectralMatrix::from_symmetric(b.transpose() * logsum * b);
  SpectralMatrix inner = mat_exp(core);
  return OdotResult{
      SpectralMatrix::from_symmetric(b * inner.matrix() * b.transpose()), k,
      true};
}

SpectralMatrix odot_mat(const SpectralMatrix& s, const SpectralMatrix& t) {
  return odot(s, t).matrix;
}

LieLimitResult odot_lie_limit(const SpectralMatrix& s, const SpectralMatrix& t,
                              int k) {
  check_pair(s, t, "odot_lie_limit");
  if (k < 0) {
    throw BadRank("odot_lie_limit: negative halving depth");
  }
  // The 2^k power amplifies unit roundoff by ~2^k, and the symmetrized
  // output converges at O(4^-k), so at k = 24 the true error sits below
  // the double (and even long-double) roundoff floor. The whole evaluation
  // runs in quad precision to keep the floor out of the way.
  const Eigen::Index n = s.dim();
  const int q = static_cast<int>(n);
  QuadMat m = quad_mul(quad_frac_power(s.matrix(), k),
                       quad_frac_power(t.matrix(), k), q);
  for (int i = 0; i < k; ++i) {
    m = quad_mul(m, m, q);
  }
  Quad asym2 = 0;
  Eigen::MatrixXd md(n, n);
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) {
      const Quad d = m[i * q + j] - m[j * q + i];
      asym2 += d * d;
      md(i, j) = static_cast<double>(m[i * q + j]);
    }
  }
  const double asym =
      static_cast<double>(boost::multiprecision::sqrt(asym2));
  return LieLimitResult{SpectralMatrix::from_symmetric(md), asym};
}

double golden_thompson_gap(const SpectralMatrix& s, const SpectralMatrix& t) {
  check_pair(s, t, "golden_thompson_gap");
  const double tr_product = (s.matrix() * t.matrix()).trace();
  return tr_product - odot(s, t).matrix.trace();
}

}  // namespace dmcalc
