#pragma once

// Dense complex linear algebra used by the alignment construction and the
// receiver metrics. Factorizations are delegated to Eigen; this header owns
// the contracts (tolerances, ordering, phase convention, error reporting).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "latinia/error.hpp"

namespace latinia {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using ComplexRow = Eigen::RowVectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kDefaultEigTolerance = 1e-8;
inline constexpr double kPivotTolerance = 1e-12;
inline constexpr double kRankDeficientRatio = 1e-12;

struct EigenPair {
  Complex value;
  ComplexVector vector;
};

inline bool all_finite(const ComplexMatrix& a) {
  return a.allFinite();
}

/// Rotate `v` so its largest-magnitude entry is real and positive. The first
/// entry wins among equal magnitudes.
inline void fix_phase(ComplexVector& v) {
  if (v.size() == 0) return;
  Eigen::Index best = 0;
  double best_abs = std::abs(v(0));
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    const double m = std::abs(v(i));
    if (m > best_abs) {
      best_abs = m;
      best = i;
    }
  }
  if (best_abs == 0.0) return;
  v *= std::conj(v(best)) / best_abs;
  v(best) = Complex(best_abs, 0.0);
}

/// Eigendecomposition of a general square complex matrix.
///
/// Pairs are sorted by descending |value| (stable with respect to the solver's
/// order), vectors have unit norm and carry the fix_phase convention. Every
/// pair is checked against ||A v - l v|| <= tol * ||A||_F; a violation raises
/// NonConvergence with the achieved residual in the message.
inline std::vector<EigenPair> eig(const ComplexMatrix& a, double tol = kDefaultEigTolerance) {
  if (a.rows() != a.cols()) {
    throw Error(Errc::invalid_argument, "eig requires a square matrix");
  }
  if (!all_finite(a)) {
    throw Error(Errc::invalid_argument, "eig input has non-finite entries");
  }
  const Eigen::Index n = a.rows();
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::non_convergence, "complex Schur iteration did not converge");
  }

  std::vector<EigenPair> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    ComplexVector v = solver.eigenvectors().col(k);
    v.normalize();
    fix_phase(v);
    pairs.push_back({solver.eigenvalues()(k), std::move(v)});
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const EigenPair& x, const EigenPair& y) {
    return std::abs(x.value) > std::abs(y.value);
  });

  const double scale = a.norm();
  double worst = 0.0;
  for (const auto& p : pairs) {
    worst = std::max(worst, (a * p.vector - p.value * p.vector).norm());
  }
  if (worst > tol * scale) {
    std::ostringstream msg;
    msg << "eigen residual " << worst << " exceeds " << tol << " * ||A||_F (" << scale << ")";
    throw Error(Errc::non_convergence, msg.str());
  }
  return pairs;
}

/// Inverse via partial-pivot LU. Raises SingularMatrix when a pivot falls
/// below 1e-12 * ||A||_F.
inline ComplexMatrix inverse(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(Errc::invalid_argument, "inverse requires a square matrix");
  }
  const double scale = a.norm();
  if (scale == 0.0) {
    throw Error(Errc::singular_matrix, "zero matrix");
  }
  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  const auto diag = lu.matrixLU().diagonal();
  for (Eigen::Index k = 0; k < diag.size(); ++k) {
    if (std::abs(diag(k)) < kPivotTolerance * scale) {
      std::ostringstream msg;
      msg << "pivot " << k << " has magnitude " << std::abs(diag(k));
      throw Error(Errc::singular_matrix, msg.str());
    }
  }
  return lu.inverse();
}

/// Singular values, descending.
inline RealVector singular_values(const ComplexMatrix& a) {
  if (!all_finite(a)) {
    throw Error(Errc::invalid_argument, "singular_values input has non-finite entries");
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues();
}

/// sigma_max / sigma_min. Returns +infinity when the matrix is numerically
/// rank deficient (sigma_min < 1e-12 sigma_max); see is_rank_deficient.
inline double cond_number(const ComplexMatrix& a) {
  const RealVector s = singular_values(a);
  if (s.size() == 0) return std::numeric_limits<double>::infinity();
  const double hi = s(0);
  const double lo = s(s.size() - 1);
  if (hi == 0.0 || lo < kRankDeficientRatio * hi) {
    return std::numeric_limits<double>::infinity();
  }
  return hi / lo;
}

inline bool is_rank_deficient(double cond) {
  return std::isinf(cond);
}

/// Same as cond_number but raises RankDeficient instead of returning +inf.
inline double cond_number_checked(const ComplexMatrix& a) {
  const double c = cond_number(a);
  if (is_rank_deficient(c)) {
    throw Error(Errc::rank_deficient, "sigma_min below 1e-12 sigma_max");
  }
  return c;
}

/// Count of singular values >= rel_tol * sigma_max.
inline int numerical_rank(const ComplexMatrix& a, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw Error(Errc::invalid_argument, "rel_tol must lie in (0, 1)");
  }
  const RealVector s = singular_values(a);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cut = rel_tol * s(0);
  return static_cast<int>((s.array() >= cut).count());
}

/// Orthonormal basis for the columns of `cols`, in order. Modified
/// Gram-Schmidt with one reorthogonalization pass per column.
inline ComplexMatrix gram_schmidt(const ComplexMatrix& cols) {
  ComplexMatrix q = cols;
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const double original = cols.col(k).norm();
    if (original == 0.0) {
      throw Error(Errc::dependent_input, "zero input column");
    }
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < k; ++j) {
        const Complex proj = q.col(j).dot(q.col(k));  // conjugates the left operand
        q.col(k) -= proj * q.col(j);
      }
    }
    const double residual = q.col(k).norm();
    if (residual < 1e-12 * original) {
      std::ostringstream msg;
      msg << "column " << k << " lies in the span of the previous columns";
      throw Error(Errc::dependent_input, msg.str());
    }
    q.col(k) /= residual;
  }
  return q;
}

inline ComplexMatrix gram_schmidt(const std::vector<ComplexVector>& vectors) {
  if (vectors.empty()) return ComplexMatrix();
  ComplexMatrix cols(vectors.front().size(), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    if (vectors[k].size() != cols.rows()) {
      throw Error(Errc::invalid_argument, "gram_schmidt vectors differ in length");
    }
    cols.col(static_cast<Eigen::Index>(k)) = vectors[k];
  }
  return gram_schmidt(cols);
}

/// Sine of the principal angle between u and v; 0 iff collinear.
///
/// Evaluated as the norm of the component of v orthogonal to u, which stays
/// accurate near zero where 1 - cos^2 would cancel.
inline double collinearity_residual(const ComplexVector& u, const ComplexVector& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) {
    throw Error(Errc::zero_vector, "collinearity_residual needs nonzero vectors");
  }
  if (u.size() != v.size()) {
    throw Error(Errc::invalid_argument, "collinearity_residual length mismatch");
  }
  const ComplexVector uh = u / nu;
  const ComplexVector vh = v / nv;
  const ComplexVector perp = vh - uh.dot(vh) * uh;
  return std::min(1.0, perp.norm());
}

/// Scale every column to unit norm. Zero columns are left untouched.
inline ComplexMatrix normalize_columns(const ComplexMatrix& a) {
  ComplexMatrix out = a;
  for (Eigen::Index k = 0; k < out.cols(); ++k) {
    const double n = out.col(k).norm();
    if (n > 0.0) out.col(k) /= n;
  }
  return out;
}

}  // namespace latinia
