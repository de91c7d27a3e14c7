#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace diamantine {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

namespace linalg {

// Relative threshold below which a Gram eigenvalue in (-eps*max, 0) is
// treated as roundoff and clamped to zero before factoring.
inline constexpr double kClampTolerance = 1e-12;
// Eigenvalues above kRankTolerance * largest count toward the rank.
inline constexpr double kRankTolerance = 1e-10;

inline Matrix drop_row_col(const Matrix& m, Index row, Index col) {
  const Index n = m.rows();
  const Index k = m.cols();
  Matrix out(n - 1, k - 1);
  for (Index i = 0, oi = 0; i < n; ++i) {
    if (i == row) continue;
    for (Index j = 0, oj = 0; j < k; ++j) {
      if (j == col) continue;
      out(oi, oj++) = m(i, j);
    }
    ++oi;
  }
  return out;
}

inline double determinant(const Matrix& m) {
  if (m.rows() == 0) return 1.0;
  return m.fullPivLu().determinant();
}

/// Signed cofactor matrix C with C(i,j) = (-1)^(i+j) det(minor(i,j)).
/// Assembled from minors so that it stays exact for singular input, where
/// the inverse-based adjugate is unavailable.
inline Matrix cofactor_matrix(const Matrix& m) {
  const Index n = m.rows();
  Matrix c(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      c(i, j) = sign * determinant(drop_row_col(m, i, j));
    }
  return c;
}

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

inline Vector sym_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double lambda_min(const Matrix& m) { return sym_eigenvalues(m)(0); }

inline double spectral_radius(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return sym_eigenvalues(m).cwiseAbs().maxCoeff();
}

inline int numerical_rank(const Matrix& sym) {
  const Vector ev = sym_eigenvalues(sym);
  const double largest = ev.cwiseAbs().maxCoeff();
  if (largest == 0.0) return 0;
  return static_cast<int>((ev.array().abs() > kRankTolerance * largest).count());
}

/// Factor a symmetric PSD matrix as Pᵀ P with P of size rank × n, keeping the
/// `rank` largest eigenpairs. Eigenvalues in (-kClampTolerance·max, 0) are
/// clamped; `min_kept` receives the smallest retained eigenvalue and
/// `max_dropped` the largest discarded one (both before clamping).
struct PsdFactor {
  Matrix factor;
  double min_kept = 0.0;
  double max_dropped = 0.0;
  double largest = 0.0;
};

inline PsdFactor psd_factor(const Matrix& gram, Index rank) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(gram));
  const Vector& ev = es.eigenvalues();
  const Matrix& u = es.eigenvectors();
  const Index n = gram.rows();
  PsdFactor out;
  out.largest = ev.cwiseAbs().maxCoeff();
  out.min_kept = ev(n - rank);
  out.max_dropped = n > rank ? ev(n - rank - 1) : 0.0;
  out.factor.resize(rank, n);
  for (Index r = 0; r < rank; ++r) {
    const Index col = n - 1 - r;
    double lambda = ev(col);
    if (lambda < 0.0 && lambda > -kClampTolerance * out.largest) lambda = 0.0;
    out.factor.row(r) = std::sqrt(std::max(lambda, 0.0)) * u.col(col).transpose();
  }
  return out;
}

/// Apply the orthogonal gauge: rotate (and if needed reflect) the columns of
/// `edges` (d × (d+1)) so that the lattice generators vᵢ = pᵢ - p₀ become
/// upper triangular with non-negative diagonal.
inline Matrix gauge_fix(const Matrix& edges) {
  const Index d = edges.rows();
  Matrix gens(d, d);
  for (Index i = 0; i < d; ++i) gens.col(i) = edges.col(i + 1) - edges.col(0);
  Eigen::HouseholderQR<Matrix> qr(gens);
  Matrix q = qr.householderQ();
  const Matrix r = q.transpose() * gens;
  for (Index i = 0; i < d; ++i)
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  return q.transpose() * edges;
}

/// Upper-triangle vectorisation of a symmetric matrix, isometric for the
/// trace inner product tr(AB): off-diagonal entries are scaled by √2.
inline Vector sym_vec(const Matrix& m) {
  const Index d = m.rows();
  Vector out(d * (d + 1) / 2);
  Index k = 0;
  for (Index i = 0; i < d; ++i)
    for (Index j = i; j < d; ++j)
      out(k++) = (i == j) ? m(i, i) : std::sqrt(2.0) * 0.5 * (m(i, j) + m(j, i));
  return out;
}

inline Matrix sym_unvec(const Vector& v, Index d) {
  Matrix m(d, d);
  Index k = 0;
  for (Index i = 0; i < d; ++i)
    for (Index j = i; j < d; ++j) {
      const double value = (i == j) ? v(k) : v(k) / std::sqrt(2.0);
      m(i, j) = value;
      m(j, i) = value;
      ++k;
    }
  return m;
}

}  // namespace linalg
}  // namespace diamantine
