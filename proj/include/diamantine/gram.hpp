#pragma once

#include <diamantine/error.hpp>
#include <diamantine/framework.hpp>
#include <diamantine/linalg.hpp>

#include <cmath>
#include <string>

namespace diamantine {

// Relative tolerance for accepting (ω, s) as realizable: |⟨p₀,p₀⟩ - s₀|
// must stay below this times max(s).
inline constexpr double kHypersurfaceTolerance = 1e-8;

/// Full Gram matrix G(p) = (⟨pᵢ,pⱼ⟩), size (d+1) × (d+1).
inline Matrix gram_of(const FrameworkSpec& spec) {
  const Matrix& p = spec.edge_vectors();
  return p.transpose() * p;
}

/// Gram matrix of the lattice generators, ω_ij = ⟨pᵢ - p₀, pⱼ - p₀⟩.
inline Matrix omega_of(const FrameworkSpec& spec) {
  const Matrix gens = spec.lattice_generators();
  return gens.transpose() * gens;
}

namespace detail {
inline void check_omega_shape(const Matrix& omega, const Vector& s, const char* module) {
  if (omega.rows() != omega.cols() || s.size() != omega.rows() + 1)
    throw Error(Errc::shape, module,
                "omega must be d x d with d+1 squared lengths, got " + std::to_string(omega.rows()) +
                    "x" + std::to_string(omega.cols()) + " and " + std::to_string(s.size()) +
                    " lengths");
}
}  // namespace detail

/// Inverse of omega_of on the level of Gram data: recover G(p) from ω and s.
inline Matrix gram_from_omega(const Matrix& omega, const Vector& s) {
  detail::check_omega_shape(omega, s, "gram_coords");
  const Index d = omega.rows();
  Matrix g(d + 1, d + 1);
  g(0, 0) = s(0);
  for (Index i = 1; i <= d; ++i) {
    g(i, 0) = g(0, i) = 0.5 * (s(i) + s(0) - omega(i - 1, i - 1));
    g(i, i) = s(i);
    for (Index j = i + 1; j <= d; ++j)
      g(i, j) = g(j, i) =
          omega(i - 1, j - 1) + 0.5 * (s(i) + s(j) - omega(i - 1, i - 1) - omega(j - 1, j - 1));
  }
  return g;
}

/// ω from a full Gram matrix: ω_ij = a_ij - a_i0 - a_j0 + a_00.
inline Matrix omega_from_gram(const Matrix& gram) {
  const Index d = gram.rows() - 1;
  Matrix omega(d, d);
  for (Index i = 1; i <= d; ++i)
    for (Index j = 1; j <= d; ++j)
      omega(i - 1, j - 1) = gram(i, j) - gram(i, 0) - gram(j, 0) + gram(0, 0);
  return omega;
}

/// The bordered matrix whose determinant cuts out realizable ω: the Gram
/// matrix of (p₀, v₁, …, v_d).
inline Matrix bordered_matrix(const Matrix& omega, const Vector& s) {
  detail::check_omega_shape(omega, s, "gram_coords");
  const Index d = omega.rows();
  Matrix b(d + 1, d + 1);
  b(0, 0) = s(0);
  for (Index i = 1; i <= d; ++i) b(i, 0) = b(0, i) = 0.5 * (s(i) - s(0) - omega(i - 1, i - 1));
  b.bottomRightCorner(d, d) = linalg::symmetrize(omega);
  return b;
}

inline double bordered_residual(const Matrix& omega, const Vector& s) {
  return linalg::determinant(bordered_matrix(omega, s));
}

/// Rebuild an edge-vector configuration from lattice Gram data. The result is
/// unique up to an orthogonal motion; the gauge puts v₁ on the first axis,
/// v₂ in the first coordinate plane, and so on.
inline FrameworkSpec realize_from_omega(const Matrix& omega, const Vector& s) {
  detail::check_omega_shape(omega, s, "gram_coords");
  const Index d = omega.rows();
  if ((s.array() <= 0.0).any())
    throw Error(Errc::zero_length_bar, "gram_coords", "squared lengths must be positive");

  const auto f = linalg::psd_factor(omega, d);
  if (!(f.min_kept > linalg::kRankTolerance * f.largest))
    throw Error(Errc::cone_violation, "gram_coords", "omega is not positive definite");

  const Matrix& gens = f.factor;  // columns are v₁..v_d
  Vector rhs(d);
  for (Index i = 0; i < d; ++i) rhs(i) = 0.5 * (s(i + 1) - s(0) - omega(i, i));
  const Vector p0 = gens.transpose().fullPivLu().solve(rhs);

  const double scale = s.maxCoeff();
  const double miss = p0.squaredNorm() - s(0);
  if (std::abs(miss) > kHypersurfaceTolerance * scale)
    throw Error(Errc::off_hypersurface, "gram_coords",
                "omega is not realizable with the given lengths (|p0|^2 - s0 = " +
                    std::to_string(miss) + ")");

  Matrix edges(d, d + 1);
  edges.col(0) = p0;
  for (Index i = 0; i < d; ++i) edges.col(i + 1) = p0 + gens.col(i);
  return FrameworkSpec::from_columns(linalg::gauge_fix(edges));
}

enum class RankClass {
  regular_rank_d,        // rank exactly d: a smooth point of det G = 0
  singular_below_d,      // rank < d: the singular locus
  full_rank,             // rank d+1: not the Gram matrix of d+1 vectors in R^d
};

inline const char* to_string(RankClass c) {
  switch (c) {
    case RankClass::regular_rank_d: return "regular-rank-d";
    case RankClass::singular_below_d: return "singular-rank-below-d";
    case RankClass::full_rank: return "full-rank";
  }
  return "unknown";
}

inline RankClass rank_singularity_check(const Matrix& gram) {
  const int d = static_cast<int>(gram.rows()) - 1;
  const int rank = linalg::numerical_rank(gram);
  if (rank > d) return RankClass::full_rank;
  return rank == d ? RankClass::regular_rank_d : RankClass::singular_below_d;
}

}  // namespace diamantine
