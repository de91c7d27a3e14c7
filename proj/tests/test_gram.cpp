#include <diamantine/gram.hpp>

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

namespace {

using namespace diamantine;

const Matrix kStandardOmega{{3.0, 1.5}, {1.5, 3.0}};
const Vector kUnit3 = Vector::Ones(3);

TEST(GramOf, StandardPlanar) {
  const Matrix g = gram_of(make_standard(2));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(g(i, j), i == j ? 1.0 : -0.5, 1e-14);
  EXPECT_EQ(g, g.transpose());
}

TEST(GramOf, DuplicatedVectorGivesDuplicatedRow) {
  const auto spec = make_from_vectors({Vector{{1, 0}}, Vector{{0, 1}}, Vector{{1, 0}}});
  const Matrix g = gram_of(spec);
  EXPECT_EQ(g.row(0), g.row(2));
  EXPECT_EQ(linalg::numerical_rank(g), 2);
}

TEST(GramOf, SpectrumHasExactlyOneNullDirection) {
  oracle::Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = rng.integer(2, 6);
    const Vector ev = linalg::sym_eigenvalues(gram_of(FrameworkSpec::from_columns(rng.configuration(d))));
    const double largest = ev.maxCoeff();
    EXPECT_LT(std::abs(ev(0)), 1e-10 * largest);
    EXPECT_GT(ev(1), 1e-10 * largest);
  }
}

TEST(OmegaOf, StandardPlanarValue) {
  const Matrix w = omega_of(make_standard(2));
  EXPECT_TRUE(w.isApprox(kStandardOmega, 1e-14));
  EXPECT_NEAR(w.determinant(), 6.75, 1e-12);
  EXPECT_NEAR(6.75, std::pow(3.0 * std::sqrt(3.0) / 2.0, 2), 1e-12);
}

TEST(OmegaOf, MatchesInnerProductFormula) {
  oracle::Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = rng.integer(2, 5);
    const auto spec = FrameworkSpec::from_columns(rng.configuration(d));
    const Matrix g = gram_of(spec);
    const Matrix w = omega_of(spec);
    for (int i = 1; i <= d; ++i)
      for (int j = 1; j <= d; ++j)
        EXPECT_NEAR(w(i - 1, j - 1), g(i, j) - g(i, 0) - g(j, 0) + g(0, 0), 1e-12);
  }
}

TEST(OmegaOf, CollinearIsSingular) {
  const auto spec = make_from_vectors({Vector{{1, 0}}, Vector{{2, 0}}, Vector{{-1, 0}}});
  EXPECT_NEAR(omega_of(spec).determinant(), 0.0, 1e-14);
}

TEST(OmegaOf, DeterminantIsSquaredVolumeAndRotationInvariant) {
  oracle::Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = rng.integer(2, 6);
    const Matrix p = rng.configuration(d);
    const auto spec = FrameworkSpec::from_columns(p);
    const double v = volume(spec);
    EXPECT_NEAR(omega_of(spec).determinant(), v * v, 1e-9 * v * v);
    const Matrix rotated = omega_of(FrameworkSpec::from_columns(rng.orthogonal(d, true) * p));
    EXPECT_LT((rotated - omega_of(spec)).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, omega_of(spec).norm()));
  }
}

TEST(GramFromOmega, StandardPlanar) {
  const Matrix g = gram_from_omega(kStandardOmega, kUnit3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(g(i, j), i == j ? 1.0 : -0.5, 1e-15);
}

TEST(GramFromOmega, RoundTripIsExactIdentity) {
  oracle::Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = rng.integer(2, 6);
    const auto spec = FrameworkSpec::from_columns(rng.configuration(d));
    const Matrix g = gram_of(spec);
    EXPECT_LT((gram_from_omega(omega_of(spec), spec.squared_lengths()) - g).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((omega_from_gram(gram_from_omega(omega_of(spec), spec.squared_lengths())) - omega_of(spec))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
  }
}

TEST(GramFromOmega, ZeroOmegaCollapsesToRankOne) {
  const Matrix g = gram_from_omega(Matrix::Zero(2, 2), kUnit3);
  EXPECT_EQ(g, Matrix::Ones(3, 3));
  EXPECT_EQ(linalg::numerical_rank(g), 1);
}

TEST(GramFromOmega, ShapeMismatch) {
  try {
    gram_from_omega(Matrix::Zero(2, 2), Vector::Ones(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::shape);
  }
}

TEST(BorderedResidual, VanishesOnRealizedConfigurations) {
  oracle::Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = rng.integer(2, 6);
    const auto spec = FrameworkSpec::from_columns(rng.configuration(d));
    const double scale = spec.squared_lengths().prod();
    EXPECT_LT(std::abs(bordered_residual(omega_of(spec), spec.squared_lengths())), 1e-9 * std::max(1.0, scale));
  }
}

TEST(BorderedResidual, EqualsGramDeterminantUnderTheAffineMap) {
  // det G(p) and the bordered determinant differ by a unimodular change of basis.
  oracle::Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = rng.integer(2, 4);
    Matrix w(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) w(i, j) = w(j, i) = rng.uniform(-1.0, 3.0);
    Vector s(d + 1);
    for (int i = 0; i <= d; ++i) s(i) = rng.uniform(0.5, 2.0);
    EXPECT_NEAR(bordered_residual(w, s), oracle::laplace_det(gram_from_omega(w, s)), 1e-10);
  }
}

TEST(BorderedResidual, PlanarUnitCaseIsTheCubic) {
  oracle::Rng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = rng.uniform(-1, 5), b = rng.uniform(-1, 5), c = rng.uniform(-1, 5);
    const double cubic = 0.25 * a * c * (2 * b - a - c) + a * c - b * b;
    EXPECT_NEAR(bordered_residual(Matrix{{a, b}, {b, c}}, kUnit3), cubic, 1e-10);
  }
}

TEST(BorderedResidual, PerturbationLeavesTheHypersurface) {
  Matrix w = kStandardOmega;
  w(0, 0) += 0.1;
  const double r = bordered_residual(w, kUnit3);
  // Direct evaluation of the cubic at (3.1, 1.5, 3).
  EXPECT_NEAR(r, 0.25 * 3.1 * 3 * (3 - 3.1 - 3) + 3.1 * 3 - 2.25, 1e-12);
  EXPECT_GT(std::abs(r), 0.1);
}

TEST(RealizeFromOmega, StandardPlanarIsCongruentToStandard) {
  const auto realized = realize_from_omega(kStandardOmega, kUnit3);
  const auto standard = make_standard(2);
  EXPECT_LT((gram_of(realized) - gram_of(standard)).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT(oracle::aligned_distance(realized.edge_vectors(), standard.edge_vectors()), 1e-9);
}

TEST(RealizeFromOmega, RoundTripOnRandomSpecs) {
  oracle::Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = rng.integer(2, 6);
    const auto spec = FrameworkSpec::from_columns(rng.configuration(d));
    const auto realized = realize_from_omega(omega_of(spec), spec.squared_lengths());
    EXPECT_LT((omega_of(realized) - omega_of(spec)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((gram_of(realized) - gram_from_omega(omega_of(spec), spec.squared_lengths())).cwiseAbs().maxCoeff(),
              1e-9);
    EXPECT_LT(oracle::aligned_distance(realized.edge_vectors(), spec.edge_vectors()), 1e-9);
  }
}

TEST(RealizeFromOmega, GaugeIsUpperTriangularWithPositiveDiagonal) {
  oracle::Rng rng(29);
  const int d = 4;
  const auto spec = FrameworkSpec::from_columns(rng.configuration(d));
  const Matrix gens = realize_from_omega(omega_of(spec), spec.squared_lengths()).lattice_generators();
  for (int i = 0; i < d; ++i) {
    EXPECT_GT(gens(i, i), 0.0);
    for (int j = 0; j < i; ++j) EXPECT_NEAR(gens(i, j), 0.0, 1e-12);
  }
}

TEST(RealizeFromOmega, Errors) {
  try {
    realize_from_omega(Matrix::Identity(2, 2), kUnit3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::off_hypersurface);
  }
  try {
    realize_from_omega(Matrix{{1.0, 2.0}, {2.0, 1.0}}, kUnit3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::cone_violation);
  }
  EXPECT_NEAR(bordered_residual(Matrix::Identity(2, 2), kUnit3), 0.25 * (2 * 0 - 2) + 1, 1e-15);
}

TEST(RankSingularityCheck, Classifications) {
  EXPECT_EQ(rank_singularity_check(gram_of(make_standard(2))), RankClass::regular_rank_d);
  EXPECT_EQ(rank_singularity_check(Matrix::Ones(3, 3)), RankClass::singular_below_d);
  // p = (1,0), (2,0), (-1,0): G = x xᵀ with x = (1, 2, -1), eigenvalues {0, 0, 6}.
  const Matrix collinear = gram_of(make_from_vectors({Vector{{1, 0}}, Vector{{2, 0}}, Vector{{-1, 0}}}));
  const Vector ev = linalg::sym_eigenvalues(collinear);
  EXPECT_NEAR(ev(2), 6.0, 1e-12);
  EXPECT_NEAR(ev(1), 0.0, 1e-12);
  EXPECT_EQ(rank_singularity_check(collinear), RankClass::singular_below_d);
  EXPECT_EQ(rank_singularity_check(Matrix::Identity(3, 3)), RankClass::full_rank);
}

}  // namespace
