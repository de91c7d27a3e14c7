#include <diamantine/cayley2d.hpp>

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"

namespace {

using namespace diamantine;
using namespace diamantine::cayley2d;

const std::array<OmegaPoint2, 4> kNodes{{{0, 0, 0}, {4, 0, 0}, {0, 0, 4}, {4, 4, 4}}};

FrameworkSpec planar_from_angles(double a0, double a1, double a2) {
  auto unit = [](double deg) {
    const double t = deg * std::numbers::pi / 180.0;
    return Vector{{std::cos(t), std::sin(t)}};
  };
  return make_from_vectors({unit(a0), unit(a1), unit(a2)});
}

// Unit-length cubic as a Laplace determinant of the bordered lattice Gram
// matrix, border entries -ω_ii/2.
double cubic_oracle(double a, double b, double c) {
  const double x = -a / 2.0, y = -c / 2.0;
  Matrix m{{1.0, x, y}, {x, a, b}, {y, b, c}};
  return oracle::laplace_det(m);
}

double norm3(const std::array<double, 3>& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

TEST(FCayley, ClosedFormValues) {
  for (const auto& n : kNodes) EXPECT_EQ(f_cayley(n), 0.0);
  EXPECT_NEAR(f_cayley({3, 1.5, 3}), 0.0, 1e-15);
  EXPECT_NEAR(f_cayley(OmegaPoint2::from_matrix(omega_of(make_standard(2)))), 0.0, 1e-12);
  oracle::Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    const double a = rng.uniform(-2, 6), b = rng.uniform(-2, 6), c = rng.uniform(-2, 6);
    EXPECT_NEAR(f_cayley({a, b, c}), cubic_oracle(a, b, c), 1e-11);
  }
}

TEST(FCayley, VanishesOnRealizedUnitConfigurations) {
  oracle::Rng rng(7);
  for (int k = 0; k < 10000; ++k) {
    const auto spec = FrameworkSpec::from_columns(rng.unit_configuration(2));
    ASSERT_LT(std::abs(f_cayley(OmegaPoint2::from_matrix(omega_of(spec)))), 1e-9);
  }
}

TEST(FCayley, MatchesBorderedResidual) {
  oracle::Rng rng(11);
  for (int k = 0; k < 50; ++k) {
    const double a = rng.uniform(0, 4), b = rng.uniform(-1, 3), c = rng.uniform(0, 4);
    const Matrix w{{a, b}, {b, c}};
    EXPECT_NEAR(bordered_residual(w, Vector::Ones(3)), f_cayley({a, b, c}), 1e-12);
  }
}

TEST(GradF, VanishesAtNodesOnly) {
  for (const auto& n : kNodes) {
    const auto g = grad_f(n);
    EXPECT_EQ(g[0], 0.0);
    EXPECT_EQ(g[1], 0.0);
    EXPECT_EQ(g[2], 0.0);
  }
  EXPECT_GT(norm3(grad_f({3, 1.5, 3})), 0.1);
}

TEST(GradF, MatchesFiniteDifferences) {
  oracle::Rng rng(13);
  const double h = 1e-5;
  for (int k = 0; k < 1000; ++k) {
    const OmegaPoint2 w{rng.uniform(-1, 5), rng.uniform(-1, 5), rng.uniform(-1, 5)};
    const auto g = grad_f(w);
    EXPECT_NEAR(g[0], (f_cayley({w.w11 + h, w.w12, w.w22}) - f_cayley({w.w11 - h, w.w12, w.w22})) / (2 * h), 1e-6);
    EXPECT_NEAR(g[1], (f_cayley({w.w11, w.w12 + h, w.w22}) - f_cayley({w.w11, w.w12 - h, w.w22})) / (2 * h), 1e-6);
    EXPECT_NEAR(g[2], (f_cayley({w.w11, w.w12, w.w22 + h}) - f_cayley({w.w11, w.w12, w.w22 - h})) / (2 * h), 1e-6);
  }
}

// Grid search over [-1,5]³ for near-stationary points close to the cubic,
// each polished by Newton on grad f = 0. Every limit on the cubic must be a node.
TEST(GradF, GridSearchFindsNoFifthSingularity) {
  constexpr int n = 200;
  const double step = 6.0 / (n - 1);
  std::vector<bool> hit(kNodes.size(), false);
  int candidates = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        OmegaPoint2 w{-1 + i * step, -1 + j * step, -1 + k * step};
        if (std::abs(f_cayley(w)) > 0.1 || norm3(grad_f(w)) > 0.1) continue;
        ++candidates;
        for (int it = 0; it < 50; ++it) {
          const auto g = grad_f(w);
          const double a = w.w11, b = w.w12, c = w.w22;
          Matrix hess{{-0.5 * c, 0.5 * c, 0.5 * b - 0.5 * a - 0.5 * c + 1},
                      {0.5 * c, -2.0, 0.5 * a},
                      {0.5 * b - 0.5 * a - 0.5 * c + 1, 0.5 * a, -0.5 * a}};
          const Vector delta = hess.fullPivLu().solve(Vector{{g[0], g[1], g[2]}});
          w = {a - delta(0), b - delta(1), c - delta(2)};
        }
        ASSERT_LT(norm3(grad_f(w)), 1e-10);
        if (std::abs(f_cayley(w)) > 1e-9) continue;  // stationary but off the cubic
        bool known = false;
        for (std::size_t m = 0; m < kNodes.size(); ++m) {
          const double dist = std::abs(w.w11 - kNodes[m].w11) + std::abs(w.w12 - kNodes[m].w12) +
                              std::abs(w.w22 - kNodes[m].w22);
          if (dist < 1e-8) known = hit[m] = true;
        }
        EXPECT_TRUE(known) << w.w11 << " " << w.w12 << " " << w.w22;
      }
  EXPECT_GT(candidates, 0);
  for (bool h : hit) EXPECT_TRUE(h);
}

TEST(GQuartic, FactorsOnCoordinatePlane) {
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j) {
      const double a = -1 + 6.0 * i / 99, b = -1 + 6.0 * j / 99;
      EXPECT_NEAR(g_quartic({a, 0, b}), a * b * (a + b - 4) * (a + b - 2) / 8.0, 1e-9);
    }
  for (double t : {-3.0, 0.0, 0.5, 2.0, 7.0}) EXPECT_EQ(g_quartic({0, 0, t}), 0.0);
}

TEST(GQuartic, PositiveAtStandardImage) {
  // g = det of the normal; positive with negative trace means a definite normal.
  EXPECT_NEAR(g_quartic({3, 1.5, 3}), 1.6875, 1e-12);
  const Matrix n = hypersurface_normal(Matrix{{3, 1.5}, {1.5, 3}}, Vector::Ones(3));
  EXPECT_NEAR(n.determinant(), g_quartic({3, 1.5, 3}), 1e-12);
  EXPECT_LT(n.trace(), 0.0);
}

TEST(GQuartic, EqualsDeterminantOfNormal) {
  oracle::Rng rng(17);
  for (int k = 0; k < 200; ++k) {
    const auto spec = FrameworkSpec::from_columns(rng.unit_configuration(2));
    const Matrix w = omega_of(spec);
    EXPECT_NEAR(hypersurface_normal(w, Vector::Ones(3)).determinant(),
                g_quartic(OmegaPoint2::from_matrix(w)), 1e-10);
  }
}

TEST(HalfspaceTest, Examples) {
  EXPECT_EQ(auxetic_halfspace_test({3, 1.5, 3}), Capability::incapable);
  EXPECT_EQ(auxetic_halfspace_test({2, 0, 2}), Capability::boundary);
  const auto reentrant = planar_from_angles(270, 340, 200);
  EXPECT_EQ(auxetic_halfspace_test(OmegaPoint2::from_matrix(omega_of(reentrant))), Capability::capable);
}

TEST(HalfspaceTest, Errors) {
  try {
    auxetic_halfspace_test({1, 0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::off_hypersurface);
  }
  try {
    // Node (4,4,4) is on the cubic but only semidefinite.
    auxetic_halfspace_test({4, 4, 4});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::cone_violation);
  }
}

TEST(PointednessTest, Examples) {
  EXPECT_EQ(pointedness_test(make_standard(2)), Pointedness::not_pointed);
  EXPECT_EQ(pointedness_test(planar_from_angles(90, 0, 180)), Pointedness::boundary);
  EXPECT_EQ(pointedness_test(planar_from_angles(0, 60, 120)), Pointedness::pointed);
  EXPECT_EQ(pointedness_test(planar_from_angles(270, 340, 200)), Pointedness::pointed);
}

TEST(PointednessTest, RejectsNonUnitLengths) {
  try {
    pointedness_test(make_from_vectors({Vector{{2, 0}}, Vector{{0, 1}}, Vector{{-1, -1}}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unsupported_lengths);
  }
}

TEST(Concordance, ThreeAuxeticTestsAgree) {
  oracle::Rng rng(19);
  int checked = 0, capable = 0;
  while (checked < 1000) {
    const auto spec = FrameworkSpec::from_columns(rng.unit_configuration(2));
    const auto w = OmegaPoint2::from_matrix(omega_of(spec));
    if (std::abs(4.0 - (w.w11 - w.w12 + w.w22)) < 1e-6) continue;
    ++checked;
    const auto half = auxetic_halfspace_test(w);
    const auto pointed = pointedness_test(spec);
    const auto general = capability_test(spec).verdict;
    EXPECT_EQ(general, half);
    EXPECT_EQ(pointed == Pointedness::pointed, half == Capability::capable);
    capable += half == Capability::capable;
  }
  EXPECT_GT(capable, 100);
  EXPECT_LT(capable, 900);
}

void expect_components(const TopologyReport& r, int count, int chi) {
  ASSERT_EQ(static_cast<int>(r.components.size()), count);
  int positive = 0;
  for (const auto& c : r.components) {
    EXPECT_EQ(c.euler_characteristic, chi);
    positive += c.sign > 0;
  }
  EXPECT_EQ(positive, count / 2);
}

TEST(TopologyProbe, ClosedFormCases) {
  const auto cyl = topology_probe(Vector{{1, 2, 3}}, 512);
  expect_components(cyl, 2, 0);
  EXPECT_TRUE(cyl.saddle_present);
  for (const Vector& s : {Vector{{1, 1, 1}}, Vector{{1, 1, 2}}}) {
    const auto disc = topology_probe(s, 512);
    expect_components(disc, 2, 1);
    EXPECT_FALSE(disc.saddle_present);
  }
}

TEST(TopologyProbe, RandomTriplesTrackSaddle) {
  oracle::Rng rng(23);
  for (int k = 0; k < 20; ++k) {
    Vector s = rng.sorted_lengths(3, 0.2);
    if (k % 4 == 0) s(1) = s(0);  // tie: no saddle
    const bool saddle = s(0) < s(1);
    Vector shuffled = s;
    std::swap(shuffled(rng.integer(0, 2)), shuffled(rng.integer(0, 2)));
    const auto report = topology_probe(shuffled, 512);
    EXPECT_EQ(report.saddle_present, saddle) << s.transpose();
    expect_components(report, 2, saddle ? 0 : 1);
  }
}

TEST(TopologyProbe, RejectsCoarseGrid) {
  try {
    topology_probe(Vector{{1, 2, 3}}, 32);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_argument);
  }
}

}  // namespace
