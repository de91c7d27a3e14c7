#pragma once

#include <diamantine/auxetic.hpp>
#include <diamantine/critical.hpp>
#include <diamantine/error.hpp>
#include <diamantine/framework.hpp>
#include <diamantine/gram.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

// Closed forms for planar frameworks with unit edge lengths. In these
// coordinates the realizability hypersurface is a Cayley nodal cubic.
namespace diamantine::cayley2d {

inline constexpr double kCubicTolerance = 1e-8;
inline constexpr double kBoundaryTolerance = 1e-9;

struct OmegaPoint2 {
  double w11 = 0.0;
  double w12 = 0.0;
  double w22 = 0.0;

  static OmegaPoint2 from_matrix(const Matrix& omega) {
    if (omega.rows() != 2 || omega.cols() != 2)
      throw Error(Errc::shape, "cayley2d", "expected a 2x2 omega");
    return {omega(0, 0), 0.5 * (omega(0, 1) + omega(1, 0)), omega(1, 1)};
  }
  Matrix matrix() const { return Matrix{{w11, w12}, {w12, w22}}; }
  bool positive_definite() const { return w11 + w22 > 0.0 && w11 * w22 - w12 * w12 > 0.0; }
};

inline double f_cayley(const OmegaPoint2& w) {
  return 0.25 * w.w11 * w.w22 * (2.0 * w.w12 - w.w11 - w.w22) + w.w11 * w.w22 - w.w12 * w.w12;
}

inline std::array<double, 3> grad_f(const OmegaPoint2& w) {
  return {w.w22 * (0.5 * w.w12 - 0.5 * w.w11 - 0.25 * w.w22 + 1.0),
          0.5 * w.w11 * w.w22 - 2.0 * w.w12,
          w.w11 * (0.5 * w.w12 - 0.5 * w.w22 - 0.25 * w.w11 + 1.0)};
}

/// Boundary of the auxetic-capable region: the determinant of the trace-metric
/// normal, i.e. of grad_f with its middle coordinate halved.
inline double g_quartic(const OmegaPoint2& w) {
  const double a = 0.5 * w.w12 - 0.5 * w.w11 - 0.25 * w.w22 + 1.0;
  const double b = 0.5 * w.w12 - 0.5 * w.w22 - 0.25 * w.w11 + 1.0;
  const double c = 0.25 * w.w11 * w.w22 - w.w12;
  return w.w11 * w.w22 * a * b - c * c;
}

/// Auxetic capability from ω₁₁ - ω₁₂ + ω₂₂ < 4.
inline Capability auxetic_halfspace_test(const OmegaPoint2& w) {
  const double scale = std::max({1.0, std::abs(w.w11), std::abs(w.w12), std::abs(w.w22)});
  if (std::abs(f_cayley(w)) > kCubicTolerance * scale * scale * scale)
    throw Error(Errc::off_hypersurface, "cayley2d", "point is not on the unit-length cubic");
  if (!w.positive_definite())
    throw Error(Errc::cone_violation, "cayley2d", "omega is not positive definite");
  const double value = w.w11 - w.w12 + w.w22;
  if (value < 4.0 - kBoundaryTolerance) return Capability::capable;
  if (value > 4.0 + kBoundaryTolerance) return Capability::incapable;
  return Capability::boundary;
}

enum class Pointedness { pointed, boundary, not_pointed };

inline const char* to_string(Pointedness p) {
  switch (p) {
    case Pointedness::pointed: return "pointed";
    case Pointedness::boundary: return "boundary";
    case Pointedness::not_pointed: return "not-pointed";
  }
  return "unknown";
}

inline bool has_unit_lengths(const FrameworkSpec& spec) {
  return spec.dimension() == 2 &&
         (spec.squared_lengths().array() - 1.0).abs().maxCoeff() <= kTieTolerance;
}

/// Pointed iff -1 < ⟨p₀,p₁⟩ + ⟨p₁,p₂⟩ + ⟨p₂,p₀⟩ (all three edge vectors in
/// an open half-plane through the vertex).
inline Pointedness pointedness_test(const FrameworkSpec& spec) {
  if (!has_unit_lengths(spec))
    throw Error(Errc::unsupported_lengths, "cayley2d",
                "pointedness criterion applies to planar unit-length frameworks only");
  const auto& p = spec.edge_vectors();
  const double sum = p.col(0).dot(p.col(1)) + p.col(1).dot(p.col(2)) + p.col(2).dot(p.col(0));
  if (sum > -1.0 + kBoundaryTolerance) return Pointedness::pointed;
  if (sum < -1.0 - kBoundaryTolerance) return Pointedness::not_pointed;
  return Pointedness::boundary;
}

struct TopologyComponent {
  int cells = 0;
  int euler_characteristic = 0;
  int sign = 0;  // orientation of the unit cell throughout the component
};

struct TopologyReport {
  int grid = 0;
  std::vector<TopologyComponent> components;
  bool saddle_present = false;
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

}  // namespace detail

/// Sample the torus of angles (φ₀, φ₁) of p₀ and p₁ (p₂ fixed on the first
/// axis), drop grid cells that meet the collinear locus V = 0, and count the
/// pieces left over. Each piece's Euler characteristic comes from its cubical
/// complex: cells as vertices, 4-adjacent pairs as edges, full 2×2 blocks as
/// faces.
inline TopologyReport topology_probe(const Vector& s, int grid) {
  if (s.size() != 3) throw Error(Errc::shape, "cayley2d", "topology probe needs three squared lengths");
  if (grid < 64) throw Error(Errc::invalid_argument, "cayley2d", "grid must be at least 64");
  if ((s.array() <= 0.0).any())
    throw Error(Errc::invalid_argument, "cayley2d", "squared lengths must be positive");

  const Vector r = s.cwiseSqrt();
  const double zero = 1e-12 * (r(0) * r(1) + r(1) * r(2) + r(0) * r(2));
  const int n = grid;
  std::vector<double> cos_t(n), sin_t(n);
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n;
    cos_t[k] = std::cos(t);
    sin_t[k] = std::sin(t);
  }

  // node_sign[i*n + j]: sign of V at (φ₀, φ₁) = (θ_i, θ_j).
  std::vector<int> node_sign(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double x0 = r(0) * cos_t[i], y0 = r(0) * sin_t[i];
    for (int j = 0; j < n; ++j) {
      const double x1 = r(1) * cos_t[j] - x0, y1 = r(1) * sin_t[j] - y0;
      const double x2 = r(2) - x0, y2 = -y0;
      const double v = x1 * y2 - y1 * x2;
      node_sign[i * n + j] = std::abs(v) <= zero ? 0 : (v > 0.0 ? 1 : -1);
    }
  }

  auto wrap = [n](int k) { return (k + n) % n; };
  std::vector<int> cell_sign(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int a = node_sign[i * n + j];
      if (a != 0 && node_sign[wrap(i + 1) * n + j] == a && node_sign[i * n + wrap(j + 1)] == a &&
          node_sign[wrap(i + 1) * n + wrap(j + 1)] == a)
        cell_sign[i * n + j] = a;
    }

  detail::UnionFind uf(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int c = cell_sign[i * n + j];
      if (c == 0) continue;
      if (cell_sign[wrap(i + 1) * n + j] == c) uf.unite(i * n + j, wrap(i + 1) * n + j);
      if (cell_sign[i * n + wrap(j + 1)] == c) uf.unite(i * n + j, i * n + wrap(j + 1));
    }

  std::vector<int> label(static_cast<std::size_t>(n) * n, -1);
  TopologyReport report;
  report.grid = grid;
  for (int idx = 0; idx < n * n; ++idx) {
    if (cell_sign[idx] == 0) continue;
    const int root = uf.find(idx);
    if (label[root] < 0) {
      label[root] = static_cast<int>(report.components.size());
      report.components.push_back({0, 0, cell_sign[idx]});
    }
    label[idx] = label[root];
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int c = label[i * n + j];
      if (c < 0) continue;
      auto& comp = report.components[c];
      ++comp.cells;
      ++comp.euler_characteristic;
      const int right = label[wrap(i + 1) * n + j];
      const int up = label[i * n + wrap(j + 1)];
      if (right == c) --comp.euler_characteristic;
      if (up == c) --comp.euler_characteristic;
      if (right == c && up == c && label[wrap(i + 1) * n + wrap(j + 1)] == c)
        ++comp.euler_characteristic;
    }

  Vector sorted = s;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& root : find_critical_alphas(sorted))
    if (root.kind == RootKind::positive_saddle_candidate) report.saddle_present = true;
  return report;
}

}  // namespace diamantine::cayley2d
