#pragma once

#include <diamantine/error.hpp>
#include <diamantine/linalg.hpp>

#include <cmath>
#include <span>
#include <utility>
#include <vector>

namespace diamantine {

inline constexpr double kDegeneracyTolerance = 1e-10;

/// Edge-vector configuration p₀..p_d of a diamantine framework in R^d.
///
/// The two vertex orbits sit at the origin O and at p₀; the d+1 edge orbits
/// are the segments O→pᵢ. Instances are immutable once built.
class FrameworkSpec {
 public:
  /// `edges` is d × (d+1), one edge vector per column.
  static FrameworkSpec from_columns(Matrix edges) {
    const Index d = edges.rows();
    if (d < 1 || edges.cols() != d + 1)
      throw Error(Errc::shape, "framework_core",
                  "expected d+1 edge vectors of dimension d, got " + std::to_string(edges.cols()) +
                      " vectors of dimension " + std::to_string(d));
    if (d < 2) throw Error(Errc::invalid_dimension, "framework_core", "dimension must be at least 2");
    if (!edges.allFinite()) throw Error(Errc::shape, "framework_core", "edge vectors must be finite");
    return FrameworkSpec(std::move(edges));
  }

  int dimension() const { return static_cast<int>(edges_.rows()); }
  const Matrix& edge_vectors() const { return edges_; }
  auto edge(Index i) const { return edges_.col(i); }
  const Vector& squared_lengths() const { return squared_; }

  /// Generators vᵢ = pᵢ - p₀ of the periodicity lattice, as columns.
  Matrix lattice_generators() const {
    const Index d = edges_.rows();
    Matrix gens(d, d);
    for (Index i = 0; i < d; ++i) gens.col(i) = edges_.col(i + 1) - edges_.col(0);
    return gens;
  }

  /// Length scale used for the degeneracy cut-off, with units of volume.
  double volume_scale() const {
    const double d = static_cast<double>(dimension());
    double log_prod = 0.0;
    for (Index i = 0; i < squared_.size(); ++i) log_prod += 0.5 * std::log(squared_(i));
    return std::exp(log_prod * d / (d + 1.0));
  }

  bool degenerate() const { return degenerate_; }

 private:
  explicit FrameworkSpec(Matrix edges) : edges_(std::move(edges)) {
    squared_ = edges_.colwise().squaredNorm().transpose();
    for (Index i = 0; i < squared_.size(); ++i)
      if (!(squared_(i) > 0.0))
        throw Error(Errc::zero_length_bar, "framework_core",
                    "edge vector p" + std::to_string(i) + " has zero length");
    const double v = linalg::determinant(lattice_generators());
    degenerate_ = std::abs(v) <= kDegeneracyTolerance * volume_scale();
  }

  Matrix edges_;
  Vector squared_;
  bool degenerate_ = false;
};

/// Oriented unit-cell volume det[v₁ … v_d].
inline double volume(const FrameworkSpec& spec) {
  return linalg::determinant(spec.lattice_generators());
}

inline FrameworkSpec make_from_vectors(std::span<const Vector> vectors) {
  if (vectors.empty()) throw Error(Errc::shape, "framework_core", "no edge vectors given");
  const Index d = static_cast<Index>(vectors.size()) - 1;
  Matrix edges(d, d + 1);
  for (Index i = 0; i <= d; ++i) {
    if (vectors[i].size() != d)
      throw Error(Errc::shape, "framework_core",
                  "edge vector p" + std::to_string(i) + " has dimension " +
                      std::to_string(vectors[i].size()) + ", expected " + std::to_string(d));
    edges.col(i) = vectors[i];
  }
  return FrameworkSpec::from_columns(std::move(edges));
}

inline FrameworkSpec make_from_vectors(std::initializer_list<Vector> vectors) {
  std::vector<Vector> v(vectors);
  return make_from_vectors(std::span<const Vector>(v));
}

/// Swap p₁ and p₂ when the volume is negative.
inline FrameworkSpec with_positive_orientation(const FrameworkSpec& spec) {
  if (volume(spec) >= 0.0) return spec;
  Matrix edges = spec.edge_vectors();
  edges.col(1).swap(edges.col(2));
  return FrameworkSpec::from_columns(std::move(edges));
}

/// Standard d-diamond: unit edge vectors with pairwise inner product -1/d,
/// obtained by factoring the target Gram matrix.
inline FrameworkSpec make_standard(int d) {
  if (d < 2) throw Error(Errc::invalid_dimension, "framework_core", "dimension must be at least 2");
  const Index n = d + 1;
  Matrix gram = Matrix::Constant(n, n, -1.0 / d);
  gram.diagonal().setOnes();
  const auto f = linalg::psd_factor(gram, d);
  return with_positive_orientation(FrameworkSpec::from_columns(linalg::gauge_fix(f.factor)));
}

struct PatchVertex {
  int orbit = 0;  // 0: translate of O, 1: translate of p₀
  std::vector<int> cell;
  Vector position;
};

struct PatchEdge {
  int tail = 0;   // index of an orbit-0 vertex
  int head = 0;   // index of an orbit-1 vertex
  int orbit = 0;  // which of O→p₀ … O→p_d this edge translates
};

struct Patch {
  std::vector<PatchVertex> vertices;
  std::vector<PatchEdge> edges;
};

/// Finite piece of the periodic framework: translates of O and p₀ by the
/// lattice multi-indices in [0, repetitions]^d, plus every translate of an
/// edge O→pᵢ whose two endpoints are both present.
inline Patch generate_patch(const FrameworkSpec& spec, int repetitions) {
  if (repetitions < 1)
    throw Error(Errc::invalid_argument, "framework_core", "repetitions must be at least 1");
  if (spec.degenerate())
    throw Error(Errc::degenerate_cell, "framework_core", "cannot tile a degenerate unit cell");

  const int d = spec.dimension();
  const int side = repetitions + 1;
  int per_orbit = 1;
  for (int i = 0; i < d; ++i) per_orbit *= side;

  const Matrix gens = spec.lattice_generators();
  auto linear = [&](const std::vector<int>& k) {
    int idx = 0;
    for (int i = 0; i < d; ++i) idx = idx * side + k[i];
    return idx;
  };

  Patch patch;
  patch.vertices.reserve(2 * per_orbit);
  std::vector<std::vector<int>> cells;
  cells.reserve(per_orbit);
  for (int idx = 0; idx < per_orbit; ++idx) {
    std::vector<int> k(d);
    int rest = idx;
    for (int i = d - 1; i >= 0; --i) {
      k[i] = rest % side;
      rest /= side;
    }
    cells.push_back(std::move(k));
  }
  for (int orbit = 0; orbit < 2; ++orbit) {
    for (const auto& k : cells) {
      Vector pos = orbit == 0 ? Vector::Zero(d) : Vector(spec.edge(0));
      for (int i = 0; i < d; ++i) pos += k[i] * gens.col(i);
      patch.vertices.push_back({orbit, k, std::move(pos)});
    }
  }

  for (int idx = 0; idx < per_orbit; ++idx) {
    const auto& k = cells[idx];
    patch.edges.push_back({idx, per_orbit + idx, 0});
    for (int i = 1; i <= d; ++i) {
      if (k[i - 1] + 1 > repetitions) continue;
      auto target = k;
      ++target[i - 1];
      patch.edges.push_back({idx, per_orbit + linear(target), i});
    }
  }
  return patch;
}

}  // namespace diamantine
