#pragma once

#include <diamantine/error.hpp>
#include <diamantine/framework.hpp>
#include <diamantine/gram.hpp>
#include <diamantine/linalg.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace diamantine {

// Squared lengths closer than this (relative) are treated as one value.
inline constexpr double kTieTolerance = 1e-12;
// Bisection stops once the bracket is narrower than this times max(s).
inline constexpr double kRootTolerance = 1e-13;
// A configuration counts as critical below this Lagrange residual.
inline constexpr double kCriticalResidual = 1e-6;

enum class RootKind {
  negative_extremum,
  positive_saddle_candidate,
  positive_nonrealizable,
  multiple_root,
};

inline const char* to_string(RootKind k) {
  switch (k) {
    case RootKind::negative_extremum: return "negative-extremum";
    case RootKind::positive_saddle_candidate: return "positive-saddle-candidate";
    case RootKind::positive_nonrealizable: return "positive-nonrealizable";
    case RootKind::multiple_root: return "multiple-root";
  }
  return "unknown";
}

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

/// A root α of det(diag(s) + α(𝟙𝟙ᵀ - I)) = 0. `multiplicity` is the algebraic
/// multiplicity; roots pinned at a repeated squared length have kind
/// multiple_root and a degenerate bracket [sᵢ, sᵢ].
struct CriticalAlpha {
  double value = 0.0;
  RootKind kind = RootKind::positive_nonrealizable;
  Bracket bracket;
  int multiplicity = 1;
};

/// det of the matrix with diagonal s and all off-diagonal entries α, in the
/// pole-free expansion ∏(sᵢ-α) + α Σᵢ ∏_{j≠i}(sⱼ-α).
inline double charpoly_eval(double alpha, const Vector& s) {
  const Index n = s.size();
  double all = 1.0;
  for (Index i = 0; i < n; ++i) all *= s(i) - alpha;
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    double partial = 1.0;
    for (Index j = 0; j < n; ++j)
      if (j != i) partial *= s(j) - alpha;
    sum += partial;
  }
  return all + alpha * sum;
}

namespace detail {

struct TieGroup {
  double value;
  int count;
};

inline std::vector<TieGroup> group_ties(const Vector& s) {
  std::vector<TieGroup> groups;
  const double scale = s.maxCoeff();
  Index i = 0;
  while (i < s.size()) {
    Index j = i;
    double sum = 0.0;
    while (j < s.size() && s(j) - s(i) <= kTieTolerance * scale) sum += s(j++);
    groups.push_back({sum / static_cast<double>(j - i), static_cast<int>(j - i)});
    i = j;
  }
  return groups;
}

// Secular function 1 + α Σ m_k / (u_k - α): strictly increasing between
// poles, its zeros are the roots not pinned at repeated lengths.
inline double secular(double alpha, const std::vector<TieGroup>& groups) {
  double sum = 0.0;
  for (const auto& g : groups) sum += g.count / (g.value - alpha);
  return 1.0 + alpha * sum;
}

inline double bisect(double lo, double hi, const std::vector<TieGroup>& groups, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (secular(mid, groups) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

inline void check_sorted_lengths(const Vector& s, const char* module) {
  if (s.size() < 3) throw Error(Errc::shape, module, "need at least three squared lengths");
  for (Index i = 0; i < s.size(); ++i) {
    if (!(s(i) > 0.0) || !std::isfinite(s(i)))
      throw Error(Errc::invalid_argument, module, "squared lengths must be positive");
    if (i > 0 && s(i) < s(i - 1))
      throw Error(Errc::invalid_argument, module, "squared lengths must be sorted ascending");
  }
}

/// All real roots of the critical-value equation for sorted positive s, in
/// ascending order.
inline std::vector<CriticalAlpha> find_critical_alphas(const Vector& s) {
  check_sorted_lengths(s, "critical_volume");
  const auto groups = detail::group_ties(s);
  const double scale = s.maxCoeff();
  const double tol = kRootTolerance * scale;

  std::vector<CriticalAlpha> roots;

  double lo = -scale;
  while (detail::secular(lo, groups) >= 0.0) lo *= 2.0;
  roots.push_back({detail::bisect(lo, 0.0, groups, tol), RootKind::negative_extremum, {lo, 0.0}, 1});

  std::vector<CriticalAlpha> positive;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    if (groups[k].count > 1)
      positive.push_back({groups[k].value, RootKind::multiple_root,
                          {groups[k].value, groups[k].value}, groups[k].count - 1});
    if (k + 1 < groups.size()) {
      const double a = groups[k].value;
      const double b = groups[k + 1].value;
      positive.push_back(
          {detail::bisect(a, b, groups, tol), RootKind::positive_nonrealizable, {a, b}, 1});
    }
  }
  // Only the smallest positive root can be realized, and only when simple.
  if (!positive.empty() && positive.front().kind != RootKind::multiple_root)
    positive.front().kind = RootKind::positive_saddle_candidate;

  roots.insert(roots.end(), positive.begin(), positive.end());
  return roots;
}

/// Gram matrix with diagonal s and constant off-diagonal α.
inline Matrix equal_angle_gram(double alpha, const Vector& s) {
  const Index n = s.size();
  Matrix g = Matrix::Constant(n, n, alpha);
  g.diagonal() = s;
  return g;
}

/// Configuration with all pairwise inner products equal to α. The result is
/// oriented with V > 0; its mirror image is the other critical point with
/// the same Gram matrix.
inline FrameworkSpec realize_critical(const CriticalAlpha& alpha, const Vector& s) {
  if (alpha.kind != RootKind::negative_extremum && alpha.kind != RootKind::positive_saddle_candidate)
    throw Error(Errc::realization, "critical_volume",
                std::string("root of kind ") + to_string(alpha.kind) + " has no realization");
  const Index d = s.size() - 1;
  const auto f = linalg::psd_factor(equal_angle_gram(alpha.value, s), d);
  const double tol = 1e-9 * f.largest;
  if (f.min_kept <= tol || std::abs(f.max_dropped) > tol)
    throw Error(Errc::realization, "critical_volume",
                "Gram matrix at alpha = " + std::to_string(alpha.value) +
                    " is not positive semidefinite of rank d");
  return FrameworkSpec::from_columns(linalg::gauge_fix(f.factor));
}

/// ∂V/∂pᵢ as the columns of a d × (d+1) matrix, from the signed cofactors of
/// the (d+1) × (d+1) matrix with a row of ones over the columns pᵢ.
inline Matrix volume_gradient(const FrameworkSpec& spec) {
  const Index d = spec.dimension();
  Matrix m(d + 1, d + 1);
  m.row(0).setOnes();
  m.bottomRows(d) = spec.edge_vectors();
  const Matrix cof = linalg::cofactor_matrix(m);
  return cof.bottomRows(d);
}

/// Largest relative tangential component of ∂V/∂pᵢ; zero at critical points.
inline double lagrange_residual(const FrameworkSpec& spec) {
  const Matrix grad = volume_gradient(spec);
  const Vector& s = spec.squared_lengths();
  double worst = 0.0;
  for (Index i = 0; i < grad.cols(); ++i) {
    const double norm = grad.col(i).norm();
    if (norm == 0.0) continue;
    const Vector tangential = grad.col(i) - (grad.col(i).dot(spec.edge(i)) / s(i)) * spec.edge(i);
    worst = std::max(worst, tangential.norm() / norm);
  }
  return worst;
}

struct LagrangeMultipliers {
  Vector lambda;
  double residual = 0.0;
  bool critical = false;  // false: the multipliers are only projections
};

inline LagrangeMultipliers lagrange_multipliers(const FrameworkSpec& spec) {
  const Matrix grad = volume_gradient(spec);
  const Vector& s = spec.squared_lengths();
  LagrangeMultipliers out;
  out.lambda.resize(s.size());
  for (Index i = 0; i < s.size(); ++i) out.lambda(i) = grad.col(i).dot(spec.edge(i)) / s(i);
  out.residual = lagrange_residual(spec);
  out.critical = out.residual < kCriticalResidual;
  return out;
}

/// Splitting pᵢ = μ p₀ + qᵢ at a saddle, with qᵢ ⟂ p₀ (columns of `q`).
struct DescentConfig {
  double alpha = 0.0;
  double mu = 0.0;
  Matrix q;
};

inline DescentConfig descent_config(const FrameworkSpec& spec) {
  const Matrix g = gram_of(spec);
  const Vector& s = spec.squared_lengths();
  const Index n = s.size();
  const double scale = s.maxCoeff();

  double alpha = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) alpha += g(i, j);
  alpha /= static_cast<double>(n * (n - 1) / 2);

  bool equal = true;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) equal = equal && std::abs(g(i, j) - alpha) <= 1e-9 * scale;
  if (!equal || !(s(0) < s(1) * (1.0 - kTieTolerance)) || !(alpha > s(0)))
    throw Error(Errc::saddle_required, "critical_volume",
                "descent configuration needs a saddle realized from a simple smallest positive root "
                "with s0 < s1");

  DescentConfig out;
  out.alpha = alpha;
  out.mu = alpha / s(0);
  const Index d = spec.dimension();
  out.q.resize(d, d);
  for (Index i = 1; i <= d; ++i) out.q.col(i - 1) = spec.edge(i) - out.mu * spec.edge(0);

  const Matrix qq = out.q.transpose() * out.q;
  const double expected = alpha * (1.0 - alpha / s(0));
  for (Index i = 0; i < d; ++i) {
    if (std::abs(out.q.col(i).dot(spec.edge(0))) > 1e-9 * scale ||
        !(qq(i, i) > 0.0) ||
        std::abs(qq(i, i) - (s(i + 1) - alpha * alpha / s(0))) > 1e-9 * scale)
      throw Error(Errc::numerical, "critical_volume", "descent splitting failed its identities");
    for (Index j = i + 1; j < d; ++j)
      if (std::abs(qq(i, j) - expected) > 1e-9 * scale)
        throw Error(Errc::numerical, "critical_volume", "descent splitting failed its identities");
  }
  return out;
}

/// Everything known about the critical points of V for squared lengths s.
struct CriticalityReport {
  std::vector<CriticalAlpha> roots;
  FrameworkSpec max_config;
  double max_volume = 0.0;
  LagrangeMultipliers max_multipliers;
  std::optional<FrameworkSpec> saddle_config;
  std::optional<LagrangeMultipliers> saddle_multipliers;
};

inline CriticalityReport criticality_report(const Vector& s) {
  auto roots = find_critical_alphas(s);
  FrameworkSpec max_config = realize_critical(roots.front(), s);
  CriticalityReport report{roots, max_config, std::abs(volume(max_config)),
                           lagrange_multipliers(max_config), std::nullopt, std::nullopt};
  for (const auto& r : roots)
    if (r.kind == RootKind::positive_saddle_candidate) {
      report.saddle_config = realize_critical(r, s);
      report.saddle_multipliers = lagrange_multipliers(*report.saddle_config);
    }
  return report;
}

}  // namespace diamantine
