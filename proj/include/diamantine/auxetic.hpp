#pragma once

#include <diamantine/error.hpp>
#include <diamantine/framework.hpp>
#include <diamantine/gram.hpp>
#include <diamantine/linalg.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace diamantine {

// Eigenvalues of ω̇ down to -kDirectionTolerance·max(1, ‖ω̇‖) still count as PSD.
inline constexpr double kDirectionTolerance = 1e-10;
// Normal eigenvalues within kNormalTolerance·‖N‖ of zero mark the boundary.
inline constexpr double kNormalTolerance = 1e-9;
// Consecutive ω-increments may dip to -kIncrementTolerance·h.
inline constexpr double kIncrementTolerance = 1e-8;

/// Infinitesimal deformation: per-vertex velocities ṗᵢ (columns, ⟨pᵢ,ṗᵢ⟩ = 0)
/// and the induced velocity ω̇ of the lattice Gram matrix.
struct TangentVector {
  Matrix velocity;
  Matrix omega_dot;
};

/// ω̇_ij = ⟨ṗᵢ - ṗ₀, vⱼ⟩ + ⟨vᵢ, ṗⱼ - ṗ₀⟩.
inline Matrix omega_velocity(const FrameworkSpec& spec, const Matrix& velocity) {
  const Index d = spec.dimension();
  Matrix dv(d, d);
  for (Index i = 0; i < d; ++i) dv.col(i) = velocity.col(i + 1) - velocity.col(0);
  const Matrix gens = spec.lattice_generators();
  return dv.transpose() * gens + gens.transpose() * dv;
}

/// Orthonormal basis (in the flat metric on velocity fields) of the tangent
/// space of the deformation space at `spec`: sphere-tangent velocity fields
/// orthogonal to every infinitesimal rotation ṗᵢ = A pᵢ.
inline std::vector<TangentVector> tangent_basis(const FrameworkSpec& spec) {
  if (spec.degenerate())
    throw Error(Errc::degenerate_cell, "auxetic", "tangent space needs a non-degenerate cell");
  const Index d = spec.dimension();
  const Index n = d + 1;
  const Index dof = d * n;
  const Index rotations = d * (d - 1) / 2;

  Matrix blocked(dof, n + rotations);
  blocked.setZero();
  for (Index i = 0; i < n; ++i) blocked.block(i * d, i, d, 1) = spec.edge(i);
  Index col = n;
  for (Index a = 0; a < d; ++a)
    for (Index b = a + 1; b < d; ++b, ++col) {
      Matrix skew = Matrix::Zero(d, d);
      skew(a, b) = 1.0;
      skew(b, a) = -1.0;
      for (Index i = 0; i < n; ++i) blocked.block(i * d, col, d, 1) = skew * spec.edge(i);
    }

  Eigen::JacobiSVD<Matrix> svd(blocked, Eigen::ComputeFullU);
  const Vector& sv = svd.singularValues();
  const Index rank = (sv.array() > 1e-10 * sv(0)).count();
  if (rank != n + rotations)
    throw Error(Errc::numerical, "auxetic", "rotation and sphere constraints are dependent");

  std::vector<TangentVector> basis;
  const Matrix& u = svd.matrixU();
  for (Index c = rank; c < dof; ++c) {
    Matrix velocity = Eigen::Map<const Matrix>(u.col(c).data(), d, n);
    Matrix w = omega_velocity(spec, velocity);
    basis.push_back({std::move(velocity), std::move(w)});
  }
  return basis;
}

inline bool is_trivial_direction(const TangentVector& t) {
  return t.omega_dot.norm() <= kDirectionTolerance * std::max(1.0, t.velocity.norm());
}

/// True when ω̇ lies in the positive semidefinite cone.
inline bool is_auxetic_direction(const TangentVector& t) {
  const double tol = kDirectionTolerance * std::max(1.0, t.omega_dot.norm());
  return linalg::lambda_min(t.omega_dot) >= -tol;
}

/// Normal to the realizability hypersurface at ω under the trace inner
/// product: the ω-gradient of the bordered determinant with off-diagonal
/// partials halved, so that tr(N ω̇) is the directional derivative.
inline Matrix hypersurface_normal(const Matrix& omega, const Vector& s) {
  const Matrix cof = linalg::cofactor_matrix(bordered_matrix(omega, s));
  const Index d = omega.rows();
  Matrix normal(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      normal(i, j) = (i == j) ? cof(i + 1, i + 1) - cof(0, i + 1) : cof(i + 1, j + 1);
  return normal;
}

enum class Capability { capable, boundary, incapable };

inline const char* to_string(Capability c) {
  switch (c) {
    case Capability::capable: return "capable";
    case Capability::boundary: return "boundary";
    case Capability::incapable: return "incapable";
  }
  return "unknown";
}

struct CapabilityVerdict {
  Capability verdict = Capability::incapable;
  Matrix normal;
  Vector normal_eigenvalues;
  /// Present for capable verdicts: a unit tangent whose ω̇ is PSD.
  std::optional<TangentVector> certificate;
  /// Least eigenvalue of the certificate's ω̇.
  double margin = 0.0;
};

inline Capability classify_normal(const Vector& eigenvalues) {
  const double scale = eigenvalues.cwiseAbs().maxCoeff();
  if (scale == 0.0) return Capability::boundary;
  const double tol = kNormalTolerance * scale;
  const bool positive = eigenvalues.maxCoeff() > tol;
  const bool negative = eigenvalues.minCoeff() < -tol;
  if (positive && negative) return Capability::capable;
  if ((eigenvalues.array().abs() <= tol).any()) return Capability::boundary;
  return Capability::incapable;
}

namespace detail {

inline Matrix combine(const std::vector<TangentVector>& basis, const Vector& c, bool velocity) {
  Matrix out = Matrix::Zero(velocity ? basis[0].velocity.rows() : basis[0].omega_dot.rows(),
                            velocity ? basis[0].velocity.cols() : basis[0].omega_dot.cols());
  for (std::size_t k = 0; k < basis.size(); ++k)
    out += c(static_cast<Index>(k)) * (velocity ? basis[k].velocity : basis[k].omega_dot);
  return out;
}

inline Matrix omega_dot_map(const std::vector<TangentVector>& basis) {
  const Index q = linalg::sym_vec(basis[0].omega_dot).size();
  Matrix map(q, static_cast<Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k)
    map.col(static_cast<Index>(k)) = linalg::sym_vec(basis[k].omega_dot);
  return map;
}

inline double margin_of(const std::vector<TangentVector>& basis, const Vector& c) {
  return linalg::lambda_min(combine(basis, c.normalized(), false));
}

// PSD matrix X with tr(N X) = 0, built from the eigenvectors of an indefinite
// N with weights n₋/ν on positive and n₊/|ν| on negative eigenvalues.
inline Matrix balanced_psd(const Matrix& normal) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(linalg::symmetrize(normal));
  const Vector& nu = es.eigenvalues();
  const double tol = kNormalTolerance * nu.cwiseAbs().maxCoeff();
  const double n_pos = static_cast<double>((nu.array() > tol).count());
  const double n_neg = static_cast<double>((nu.array() < -tol).count());
  Matrix x = Matrix::Zero(normal.rows(), normal.cols());
  for (Index k = 0; k < nu.size(); ++k) {
    const auto e = es.eigenvectors().col(k);
    if (nu(k) > tol)
      x += (n_neg / nu(k)) * e * e.transpose();
    else if (nu(k) < -tol)
      x += (n_pos / -nu(k)) * e * e.transpose();
    else
      x += e * e.transpose();
  }
  return x;
}

struct MarginResult {
  Vector coeffs;
  double margin = -std::numeric_limits<double>::infinity();
};

// Maximise λ_min(ω̇) over unit tangents: dense sampling of the coefficient
// sphere, then compass-search refinement from the best sample.
inline MarginResult max_margin(const std::vector<TangentVector>& basis,
                               const std::vector<Vector>& seeds, std::uint64_t rng_seed) {
  const Index m = static_cast<Index>(basis.size());
  MarginResult best;
  auto consider = [&](const Vector& c) {
    if (!(c.norm() > 0.0)) return;
    const double value = margin_of(basis, c);
    if (value > best.margin) best = {c.normalized(), value};
  };
  for (const auto& c : seeds) consider(c);
  if (m == 2) {
    for (int k = 0; k < 720; ++k) {
      const double theta = k * std::numbers::pi / 360.0;
      consider(Vector{{std::cos(theta), std::sin(theta)}});
    }
  } else {
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> gauss;
    for (Index k = 0; k < 256 * m; ++k) {
      Vector c(m);
      for (Index i = 0; i < m; ++i) c(i) = gauss(rng);
      consider(c);
    }
  }

  double step = 0.25;
  int iterations = 0;
  while (step > 1e-12 && iterations++ < 20000) {
    bool improved = false;
    for (Index i = 0; i < m && !improved; ++i)
      for (double sign : {1.0, -1.0}) {
        Vector trial = best.coeffs;
        trial(i) += sign * step;
        const double value = margin_of(basis, trial);
        if (value > best.margin) {
          best = {trial.normalized(), value};
          improved = true;
          break;
        }
      }
    if (!improved) step *= 0.5;
  }
  return best;
}

inline std::optional<Vector> project_to_basis(const std::vector<TangentVector>& basis,
                                              const Matrix& velocity) {
  if (velocity.size() == 0) return std::nullopt;
  Vector c(static_cast<Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k)
    c(static_cast<Index>(k)) = (basis[k].velocity.array() * velocity.array()).sum();
  return c;
}

inline CapabilityVerdict capability_impl(const FrameworkSpec& spec,
                                         const std::vector<TangentVector>& basis,
                                         const Matrix& warm_velocity, std::uint64_t seed) {
  CapabilityVerdict out;
  out.normal = hypersurface_normal(omega_of(spec), spec.squared_lengths());
  out.normal_eigenvalues = linalg::sym_eigenvalues(out.normal);
  out.verdict = classify_normal(out.normal_eigenvalues);
  if (out.verdict != Capability::capable) return out;

  const Matrix map = omega_dot_map(basis);
  std::vector<Vector> seeds;
  seeds.push_back(map.colPivHouseholderQr().solve(linalg::sym_vec(balanced_psd(out.normal))));
  if (auto warm = project_to_basis(basis, warm_velocity)) seeds.push_back(*warm);
  const auto best = max_margin(basis, seeds, seed);
  out.certificate = TangentVector{combine(basis, best.coeffs, true), combine(basis, best.coeffs, false)};
  out.margin = best.margin;
  return out;
}

}  // namespace detail

inline constexpr std::uint64_t kDefaultSamplingSeed = 0x5eed'd1a'3a7ULL;

/// Decide whether some non-trivial tangent at `spec` has a PSD ω̇.
///
/// The tangent hyperplane of the realizability hypersurface is tr(N X) = 0.
/// Because the PSD cone is self-dual under the trace inner product, that
/// hyperplane meets the cone in a non-zero matrix exactly when N is not
/// definite. Capable verdicts carry a maximal-margin tangent as certificate.
inline CapabilityVerdict capability_test(const FrameworkSpec& spec,
                                         std::uint64_t seed = kDefaultSamplingSeed) {
  return detail::capability_impl(spec, tangent_basis(spec), Matrix(), seed);
}

/// Same test starting from lattice Gram data; fails off the hypersurface.
inline CapabilityVerdict capability_test(const Matrix& omega, const Vector& s,
                                         std::uint64_t seed = kDefaultSamplingSeed) {
  return capability_test(realize_from_omega(omega, s), seed);
}

struct SteeringPolicy {
  enum class Kind { max_margin, strain } kind = Kind::max_margin;
  Matrix target;  // desired ω̇ direction for Kind::strain

  static SteeringPolicy max_margin() { return {}; }
  static SteeringPolicy strain(Matrix target) { return {Kind::strain, std::move(target)}; }
};

struct TrajectorySample {
  double tau = 0.0;
  FrameworkSpec spec;
  Matrix omega;
  double volume = 0.0;
  /// λ_min of ω(τ_k) - ω(τ_{k-1}); NaN on the first sample.
  double increment_min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
  /// The tangent used to reach this sample touched the cone boundary.
  bool cone_boundary = false;
};

enum class StopReason { completed, lost_capability, degenerate, increment_left_cone };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::completed: return "completed";
    case StopReason::lost_capability: return "lost-capability";
    case StopReason::degenerate: return "degenerate";
    case StopReason::increment_left_cone: return "increment-left-cone";
  }
  return "unknown";
}

struct Trajectory {
  std::vector<TrajectorySample> samples;
  StopReason reason = StopReason::completed;
};

inline constexpr double kStrainMarginReserve = 0.25;

namespace detail {

inline TangentVector steer(const FrameworkSpec& spec, const std::vector<TangentVector>& basis,
                           const CapabilityVerdict& verdict, const SteeringPolicy& policy) {
  const TangentVector& best = *verdict.certificate;
  if (policy.kind == SteeringPolicy::Kind::max_margin) return best;

  const Index d = spec.dimension();
  if (policy.target.rows() != d || policy.target.cols() != d)
    throw Error(Errc::shape, "auxetic", "strain target must be d x d");
  const Vector projected =
      omega_dot_map(basis).colPivHouseholderQr().solve(linalg::sym_vec(policy.target));
  if (!(projected.norm() > 0.0)) return best;

  const Vector best_c = *project_to_basis(basis, best.velocity);
  auto blend = [&](double theta) {
    return Vector((1.0 - theta) * projected.normalized() + theta * best_c);
  };
  // A blend sitting exactly on the cone boundary leaves it at second order,
  // so keep a fixed share of the best margin in reserve.
  const double required = kStrainMarginReserve * verdict.margin;
  double chosen = 0.0;
  if (margin_of(basis, blend(0.0)) < required) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (margin_of(basis, blend(mid)) >= required ? hi : lo) = mid;
    }
    chosen = hi;
  }
  const Vector c = blend(chosen).normalized();
  return {combine(basis, c, true), combine(basis, c, false)};
}

inline TrajectorySample make_sample(double tau, const FrameworkSpec& spec) {
  return {tau, spec, omega_of(spec), volume(spec)};
}

}  // namespace detail

/// Follow an auxetic path: explicit steps of length h along a unit tangent
/// with PSD ω̇, each followed by projection back onto the length spheres.
inline Trajectory trace_auxetic_path(const FrameworkSpec& start, int steps, double step_size,
                                     const SteeringPolicy& policy = SteeringPolicy::max_margin(),
                                     std::uint64_t seed = kDefaultSamplingSeed) {
  if (steps < 0) throw Error(Errc::invalid_argument, "auxetic", "steps must be non-negative");
  if (!(step_size > 0.0)) throw Error(Errc::invalid_argument, "auxetic", "step size must be positive");

  auto basis = tangent_basis(start);
  auto verdict = detail::capability_impl(start, basis, Matrix(), seed);
  if (verdict.verdict != Capability::capable)
    throw Error(Errc::incapable, "auxetic",
                std::string("start configuration is ") + to_string(verdict.verdict) +
                    ": the hypersurface normal is not indefinite, so no tangent has a PSD omega-velocity");

  Trajectory path;
  path.samples.push_back(detail::make_sample(0.0, start));
  const Vector radii = start.squared_lengths().cwiseSqrt();
  Matrix previous_velocity;

  for (int k = 1; k <= steps; ++k) {
    const FrameworkSpec& current = path.samples.back().spec;
    if (k > 1) {
      basis = tangent_basis(current);
      verdict = detail::capability_impl(current, basis, previous_velocity, seed);
      if (verdict.verdict != Capability::capable) {
        path.reason = StopReason::lost_capability;
        break;
      }
    }
    const TangentVector tangent = detail::steer(current, basis, verdict, policy);

    Matrix edges = current.edge_vectors() + step_size * tangent.velocity;
    for (Index i = 0; i < edges.cols(); ++i) edges.col(i) *= radii(i) / edges.col(i).norm();
    FrameworkSpec next = FrameworkSpec::from_columns(std::move(edges));
    if (next.degenerate()) {
      path.reason = StopReason::degenerate;
      break;
    }

    auto sample = detail::make_sample(k * step_size, next);
    sample.increment_min_eigenvalue = linalg::lambda_min(sample.omega - path.samples.back().omega);
    sample.cone_boundary = linalg::lambda_min(tangent.omega_dot) <=
                           kDirectionTolerance * std::max(1.0, tangent.omega_dot.norm());
    if (sample.increment_min_eigenvalue < -kIncrementTolerance * step_size) {
      path.reason = StopReason::increment_left_cone;
      break;
    }
    previous_velocity = tangent.velocity;
    path.samples.push_back(std::move(sample));
  }
  return path;
}

}  // namespace diamantine
