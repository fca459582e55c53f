// Copyright 2026 The seqplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Implicit equality-constraint manifolds {q | h(q) = 0}, the analytic
// constraint library, stacking intersections and Newton projection.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "seqplan/core.hpp"

namespace seqplan {

inline constexpr double kFiniteDifferenceStep = 1e-6;

/// Central finite-difference Jacobian of `h` at `q` (l x k).
template <typename Fn>
Matrix finite_difference_jacobian(const Fn& h, const Config& q,
                                  double step = kFiniteDifferenceStep) {
  Eigen::VectorXd h0 = h(q);
  Matrix jac(h0.size(), q.size());
  Config probe = q;
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    const double orig = probe[j];
    probe[j] = orig + step;
    const Eigen::VectorXd hp = h(probe);
    probe[j] = orig - step;
    const Eigen::VectorXd hm = h(probe);
    probe[j] = orig;
    jac.col(j) = (hp - hm) / (2.0 * step);
  }
  return jac;
}

/// An implicit constraint h: R^k -> R^l with Jacobian access. Immutable
/// after construction; copies share the underlying callables.
class Manifold {
 public:
  using Evaluator = std::function<Eigen::VectorXd(const Config&)>;
  using JacobianFn = std::function<Matrix(const Config&)>;

  Manifold() = default;

  /// `jacobian` may be empty, in which case central differences are used.
  Manifold(std::string name, int ambient_dim, int constraint_dim,
           Evaluator evaluator, JacobianFn jacobian = {})
      : impl_(std::make_shared<const Impl>(Impl{std::move(name), ambient_dim,
                                                constraint_dim,
                                                std::move(evaluator),
                                                std::move(jacobian)})) {
    require(ambient_dim >= 1, "manifold ambient dimension must be >= 1");
    require(constraint_dim >= 1,
            "manifold constraint dimension must be >= 1");
    require(static_cast<bool>(impl_->evaluator),
            "manifold requires an evaluator");
  }

  bool valid() const { return impl_ != nullptr; }
  int ambient_dim() const { return impl_->ambient_dim; }
  int constraint_dim() const { return impl_->constraint_dim; }
  const std::string& name() const { return impl_->name; }
  bool has_analytic_jacobian() const {
    return static_cast<bool>(impl_->jacobian);
  }

  Eigen::VectorXd value(const Config& q) const {
    require_dim(q.size(), impl_->ambient_dim, impl_->name.c_str());
    Eigen::VectorXd h = impl_->evaluator(q);
    require_dim(h.size(), impl_->constraint_dim,
                (impl_->name + " evaluator output").c_str());
    return h;
  }

  Matrix jacobian(const Config& q) const {
    require_dim(q.size(), impl_->ambient_dim, impl_->name.c_str());
    if (impl_->jacobian) return impl_->jacobian(q);
    return finite_difference_jacobian(impl_->evaluator, q);
  }

  /// ||h(q)||.
  double violation(const Config& q) const { return value(q).norm(); }

 private:
  struct Impl {
    std::string name;
    int ambient_dim;
    int constraint_dim;
    Evaluator evaluator;
    JacobianFn jacobian;
  };
  std::shared_ptr<const Impl> impl_;
};

inline Eigen::VectorXd evaluate(const Manifold& manifold, const Config& q) {
  return manifold.value(q);
}

/// Stacks two constraints: the result's zero set is the intersection.
inline Manifold intersect(const Manifold& a, const Manifold& b) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw DimensionError("intersect: ambient dimensions differ (" +
                         std::to_string(a.ambient_dim()) + " vs " +
                         std::to_string(b.ambient_dim()) + ")");
  }
  const int la = a.constraint_dim();
  const int lb = b.constraint_dim();
  auto value = [a, b, la, lb](const Config& q) {
    Eigen::VectorXd h(la + lb);
    h << a.value(q), b.value(q);
    return h;
  };
  Manifold::JacobianFn jac;
  // Stacking per-block keeps each side's analytic or numeric Jacobian.
  jac = [a, b, la, lb](const Config& q) {
    Matrix j(la + lb, q.size());
    j << a.jacobian(q), b.jacobian(q);
    return j;
  };
  return Manifold("(" + a.name() + " & " + b.name() + ")", a.ambient_dim(),
                  la + lb, value, jac);
}

// ---------------------------------------------------------------------------
// Analytic constraint library.

/// h(q) = ||q - center|| - radius.
inline Manifold sphere(const Config& center, double radius) {
  require(radius > 0.0, "sphere radius must be positive");
  const int k = static_cast<int>(center.size());
  auto value = [center, radius](const Config& q) {
    Eigen::VectorXd h(1);
    h[0] = (q - center).norm() - radius;
    return h;
  };
  auto jac = [center](const Config& q) {
    const Eigen::VectorXd d = q - center;
    const double n = d.norm();
    Matrix j = Matrix::Zero(1, q.size());
    if (n > 0.0) j.row(0) = d.transpose() / n;
    return j;
  };
  return Manifold("sphere", k, 1, value, jac);
}

/// h(q) = sign * (sum_j a_j q_j^2 + offset) - q_last, with one coefficient per
/// leading coordinate. sign=+1, a=(0.1, 0.1), offset=2 gives the upward bowl
/// z = 0.1 x^2 + 0.1 y^2 + 2.
inline Manifold paraboloid(double sign, const Eigen::VectorXd& coefficients,
                           double offset) {
  require(sign == 1.0 || sign == -1.0, "paraboloid sign must be +1 or -1");
  const int k = static_cast<int>(coefficients.size()) + 1;
  auto value = [sign, coefficients, offset, k](const Config& q) {
    Eigen::VectorXd h(1);
    const auto lead = q.head(k - 1);
    h[0] = sign * (coefficients.dot(lead.cwiseProduct(lead)) + offset) -
           q[k - 1];
    return h;
  };
  auto jac = [sign, coefficients, k](const Config& q) {
    Matrix j(1, k);
    for (int i = 0; i < k - 1; ++i) j(0, i) = 2.0 * sign * coefficients[i] * q[i];
    j(0, k - 1) = -1.0;
    return j;
  };
  return Manifold(sign > 0 ? "paraboloid+" : "paraboloid-", k, 1, value, jac);
}

/// Infinite circular cylinder around an axis: the two coordinates
/// `axis_a`, `axis_b` span the cross-section.
/// h(q) = ((q_a - c_a)^2 + (q_b - c_b)^2) / radius^2 - 1.
inline Manifold cylinder(int ambient_dim, double radius, int axis_a = 0,
                         int axis_b = 1, double center_a = 0.0,
                         double center_b = 0.0) {
  require(radius > 0.0, "cylinder radius must be positive");
  require(axis_a != axis_b && axis_a >= 0 && axis_b >= 0 &&
              axis_a < ambient_dim && axis_b < ambient_dim,
          "cylinder axes must be distinct coordinates");
  const double inv_r2 = 1.0 / (radius * radius);
  auto value = [=](const Config& q) {
    Eigen::VectorXd h(1);
    const double da = q[axis_a] - center_a;
    const double db = q[axis_b] - center_b;
    h[0] = (da * da + db * db) * inv_r2 - 1.0;
    return h;
  };
  auto jac = [=](const Config& q) {
    Matrix j = Matrix::Zero(1, q.size());
    j(0, axis_a) = 2.0 * (q[axis_a] - center_a) * inv_r2;
    j(0, axis_b) = 2.0 * (q[axis_b] - center_b) * inv_r2;
    return j;
  };
  return Manifold("cylinder", ambient_dim, 1, value, jac);
}

/// h(q) = q_axis - offset.
inline Manifold axis_plane(int ambient_dim, int axis, double offset) {
  require(axis >= 0 && axis < ambient_dim, "plane axis out of range");
  auto value = [axis, offset](const Config& q) {
    Eigen::VectorXd h(1);
    h[0] = q[axis] - offset;
    return h;
  };
  auto jac = [axis](const Config& q) {
    Matrix j = Matrix::Zero(1, q.size());
    j(0, axis) = 1.0;
    return j;
  };
  return Manifold("plane", ambient_dim, 1, value, jac);
}

/// h(q) = q - goal.
inline Manifold point_goal(const Config& goal) {
  const int k = static_cast<int>(goal.size());
  auto value = [goal](const Config& q) -> Eigen::VectorXd { return q - goal; };
  auto jac = [k](const Config&) -> Matrix { return Matrix::Identity(k, k); };
  return Manifold("goal", k, k, value, jac);
}

// ---------------------------------------------------------------------------
// Projection.

struct ProjectionSettings {
  double tolerance = 1e-5;
  int max_iterations = 100;
  /// Singular values below cutoff * sigma_max are dropped from J^+.
  double singular_value_cutoff = 1e-10;
  int max_step_halvings = 10;
};

enum class ProjectionStatus {
  kConverged,
  kMaxIterations,
  /// ||h|| above tolerance while J has no usable singular value.
  kSingularJacobian,
  /// No step length among the halvings decreased ||h||.
  kStalled,
  kNonFinite,
};

inline const char* to_string(ProjectionStatus s) {
  switch (s) {
    case ProjectionStatus::kConverged: return "converged";
    case ProjectionStatus::kMaxIterations: return "max_iterations";
    case ProjectionStatus::kSingularJacobian: return "singular_jacobian";
    case ProjectionStatus::kStalled: return "stalled";
    case ProjectionStatus::kNonFinite: return "non_finite";
  }
  return "unknown";
}

struct ProjectionResult {
  Config q;
  ProjectionStatus status = ProjectionStatus::kMaxIterations;
  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();

  bool ok() const { return status == ProjectionStatus::kConverged; }
};

/// Truncated-SVD pseudo-inverse. Writes the largest singular value to
/// `sigma_max` when non-null.
inline Matrix pseudo_inverse(const Matrix& m, double relative_cutoff,
                             double* sigma_max = nullptr) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s.size() > 0 ? s[0] : 0.0;
  if (sigma_max != nullptr) *sigma_max = smax;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  if (smax > 0.0) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s[i] > relative_cutoff * smax) inv[i] = 1.0 / s[i];
    }
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// Damped Gauss-Newton iteration q <- q - t J^+ h(q) with step halving so
/// that ||h|| strictly decreases across accepted iterations.
template <typename ValueFn, typename JacobianFn>
ProjectionResult newton_project(const Config& start, const ValueFn& value,
                                const JacobianFn& jacobian,
                                const ProjectionSettings& settings) {
  require(settings.tolerance > 0.0, "projection tolerance must be positive");
  require(settings.max_iterations >= 1,
          "projection max_iterations must be >= 1");
  ProjectionResult result;
  result.q = start;
  Eigen::VectorXd h = value(result.q);
  double r = h.norm();
  for (int it = 0;; ++it) {
    result.iterations = it;
    result.residual = r;
    if (!std::isfinite(r)) {
      result.status = ProjectionStatus::kNonFinite;
      return result;
    }
    if (r <= settings.tolerance) {
      result.status = ProjectionStatus::kConverged;
      return result;
    }
    if (it == settings.max_iterations) {
      result.status = ProjectionStatus::kMaxIterations;
      return result;
    }
    const Matrix jac = jacobian(result.q);
    double smax = 0.0;
    const Matrix pinv =
        pseudo_inverse(jac, settings.singular_value_cutoff, &smax);
    if (!(smax > 0.0) || !std::isfinite(smax)) {
      result.status = ProjectionStatus::kSingularJacobian;
      return result;
    }
    const Eigen::VectorXd step = pinv * h;
    if (step.squaredNorm() == 0.0) {
      result.status = ProjectionStatus::kSingularJacobian;
      return result;
    }
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= settings.max_step_halvings; ++halving) {
      Config candidate = result.q - t * step;
      Eigen::VectorXd hc = value(candidate);
      const double rc = hc.norm();
      if (std::isfinite(rc) && rc < r) {
        result.q = std::move(candidate);
        h = std::move(hc);
        r = rc;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // A repeated attempt from the same point would fail identically.
      result.status = ProjectionStatus::kStalled;
      return result;
    }
  }
}

inline ProjectionResult project_detailed(const Config& q,
                                         const Manifold& manifold,
                                         const ProjectionSettings& settings = {}) {
  require_dim(q.size(), manifold.ambient_dim(), "project");
  return newton_project(
      q, [&](const Config& x) { return manifold.value(x); },
      [&](const Config& x) { return manifold.jacobian(x); }, settings);
}

/// Projects `q` onto the manifold; std::nullopt when the iteration fails.
inline std::optional<Config> project(const Config& q, const Manifold& manifold,
                                     const ProjectionSettings& settings = {}) {
  ProjectionResult r = project_detailed(q, manifold, settings);
  if (!r.ok()) return std::nullopt;
  return std::move(r.q);
}

/// Orthonormal basis of the right null space of `jac` (k x (k - rank)).
inline Matrix null_space_basis(const Matrix& jac, double relative_cutoff = 1e-10) {
  Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s.size() > 0 ? s[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (smax > 0.0 && s[i] > relative_cutoff * smax) ++rank;
  }
  const Eigen::Index k = jac.cols();
  return svd.matrixV().rightCols(k - rank);
}

}  // namespace seqplan
