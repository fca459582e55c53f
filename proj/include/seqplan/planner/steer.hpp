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

#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include <spdlog/spdlog.h>

#include "seqplan/core.hpp"
#include "seqplan/manifold.hpp"
#include "seqplan/planner/free_space.hpp"

namespace seqplan {

using Rng = std::mt19937_64;

/// Uniform sample inside the box; a degenerate axis returns its bound.
inline Config sample_uniform(const Box& bounds, Rng& rng) {
  Config q(bounds.dim());
  for (int i = 0; i < bounds.dim(); ++i) {
    const double lo = bounds.lo[i];
    const double hi = bounds.hi[i];
    if (hi <= lo) {
      q[i] = lo;
    } else {
      q[i] = std::uniform_real_distribution<double>(lo, hi)(rng);
    }
  }
  return q;
}

/// Tangent-space projection of (q_rand - q_near) at q_near.
inline Eigen::VectorXd steer_point(const Config& q_near, const Config& q_rand,
                                   const Manifold& manifold,
                                   double cutoff = 1e-10) {
  require_dim(q_rand.size(), q_near.size(), "steer_point");
  const Matrix jac = manifold.jacobian(q_near);
  const Eigen::VectorXd v = q_rand - q_near;
  const Matrix pinv = pseudo_inverse(jac, cutoff);
  return v - pinv * (jac * v);
}

/// Direction that decreases the linearized next-manifold residual while
/// staying on the current tangent space. Solves
///   [ Jn^T Jn  Jc^T ] [d]   [ -Jn^T hn ]
///   [ Jc       0    ] [l] = [  0       ]
/// in the minimum-norm sense; rank deficiency is expected (Jn^T Jn has rank
/// at most l_next). Returns zero when the system is inconsistent.
inline Eigen::VectorXd steer_constraint(const Config& q_near,
                                        const Manifold& current,
                                        const Manifold& next) {
  const Matrix jc = current.jacobian(q_near);
  const Matrix jn = next.jacobian(q_near);
  const Eigen::VectorXd hn = next.value(q_near);
  const Eigen::Index k = q_near.size();
  const Eigen::Index lc = jc.rows();
  Matrix kkt = Matrix::Zero(k + lc, k + lc);
  kkt.topLeftCorner(k, k) = jn.transpose() * jn;
  kkt.topRightCorner(k, lc) = jc.transpose();
  kkt.bottomLeftCorner(lc, k) = jc;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + lc);
  rhs.head(k) = -jn.transpose() * hn;
  if (rhs.squaredNorm() == 0.0) return Eigen::VectorXd::Zero(k);

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(1e-10);
  cod.compute(kkt);
  const Eigen::VectorXd sol = cod.solve(rhs);
  const double residual = (kkt * sol - rhs).norm();
  if (!sol.allFinite() || residual > 1e-6 * (1.0 + rhs.norm())) {
    spdlog::debug("steer_constraint: singular KKT system (residual {})",
                  residual);
    return Eigen::VectorXd::Zero(k);
  }
  return sol.head(k);
}

struct SteerSettings {
  double alpha = 1.0;
  double beta = 0.1;
  double epsilon = 0.01;
  double r = 1.5;
  ProjectionSettings projection;
};

enum class SteerBranch { kPoint, kConstraint };

struct SteerOutcome {
  std::optional<Config> q_new;
  SteerBranch branch = SteerBranch::kPoint;
  bool projected_to_intersection = false;
};

/// One PSM* steering step from q_near: pick a direction, step alpha along
/// it, then project onto current & next when close enough to the next
/// manifold (threshold drawn from U(0, r)), otherwise onto the current one.
inline SteerOutcome psm_steer(const SteerSettings& s, const Config& q_near,
                              const Config& q_rand, const Manifold& current,
                              const Manifold& next,
                              const Manifold& intersection, Rng& rng) {
  SteerOutcome out;
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  Eigen::VectorXd d;
  if (u < s.beta) {
    out.branch = SteerBranch::kConstraint;
    d = steer_constraint(q_near, current, next);
  } else {
    out.branch = SteerBranch::kPoint;
    d = steer_point(q_near, q_rand, current);
  }
  const double threshold =
      std::uniform_real_distribution<double>(0.0, s.r)(rng);
  const double dn = d.norm();
  if (!(dn > 1e-12)) return out;
  const Config stepped = q_near + s.alpha * d / dn;
  ProjectionResult proj;
  if (next.violation(stepped) < threshold) {
    out.projected_to_intersection = true;
    proj = project_detailed(stepped, intersection, s.projection);
  } else {
    proj = project_detailed(stepped, current, s.projection);
  }
  if (!proj.ok()) return out;
  // Edges stay short: a projection that drags the point too far is dropped.
  if ((proj.q - q_near).norm() > s.alpha + s.epsilon) return out;
  out.q_new = std::move(proj.q);
  return out;
}

}  // namespace seqplan
