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

// On-manifold datasets, ground-truth distances and the mu / P metrics.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "seqplan/core.hpp"
#include "seqplan/kinematics.hpp"
#include "seqplan/learning/learned.hpp"
#include "seqplan/learning/mlp.hpp"
#include "seqplan/learning/spatial.hpp"
#include "seqplan/manifold.hpp"

namespace seqplan {

enum class DatasetKind { kSphere, kCircle3d, kPlaneArm, kOrientArm };

inline const char* to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::kSphere: return "sphere";
    case DatasetKind::kCircle3d: return "circle3d";
    case DatasetKind::kPlaneArm: return "plane_arm";
    case DatasetKind::kOrientArm: return "orient_arm";
  }
  return "unknown";
}

inline DatasetKind dataset_kind_from_string(const std::string& s) {
  if (s == "sphere") return DatasetKind::kSphere;
  if (s == "circle3d") return DatasetKind::kCircle3d;
  if (s == "plane_arm") return DatasetKind::kPlaneArm;
  if (s == "orient_arm") return DatasetKind::kOrientArm;
  throw PreconditionError("unknown dataset kind '" + s + "'");
}

/// End-effector height of the Plane dataset.
inline constexpr double kPlaneArmHeight = 0.5;

inline int default_dataset_size(DatasetKind k) {
  switch (k) {
    case DatasetKind::kSphere: return 2000;
    case DatasetKind::kCircle3d: return 1000;
    case DatasetKind::kPlaneArm: return 4000;
    case DatasetKind::kOrientArm: return 4000;
  }
  return 0;
}

struct DatasetSpec {
  DatasetKind kind = DatasetKind::kSphere;
  int count = 2000;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

inline int ambient_dim(DatasetKind k) {
  switch (k) {
    case DatasetKind::kSphere:
    case DatasetKind::kCircle3d:
    case DatasetKind::kPlaneArm: return 3;
    case DatasetKind::kOrientArm: return 6;
  }
  return 0;
}

/// The analytic constraint behind each dataset.
inline Manifold ground_truth_manifold(DatasetKind k) {
  switch (k) {
    case DatasetKind::kSphere:
      return sphere(Config::Zero(3), 1.0);
    case DatasetKind::kCircle3d:
      return intersect(sphere(Config::Zero(3), 1.0), axis_plane(3, 2, 0.0));
    case DatasetKind::kPlaneArm:
      return ee_plane_constraint({planar_arm_3dof(), 0}, 3, 2, kPlaneArmHeight);
    case DatasetKind::kOrientArm:
      return upright_constraint({arm_6dof(), 0}, 6);
  }
  throw PreconditionError("unsupported dataset kind");
}

/// Box the generator samples from before projecting.
inline std::pair<double, double> sampling_range(DatasetKind k) {
  switch (k) {
    case DatasetKind::kSphere:
    case DatasetKind::kCircle3d: return {-1.5, 1.5};
    case DatasetKind::kPlaneArm:
    case DatasetKind::kOrientArm: return {-std::numbers::pi, std::numbers::pi};
  }
  return {0.0, 0.0};
}

/// Uniform samples projected onto the constraint (failed projections are
/// resampled, up to 100 tries per point), then Gaussian noise.
inline PointSet generate(const DatasetSpec& spec) {
  require(spec.count > 0, "dataset size must be positive");
  require(spec.noise >= 0.0, "dataset noise must be non-negative");
  const Manifold m = ground_truth_manifold(spec.kind);
  const int k = ambient_dim(spec.kind);
  const auto [lo, hi] = sampling_range(spec.kind);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ProjectionSettings ps;
  ps.tolerance = 1e-11;
  ps.max_iterations = 200;
  PointSet out(spec.count, k);
  for (int i = 0; i < spec.count; ++i) {
    bool done = false;
    for (int attempt = 0; attempt < 100 && !done; ++attempt) {
      Config q(k);
      for (int d = 0; d < k; ++d) q[d] = u(rng);
      const ProjectionResult r = project_detailed(q, m, ps);
      if (!r.ok()) continue;
      out.row(i) = r.q.transpose();
      done = true;
    }
    require(done, "dataset generation failed to project a sample");
  }
  if (spec.noise > 0.0) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      for (Eigen::Index d = 0; d < out.cols(); ++d) out(i, d) += spec.noise * gauss(rng);
    }
  }
  return out;
}

inline double ground_truth_distance(DatasetKind kind, const Config& q) {
  require_dim(q.size(), ambient_dim(kind), "ground_truth_distance");
  switch (kind) {
    case DatasetKind::kSphere:
      return std::abs(q.norm() - 1.0);
    case DatasetKind::kCircle3d: {
      const double radial = std::hypot(q[0], q[1]);
      return std::hypot(radial - 1.0, q[2]);
    }
    case DatasetKind::kPlaneArm:
      return std::abs(fk_position(planar_arm_3dof(), q).z() - kPlaneArmHeight);
    case DatasetKind::kOrientArm:
      return std::abs(fk_align_z(arm_6dof(), q));
  }
  throw PreconditionError("unsupported dataset kind");
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

inline MeanStd mean_std(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) return out;
  double s = 0.0;
  for (double x : v) s += x;
  out.mean = s / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - out.mean) * (x - out.mean);
  out.std = std::sqrt(ss / static_cast<double>(v.size()));
  return out;
}

inline MeanStd metric_mu(const std::vector<Config>& points, DatasetKind kind) {
  require(!points.empty(), "metric_mu needs at least one point");
  std::vector<double> d;
  d.reserve(points.size());
  for (const Config& q : points) d.push_back(ground_truth_distance(kind, q));
  return mean_std(d);
}

/// Percentage of points within `threshold` of the ground-truth manifold.
inline double metric_P(const std::vector<Config>& points, DatasetKind kind,
                       double threshold = 0.1) {
  require(!points.empty(), "metric_P needs at least one point");
  int inside = 0;
  for (const Config& q : points) {
    if (ground_truth_distance(kind, q) <= threshold) ++inside;
  }
  return 100.0 * inside / static_cast<double>(points.size());
}

struct EvalSettings {
  int test_points = 300;
  double threshold = 0.1;
  /// Half-width of the test cube relative to the dataset's largest
  /// bounding-box half-extent.
  double cube_scale = 1.5;
  std::uint64_t seed = 1;
  ProjectionSettings projection;
};

struct EvalReport {
  double P = 0.0;
  MeanStd mu_test;
  MeanStd mu_train;
  int converged = 0;
  int attempted = 0;
};

/// Projects uniform test points from a cube around the data with the learned
/// model. Failed projections count against P; mu_test is over the converged
/// ones. mu_train uses the training points projected the same way.
inline EvalReport evaluate_model(const MlpModel& model, DatasetKind kind,
                                 const PointSet& train, const EvalSettings& s = {}) {
  require(train.rows() > 0, "evaluation needs training data");
  require(s.test_points > 0, "evaluation needs test points");
  const Eigen::VectorXd lo = train.colwise().minCoeff();
  const Eigen::VectorXd hi = train.colwise().maxCoeff();
  const Eigen::VectorXd center = 0.5 * (lo + hi);
  const double half = s.cube_scale * 0.5 * (hi - lo).maxCoeff();
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> u(-half, half);

  EvalReport r;
  int inside = 0;
  std::vector<double> test_d;
  for (int i = 0; i < s.test_points; ++i) {
    Config q(train.cols());
    for (Eigen::Index d = 0; d < q.size(); ++d) q[d] = center[d] + u(rng);
    ++r.attempted;
    const ProjectionResult p = project_learned(model, q, s.projection);
    if (!p.ok()) continue;
    ++r.converged;
    const double dist = ground_truth_distance(kind, p.q);
    test_d.push_back(dist);
    if (dist <= s.threshold) ++inside;
  }
  r.P = 100.0 * inside / static_cast<double>(r.attempted);
  r.mu_test = mean_std(test_d);
  std::vector<double> train_d;
  for (Eigen::Index i = 0; i < train.rows(); ++i) {
    const ProjectionResult p = project_learned(model, train.row(i).transpose(), s.projection);
    if (p.ok()) train_d.push_back(ground_truth_distance(kind, p.q));
  }
  r.mu_train = mean_std(train_d);
  return r;
}

}  // namespace seqplan
