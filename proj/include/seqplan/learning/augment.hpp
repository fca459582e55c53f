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

// Off-manifold samples along estimated normal directions.

#pragma once

#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "seqplan/core.hpp"
#include "seqplan/learning/spatial.hpp"

namespace seqplan {

struct AugmentSettings {
  int levels = 7;         // I_max
  double epsilon = 0.0;   // epsilon_aug, must be set (> 0)
  std::vector<double> fractions{0.5};
  bool reflection = true;
  bool similar = true;
};

struct AugmentedSample {
  int base = -1;
  Eigen::VectorXd u;  // unit, in span of the base's normal basis
  int level = 1;
  double epsilon = 0.0;
  Config point;       // base + level * epsilon * u
  double label = 0.0; // level * epsilon

  /// base - level * epsilon * u, when it passed the nearest-base check.
  std::optional<Config> reflection;
  /// (a/b, base + a/b * level * epsilon * u) for accepted fractions.
  std::vector<std::pair<double, Config>> fractions;
  /// Same level along the partner's basis with the shared weights.
  int partner = -1;
  std::optional<Config> similar;
};

/// Unit direction V_N w / ||V_N w||; falls back to the first column when
/// the combination vanishes.
inline Eigen::VectorXd normal_direction(const Matrix& normal,
                                        const Eigen::VectorXd& w) {
  Eigen::VectorXd u = normal * w;
  const double n = u.norm();
  if (n < 1e-12) return normal.col(0);
  return u / n;
}

/// True when `base` is the (lowest-index) nearest dataset point to q.
inline bool nearest_is(const KdTree& tree, const Config& q, int base) {
  return tree.nearest(q) == base;
}

/// One round of augmentation. Each base draws standard-normal weights w
/// (shared with its nearest-neighbour partner) and emits levels
/// 1..I_max along u; points whose nearest dataset point is not their own
/// base are rejected.
inline std::vector<AugmentedSample> augment(const PointSet& data,
                                            const KdTree& tree,
                                            const std::vector<Matrix>& normals,
                                            const AugmentSettings& settings,
                                            std::mt19937_64& rng,
                                            const std::vector<int>* partners = nullptr) {
  require(settings.epsilon > 0.0, "augmentation epsilon must be positive");
  require(settings.levels >= 1, "augmentation needs at least one level");
  for (double f : settings.fractions) {
    require(f > 0.0 && f < 1.0, "augmentation fractions must lie in (0, 1)");
  }
  const int n_pts = static_cast<int>(data.rows());
  require(static_cast<int>(normals.size()) == n_pts,
          "augment: one normal basis per point required");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<AugmentedSample> out;
  out.reserve(static_cast<size_t>(n_pts) * static_cast<size_t>(settings.levels));
  for (int j = 0; j < n_pts; ++j) {
    const Matrix& vn = normals[static_cast<size_t>(j)];
    if (vn.cols() == 0) continue;
    Eigen::VectorXd w(vn.cols());
    for (Eigen::Index c = 0; c < w.size(); ++c) w[c] = gauss(rng);
    const Eigen::VectorXd u = normal_direction(vn, w);
    const Config q = data.row(j).transpose();
    int partner = -1;
    Eigen::VectorXd u_c;
    Config q_c;
    if (settings.similar && partners != nullptr) {
      partner = (*partners)[static_cast<size_t>(j)];
      if (partner >= 0) {
        u_c = normal_direction(normals[static_cast<size_t>(partner)], w);
        q_c = data.row(partner).transpose();
      }
    }
    for (int i = 1; i <= settings.levels; ++i) {
      const double mag = i * settings.epsilon;
      AugmentedSample s;
      s.base = j;
      s.u = u;
      s.level = i;
      s.epsilon = settings.epsilon;
      s.point = q + mag * u;
      s.label = mag;
      if (!nearest_is(tree, s.point, j)) continue;
      if (settings.reflection) {
        Config r = q - mag * u;
        if (nearest_is(tree, r, j)) s.reflection = std::move(r);
      }
      for (double f : settings.fractions) {
        Config fp = q + f * mag * u;
        if (nearest_is(tree, fp, j)) s.fractions.emplace_back(f, std::move(fp));
      }
      if (partner >= 0) {
        Config sp = q_c + mag * u_c;
        if (nearest_is(tree, sp, partner)) {
          s.partner = partner;
          s.similar = std::move(sp);
        }
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

/// Nearest other dataset point for each row (the similar-pair partner).
inline std::vector<int> nearest_partners(const PointSet& data,
                                         const KdTree& tree) {
  std::vector<int> out(static_cast<size_t>(data.rows()), -1);
  for (int i = 0; i < data.rows(); ++i) {
    for (int j : tree.knn(data.row(i).transpose(), 2)) {
      if (j != i) {
        out[static_cast<size_t>(i)] = j;
        break;
      }
    }
  }
  return out;
}

}  // namespace seqplan
