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

// Tangent / normal space estimates from K nearest neighbours.

#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <map>
#include <vector>

#include <spdlog/spdlog.h>

#include "seqplan/core.hpp"
#include "seqplan/learning/spatial.hpp"

namespace seqplan {

struct LocalChart {
  Config center;
  std::vector<int> neighbors;
  Eigen::VectorXd eigenvalues;  // descending
  Matrix tangent;               // n x (n - l)
  Matrix normal;                // n x l
  /// Constraint count suggested by this chart's own eigengap.
  int estimated_l = 0;

  int codim() const { return static_cast<int>(normal.cols()); }
};

/// l = n - j*, where j* (1-based) is the index of the largest gap
/// lambda_j - lambda_{j+1}. Returns 0 when all eigenvalues are equal.
inline int estimate_intrinsic_dim(const Eigen::VectorXd& eigenvalues) {
  const int n = static_cast<int>(eigenvalues.size());
  require(n >= 2, "intrinsic dimension needs at least two eigenvalues");
  int best = -1;
  double best_gap = 0.0;
  for (int j = 0; j + 1 < n; ++j) {
    const double gap = eigenvalues[j] - eigenvalues[j + 1];
    if (gap > best_gap) {
      best_gap = gap;
      best = j;
    }
  }
  if (best < 0) {
    spdlog::warn("estimate_intrinsic_dim: no eigengap, returning l = 0");
    return 0;
  }
  return n - (best + 1);
}

inline int default_neighbor_count(int n) { return std::max(2 * n, 10); }

/// Chart at data row `index` from its K nearest other rows. `l` < 0 uses
/// the chart's own eigengap.
inline LocalChart local_pca(const PointSet& data, const KdTree& tree,
                            int index, int K, int l = -1) {
  const int n = static_cast<int>(data.cols());
  require(K >= n, "local PCA needs K >= n neighbours");
  require(data.rows() > K, "local PCA needs more than K points");
  require(index >= 0 && index < data.rows(), "local PCA index out of range");
  LocalChart chart;
  chart.center = data.row(index).transpose();
  // One extra neighbour because the query point finds itself.
  std::vector<int> nn = tree.knn(chart.center, K + 1);
  nn.erase(std::remove(nn.begin(), nn.end(), index), nn.end());
  nn.resize(static_cast<size_t>(K));
  chart.neighbors = nn;

  Matrix x(K, n);
  for (int k = 0; k < K; ++k) {
    x.row(k) = data.row(nn[static_cast<size_t>(k)]) - chart.center.transpose();
  }
  const Matrix s = x.transpose() * x / static_cast<double>(K - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  // Eigen sorts ascending; flip to descending and clamp round-off.
  chart.eigenvalues = eig.eigenvalues().reverse().cwiseMax(0.0);
  const Matrix v = eig.eigenvectors().rowwise().reverse();
  chart.estimated_l = estimate_intrinsic_dim(chart.eigenvalues);
  const int use_l = l >= 0 ? l : chart.estimated_l;
  require(use_l <= n, "constraint count exceeds dimension");
  chart.tangent = v.leftCols(n - use_l);
  chart.normal = v.rightCols(use_l);
  return chart;
}

inline LocalChart local_pca(const PointSet& data, int index, int K, int l = -1) {
  return local_pca(data, KdTree(data), index, K, l);
}

struct ChartSet {
  std::vector<LocalChart> charts;
  /// Dataset-level constraint count (mode of per-chart estimates).
  int l = 0;
};

/// Charts for every row; charts whose own estimate disagrees with the
/// dataset mode are re-split using the mode.
inline ChartSet build_charts(const PointSet& data, const KdTree& tree, int K,
                             int l_override = -1) {
  ChartSet out;
  out.charts.reserve(static_cast<size_t>(data.rows()));
  for (int i = 0; i < data.rows(); ++i) {
    out.charts.push_back(local_pca(data, tree, i, K));
  }
  if (l_override >= 0) {
    out.l = l_override;
  } else {
    std::map<int, int> votes;
    for (const LocalChart& c : out.charts) ++votes[c.estimated_l];
    int best = 0;
    int best_votes = -1;
    for (const auto& [l, count] : votes) {
      if (count > best_votes) {
        best = l;
        best_votes = count;
      }
    }
    out.l = best;
  }
  const int n = static_cast<int>(data.cols());
  for (LocalChart& c : out.charts) {
    if (c.codim() == out.l) continue;
    // Rebuild the bases from the stored decomposition order.
    Matrix v(n, n);
    v << c.tangent, c.normal;
    c.tangent = v.leftCols(n - out.l);
    c.normal = v.rightCols(out.l);
  }
  return out;
}

/// sqrt of the mean (over charts) of the mean tangent eigenvalue.
inline double default_epsilon_aug(const std::vector<LocalChart>& charts) {
  require(!charts.empty(), "default_epsilon_aug needs charts");
  double sum = 0.0;
  for (const LocalChart& c : charts) {
    const int t = static_cast<int>(c.tangent.cols());
    require(t > 0, "chart has an empty tangent space");
    sum += c.eigenvalues.head(t).mean();
  }
  return std::sqrt(sum / static_cast<double>(charts.size()));
}

}  // namespace seqplan
