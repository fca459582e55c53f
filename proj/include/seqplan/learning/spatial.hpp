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

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

#include "seqplan/core.hpp"

namespace seqplan {

/// Points stored one per row.
using PointSet = Eigen::MatrixXd;

/// Static kd-tree over the rows of a point set. Query results are sorted by
/// (distance, index), so they match a brute-force scan exactly.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(const PointSet& points) : points_(points) {
    order_.resize(static_cast<size_t>(points_.rows()));
    std::iota(order_.begin(), order_.end(), 0);
    if (!order_.empty()) build(0, static_cast<int>(order_.size()), 0);
  }

  int size() const { return static_cast<int>(points_.rows()); }
  int dim() const { return static_cast<int>(points_.cols()); }
  const PointSet& points() const { return points_; }

  /// The k nearest rows to q (fewer if the set is smaller).
  std::vector<int> knn(const Eigen::Ref<const Eigen::VectorXd>& q, int k) const {
    require_dim(q.size(), dim(), "kd-tree query");
    Heap heap;
    if (k > 0 && size() > 0) search(0, static_cast<int>(order_.size()), 0, q, k, heap);
    std::vector<std::pair<double, int>> found;
    while (!heap.empty()) {
      found.push_back(heap.top());
      heap.pop();
    }
    std::sort(found.begin(), found.end());
    std::vector<int> out;
    out.reserve(found.size());
    for (const auto& f : found) out.push_back(f.second);
    return out;
  }

  int nearest(const Eigen::Ref<const Eigen::VectorXd>& q) const {
    const std::vector<int> r = knn(q, 1);
    return r.empty() ? -1 : r.front();
  }

 private:
  // Max-heap on (distance^2, index): the top is the current worst candidate.
  using Heap = std::priority_queue<std::pair<double, int>>;

  struct Split {
    int axis;
    double value;
  };

  void build(int lo, int hi, int depth) {
    if (hi - lo <= kLeafSize) return;
    const int axis = widest_axis(lo, hi);
    const int mid = (lo + hi) / 2;
    std::nth_element(order_.begin() + lo, order_.begin() + mid,
                     order_.begin() + hi, [&](int a, int b) {
                       return points_(a, axis) < points_(b, axis);
                     });
    splits_.resize(std::max(splits_.size(), static_cast<size_t>(mid) + 1));
    splits_[static_cast<size_t>(mid)] = {axis, points_(order_[static_cast<size_t>(mid)], axis)};
    build(lo, mid, depth + 1);
    build(mid, hi, depth + 1);
  }

  int widest_axis(int lo, int hi) const {
    int best = 0;
    double best_span = -1.0;
    for (int a = 0; a < dim(); ++a) {
      double mn = std::numeric_limits<double>::infinity();
      double mx = -mn;
      for (int i = lo; i < hi; ++i) {
        const double v = points_(order_[static_cast<size_t>(i)], a);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
      if (mx - mn > best_span) {
        best_span = mx - mn;
        best = a;
      }
    }
    return best;
  }

  void consider(int idx, const Eigen::Ref<const Eigen::VectorXd>& q, int k,
                Heap& heap) const {
    const double d = (points_.row(idx).transpose() - q).squaredNorm();
    const std::pair<double, int> cand{d, idx};
    if (static_cast<int>(heap.size()) < k) {
      heap.push(cand);
    } else if (cand < heap.top()) {
      heap.pop();
      heap.push(cand);
    }
  }

  void search(int lo, int hi, int depth,
              const Eigen::Ref<const Eigen::VectorXd>& q, int k,
              Heap& heap) const {
    if (hi - lo <= kLeafSize) {
      for (int i = lo; i < hi; ++i) consider(order_[static_cast<size_t>(i)], q, k, heap);
      return;
    }
    const int mid = (lo + hi) / 2;
    const Split& s = splits_[static_cast<size_t>(mid)];
    const double diff = q[s.axis] - s.value;
    // Left holds values <= split, right holds values >= split.
    if (diff < 0.0) {
      search(lo, mid, depth + 1, q, k, heap);
      if (static_cast<int>(heap.size()) < k || diff * diff <= heap.top().first) {
        search(mid, hi, depth + 1, q, k, heap);
      }
    } else {
      search(mid, hi, depth + 1, q, k, heap);
      if (static_cast<int>(heap.size()) < k || diff * diff <= heap.top().first) {
        search(lo, mid, depth + 1, q, k, heap);
      }
    }
  }

  static constexpr int kLeafSize = 8;
  PointSet points_;
  std::vector<int> order_;
  std::vector<Split> splits_;
};

/// Brute-force reference: the k nearest rows sorted by (distance, index).
inline std::vector<int> brute_force_knn(const PointSet& points,
                                        const Eigen::Ref<const Eigen::VectorXd>& q,
                                        int k) {
  std::vector<std::pair<double, int>> all;
  all.reserve(static_cast<size_t>(points.rows()));
  for (int i = 0; i < points.rows(); ++i) {
    all.emplace_back((points.row(i).transpose() - q).squaredNorm(), i);
  }
  k = std::min<int>(k, static_cast<int>(all.size()));
  std::partial_sort(all.begin(), all.begin() + k, all.end());
  std::vector<int> out;
  for (int i = 0; i < k; ++i) out.push_back(all[static_cast<size_t>(i)].second);
  return out;
}

}  // namespace seqplan
