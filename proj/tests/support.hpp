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

// Helpers shared by the unit tests and the acceptance binary.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <utility>
#include <vector>

#include "seqplan/learning/losses.hpp"
#include "seqplan/planner/tree.hpp"

namespace seqplan::testing {

/// Shortest-path costs from the tree's start node over the recorded
/// out-edges, computed with a binary-heap Dijkstra.
inline std::vector<double> dijkstra_costs(const PlanTree& tree, int source = 0) {
  const int n = tree.size();
  std::vector<double> dist(static_cast<size_t>(n), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[static_cast<size_t>(source)] = tree.node(source).cost;
  heap.emplace(dist[static_cast<size_t>(source)], source);
  while (!heap.empty()) {
    const auto [d, x] = heap.top();
    heap.pop();
    if (d > dist[static_cast<size_t>(x)]) continue;
    for (const auto& [y, w] : tree.node(x).out_edges) {
      if (d + w < dist[static_cast<size_t>(y)]) {
        dist[static_cast<size_t>(y)] = d + w;
        heap.emplace(d + w, y);
      }
    }
  }
  return dist;
}

/// A tree grown by `nodes - 1` insertions of uniform samples in the unit
/// cube, each attached through its nearest node.
inline PlanTree random_tree(int nodes, std::uint64_t seed, double alpha = 0.6,
                            double gamma = 1.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PlanTree tree(3, 0);
  tree.add_start(Eigen::Vector3d(u(rng), u(rng), u(rng)));
  FreeSpace space{Box::cube(3, -1.0, 2.0), {}, {}};
  ExtendSettings s;
  s.alpha = alpha;
  s.gamma_rrt = gamma;
  s.collision_resolution = 0.05;
  while (tree.size() < nodes) {
    const Config q = Eigen::Vector3d(u(rng), u(rng), u(rng));
    rrt_star_extend(tree, tree.nearest(q), q, space, s);
  }
  return tree;
}

/// Exact normal bases of the unit sphere (l = 1) or of the unit circle in
/// z = 0 (l = 2), each multiplied by a random element of O(l).
inline std::vector<Matrix> scrambled_normals(const PointSet& data, int l,
                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-3.14159, 3.14159);
  std::bernoulli_distribution coin(0.5);
  std::vector<Matrix> out;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const Eigen::Vector3d q = data.row(i).transpose();
    Matrix v(3, l);
    if (l == 1) {
      v.col(0) = q.normalized();
    } else {
      v.col(0) = Eigen::Vector3d(q.x(), q.y(), 0.0).normalized();
      v.col(1) = Eigen::Vector3d::UnitZ();
    }
    Matrix r = Matrix::Identity(l, l);
    if (l == 2) {
      const double a = angle(rng);
      r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    }
    if (coin(rng)) r.col(0) = -r.col(0);
    out.push_back(v * r);
  }
  return out;
}

struct LossCase {
  MlpModel model;
  LossBatch batch;
};

/// A small random network (3 inputs, l outputs) with a batch touching every
/// loss term. Biases are random so no output sits at the origin.
inline LossCase random_loss_case(std::uint64_t seed, int l) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  LossCase c;
  c.model = make_mlp({3, 5, 4, l}, seed + 101);
  for (auto& b : c.model.biases) {
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = 0.3 * g(rng);
  }
  auto point = [&] {
    Config q(3);
    for (int i = 0; i < 3; ++i) q[i] = g(rng);
    return q;
  };
  LossBatch& b = c.batch;
  for (int i = 0; i < 8; ++i) b.add(point());
  b.norm_terms = {{0, 0.0}, {1, 0.3}, {2, 0.7}, {5, 0.2}};
  b.reflection_pairs = {{1, 2}, {6, 7}};
  b.fraction_pairs = {{3, 4}, {1, 6}};
  b.similar_pairs = {{0, 5}};
  for (int k : {0, 3}) {
    Eigen::HouseholderQR<Matrix> qr(Matrix::NullaryExpr(3, 3, [&] { return g(rng); }));
    const Matrix q = qr.householderQ();
    b.align_terms.push_back({k, q.leftCols(3 - l), q.rightCols(l)});
  }
  for (int k : {1, 2, 4}) {
    Eigen::VectorXd t(l);
    for (int i = 0; i < l; ++i) t[i] = 0.5 * g(rng);
    b.signed_terms.emplace_back(k, t);
  }
  return c;
}

inline constexpr std::array<const char*, 6> kLossTermNames{
    "norm", "reflection", "fraction", "similar", "align", "signed"};

/// Worst |analytic - fd| / (rtol |fd| + atol) over all parameters for one
/// loss term (index into kLossTermNames); <= 1 passes.
inline double loss_gradient_error(const LossCase& c, int term, double rtol = 1e-4,
                                  double atol = 1e-8, double step = 1e-6) {
  LossWeights w{0.0, 0.0, 0.0, 0.0, 0.0};
  std::array<double*, 6> slot{&w.norm,    &w.reflection, &w.fraction,
                              &w.similar, &w.align,      &w.signed_label};
  *slot[static_cast<size_t>(term)] = 1.0;
  MlpGradient grad(c.model);
  compute_losses(c.model, c.batch, w, &grad);
  const Eigen::VectorXd analytic = grad.flatten();
  const Eigen::VectorXd p = c.model.flatten();
  MlpModel probe = c.model;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    Eigen::VectorXd x = p;
    x[i] += step;
    probe.unflatten(x);
    const double fp = compute_losses(probe, c.batch, w).total;
    x[i] -= 2.0 * step;
    probe.unflatten(x);
    const double fm = compute_losses(probe, c.batch, w).total;
    const double fd = (fp - fm) / (2.0 * step);
    worst = std::max(worst, std::abs(analytic[i] - fd) / (rtol * std::abs(fd) + atol));
  }
  return worst;
}

}  // namespace seqplan::testing
