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

// Orthogonal subspace alignment: consistent orientation and rotation of the
// per-point normal-space bases, propagated along a spanning tree.

#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "seqplan/core.hpp"
#include "seqplan/learning/spatial.hpp"

namespace seqplan {

struct OsaSettings {
  int max_iterations = 300;
  /// Stop when the loss or the gradient norm falls below these.
  double loss_tolerance = 1e-14;
  double gradient_tolerance = 1e-12;
  /// Skew parameters start in Uniform(-init_scale, init_scale).
  double init_scale = 1e-3;
  std::uint64_t seed = 0;
};

struct LocalAlignment {
  Matrix rotation;  // l x l, in SO(l)
  double loss = 0.0;
  int iterations = 0;
};

/// ||I - (V_a R)^T V_c||_F^2.
inline double alignment_loss(const Matrix& va, const Matrix& vc,
                             const Matrix& r) {
  const int l = static_cast<int>(va.cols());
  return (Matrix::Identity(l, l) - (va * r).transpose() * vc).squaredNorm();
}

/// Basis with its first column negated (the "flipped" orientation).
inline Matrix flip_first(const Matrix& v) {
  Matrix out = v;
  if (out.cols() > 0) out.col(0) = -out.col(0);
  return out;
}

namespace detail {

inline Matrix skew_from(const Eigen::VectorXd& p, int l) {
  Matrix s = Matrix::Zero(l, l);
  int k = 0;
  for (int i = 0; i < l; ++i) {
    for (int j = i + 1; j < l; ++j) {
      s(i, j) = p[k];
      s(j, i) = -p[k];
      ++k;
    }
  }
  return s;
}

/// Gradient of f(exp(L)) w.r.t. the upper-triangle parameters of L, given
/// G = df/dR. Uses exp([[A, G], [0, A]]) whose top-right block is the
/// Frechet derivative of exp at A applied to G, with A = L^T (the adjoint).
inline Eigen::VectorXd skew_gradient(const Matrix& skew, const Matrix& g_r) {
  const Eigen::Index l = skew.rows();
  Matrix block = Matrix::Zero(2 * l, 2 * l);
  block.topLeftCorner(l, l) = skew.transpose();
  block.bottomRightCorner(l, l) = skew.transpose();
  block.topRightCorner(l, l) = g_r;
  const Matrix g_l = Matrix(block.exp()).topRightCorner(l, l);
  Eigen::VectorXd out(l * (l - 1) / 2);
  int k = 0;
  for (Eigen::Index i = 0; i < l; ++i) {
    for (Eigen::Index j = i + 1; j < l; ++j) out[k++] = g_l(i, j) - g_l(j, i);
  }
  return out;
}

}  // namespace detail

/// Finds R = exp(L) in SO(l) minimizing ||I - (V_a R)^T V_c||^2 by gradient
/// descent on the skew parameters with backtracking, starting near identity.
inline LocalAlignment osa_local_align(const Matrix& va, const Matrix& vc,
                                      std::mt19937_64& rng,
                                      const OsaSettings& settings = {}) {
  require(va.rows() == vc.rows() && va.cols() == vc.cols(),
          "osa_local_align: basis shapes differ");
  const int l = static_cast<int>(va.cols());
  LocalAlignment out;
  if (l <= 1) {
    out.rotation = Matrix::Identity(l, l);
    out.loss = alignment_loss(va, vc, out.rotation);
    return out;
  }
  const Matrix m = va.transpose() * vc;
  const Matrix eye = Matrix::Identity(l, l);
  const int np = l * (l - 1) / 2;
  std::uniform_real_distribution<double> init(-settings.init_scale,
                                              settings.init_scale);
  Eigen::VectorXd p(np);
  for (int i = 0; i < np; ++i) p[i] = init(rng);

  auto loss_at = [&](const Eigen::VectorXd& x, Matrix* r_out) {
    Matrix r = Matrix(detail::skew_from(x, l).exp());
    const double f = (eye - r.transpose() * m).squaredNorm();
    if (r_out != nullptr) *r_out = std::move(r);
    return f;
  };

  Matrix r;
  double f = loss_at(p, &r);
  double step = 1.0;
  int it = 0;
  for (; it < settings.max_iterations && f > settings.loss_tolerance; ++it) {
    const Matrix e = eye - r.transpose() * m;
    const Matrix g_r = -2.0 * m * e.transpose();
    const Eigen::VectorXd g = detail::skew_gradient(detail::skew_from(p, l), g_r);
    const double gn2 = g.squaredNorm();
    if (gn2 < settings.gradient_tolerance * settings.gradient_tolerance) break;
    bool accepted = false;
    for (int tries = 0; tries < 40; ++tries) {
      const Eigen::VectorXd cand = p - step * g;
      Matrix rc;
      const double fc = loss_at(cand, &rc);
      if (fc <= f - 0.5 * step * gn2) {
        p = cand;
        r = std::move(rc);
        f = fc;
        accepted = true;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  out.rotation = r;
  out.loss = f;
  out.iterations = it;
  return out;
}

struct AlignmentGraph {
  /// Undirected H-NN edges (i < j) with Euclidean weights.
  std::vector<std::tuple<int, int, double>> knn_edges;
  /// Minimum spanning tree edges.
  std::vector<std::pair<int, int>> mst_edges;
  /// Breadth-first (parent, child) pairs from the root.
  std::vector<std::pair<int, int>> dag_edges;
  /// Per DAG edge: losses for (-> ->), (-> <-), (<- ->), (<- <-) where the
  /// first arrow is the parent's orientation and the second the child's.
  std::vector<std::array<double, 4>> pair_losses;
  std::vector<int> parent;  // -1 at the root
  std::vector<bool> flipped;
  std::vector<Matrix> compound;  // R_G per node
  int root = 0;
};

struct OsaResult {
  std::vector<Matrix> aligned;  // V(+/-) R_G per node
  AlignmentGraph graph;
};

/// Loss between two aligned bases, ||I - A_p^T A_c||^2.
inline double aligned_edge_loss(const Matrix& ap, const Matrix& ac) {
  return alignment_loss(ap, ac, Matrix::Identity(ap.cols(), ap.cols()));
}

namespace detail {

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(static_cast<size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] =
          parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
    return true;
  }
};

}  // namespace detail

/// Aligns the normal bases of all points. Throws PreconditionError when the
/// H-NN graph does not reach every point from the root.
inline OsaResult osa_align(const PointSet& data, const KdTree& tree,
                           const std::vector<Matrix>& normals, int H,
                           const OsaSettings& settings = {}) {
  const int n_pts = static_cast<int>(data.rows());
  require(static_cast<int>(normals.size()) == n_pts,
          "osa_align: one normal basis per point required");
  require(H >= 1, "osa_align: H must be at least 1");
  std::mt19937_64 rng(settings.seed);
  OsaResult result;
  AlignmentGraph& g = result.graph;

  std::vector<std::tuple<double, int, int>> weighted;
  for (int i = 0; i < n_pts; ++i) {
    const std::vector<int> nn = tree.knn(data.row(i).transpose(), H + 1);
    for (int j : nn) {
      if (j == i) continue;
      const int a = std::min(i, j);
      const int b = std::max(i, j);
      weighted.emplace_back((data.row(a) - data.row(b)).norm(), a, b);
    }
  }
  std::sort(weighted.begin(), weighted.end());
  weighted.erase(std::unique(weighted.begin(), weighted.end()), weighted.end());
  for (const auto& [w, a, b] : weighted) g.knn_edges.emplace_back(a, b, w);

  // Kruskal.
  detail::DisjointSet ds(n_pts);
  std::vector<std::vector<int>> adj(static_cast<size_t>(n_pts));
  for (const auto& [w, a, b] : weighted) {
    if (ds.unite(a, b)) {
      g.mst_edges.emplace_back(a, b);
      adj[static_cast<size_t>(a)].push_back(b);
      adj[static_cast<size_t>(b)].push_back(a);
    }
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());

  g.parent.assign(static_cast<size_t>(n_pts), -1);
  g.flipped.assign(static_cast<size_t>(n_pts), false);
  g.compound.assign(static_cast<size_t>(n_pts), Matrix());
  result.aligned.assign(static_cast<size_t>(n_pts), Matrix());
  std::vector<bool> seen(static_cast<size_t>(n_pts), false);
  if (n_pts == 0) return result;

  const int l = static_cast<int>(normals.front().cols());
  g.root = 0;
  seen[0] = true;
  g.compound[0] = Matrix::Identity(l, l);
  result.aligned[0] = normals[0];
  std::deque<int> queue{0};
  int reached = 1;
  while (!queue.empty()) {
    const int p = queue.front();
    queue.pop_front();
    for (int c : adj[static_cast<size_t>(p)]) {
      if (seen[static_cast<size_t>(c)]) continue;
      seen[static_cast<size_t>(c)] = true;
      ++reached;
      const Matrix& vc = normals[static_cast<size_t>(c)];
      std::array<LocalAlignment, 4> cand;
      const Matrix vp_plain = normals[static_cast<size_t>(p)];
      const Matrix vp_flip = flip_first(vp_plain);
      const Matrix vc_flip = flip_first(vc);
      cand[0] = osa_local_align(vp_plain, vc, rng, settings);
      cand[1] = osa_local_align(vp_plain, vc_flip, rng, settings);
      cand[2] = osa_local_align(vp_flip, vc, rng, settings);
      cand[3] = osa_local_align(vp_flip, vc_flip, rng, settings);
      g.pair_losses.push_back(
          {cand[0].loss, cand[1].loss, cand[2].loss, cand[3].loss});
      // Only the two pairs matching the parent's fixed orientation count.
      const int base = g.flipped[static_cast<size_t>(p)] ? 2 : 0;
      const bool child_flip = cand[base + 1].loss < cand[base].loss;
      const LocalAlignment& chosen = cand[base + (child_flip ? 1 : 0)];
      g.flipped[static_cast<size_t>(c)] = child_flip;
      g.parent[static_cast<size_t>(c)] = p;
      // V_p R ~ V_c, so V_c R^T R_G(p) ~ V_p R_G(p).
      g.compound[static_cast<size_t>(c)] =
          chosen.rotation.transpose() * g.compound[static_cast<size_t>(p)];
      result.aligned[static_cast<size_t>(c)] =
          (child_flip ? vc_flip : vc) * g.compound[static_cast<size_t>(c)];
      g.dag_edges.emplace_back(p, c);
      queue.push_back(c);
    }
  }
  if (reached != n_pts) {
    throw PreconditionError(
        "osa_align: the " + std::to_string(H) + "-NN graph reaches only " +
        std::to_string(reached) + " of " + std::to_string(n_pts) +
        " points from the root; increase H");
  }
  return result;
}

}  // namespace seqplan
