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

// Search tree with RRT*-style insertion and rewiring.

#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "seqplan/core.hpp"
#include "seqplan/planner/free_space.hpp"

namespace seqplan {

struct TreeNode {
  Config q;
  double cost = 0.0;
  /// Index of the parent node, kNoParent for the start node, or
  /// kSyntheticRoot for intersection seeds hanging off the synthetic root.
  int parent = -2;
  double edge_length = 0.0;
  /// Realized directed edges (this node may parent `first` at length
  /// `second`). Only collision-free edges are recorded.
  std::vector<std::pair<int, double>> out_edges;
  /// Manifold index this node's children extend on.
  int stage = 0;
  /// Manifold index the incoming edge lies on.
  int edge_stage = 0;
  /// For seeds: the node this one copies in the previous tree.
  int origin_tree = -1;
  int origin_node = -1;
};

class PlanTree {
 public:
  static constexpr int kSyntheticRoot = -1;
  static constexpr int kNoParent = -2;

  PlanTree(int dim, int manifold_index) : dim_(dim), manifold_(manifold_index) {}

  int dim() const { return dim_; }
  int manifold_index() const { return manifold_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const TreeNode& node(int i) const { return nodes_[static_cast<size_t>(i)]; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }

  /// Adds the start configuration with zero cost.
  int add_start(const Config& q) {
    require_dim(q.size(), dim_, "tree start");
    TreeNode n;
    n.q = q;
    n.stage = manifold_;
    n.edge_stage = manifold_;
    nodes_.push_back(std::move(n));
    return size() - 1;
  }

  /// Adds an intersection node below the synthetic root, preserving the cost
  /// it accumulated in the previous tree.
  int add_seed(const Config& q, double cost, int origin_tree, int origin_node) {
    require_dim(q.size(), dim_, "tree seed");
    TreeNode n;
    n.q = q;
    n.cost = cost;
    n.parent = kSyntheticRoot;
    n.edge_length = cost;
    n.stage = manifold_;
    n.edge_stage = manifold_;
    n.origin_tree = origin_tree;
    n.origin_node = origin_node;
    nodes_.push_back(std::move(n));
    root_weights_.emplace_back(size() - 1, cost);
    return size() - 1;
  }

  /// Weights of the synthetic root's edges.
  const std::vector<std::pair<int, double>>& root_edges() const {
    return root_weights_;
  }

  /// Linear scan; ties go to the lowest index. `filter` may exclude nodes.
  int nearest(const Config& q,
              const std::function<bool(const TreeNode&)>& filter = {}) const {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < size(); ++i) {
      if (filter && !filter(nodes_[static_cast<size_t>(i)])) continue;
      const double d = (nodes_[static_cast<size_t>(i)].q - q).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  /// Indices within `radius` of q, ascending.
  std::vector<int> near(const Config& q, double radius) const {
    std::vector<int> out;
    const double r2 = radius * radius;
    for (int i = 0; i < size(); ++i) {
      if ((nodes_[static_cast<size_t>(i)].q - q).squaredNorm() <= r2) out.push_back(i);
    }
    return out;
  }

  /// Root-to-node configurations, stopping at the start or a seed.
  std::vector<int> branch(int i) const {
    std::vector<int> out;
    while (i >= 0) {
      out.push_back(i);
      i = nodes_[static_cast<size_t>(i)].parent;
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  /// Stored cost minus the recomputed sum of edge lengths to the root.
  double cost_defect(int i) const {
    double sum = 0.0;
    int cur = i;
    while (true) {
      const TreeNode& n = nodes_[static_cast<size_t>(cur)];
      if (n.parent == kNoParent) break;
      if (n.parent == kSyntheticRoot) {
        sum += root_weight(cur);
        break;
      }
      sum += (n.q - nodes_[static_cast<size_t>(n.parent)].q).norm();
      cur = n.parent;
    }
    return nodes_[static_cast<size_t>(i)].cost - sum;
  }

  double root_weight(int i) const {
    for (const auto& [idx, w] : root_weights_) {
      if (idx == i) return w;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

 private:
  friend struct TreeEditor;

  int dim_;
  int manifold_;
  std::vector<TreeNode> nodes_;
  std::vector<std::pair<int, double>> root_weights_;
};

/// Settings for one RRT* insertion.
struct ExtendSettings {
  double alpha = 1.0;
  double gamma_rrt = 1.0;
  double collision_resolution = 0.1;
  /// Nodes allowed to parent the new node (default: all).
  std::function<bool(const TreeNode&)> parent_filter;
  /// Nodes the new node may become parent of (default: all).
  std::function<bool(const TreeNode&)> rewire_filter;
  int new_stage = 0;
  int new_edge_stage = 0;
};

/// min{gamma (log|V| / |V|)^(1/k), alpha}.
inline double rewire_radius(int num_nodes, int dim, double gamma_rrt,
                            double alpha) {
  if (num_nodes <= 1) return 0.0;
  const double v = static_cast<double>(num_nodes);
  return std::min(gamma_rrt * std::pow(std::log(v) / v, 1.0 / dim), alpha);
}

struct TreeEditor {
  static std::vector<TreeNode>& nodes(PlanTree& t) { return t.nodes_; }
};

namespace detail {

inline void relax_from(std::vector<TreeNode>& nodes, int start) {
  std::deque<int> queue{start};
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop_front();
    const TreeNode& nx = nodes[static_cast<size_t>(x)];
    for (const auto& [y, w] : nx.out_edges) {
      TreeNode& ny = nodes[static_cast<size_t>(y)];
      const double through = nx.cost + w;
      if (ny.parent == x) {
        if (through != ny.cost) {
          ny.cost = through;
          queue.push_back(y);
        }
      } else if (through < ny.cost - 1e-12) {
        ny.parent = x;
        ny.edge_length = w;
        ny.cost = through;
        queue.push_back(y);
      }
    }
  }
}

}  // namespace detail

/// Inserts q_new if the segment from q_near is collision-free: the new node
/// takes the cheapest collision-free parent among its neighbors (ties to
/// the lowest index), then neighbors are rewired through it when cheaper.
/// Cost decreases propagate along the recorded edges, so node costs are
/// shortest-path distances over the realized neighbor graph.
/// Returns the new node index, or -1 (tree untouched) when blocked.
inline int rrt_star_extend(PlanTree& tree, int near_index, const Config& q_new,
                           const FreeSpace& space,
                           const ExtendSettings& settings) {
  std::vector<TreeNode>& nodes = TreeEditor::nodes(tree);
  const Config q_near = nodes[static_cast<size_t>(near_index)].q;
  if (!collision_free(q_near, q_new, space, settings.collision_resolution)) {
    return -1;
  }
  const double radius = rewire_radius(tree.size(), tree.dim(),
                                      settings.gamma_rrt, settings.alpha);
  std::vector<int> candidates = tree.near(q_new, radius);
  if (std::find(candidates.begin(), candidates.end(), near_index) ==
      candidates.end()) {
    candidates.insert(
        std::lower_bound(candidates.begin(), candidates.end(), near_index),
        near_index);
  }

  struct Link {
    int index;
    double length;
    bool as_parent;
    bool as_child;
  };
  std::vector<Link> links;
  int best = near_index;
  double best_cost = nodes[static_cast<size_t>(near_index)].cost +
                     (q_new - q_near).norm();
  for (int c : candidates) {
    const TreeNode& n = nodes[static_cast<size_t>(c)];
    const bool as_parent =
        c == near_index || !settings.parent_filter || settings.parent_filter(n);
    const bool as_child =
        n.parent != PlanTree::kNoParent &&
        (!settings.rewire_filter || settings.rewire_filter(n));
    if (!as_parent && !as_child) continue;
    const bool free =
        c == near_index ||
        collision_free(n.q, q_new, space, settings.collision_resolution);
    if (!free) continue;
    const double len = (n.q - q_new).norm();
    links.push_back({c, len, as_parent, as_child});
    if (as_parent) {
      const double through = n.cost + len;
      if (through < best_cost || (through == best_cost && c < best)) {
        best = c;
        best_cost = through;
      }
    }
  }

  TreeNode fresh;
  fresh.q = q_new;
  fresh.parent = best;
  fresh.cost = best_cost;
  fresh.edge_length = (q_new - nodes[static_cast<size_t>(best)].q).norm();
  fresh.stage = settings.new_stage;
  fresh.edge_stage = settings.new_edge_stage;
  nodes.push_back(std::move(fresh));
  const int id = tree.size() - 1;

  for (const Link& l : links) {
    if (l.as_parent) nodes[static_cast<size_t>(l.index)].out_edges.emplace_back(id, l.length);
    if (l.as_child) nodes[static_cast<size_t>(id)].out_edges.emplace_back(l.index, l.length);
  }
  detail::relax_from(nodes, id);
  return id;
}

}  // namespace seqplan
