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

// Sequential manifold planning: one RRT* tree per manifold, re-rooted on the
// intersection points found by the previous tree.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "seqplan/core.hpp"
#include "seqplan/manifold.hpp"
#include "seqplan/planner/free_space.hpp"
#include "seqplan/planner/steer.hpp"
#include "seqplan/planner/tree.hpp"

namespace seqplan {

struct PlannerParams {
  double alpha = 1.0;
  double beta = 0.1;
  double epsilon = 0.01;
  double rho = 0.1;
  double r = 1.5;
  int m = 1200;
  /// <= 0 selects 2 * diameter(bounds).
  double gamma_rrt = 0.0;
  std::uint64_t rng_seed = 0;
  /// <= 0 selects alpha / 10.
  double collision_resolution = 0.0;
  ProjectionSettings projection;

  void validate() const {
    require(alpha > 0.0, "alpha must be positive");
    require(beta >= 0.0 && beta <= 1.0, "beta must lie in [0, 1]");
    require(epsilon > 0.0, "epsilon must be positive");
    require(rho >= 0.0, "rho must be non-negative");
    require(r > 0.0, "r must be positive");
    require(m >= 1, "m must be at least 1");
    require(projection.tolerance <= epsilon,
            "projection tolerance must not exceed epsilon");
  }
};

/// Manifolds M_1..M_{n+1}; the last one is the goal manifold.
struct SequencedTask {
  std::vector<Manifold> manifolds;
  Config start;
  Box bounds;
  std::vector<Box> obstacles;
  /// hooks[i] runs when the plan crosses from manifolds[i] to
  /// manifolds[i+1]. May be empty (identity everywhere) or hold n entries.
  std::vector<TransitionHook> hooks;

  int num_stages() const { return static_cast<int>(manifolds.size()) - 1; }

  void validate(double epsilon) const {
    require(manifolds.size() >= 2,
            "task needs at least one manifold and a goal manifold");
    const int k = static_cast<int>(start.size());
    require(k > 0, "task start is empty");
    for (const Manifold& mf : manifolds) {
      require(mf.valid(), "task contains an empty manifold");
      require_dim(mf.ambient_dim(), k, "task manifold");
    }
    require_dim(bounds.dim(), k, "task bounds");
    require(!bounds.degenerate(), "task bounds are degenerate");
    for (const Box& b : obstacles) require_dim(b.dim(), k, "task obstacle");
    require(hooks.empty() || static_cast<int>(hooks.size()) == num_stages(),
            "task needs one transition hook per intersection");
    require(start.allFinite(), "task start is not finite");
    const double v = manifolds.front().violation(start);
    require(v <= epsilon, "start violates the first manifold (||h|| = " +
                              std::to_string(v) + ")");
  }
};

struct PathResult {
  bool success = false;
  /// Stage whose intersection set stayed empty; -1 on success.
  int failure_stage = -1;
  std::vector<Config> waypoints;
  /// segment_starts[i] is the first waypoint on manifolds[i]; the segment
  /// runs to segment_starts[i+1] inclusive (the shared intersection point).
  /// The final waypoint lies on the goal manifold.
  std::vector<int> segment_starts;
  double cost = std::numeric_limits<double>::infinity();
  std::vector<int> tree_sizes;
  std::vector<int> goal_counts;
  int iterations = 0;
  int extensions = 0;
  double wall_seconds = 0.0;
};

inline double path_length(const std::vector<Config>& waypoints) {
  double sum = 0.0;
  for (size_t i = 1; i < waypoints.size(); ++i) {
    sum += (waypoints[i] - waypoints[i - 1]).norm();
  }
  return sum;
}

namespace detail {

inline double resolved_gamma(const PlannerParams& p, const Box& bounds) {
  return p.gamma_rrt > 0.0 ? p.gamma_rrt : 2.0 * bounds.diameter();
}

inline double resolved_resolution(const PlannerParams& p) {
  return p.collision_resolution > 0.0 ? p.collision_resolution
                                      : p.alpha / 10.0;
}

inline SteerSettings steer_settings(const PlannerParams& p) {
  SteerSettings s;
  s.alpha = p.alpha;
  s.beta = p.beta;
  s.epsilon = p.epsilon;
  s.r = p.r;
  s.projection = p.projection;
  return s;
}

inline TransitionHook hook_at(const SequencedTask& task, int stage) {
  if (task.hooks.empty()) return {};
  return task.hooks[static_cast<size_t>(stage)];
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

enum class SeedPolicy { kAll, kCheapest };

inline PathResult run_multi_tree(const SequencedTask& task,
                                 const PlannerParams& params,
                                 SeedPolicy policy) {
  const auto t0 = std::chrono::steady_clock::now();
  params.validate();
  task.validate(params.epsilon);

  const int n = task.num_stages();
  const int k = static_cast<int>(task.start.size());
  Rng rng(params.rng_seed);
  const SteerSettings steer = steer_settings(params);
  ExtendSettings extend;
  extend.alpha = params.alpha;
  extend.gamma_rrt = resolved_gamma(params, task.bounds);
  extend.collision_resolution = resolved_resolution(params);

  PathResult result;
  FreeSpace space{task.bounds, task.obstacles, {}};
  std::vector<PlanTree> trees;
  std::vector<int> goals;

  for (int stage = 0; stage < n; ++stage) {
    const Manifold& cur = task.manifolds[static_cast<size_t>(stage)];
    const Manifold& next = task.manifolds[static_cast<size_t>(stage) + 1];
    const Manifold both = intersect(cur, next);
    PlanTree tree(k, stage);
    if (stage == 0) {
      tree.add_start(task.start);
    } else {
      const PlanTree& prev = trees.back();
      if (policy == SeedPolicy::kAll) {
        for (int g : goals) {
          tree.add_seed(prev.node(g).q, prev.node(g).cost, stage - 1, g);
        }
      } else {
        int best = goals.front();
        for (int g : goals) {
          if (prev.node(g).cost < prev.node(best).cost) best = g;
        }
        tree.add_seed(prev.node(best).q, prev.node(best).cost, stage - 1, best);
      }
    }
    extend.new_stage = stage;
    extend.new_edge_stage = stage;

    goals.clear();
    for (int it = 0; it < params.m; ++it) {
      ++result.iterations;
      const Config q_rand = sample_uniform(task.bounds, rng);
      const int near = tree.nearest(q_rand);
      const SteerOutcome s =
          psm_steer(steer, tree.node(near).q, q_rand, cur, next, both, rng);
      if (!s.q_new) continue;
      if (cur.violation(*s.q_new) > params.epsilon) continue;
      const int id = rrt_star_extend(tree, near, *s.q_new, space, extend);
      if (id < 0) continue;
      ++result.extensions;
      if (next.violation(*s.q_new) < params.epsilon) {
        // Spacing is checked against the nearest V_goal member only.
        double closest = std::numeric_limits<double>::infinity();
        for (int g : goals) {
          closest = std::min(closest, (tree.node(g).q - *s.q_new).norm());
        }
        if (goals.empty() || closest >= params.rho) goals.push_back(id);
      }
    }
    result.tree_sizes.push_back(tree.size());
    result.goal_counts.push_back(static_cast<int>(goals.size()));
    trees.push_back(std::move(tree));
    if (goals.empty()) {
      result.failure_stage = stage;
      result.wall_seconds = seconds_since(t0);
      return result;
    }
    if (stage + 1 < n) {
      space = apply_upsilon(hook_at(task, stage), space,
                            trees.back().node(goals.front()).q);
    }
  }

  // Cheapest node on the goal manifold, then walk back across the trees.
  const PlanTree& last = trees.back();
  int best = goals.front();
  for (int g : goals) {
    if (last.node(g).cost < last.node(best).cost) best = g;
  }
  result.cost = last.node(best).cost;

  std::vector<std::vector<Config>> pieces(static_cast<size_t>(n));
  int tree_index = n - 1;
  int node_index = best;
  while (tree_index >= 0) {
    const PlanTree& t = trees[static_cast<size_t>(tree_index)];
    const std::vector<int> br = t.branch(node_index);
    for (int i : br) pieces[static_cast<size_t>(tree_index)].push_back(t.node(i).q);
    const TreeNode& root = t.node(br.front());
    if (root.parent == PlanTree::kNoParent) break;
    node_index = root.origin_node;
    tree_index = root.origin_tree;
  }
  for (int i = 0; i < n; ++i) {
    auto& piece = pieces[static_cast<size_t>(i)];
    // A seed duplicates the previous tree's intersection node.
    const size_t skip = result.waypoints.empty() ? 0 : 1;
    result.segment_starts.push_back(
        static_cast<int>(result.waypoints.size()) - static_cast<int>(skip));
    for (size_t j = skip; j < piece.size(); ++j) {
      result.waypoints.push_back(std::move(piece[j]));
    }
  }
  result.success = true;
  result.wall_seconds = seconds_since(t0);
  return result;
}

}  // namespace detail

/// PSM*: every intersection point of stage i seeds the tree of stage i+1.
inline PathResult psm_star(const SequencedTask& task,
                           const PlannerParams& params) {
  return detail::run_multi_tree(task, params, detail::SeedPolicy::kAll);
}

/// Greedy variant: only the cheapest intersection point seeds the next tree.
inline PathResult psm_star_greedy(const SequencedTask& task,
                                  const PlannerParams& params) {
  return detail::run_multi_tree(task, params, detail::SeedPolicy::kCheapest);
}

/// Single-tree variant: n * m iterations over one tree whose nodes remember
/// the manifold they extend on. A node reaching the next manifold switches
/// stage immediately (no spacing filter). The free space of stage s+1 is
/// fixed by the first node that reaches it.
inline PathResult psm_star_single_tree(const SequencedTask& task,
                                       const PlannerParams& params) {
  const auto t0 = std::chrono::steady_clock::now();
  params.validate();
  task.validate(params.epsilon);

  const int n = task.num_stages();
  const int k = static_cast<int>(task.start.size());
  Rng rng(params.rng_seed);
  const SteerSettings steer = detail::steer_settings(params);
  std::vector<Manifold> pairs;
  for (int s = 0; s < n; ++s) {
    pairs.push_back(intersect(task.manifolds[static_cast<size_t>(s)],
                              task.manifolds[static_cast<size_t>(s) + 1]));
  }
  std::vector<FreeSpace> spaces(static_cast<size_t>(n) + 1);
  std::vector<bool> reached(static_cast<size_t>(n) + 1, false);
  spaces[0] = FreeSpace{task.bounds, task.obstacles, {}};
  reached[0] = true;

  PathResult result;
  PlanTree tree(k, 0);
  tree.add_start(task.start);
  const auto extendable = [n](const TreeNode& nd) { return nd.stage < n; };

  for (int it = 0; it < n * params.m; ++it) {
    ++result.iterations;
    const Config q_rand = sample_uniform(task.bounds, rng);
    const int near = tree.nearest(q_rand, extendable);
    const int s = tree.node(near).stage;
    const Manifold& cur = task.manifolds[static_cast<size_t>(s)];
    const Manifold& next = task.manifolds[static_cast<size_t>(s) + 1];
    const SteerOutcome out = psm_steer(steer, tree.node(near).q, q_rand, cur,
                                       next, pairs[static_cast<size_t>(s)], rng);
    if (!out.q_new) continue;
    if (cur.violation(*out.q_new) > params.epsilon) continue;
    const bool crosses = next.violation(*out.q_new) < params.epsilon;

    ExtendSettings extend;
    extend.alpha = params.alpha;
    extend.gamma_rrt = detail::resolved_gamma(params, task.bounds);
    extend.collision_resolution = detail::resolved_resolution(params);
    extend.parent_filter = [s](const TreeNode& nd) { return nd.stage == s; };
    if (crosses) {
      extend.rewire_filter = [](const TreeNode&) { return false; };
    } else {
      extend.rewire_filter = [s](const TreeNode& nd) {
        return nd.edge_stage == s;
      };
    }
    extend.new_stage = crosses ? s + 1 : s;
    extend.new_edge_stage = s;
    const int id = rrt_star_extend(tree, near, *out.q_new,
                                   spaces[static_cast<size_t>(s)], extend);
    if (id < 0) continue;
    ++result.extensions;
    if (crosses && !reached[static_cast<size_t>(s) + 1]) {
      reached[static_cast<size_t>(s) + 1] = true;
      spaces[static_cast<size_t>(s) + 1] =
          apply_upsilon(detail::hook_at(task, s), spaces[static_cast<size_t>(s)],
                        *out.q_new);
    }
  }

  result.tree_sizes.push_back(tree.size());
  std::vector<int> per_stage(static_cast<size_t>(n), 0);
  int best = -1;
  for (int i = 0; i < tree.size(); ++i) {
    const TreeNode& nd = tree.node(i);
    if (nd.stage != nd.edge_stage) ++per_stage[static_cast<size_t>(nd.edge_stage)];
    if (nd.stage == n && (best < 0 || nd.cost < tree.node(best).cost)) best = i;
  }
  result.goal_counts = per_stage;
  if (best < 0) {
    for (int s = 0; s < n; ++s) {
      if (!reached[static_cast<size_t>(s) + 1]) {
        result.failure_stage = s;
        break;
      }
    }
    result.wall_seconds = detail::seconds_since(t0);
    return result;
  }
  result.cost = tree.node(best).cost;
  const std::vector<int> br = tree.branch(best);
  result.segment_starts.push_back(0);
  for (size_t j = 0; j < br.size(); ++j) {
    const TreeNode& nd = tree.node(br[j]);
    result.waypoints.push_back(nd.q);
    if (nd.stage != nd.edge_stage && nd.stage < n) {
      result.segment_starts.push_back(static_cast<int>(j));
    }
  }
  result.success = true;
  result.wall_seconds = detail::seconds_since(t0);
  return result;
}

}  // namespace seqplan
