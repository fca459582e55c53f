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
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "seqplan/core.hpp"

namespace seqplan {

/// Closed axis-aligned box [lo, hi].
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Box() = default;
  Box(Eigen::VectorXd lo_, Eigen::VectorXd hi_)
      : lo(std::move(lo_)), hi(std::move(hi_)) {
    require(lo.size() == hi.size(), "box corners differ in dimension");
    require((hi.array() >= lo.array()).all(), "box has hi < lo");
  }

  static Box cube(int dim, double lo, double hi) {
    return Box(Eigen::VectorXd::Constant(dim, lo),
               Eigen::VectorXd::Constant(dim, hi));
  }
  static Box centered(const Eigen::VectorXd& center,
                      const Eigen::VectorXd& half_extent) {
    return Box(center - half_extent, center + half_extent);
  }

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& q) const {
    return (q.array() >= lo.array()).all() && (q.array() <= hi.array()).all();
  }
  double diameter() const { return (hi - lo).norm(); }
  bool degenerate() const { return ((hi - lo).array() <= 0.0).any(); }
};

/// Geometry rigidly carried by a point robot (configurations are positions).
struct AttachedShape {
  enum class Kind { kSphere, kBox };
  Kind kind = Kind::kSphere;
  Eigen::VectorXd offset;        // relative to the robot point
  double radius = 0.0;           // sphere
  Eigen::VectorXd half_extent;   // box
};

/// The free configuration space of one stage: the bounds, the obstacle
/// boxes and whatever the robot currently carries.
struct FreeSpace {
  Box bounds;
  std::vector<Box> obstacles;
  std::vector<AttachedShape> attached;

  /// Collision status of a single configuration.
  bool valid(const Eigen::Ref<const Eigen::VectorXd>& q) const {
    if (!bounds.contains(q)) return false;
    for (const Box& b : obstacles) {
      if (b.contains(q)) return false;
      for (const AttachedShape& s : attached) {
        if (shape_hits(s, q, b)) return false;
      }
    }
    return true;
  }

 private:
  static bool shape_hits(const AttachedShape& s,
                         const Eigen::Ref<const Eigen::VectorXd>& q,
                         const Box& b) {
    const Eigen::VectorXd c =
        s.offset.size() == q.size() ? Eigen::VectorXd(q + s.offset)
                                    : Eigen::VectorXd(q);
    if (s.kind == AttachedShape::Kind::kSphere) {
      const Eigen::VectorXd nearest = c.cwiseMax(b.lo).cwiseMin(b.hi);
      return (nearest - c).norm() <= s.radius;
    }
    return ((c - s.half_extent).array() <= b.hi.array()).all() &&
           ((c + s.half_extent).array() >= b.lo.array()).all();
  }
};

/// Straight-line segment check in ambient space, sampled every `resolution`
/// (both endpoints included).
inline bool collision_free(const Config& a, const Config& b,
                           const FreeSpace& space, double resolution) {
  require_dim(b.size(), a.size(), "collision_free");
  require(resolution > 0.0, "collision resolution must be positive");
  const double len = (b - a).norm();
  const int steps = std::max(1, static_cast<int>(std::ceil(len / resolution)));
  for (int s = 0; s <= steps; ++s) {
    const double t = static_cast<double>(s) / steps;
    if (!space.valid(a + t * (b - a))) return false;
  }
  return true;
}

/// The transition operator applied when the plan crosses an intersection.
using TransitionHook =
    std::function<FreeSpace(const FreeSpace&, const Config& q_transition)>;

inline FreeSpace apply_upsilon(const TransitionHook& hook,
                               const FreeSpace& space,
                               const Config& q_transition) {
  if (!hook) return space;
  return hook(space, q_transition);
}

inline TransitionHook identity_hook() {
  return [](const FreeSpace& space, const Config&) { return space; };
}

/// Attaches a box centred on the robot point; the carried object's
/// geometry is independent of where the intersection was crossed.
inline TransitionHook attach_box_hook(Eigen::VectorXd half_extent) {
  return [half_extent](const FreeSpace& space, const Config& q) {
    require_dim(half_extent.size(), q.size(), "attach_box hook");
    FreeSpace out = space;
    AttachedShape s;
    s.kind = AttachedShape::Kind::kBox;
    s.offset = Eigen::VectorXd::Zero(q.size());
    s.half_extent = half_extent;
    out.attached.push_back(std::move(s));
    return out;
  };
}

/// Attaches a sphere (rotationally symmetric object held at its centre).
inline TransitionHook attach_sphere_hook(double radius) {
  return [radius](const FreeSpace& space, const Config& q) {
    FreeSpace out = space;
    AttachedShape s;
    s.kind = AttachedShape::Kind::kSphere;
    s.offset = Eigen::VectorXd::Zero(q.size());
    s.radius = radius;
    out.attached.push_back(std::move(s));
    return out;
  };
}

/// Attaches a box whose offset from the robot is fixed by where it was
/// picked up: the object sits at `anchor`, so the carried offset is
/// anchor - q_transition. Free space then depends on the crossing point.
inline TransitionHook attach_box_at_anchor_hook(Eigen::VectorXd anchor,
                                                Eigen::VectorXd half_extent) {
  return [anchor, half_extent](const FreeSpace& space, const Config& q) {
    FreeSpace out = space;
    AttachedShape s;
    s.kind = AttachedShape::Kind::kBox;
    s.offset = anchor - q;
    s.half_extent = half_extent;
    out.attached.push_back(std::move(s));
    return out;
  };
}

/// Removes all carried geometry (the object has been placed).
inline TransitionHook release_hook() {
  return [](const FreeSpace& space, const Config&) {
    FreeSpace out = space;
    out.attached.clear();
    return out;
  };
}

}  // namespace seqplan
