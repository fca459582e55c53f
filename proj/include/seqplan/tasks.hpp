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

// Built-in benchmark tasks. The demo JSON files describe the same ones.

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "seqplan/core.hpp"
#include "seqplan/manifold.hpp"
#include "seqplan/planner/psm.hpp"

namespace seqplan {

/// Upper bowl -> cylinder (radius 2) -> lower bowl -> goal point.
inline SequencedTask point_3d_task(bool with_obstacles) {
  SequencedTask t;
  const Eigen::VectorXd c = make_config({0.1, 0.1});
  t.manifolds = {paraboloid(1.0, c, 2.0), cylinder(3, 2.0), paraboloid(-1.0, c, 2.0),
                 point_goal(make_config({-3.5, -3.5, -4.45}))};
  t.start = make_config({3.5, 3.5, 4.45});
  t.bounds = Box::cube(3, -6.0, 6.0);
  if (with_obstacles) {
    for (double z : {2.4, -2.4}) {
      for (double deg : {45.0, 225.0}) {
        const double a = deg * std::numbers::pi / 180.0;
        t.obstacles.push_back(
            Box::centered(make_config({2.0 * std::cos(a), 2.0 * std::sin(a), z}),
                          Eigen::VectorXd::Constant(3, 1.5)));
      }
    }
  }
  return t;
}

/// Upper bowl z = 0.5 r^2 + 0.5 -> `middle` -> lower bowl -> goal. The
/// bowls cut the unit sphere at |z| = sqrt(3) - 1.
inline SequencedTask sphere_transfer_task(const Manifold& middle) {
  require_dim(middle.ambient_dim(), 3, "sphere_transfer_task");
  SequencedTask t;
  const Eigen::VectorXd c = make_config({0.5, 0.5});
  const double x = 1.06;
  const double z = 0.5 * (2.0 * x * x) + 0.5;
  t.manifolds = {paraboloid(1.0, c, 0.5), middle, paraboloid(-1.0, c, 0.5),
                 point_goal(make_config({-x, -x, -z}))};
  t.start = make_config({x, x, z});
  t.bounds = Box::cube(3, -2.0, 2.0);
  return t;
}

}  // namespace seqplan
