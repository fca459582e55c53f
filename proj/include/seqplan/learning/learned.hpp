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

#include <memory>
#include <string>

#include "seqplan/core.hpp"
#include "seqplan/learning/mlp.hpp"
#include "seqplan/manifold.hpp"

namespace seqplan {

/// Gauss-Newton projection onto the zero set of a trained network.
inline ProjectionResult project_learned(const MlpModel& model, const Config& q,
                                        const ProjectionSettings& settings = {}) {
  require_dim(q.size(), model.input_dim(), "project_learned");
  return newton_project(
      q, [&](const Config& x) { return mlp_forward(model, x); },
      [&](const Config& x) { return mlp_jacobian(model, x); }, settings);
}

/// A manifold whose h and J are the network output and its Jacobian.
inline Manifold learned_manifold(const MlpModel& model,
                                 std::string name = "learned") {
  model.validate();
  auto shared = std::make_shared<const MlpModel>(model);
  auto value = [shared](const Config& q) { return mlp_forward(*shared, q); };
  auto jac = [shared](const Config& q) { return mlp_jacobian(*shared, q); };
  return Manifold(std::move(name), model.input_dim(), model.output_dim(), value,
                  jac);
}

}  // namespace seqplan
