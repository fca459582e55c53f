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

#include "seqplan/core.hpp"
#include "seqplan/datasets.hpp"
#include "seqplan/experiments.hpp"
#include "seqplan/kinematics.hpp"
#include "seqplan/learning/augment.hpp"
#include "seqplan/learning/learned.hpp"
#include "seqplan/learning/local_pca.hpp"
#include "seqplan/learning/losses.hpp"
#include "seqplan/learning/mlp.hpp"
#include "seqplan/learning/osa.hpp"
#include "seqplan/learning/spatial.hpp"
#include "seqplan/learning/train.hpp"
#include "seqplan/manifold.hpp"
#include "seqplan/planner/free_space.hpp"
#include "seqplan/planner/psm.hpp"
#include "seqplan/planner/steer.hpp"
#include "seqplan/planner/tree.hpp"
#include "seqplan/tasks.hpp"
