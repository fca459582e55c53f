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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "seqplan/kinematics.hpp"

namespace seqplan {
namespace {

SerialChain one_link(const Eigen::Vector3d& axis) {
  return SerialChain({{axis, Eigen::Vector3d(1, 0, 0)}});
}

TEST(Kinematics, ZeroJointsSumOffsets) {
  const SerialChain c({{Eigen::Vector3d::UnitZ(), Eigen::Vector3d(1, 0, 0)},
                       {Eigen::Vector3d::UnitZ(), Eigen::Vector3d(1, 0, 0)}});
  EXPECT_LE((fk_position(c, Eigen::Vector2d::Zero()) - Eigen::Vector3d(2, 0, 0)).norm(),
            1e-15);
}

TEST(Kinematics, QuarterTurnAboutZ) {
  const SerialChain c = one_link(Eigen::Vector3d::UnitZ());
  Eigen::VectorXd q(1);
  q << std::numbers::pi / 2;
  EXPECT_LE((fk_position(c, q) - Eigen::Vector3d(0, 1, 0)).norm(), 1e-12);
}

TEST(Kinematics, PositionJacobianMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  for (const SerialChain& c : {planar_arm_3dof(), arm_6dof()}) {
    for (int t = 0; t < 50; ++t) {
      Eigen::VectorXd q(c.dof());
      for (int j = 0; j < c.dof(); ++j) q[j] = u(rng);
      const Matrix analytic = fk_position_jacobian(c, q);
      const Matrix fd = finite_difference_jacobian(
          [&](const Config& x) -> Eigen::VectorXd { return fk_position(c, x); }, q);
      EXPECT_LE((analytic - fd).norm(), 1e-4 * std::max(1.0, fd.norm()));
    }
  }
}

TEST(Kinematics, AlignZ) {
  EXPECT_NEAR(fk_align_z(arm_6dof(), Eigen::VectorXd::Zero(6)), 0.0, 1e-15);
  // A single joint about y turns the tool z-axis toward +x, then down.
  const SerialChain c = one_link(Eigen::Vector3d::UnitY());
  Eigen::VectorXd q(1);
  q << std::numbers::pi / 2;
  EXPECT_NEAR(fk_align_z(c, q), -1.0, 1e-12);
  q << std::numbers::pi;
  EXPECT_NEAR(fk_align_z(c, q), -2.0, 1e-12);
}

TEST(Kinematics, GraspIsSelfConsistent) {
  const SerialChain arm = planar_arm_3dof();
  const Eigen::VectorXd q0 = Eigen::Vector3d(0.3, -0.4, 0.9);
  const Manifold g = grasp_constraint({arm, 0}, 3, fk_position(arm, q0));
  EXPECT_LE(g.violation(q0), 1e-15);
  EXPECT_EQ(g.constraint_dim(), 3);
}

TEST(Kinematics, HandoverWithItself) {
  const SerialChain arm = arm_6dof();
  const Manifold h = handover_constraint({arm, 0}, {arm, 0}, 6);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd q(6);
    for (int j = 0; j < 6; ++j) q[j] = u(rng);
    EXPECT_EQ(h.violation(q), 0.0);
  }
}

TEST(Kinematics, ProjectedUprightSatisfiesAlignment) {
  const SerialChain arm = planar_arm_3dof();
  const Manifold up = upright_constraint({arm, 0}, 3);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  int converged = 0;
  for (int t = 0; t < 50; ++t) {
    const Config q = make_config({u(rng), u(rng), u(rng)});
    const auto p = project(q, up);
    if (!p) continue;
    ++converged;
    EXPECT_LE(std::abs(fk_align_z(arm, *p)), 1e-5);
  }
  EXPECT_GE(converged, 40);
}

TEST(Kinematics, SliceOffsetsIntoLargerSpace) {
  const SerialChain arm = planar_arm_3dof();
  KinematicConstraintRequest req;
  req.kind = KinematicConstraintKind::kGrasp;
  req.grasp_target = fk_position(arm, Eigen::Vector3d(0.1, 0.2, 0.3));
  const Manifold g = constraint_from_kinematics(req, {arm, 2}, 5);
  EXPECT_LE(g.violation(make_config({9, 9, 0.1, 0.2, 0.3})), 1e-15);
  EXPECT_THROW(grasp_constraint({arm, 3}, 5, Eigen::Vector3d::Zero()), PreconditionError);
}

TEST(Kinematics, RejectsNonUnitAxis) {
  EXPECT_THROW(SerialChain({{Eigen::Vector3d(0, 0, 2), Eigen::Vector3d::Zero()}}),
               PreconditionError);
}

}  // namespace
}  // namespace seqplan
