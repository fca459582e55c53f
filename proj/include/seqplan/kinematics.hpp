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

// Revolute serial chains and the task-space constraints built on them.

#pragma once

#include <Eigen/Geometry>

#include <string>
#include <utility>
#include <vector>

#include "seqplan/core.hpp"
#include "seqplan/manifold.hpp"

namespace seqplan {

struct Link {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();  // unit rotation axis
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();  // meters, in joint frame
};

/// Revolute-only chain. Joint j rotates about links[j].axis, then the frame
/// translates by links[j].offset; the end effector sits at the final origin.
class SerialChain {
 public:
  SerialChain() = default;
  explicit SerialChain(std::vector<Link> links,
                       Eigen::Isometry3d base = Eigen::Isometry3d::Identity())
      : links_(std::move(links)), base_(base) {
    require(!links_.empty(), "serial chain needs at least one link");
    for (const Link& l : links_) {
      require(std::abs(l.axis.norm() - 1.0) < 1e-9,
              "serial chain joint axes must be unit-norm");
    }
  }

  int dof() const { return static_cast<int>(links_.size()); }
  const std::vector<Link>& links() const { return links_; }
  const Eigen::Isometry3d& base() const { return base_; }

  /// Tool frame pose for joint values q (size dof()).
  Eigen::Isometry3d tool_pose(const Eigen::Ref<const Eigen::VectorXd>& q) const {
    require_dim(q.size(), dof(), "serial chain configuration");
    Eigen::Isometry3d t = base_;
    for (int j = 0; j < dof(); ++j) {
      t.rotate(Eigen::AngleAxisd(q[j], links_[j].axis));
      t.translate(links_[j].offset);
    }
    return t;
  }

 private:
  std::vector<Link> links_;
  Eigen::Isometry3d base_ = Eigen::Isometry3d::Identity();
};

inline Eigen::Vector3d fk_position(const SerialChain& chain,
                                   const Eigen::Ref<const Eigen::VectorXd>& q) {
  return chain.tool_pose(q).translation();
}

/// Tool z-axis dotted with world +z, minus one; lies in [-2, 0].
inline double fk_align_z(const SerialChain& chain,
                         const Eigen::Ref<const Eigen::VectorXd>& q) {
  return chain.tool_pose(q).linear().col(2).z() - 1.0;
}

/// Geometric position Jacobian (3 x dof): column j is w_j x (p_e - p_j).
inline Matrix fk_position_jacobian(const SerialChain& chain,
                                   const Eigen::Ref<const Eigen::VectorXd>& q) {
  require_dim(q.size(), chain.dof(), "serial chain configuration");
  std::vector<Eigen::Vector3d> axes;
  std::vector<Eigen::Vector3d> origins;
  Eigen::Isometry3d t = chain.base();
  for (int j = 0; j < chain.dof(); ++j) {
    axes.push_back(t.linear() * chain.links()[j].axis);
    origins.push_back(t.translation());
    t.rotate(Eigen::AngleAxisd(q[j], chain.links()[j].axis));
    t.translate(chain.links()[j].offset);
  }
  const Eigen::Vector3d tip = t.translation();
  Matrix jac(3, chain.dof());
  for (int j = 0; j < chain.dof(); ++j) {
    jac.col(j) = axes[j].cross(tip - origins[j]);
  }
  return jac;
}

/// A chain whose joints occupy q[offset, offset + dof) of a larger
/// configuration vector (several robots share one configuration space).
struct ChainSlice {
  SerialChain chain;
  int offset = 0;

  Eigen::VectorXd joints(const Config& q) const {
    require(offset >= 0 && offset + chain.dof() <= q.size(),
            "chain slice exceeds configuration dimension");
    return q.segment(offset, chain.dof());
  }
};

// Constraint constructors. Jacobians come from central differences.

/// h(q) = x_g - f_pos(q).
inline Manifold grasp_constraint(const ChainSlice& slice, int ambient_dim,
                                 const Eigen::Vector3d& target) {
  require(slice.offset + slice.chain.dof() <= ambient_dim,
          "grasp chain does not fit the configuration space");
  auto value = [slice, target](const Config& q) -> Eigen::VectorXd {
    return target - fk_position(slice.chain, slice.joints(q));
  };
  return Manifold("grasp", ambient_dim, 3, value);
}

/// h(q) = f_pos,a(q) - f_pos,b(q).
inline Manifold handover_constraint(const ChainSlice& a, const ChainSlice& b,
                                    int ambient_dim) {
  require(a.offset + a.chain.dof() <= ambient_dim &&
              b.offset + b.chain.dof() <= ambient_dim,
          "handover chains do not fit the configuration space");
  auto value = [a, b](const Config& q) -> Eigen::VectorXd {
    return fk_position(a.chain, a.joints(q)) - fk_position(b.chain, b.joints(q));
  };
  return Manifold("handover", ambient_dim, 3, value);
}

/// h(q) = f_rot,z(q)^T e_z - 1.
inline Manifold upright_constraint(const ChainSlice& slice, int ambient_dim) {
  require(slice.offset + slice.chain.dof() <= ambient_dim,
          "upright chain does not fit the configuration space");
  auto value = [slice](const Config& q) {
    Eigen::VectorXd h(1);
    h[0] = fk_align_z(slice.chain, slice.joints(q));
    return h;
  };
  return Manifold("upright", ambient_dim, 1, value);
}

/// h(q) = f_pos(q)[axis] - offset: the end effector stays on a plane.
inline Manifold ee_plane_constraint(const ChainSlice& slice, int ambient_dim,
                                    int axis, double offset) {
  require(axis >= 0 && axis < 3, "plane axis must be 0, 1 or 2");
  auto value = [slice, axis, offset](const Config& q) {
    Eigen::VectorXd h(1);
    h[0] = fk_position(slice.chain, slice.joints(q))[axis] - offset;
    return h;
  };
  return Manifold("ee_plane", ambient_dim, 1, value);
}

enum class KinematicConstraintKind { kGrasp, kHandover, kUpright };

struct KinematicConstraintRequest {
  KinematicConstraintKind kind = KinematicConstraintKind::kGrasp;
  Eigen::Vector3d grasp_target = Eigen::Vector3d::Zero();
  ChainSlice other;  // second robot for handover
};

inline Manifold constraint_from_kinematics(const KinematicConstraintRequest& req,
                                           const ChainSlice& chain,
                                           int ambient_dim) {
  switch (req.kind) {
    case KinematicConstraintKind::kGrasp:
      return grasp_constraint(chain, ambient_dim, req.grasp_target);
    case KinematicConstraintKind::kHandover:
      return handover_constraint(chain, req.other, ambient_dim);
    case KinematicConstraintKind::kUpright:
      return upright_constraint(chain, ambient_dim);
  }
  throw PreconditionError("unknown kinematic constraint kind");
}

// Canonical arms used by the Plane and Orient datasets; every link is 1 m.

/// Base yaw followed by two pitch joints.
inline SerialChain planar_arm_3dof() {
  return SerialChain({
      {Eigen::Vector3d::UnitZ(), Eigen::Vector3d(1.0, 0.0, 0.0)},
      {Eigen::Vector3d::UnitY(), Eigen::Vector3d(1.0, 0.0, 0.0)},
      {Eigen::Vector3d::UnitY(), Eigen::Vector3d(1.0, 0.0, 0.0)},
  });
}

/// Yaw, pitch, pitch, roll, pitch, yaw; tool z points up at q = 0.
inline SerialChain arm_6dof() {
  return SerialChain({
      {Eigen::Vector3d::UnitZ(), Eigen::Vector3d(0.0, 0.0, 1.0)},
      {Eigen::Vector3d::UnitY(), Eigen::Vector3d(1.0, 0.0, 0.0)},
      {Eigen::Vector3d::UnitY(), Eigen::Vector3d(1.0, 0.0, 0.0)},
      {Eigen::Vector3d::UnitX(), Eigen::Vector3d(1.0, 0.0, 0.0)},
      {Eigen::Vector3d::UnitY(), Eigen::Vector3d(0.0, 0.0, 1.0)},
      {Eigen::Vector3d::UnitZ(), Eigen::Vector3d(0.0, 0.0, 1.0)},
  });
}

}  // namespace seqplan
