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

// Training losses for the implicit-function network and their gradients.

#pragma once

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <utility>
#include <vector>

#include "seqplan/core.hpp"
#include "seqplan/learning/augment.hpp"
#include "seqplan/learning/mlp.hpp"

namespace seqplan {

/// kSurrogate: ||J V_T||^2 + ||(I - V_N V_N^T) J^T||^2, which vanishes at J = 0.
/// kSubspace: 2 tr(P_T J^T (J J^T)^-1 J), the subspace projection error
/// itself, invariant to the scale of J.
enum class AlignForm { kSurrogate, kSubspace };

struct LossWeights {
  double norm = 1.0;
  double reflection = 1.0;
  double fraction = 1.0;
  double similar = 1.0;
  double align = 1.0;
  /// Signed warm-up term, see LossBatch::signed_terms.
  double signed_label = 0.0;
  AlignForm align_form = AlignForm::kSurrogate;
};

struct LossValues {
  double norm = 0.0;
  double reflection = 0.0;
  double fraction = 0.0;
  double similar = 0.0;
  double align = 0.0;
  double signed_label = 0.0;
  double total = 0.0;
};

struct AlignTerm {
  int column = -1;
  Matrix tangent;  // n x (n - l)
  Matrix normal;   // n x l
};

/// Evaluation points plus the loss terms that reference them by column.
struct LossBatch {
  std::vector<Config> points;
  std::vector<std::pair<int, double>> norm_terms;    // (column, label)
  std::vector<std::pair<int, int>> reflection_pairs; // (plus, minus)
  std::vector<std::pair<int, int>> fraction_pairs;   // (full, fraction)
  std::vector<std::pair<int, int>> similar_pairs;    // (a, c)
  std::vector<AlignTerm> align_terms;
  /// (column, target) with target = +-i eps V_N^T u in the aligned frame of
  /// the base point. Only used to pick the sign of h early in training.
  std::vector<std::pair<int, Eigen::VectorXd>> signed_terms;

  int add(const Config& q) {
    points.push_back(q);
    return static_cast<int>(points.size()) - 1;
  }
  bool empty() const {
    return norm_terms.empty() && reflection_pairs.empty() &&
           fraction_pairs.empty() && similar_pairs.empty() && align_terms.empty() &&
           signed_terms.empty();
  }
};

/// Adds on-manifold points (label 0, plus alignment terms when bases are
/// given) for the listed dataset rows, and every augmented sample whose
/// base is in the list.
inline void append_to_batch(LossBatch& batch, const PointSet& data,
                            const std::vector<int>& rows,
                            const std::vector<Matrix>* tangents,
                            const std::vector<Matrix>* normals,
                            const std::vector<const AugmentedSample*>& samples) {
  for (int r : rows) {
    const int c = batch.add(data.row(r).transpose());
    batch.norm_terms.emplace_back(c, 0.0);
    if (tangents != nullptr && normals != nullptr) {
      batch.align_terms.push_back(
          {c, (*tangents)[static_cast<size_t>(r)], (*normals)[static_cast<size_t>(r)]});
    }
  }
  for (const AugmentedSample* s : samples) {
    const int c = batch.add(s->point);
    batch.norm_terms.emplace_back(c, s->label);
    Eigen::VectorXd target;
    if (normals != nullptr) {
      target = s->label * ((*normals)[static_cast<size_t>(s->base)].transpose() * s->u);
      batch.signed_terms.emplace_back(c, target);
    }
    if (s->reflection) {
      const int m = batch.add(*s->reflection);
      batch.norm_terms.emplace_back(m, s->label);
      batch.reflection_pairs.emplace_back(c, m);
      if (normals != nullptr) batch.signed_terms.emplace_back(m, -target);
    }
    for (const auto& [f, q] : s->fractions) {
      const int fc = batch.add(q);
      batch.norm_terms.emplace_back(fc, f * s->label);
      batch.fraction_pairs.emplace_back(c, fc);
      if (normals != nullptr) batch.signed_terms.emplace_back(fc, f * target);
    }
    if (s->similar) {
      const int sc = batch.add(*s->similar);
      batch.norm_terms.emplace_back(sc, s->label);
      batch.similar_pairs.emplace_back(c, sc);
    }
  }
}

namespace detail {

// Guard keeping ||y|| differentiable at y = 0.
inline constexpr double kNormGuard = 1e-12;
// Regularizes (J J^T)^-1 for the scale-invariant alignment form.
inline constexpr double kGramGuard = 1e-10;

inline double safe_norm(const Eigen::VectorXd& y) {
  return std::sqrt(y.squaredNorm() + kNormGuard);
}

/// J at one column of a traced batch, by forward-mode propagation.
inline Matrix jacobian_from_trace(const MlpModel& m, const MlpTrace& trace,
                                  Eigen::Index col) {
  const int n = m.input_dim();
  Matrix t = Matrix::Identity(n, n);
  const int layers = m.num_layers();
  for (int k = 0; k < layers; ++k) {
    t = m.weights[static_cast<size_t>(k)] * t;
    if (k + 1 < layers) {
      const Eigen::VectorXd a = trace.activations[static_cast<size_t>(k) + 1].col(col);
      t = (1.0 - a.array().square()).matrix().asDiagonal() * t;
    }
  }
  return t;
}

}  // namespace detail

/// Evaluates every loss term (each averaged over its own term count) and,
/// when `grad` is non-null, accumulates d(weighted total)/d(params).
inline LossValues compute_losses(const MlpModel& model, const LossBatch& batch,
                                 const LossWeights& weights,
                                 MlpGradient* grad = nullptr) {
  require(!batch.empty(), "compute_losses: empty batch");
  const int n = model.input_dim();
  const int l = model.output_dim();
  const Eigen::Index count = static_cast<Eigen::Index>(batch.points.size());
  Matrix x(n, count);
  for (Eigen::Index c = 0; c < count; ++c) x.col(c) = batch.points[static_cast<size_t>(c)];
  MlpTrace trace;
  const Matrix y = mlp_forward_batch(model, x, &trace);
  Matrix g = Matrix::Zero(l, count);
  LossValues v;

  if (!batch.norm_terms.empty()) {
    const double scale = 1.0 / static_cast<double>(batch.norm_terms.size());
    for (const auto& [c, label] : batch.norm_terms) {
      const Eigen::VectorXd yc = y.col(c);
      const double nrm = detail::safe_norm(yc);
      const double diff = nrm - label;
      v.norm += scale * diff * diff;
      g.col(c) += weights.norm * scale * 2.0 * diff / nrm * yc;
    }
  }
  if (!batch.reflection_pairs.empty()) {
    const double scale = 1.0 / static_cast<double>(batch.reflection_pairs.size());
    for (const auto& [a, b] : batch.reflection_pairs) {
      const Eigen::VectorXd s = y.col(a) + y.col(b);
      v.reflection += scale * s.squaredNorm();
      g.col(a) += weights.reflection * scale * 2.0 * s;
      g.col(b) += weights.reflection * scale * 2.0 * s;
    }
  }
  if (!batch.fraction_pairs.empty()) {
    const double scale = 1.0 / static_cast<double>(batch.fraction_pairs.size());
    for (const auto& [a, b] : batch.fraction_pairs) {
      const Eigen::VectorXd ya = y.col(a);
      const Eigen::VectorXd yb = y.col(b);
      const double na = detail::safe_norm(ya);
      const double nb = detail::safe_norm(yb);
      const Eigen::VectorXd fa = ya / na;
      const Eigen::VectorXd fb = yb / nb;
      const Eigen::VectorXd d = fa - fb;
      v.fraction += scale * d.squaredNorm();
      // d(y/s)/dy = I/s - y y^T / s^3 with s = sqrt(|y|^2 + guard).
      const Eigen::VectorXd ga = (2.0 * d - fa * (fa.dot(2.0 * d))) / na;
      const Eigen::VectorXd gb = (-2.0 * d + fb * (fb.dot(2.0 * d))) / nb;
      g.col(a) += weights.fraction * scale * ga;
      g.col(b) += weights.fraction * scale * gb;
    }
  }
  if (!batch.similar_pairs.empty()) {
    const double scale = 1.0 / static_cast<double>(batch.similar_pairs.size());
    for (const auto& [a, b] : batch.similar_pairs) {
      const Eigen::VectorXd d = y.col(a) - y.col(b);
      v.similar += scale * d.squaredNorm();
      g.col(a) += weights.similar * scale * 2.0 * d;
      g.col(b) -= weights.similar * scale * 2.0 * d;
    }
  }
  if (!batch.signed_terms.empty() && weights.signed_label != 0.0) {
    const double scale = 1.0 / static_cast<double>(batch.signed_terms.size());
    for (const auto& [c, target] : batch.signed_terms) {
      const Eigen::VectorXd d = y.col(c) - target;
      v.signed_label += scale * d.squaredNorm();
      g.col(c) += weights.signed_label * scale * 2.0 * d;
    }
  }
  std::vector<Matrix> g_jac;
  if (!batch.align_terms.empty()) {
    const double scale = 1.0 / static_cast<double>(batch.align_terms.size());
    if (grad != nullptr && weights.align != 0.0) {
      g_jac.assign(static_cast<size_t>(count), Matrix());
    }
    for (const AlignTerm& t : batch.align_terms) {
      const Matrix jac = detail::jacobian_from_trace(model, trace, t.column);
      const Matrix proj = Matrix::Identity(n, n) - t.normal * t.normal.transpose();
      Matrix gj;
      if (weights.align_form == AlignForm::kSurrogate) {
        const Matrix jt = jac * t.tangent;
        const Matrix pj = proj * jac.transpose();
        v.align += scale * (jt.squaredNorm() + pj.squaredNorm());
        gj = 2.0 * jt * t.tangent.transpose() + 2.0 * pj.transpose() * proj;
      } else {
        const Matrix gram = (jac * jac.transpose() +
                             detail::kGramGuard * Matrix::Identity(l, l))
                                .inverse();
        const Matrix gjp = gram * jac * proj;
        const Matrix a = jac * proj * jac.transpose();
        v.align += scale * 2.0 * (gram * a).trace();
        gj = 4.0 * gjp - 4.0 * gram * a * gram * jac;
      }
      if (!g_jac.empty()) {
        gj *= weights.align * scale;
        Matrix& slot = g_jac[static_cast<size_t>(t.column)];
        if (slot.size() == 0) {
          slot = gj;
        } else {
          slot += gj;
        }
      }
    }
  }
  v.total = weights.norm * v.norm + weights.reflection * v.reflection +
            weights.fraction * v.fraction + weights.similar * v.similar +
            weights.align * v.align + weights.signed_label * v.signed_label;
  if (grad != nullptr) mlp_backward(model, trace, g, g_jac, *grad);
  return v;
}

/// Monitored (not optimized) subspace error: ||V_N V_N^T E_N||^2 +
/// ||E_N E_N^T V_N||^2 with E_N the null-space right singular vectors of J.
inline double svd_projection_error(const Matrix& jac, const Matrix& normal) {
  const Eigen::Index n = jac.cols();
  const Eigen::Index l = normal.cols();
  Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeFullV);
  const Matrix e_null = svd.matrixV().rightCols(n - l);
  const Matrix vn_proj = normal * normal.transpose();
  return (vn_proj * e_null).squaredNorm() +
         (e_null * e_null.transpose() * normal).squaredNorm();
}

}  // namespace seqplan
