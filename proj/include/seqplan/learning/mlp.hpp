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

// Fully connected tanh network with hand-written forward, Jacobian and
// backward passes (including gradients of Jacobian-dependent losses).

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "seqplan/core.hpp"

namespace seqplan {

struct MlpModel {
  /// input, hidden..., output
  std::vector<int> widths;
  std::vector<Matrix> weights;          // weights[k]: widths[k+1] x widths[k]
  std::vector<Eigen::VectorXd> biases;  // biases[k]: widths[k+1]

  int input_dim() const { return widths.front(); }
  int output_dim() const { return widths.back(); }
  int num_layers() const { return static_cast<int>(weights.size()); }

  int num_params() const {
    int total = 0;
    for (int k = 0; k < num_layers(); ++k) {
      total += static_cast<int>(weights[static_cast<size_t>(k)].size() +
                                biases[static_cast<size_t>(k)].size());
    }
    return total;
  }

  void validate() const {
    require(widths.size() >= 2, "mlp needs at least input and output widths");
    require(weights.size() == widths.size() - 1 && biases.size() == weights.size(),
            "mlp layer count mismatch");
    for (size_t k = 0; k < weights.size(); ++k) {
      require(weights[k].rows() == widths[k + 1] && weights[k].cols() == widths[k],
              "mlp weight shape mismatch at layer " + std::to_string(k));
      require(biases[k].size() == widths[k + 1],
              "mlp bias shape mismatch at layer " + std::to_string(k));
    }
  }

  /// Row-major weights then bias, layer by layer.
  Eigen::VectorXd flatten() const {
    Eigen::VectorXd out(num_params());
    Eigen::Index o = 0;
    for (int k = 0; k < num_layers(); ++k) {
      const Matrix& w = weights[static_cast<size_t>(k)];
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) out[o++] = w(i, j);
      }
      const Eigen::VectorXd& b = biases[static_cast<size_t>(k)];
      out.segment(o, b.size()) = b;
      o += b.size();
    }
    return out;
  }

  void unflatten(const Eigen::VectorXd& p) {
    require(p.size() == num_params(), "mlp parameter vector size mismatch");
    Eigen::Index o = 0;
    for (int k = 0; k < num_layers(); ++k) {
      Matrix& w = weights[static_cast<size_t>(k)];
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = p[o++];
      }
      Eigen::VectorXd& b = biases[static_cast<size_t>(k)];
      b = p.segment(o, b.size());
      o += b.size();
    }
  }
};

/// Xavier-uniform weights, zero biases.
inline MlpModel make_mlp(const std::vector<int>& widths, std::uint64_t seed) {
  require(widths.size() >= 2, "mlp needs at least input and output widths");
  for (int w : widths) require(w >= 1, "mlp widths must be positive");
  std::mt19937_64 rng(seed);
  MlpModel m;
  m.widths = widths;
  for (size_t k = 0; k + 1 < widths.size(); ++k) {
    const double limit = std::sqrt(6.0 / (widths[k] + widths[k + 1]));
    std::uniform_real_distribution<double> u(-limit, limit);
    Matrix w(widths[k + 1], widths[k]);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = u(rng);
    }
    m.weights.push_back(std::move(w));
    m.biases.push_back(Eigen::VectorXd::Zero(widths[k + 1]));
  }
  return m;
}

/// Gradient storage with the model's layout.
struct MlpGradient {
  std::vector<Matrix> weights;
  std::vector<Eigen::VectorXd> biases;

  explicit MlpGradient(const MlpModel& m) {
    for (int k = 0; k < m.num_layers(); ++k) {
      weights.push_back(Matrix::Zero(m.weights[static_cast<size_t>(k)].rows(),
                                     m.weights[static_cast<size_t>(k)].cols()));
      biases.push_back(Eigen::VectorXd::Zero(m.biases[static_cast<size_t>(k)].size()));
    }
  }

  Eigen::VectorXd flatten() const {
    Eigen::Index total = 0;
    for (size_t k = 0; k < weights.size(); ++k) total += weights[k].size() + biases[k].size();
    Eigen::VectorXd out(total);
    Eigen::Index o = 0;
    for (size_t k = 0; k < weights.size(); ++k) {
      for (Eigen::Index i = 0; i < weights[k].rows(); ++i) {
        for (Eigen::Index j = 0; j < weights[k].cols(); ++j) out[o++] = weights[k](i, j);
      }
      out.segment(o, biases[k].size()) = biases[k];
      o += biases[k].size();
    }
    return out;
  }
};

/// Activations of a batched forward pass (one column per input).
struct MlpTrace {
  std::vector<Matrix> activations;  // a_0 = input, a_k = tanh(z_k), last = output
};

inline Matrix mlp_forward_batch(const MlpModel& m, const Matrix& x,
                                MlpTrace* trace = nullptr) {
  require_dim(x.rows(), m.input_dim(), "mlp input");
  if (trace != nullptr) {
    trace->activations.clear();
    trace->activations.push_back(x);
  }
  Matrix a = x;
  const int layers = m.num_layers();
  for (int k = 0; k < layers; ++k) {
    Matrix z = m.weights[static_cast<size_t>(k)] * a;
    z.colwise() += m.biases[static_cast<size_t>(k)];
    a = k + 1 < layers ? Matrix(z.array().tanh()) : z;
    if (trace != nullptr) trace->activations.push_back(a);
  }
  return a;
}

inline Eigen::VectorXd mlp_forward(const MlpModel& m, const Config& q) {
  return mlp_forward_batch(m, q);
}

/// dh/dq (output_dim x input_dim) by forward-mode propagation.
inline Matrix mlp_jacobian(const MlpModel& m, const Config& q) {
  require_dim(q.size(), m.input_dim(), "mlp input");
  Eigen::VectorXd a = q;
  Matrix t = Matrix::Identity(q.size(), q.size());
  const int layers = m.num_layers();
  for (int k = 0; k < layers; ++k) {
    const Matrix& w = m.weights[static_cast<size_t>(k)];
    Eigen::VectorXd z = w * a + m.biases[static_cast<size_t>(k)];
    t = w * t;
    if (k + 1 < layers) {
      a = z.array().tanh();
      const Eigen::VectorXd d = 1.0 - a.array().square();
      t = d.asDiagonal() * t;
    }
  }
  return t;
}

/// Backward pass for a batch.
///   grad_out (output_dim x B): dL/dh at each column.
///   grad_jac (optional, one per column or empty): dL/dJ at that column,
///            output_dim x input_dim; empty matrices are skipped.
/// Accumulates parameter gradients into `grad`.
inline void mlp_backward(const MlpModel& m, const MlpTrace& trace,
                         const Matrix& grad_out,
                         const std::vector<Matrix>& grad_jac,
                         MlpGradient& grad) {
  const int layers = m.num_layers();
  const Eigen::Index batch = grad_out.cols();
  // Extra dL/dz_k from the Jacobian path, hidden layers only.
  std::vector<Matrix> extra_z(static_cast<size_t>(layers));
  const bool any_jac = !grad_jac.empty();
  if (any_jac) {
    require(static_cast<Eigen::Index>(grad_jac.size()) == batch,
            "mlp_backward: one Jacobian gradient per column (or none)");
    for (int k = 0; k + 1 < layers; ++k) {
      extra_z[static_cast<size_t>(k)] =
          Matrix::Zero(m.widths[static_cast<size_t>(k) + 1], batch);
    }
    const int n = m.input_dim();
    std::vector<Matrix> t(static_cast<size_t>(layers));  // t[k] = T_k, k < layers-1
    std::vector<Matrix> p(static_cast<size_t>(layers));
    for (Eigen::Index c = 0; c < batch; ++c) {
      const Matrix& gj = grad_jac[static_cast<size_t>(c)];
      if (gj.size() == 0) continue;
      // Forward tangents: P_k = W_k T_{k-1}, T_k = D_k P_k.
      Matrix prev = Matrix::Identity(n, n);
      for (int k = 0; k + 1 < layers; ++k) {
        const Eigen::VectorXd a = trace.activations[static_cast<size_t>(k) + 1].col(c);
        const Eigen::VectorXd d = 1.0 - a.array().square();
        p[static_cast<size_t>(k)] = m.weights[static_cast<size_t>(k)] * prev;
        t[static_cast<size_t>(k)] = d.asDiagonal() * p[static_cast<size_t>(k)];
        prev = t[static_cast<size_t>(k)];
      }
      // Reverse: J = W_L T_{L-1}.
      const int last = layers - 1;
      grad.weights[static_cast<size_t>(last)] += gj * prev.transpose();
      Matrix g_t = m.weights[static_cast<size_t>(last)].transpose() * gj;
      for (int k = last - 1; k >= 0; --k) {
        const Eigen::VectorXd a = trace.activations[static_cast<size_t>(k) + 1].col(c);
        const Eigen::VectorXd d = 1.0 - a.array().square();
        const Matrix& pk = p[static_cast<size_t>(k)];
        // dL/dd_k (diagonal entries) and dL/dz_k through d = 1 - tanh^2.
        const Eigen::VectorXd g_d = (g_t.array() * pk.array()).rowwise().sum();
        extra_z[static_cast<size_t>(k)].col(c) =
            g_d.array() * (-2.0 * a.array() * d.array());
        const Matrix g_p = d.asDiagonal() * g_t;
        const Matrix tprev = k > 0 ? t[static_cast<size_t>(k) - 1]
                                   : Matrix(Matrix::Identity(n, n));
        grad.weights[static_cast<size_t>(k)] += g_p * tprev.transpose();
        g_t = m.weights[static_cast<size_t>(k)].transpose() * g_p;
      }
    }
  }
  Matrix g_z = grad_out;
  for (int k = layers - 1; k >= 0; --k) {
    const Matrix& a_prev = trace.activations[static_cast<size_t>(k)];
    grad.weights[static_cast<size_t>(k)] += g_z * a_prev.transpose();
    grad.biases[static_cast<size_t>(k)] += g_z.rowwise().sum();
    if (k == 0) break;
    const Matrix g_a = m.weights[static_cast<size_t>(k)].transpose() * g_z;
    const Matrix d = 1.0 - a_prev.array().square();
    g_z = g_a.cwiseProduct(d);
    if (any_jac) g_z += extra_z[static_cast<size_t>(k) - 1];
  }
}

}  // namespace seqplan
