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
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "seqplan/core.hpp"
#include "seqplan/learning/augment.hpp"
#include "seqplan/learning/local_pca.hpp"
#include "seqplan/learning/losses.hpp"
#include "seqplan/learning/mlp.hpp"
#include "seqplan/learning/osa.hpp"
#include "seqplan/learning/spatial.hpp"

namespace seqplan {

/// Thrown when the training loss explodes or becomes non-finite.
class TrainingDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainSettings {
  std::vector<int> hidden{36, 24, 18, 10};
  int epochs = 20;
  /// Dataset rows per minibatch (each brings its augmented samples).
  int batch_rows = 16;
  double learning_rate = 3e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double clip_norm = 10.0;
  double divergence_threshold = 1e6;
  /// The step is halved when a window's mean loss exceeds the best so far
  /// by more than this relative margin (augmentation is redrawn every
  /// epoch, so small increases are noise). A window is the fewest whole
  /// epochs covering `lr_window_steps` optimizer steps.
  double lr_patience = 0.05;
  int lr_window_steps = 100;
  LossWeights weights{1.0, 3.0, 1.0, 1.0, 1.0};
  /// Epochs trained with the fraction term switched off. From a random
  /// start the normalized-output loss is minimized by a constant-sign h,
  /// so it only joins once the zero set sits near the data.
  int fraction_warmup_epochs = 10;
  /// Epochs with the signed term on (weight below). All other losses are
  /// even in h along a normal, so without it the sign change across the
  /// data has to emerge from noise.
  int signed_warmup_epochs = 10;
  double signed_weight = 1.0;
  /// Both warm-ups last at least this many optimizer steps, which matters
  /// for datasets that fit in one or two batches.
  int warmup_min_steps = 500;

  int levels = 7;
  /// <= 0 selects sqrt(mean tangent eigenvalue).
  double epsilon_aug = 0.0;
  std::vector<double> fractions{0.5};
  /// <= 0 selects max(2n, 10).
  int neighbors = 0;
  /// OSA graph degree; <= 0 uses the neighbour count.
  int osa_neighbors = 0;
  /// < 0 estimates l from the eigengaps.
  int l_override = -1;

  bool use_augmentation = true;
  bool use_osa = true;

  std::uint64_t seed = 0;
  /// Charts sampled per epoch for the monitored SVD subspace error.
  int monitor_charts = 64;
};

struct TrainHistory {
  std::vector<LossValues> epochs;
  /// Row 0 is the untrained model, row e + 1 follows epoch e.
  std::vector<double> projection_error;  // monitored
  std::vector<double> learning_rate;
};

struct TrainResult {
  MlpModel model;
  TrainHistory history;
  int l = 0;
  double epsilon_aug = 0.0;
  int neighbors = 0;
};

/// Charts, alignment and the per-epoch sample source for one dataset.
struct PreparedDataset {
  PointSet data;
  KdTree tree;
  ChartSet charts;
  std::vector<Matrix> tangents;
  std::vector<Matrix> normals;  // aligned when OSA ran
  std::vector<int> partners;
  double epsilon_aug = 0.0;
  int neighbors = 0;
};

inline PreparedDataset prepare_dataset(const PointSet& data,
                                       const TrainSettings& s) {
  require(data.rows() > 0 && data.cols() > 0, "training dataset is empty");
  require(data.allFinite(), "training dataset contains non-finite values");
  PreparedDataset p;
  p.data = data;
  p.tree = KdTree(data);
  const int n = static_cast<int>(data.cols());
  p.neighbors = s.neighbors > 0 ? s.neighbors : default_neighbor_count(n);
  p.charts = build_charts(data, p.tree, p.neighbors, s.l_override);
  require(p.charts.l >= 1, "estimated constraint count is zero");
  for (const LocalChart& c : p.charts.charts) {
    p.tangents.push_back(c.tangent);
    p.normals.push_back(c.normal);
  }
  if (s.use_osa) {
    OsaSettings os;
    os.seed = s.seed;
    const int h = s.osa_neighbors > 0 ? s.osa_neighbors : p.neighbors;
    p.normals = osa_align(data, p.tree, p.normals, h, os).aligned;
  }
  p.partners = nearest_partners(data, p.tree);
  p.epsilon_aug = s.epsilon_aug > 0.0 ? s.epsilon_aug
                                      : default_epsilon_aug(p.charts.charts);
  return p;
}

namespace detail {

struct Adam {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  int t = 0;
  explicit Adam(Eigen::Index n) : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& g, double lr,
            double b1, double b2) {
    ++t;
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    const double c1 = 1.0 - std::pow(b1, t);
    const double c2 = 1.0 - std::pow(b2, t);
    params.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + 1e-8);
  }
};

}  // namespace detail

inline TrainResult train_ecomann(const PreparedDataset& p,
                                 const TrainSettings& s) {
  require(s.epochs >= 1, "training needs at least one epoch");
  require(s.batch_rows >= 1, "batch size must be positive");
  require(s.learning_rate > 0.0, "learning rate must be positive");
  require(s.lr_window_steps >= 1, "lr window must be at least one step");
  require(s.warmup_min_steps >= 0, "warm-up step count must be non-negative");
  const int n = static_cast<int>(p.data.cols());
  const int l = p.charts.l;
  std::vector<int> widths{n};
  widths.insert(widths.end(), s.hidden.begin(), s.hidden.end());
  widths.push_back(l);

  TrainResult result;
  result.model = make_mlp(widths, s.seed);
  result.l = l;
  result.epsilon_aug = p.epsilon_aug;
  result.neighbors = p.neighbors;

  std::mt19937_64 rng(s.seed ^ 0x9e3779b97f4a7c15ULL);
  AugmentSettings aug;
  aug.levels = s.levels;
  aug.epsilon = p.epsilon_aug;
  aug.fractions = s.fractions;
  aug.reflection = s.weights.reflection != 0.0;
  aug.similar = s.weights.similar != 0.0;
  if (s.weights.fraction == 0.0) aug.fractions.clear();

  Eigen::VectorXd params = result.model.flatten();
  detail::Adam adam(params.size());
  double lr = s.learning_rate;
  double best = std::numeric_limits<double>::infinity();
  const int rows = static_cast<int>(p.data.rows());
  std::vector<int> order(static_cast<size_t>(rows));
  std::iota(order.begin(), order.end(), 0);
  const int per_epoch = (rows + s.batch_rows - 1) / s.batch_rows;
  const auto warmup = [&](int epochs) {
    return std::max(epochs, (s.warmup_min_steps + per_epoch - 1) / per_epoch);
  };
  const int fraction_warmup = warmup(s.fraction_warmup_epochs);
  const int signed_warmup = warmup(s.signed_warmup_epochs);
  const int window = std::max(1, (s.lr_window_steps + per_epoch - 1) / per_epoch);
  double window_sum = 0.0;
  int window_epochs = 0;

  // epoch -1 only records the initial losses.
  for (int epoch = -1; epoch < s.epochs; ++epoch) {
    const bool update = epoch >= 0;
    const int phase = std::max(epoch, 0);
    std::vector<AugmentedSample> samples;
    if (s.use_augmentation) {
      samples = augment(p.data, p.tree, p.normals, aug, rng, &p.partners);
    }
    std::vector<std::vector<const AugmentedSample*>> by_base(static_cast<size_t>(rows));
    for (const AugmentedSample& a : samples) by_base[static_cast<size_t>(a.base)].push_back(&a);
    std::shuffle(order.begin(), order.end(), rng);

    LossValues epoch_sum;
    int batches = 0;
    for (int start = 0; start < rows; start += s.batch_rows) {
      const int stop = std::min(rows, start + s.batch_rows);
      std::vector<int> batch_rows(order.begin() + start, order.begin() + stop);
      std::vector<const AugmentedSample*> batch_samples;
      for (int r : batch_rows) {
        const auto& v = by_base[static_cast<size_t>(r)];
        batch_samples.insert(batch_samples.end(), v.begin(), v.end());
      }
      LossBatch batch;
      append_to_batch(batch, p.data, batch_rows, &p.tangents, &p.normals,
                      batch_samples);
      MlpGradient grad(result.model);
      LossWeights w = s.weights;
      if (phase < fraction_warmup) w.fraction = 0.0;
      w.signed_label = phase < signed_warmup ? s.signed_weight : 0.0;
      const LossValues v = compute_losses(result.model, batch, w, update ? &grad : nullptr);
      if (!std::isfinite(v.total) || v.total > s.divergence_threshold) {
        throw TrainingDivergence("training diverged at epoch " +
                                 std::to_string(epoch) + " (loss " +
                                 std::to_string(v.total) + ")");
      }
      if (update) {
        Eigen::VectorXd g = grad.flatten();
        const double gn = g.norm();
        if (gn > s.clip_norm) g *= s.clip_norm / gn;
        adam.step(params, g, lr, s.beta1, s.beta2);
        result.model.unflatten(params);
      }
      epoch_sum.norm += v.norm;
      epoch_sum.reflection += v.reflection;
      epoch_sum.fraction += v.fraction;
      epoch_sum.similar += v.similar;
      epoch_sum.align += v.align;
      epoch_sum.signed_label += v.signed_label;
      epoch_sum.total += v.total;
      ++batches;
    }
    const double inv = 1.0 / batches;
    epoch_sum.norm *= inv;
    epoch_sum.reflection *= inv;
    epoch_sum.fraction *= inv;
    epoch_sum.similar *= inv;
    epoch_sum.align *= inv;
    epoch_sum.signed_label *= inv;
    epoch_sum.total *= inv;
    result.history.epochs.push_back(epoch_sum);
    result.history.learning_rate.push_back(lr);
    // The objective changes when a warm-up ends, so the reference loss
    // restarts there.
    if (update) {
      if (epoch + 1 == fraction_warmup || epoch + 1 == signed_warmup) {
        best = std::numeric_limits<double>::infinity();
        window_sum = 0.0;
        window_epochs = 0;
      } else {
        window_sum += epoch_sum.total;
        if (++window_epochs == window) {
          const double mean = window_sum / window;
          if (mean > best * (1.0 + s.lr_patience)) lr *= 0.5;
          best = std::min(best, mean);
          window_sum = 0.0;
          window_epochs = 0;
        }
      }
    }

    double monitor = 0.0;
    const int probes = std::min(s.monitor_charts, rows);
    for (int k = 0; k < probes; ++k) {
      const int r = order[static_cast<size_t>(k)];
      monitor += svd_projection_error(
          mlp_jacobian(result.model, p.data.row(r).transpose()),
          p.normals[static_cast<size_t>(r)]);
    }
    result.history.projection_error.push_back(probes > 0 ? monitor / probes : 0.0);
    spdlog::debug("epoch {}: loss {:.6g} (norm {:.4g} refl {:.4g} frac {:.4g} "
                  "sim {:.4g} align {:.4g}) lr {:.3g}",
                  epoch, epoch_sum.total, epoch_sum.norm, epoch_sum.reflection,
                  epoch_sum.fraction, epoch_sum.similar, epoch_sum.align, lr);
  }
  return result;
}

inline TrainResult train_ecomann(const PointSet& data, const TrainSettings& s) {
  return train_ecomann(prepare_dataset(data, s), s);
}

}  // namespace seqplan
