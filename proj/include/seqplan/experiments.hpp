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

// Multi-seed trials, parameter sweeps and the training ablations.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "seqplan/core.hpp"
#include "seqplan/datasets.hpp"
#include "seqplan/learning/train.hpp"
#include "seqplan/planner/psm.hpp"

namespace seqplan {

/// Runs fn(i) for i in [0, count) on up to `threads` workers and returns the
/// results in index order. The first exception thrown by any call is
/// rethrown after all workers have stopped.
template <class T, class Fn>
std::vector<T> run_parallel(int count, Fn fn, int threads = 0) {
  std::vector<T> out(static_cast<size_t>(std::max(count, 0)));
  if (count <= 0) return out;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, count);
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        out[static_cast<size_t>(i)] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

enum class PlannerVariant { kPsmStar, kGreedy, kSingleTree };

inline const char* to_string(PlannerVariant v) {
  switch (v) {
    case PlannerVariant::kPsmStar: return "psm_star";
    case PlannerVariant::kGreedy: return "greedy";
    case PlannerVariant::kSingleTree: return "single_tree";
  }
  return "unknown";
}

inline PlannerVariant planner_variant_from_string(const std::string& s) {
  if (s == "psm_star") return PlannerVariant::kPsmStar;
  if (s == "greedy") return PlannerVariant::kGreedy;
  if (s == "single_tree") return PlannerVariant::kSingleTree;
  throw PreconditionError("unknown planner variant '" + s + "'");
}

inline PathResult run_planner(PlannerVariant v, const SequencedTask& task,
                              const PlannerParams& params) {
  switch (v) {
    case PlannerVariant::kPsmStar: return psm_star(task, params);
    case PlannerVariant::kGreedy: return psm_star_greedy(task, params);
    case PlannerVariant::kSingleTree: return psm_star_single_tree(task, params);
  }
  throw PreconditionError("unknown planner variant");
}

/// One plan per seed; params.rng_seed is replaced by each seed.
inline std::vector<PathResult> plan_trials(const SequencedTask& task,
                                           const PlannerParams& params,
                                           PlannerVariant variant,
                                           const std::vector<std::uint64_t>& seeds,
                                           int threads = 0) {
  return run_parallel<PathResult>(
      static_cast<int>(seeds.size()),
      [&](int i) {
        PlannerParams p = params;
        p.rng_seed = seeds[static_cast<size_t>(i)];
        return run_planner(variant, task, p);
      },
      threads);
}

struct TrialSummary {
  int trials = 0;
  int successes = 0;
  MeanStd cost;     // over successful trials
  MeanStd seconds;  // over all trials
};

inline TrialSummary summarize(const std::vector<PathResult>& results) {
  TrialSummary s;
  std::vector<double> costs;
  std::vector<double> secs;
  for (const PathResult& r : results) {
    ++s.trials;
    secs.push_back(r.wall_seconds);
    if (r.success) {
      ++s.successes;
      costs.push_back(r.cost);
    }
  }
  s.cost = mean_std(costs);
  s.seconds = mean_std(secs);
  return s;
}

enum class SweepAxis { kRho, kM, kLevels };

inline const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::kRho: return "rho";
    case SweepAxis::kM: return "m";
    case SweepAxis::kLevels: return "levels";
  }
  return "unknown";
}

inline SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "rho") return SweepAxis::kRho;
  if (s == "m") return SweepAxis::kM;
  if (s == "levels" || s == "I_max" || s == "imax") return SweepAxis::kLevels;
  throw PreconditionError("unknown sweep axis '" + s + "' (expected rho, m or levels)");
}

/// One row per (value, seed). `metric` is the path cost for planner sweeps
/// and P for the level sweep; `success` is false for a failed plan.
struct SweepRow {
  double value = 0.0;
  std::uint64_t seed = 0;
  bool success = false;
  double metric = 0.0;
  double seconds = 0.0;
};

struct SweepPoint {
  double value = 0.0;
  int trials = 0;
  int successes = 0;
  MeanStd metric;  // over successful rows
};

inline std::vector<SweepRow> planner_sweep(const SequencedTask& task,
                                           const PlannerParams& params,
                                           PlannerVariant variant, SweepAxis axis,
                                           const std::vector<double>& values,
                                           const std::vector<std::uint64_t>& seeds,
                                           int threads = 0) {
  require(axis == SweepAxis::kRho || axis == SweepAxis::kM,
          "planner sweeps support the rho and m axes");
  require(!values.empty() && !seeds.empty(), "sweep needs values and seeds");
  const int n_seeds = static_cast<int>(seeds.size());
  const int total = static_cast<int>(values.size()) * n_seeds;
  return run_parallel<SweepRow>(
      total,
      [&](int i) {
        const double value = values[static_cast<size_t>(i / n_seeds)];
        PlannerParams p = params;
        p.rng_seed = seeds[static_cast<size_t>(i % n_seeds)];
        if (axis == SweepAxis::kRho) {
          p.rho = value;
        } else {
          require(value >= 1.0 && value == std::floor(value), "m values must be positive integers");
          p.m = static_cast<int>(value);
        }
        const PathResult r = run_planner(variant, task, p);
        return SweepRow{value, p.rng_seed, r.success, r.success ? r.cost : 0.0,
                        r.wall_seconds};
      },
      threads);
}

/// Groups rows by value (in first-seen order).
inline std::vector<SweepPoint> aggregate_sweep(const std::vector<SweepRow>& rows) {
  std::vector<SweepPoint> out;
  std::map<double, std::vector<double>> metrics;
  for (const SweepRow& r : rows) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const SweepPoint& p) { return p.value == r.value; });
    if (it == out.end()) {
      out.push_back({r.value, 0, 0, {}});
      it = out.end() - 1;
    }
    ++it->trials;
    if (r.success) {
      ++it->successes;
      metrics[r.value].push_back(r.metric);
    }
  }
  for (SweepPoint& p : out) p.metric = mean_std(metrics[p.value]);
  return out;
}

/// Which parts of the training pipeline stay on.
struct AblationConfig {
  std::string name = "no ablation";
  bool augmentation = true;
  bool reflection = true;
  bool fraction = true;
  bool similar = true;
  bool osa = true;
};

/// The signed warm-up term uses the reflection pairing, so dropping the
/// reflection loss drops it too.
inline TrainSettings apply_ablation(TrainSettings s, const AblationConfig& a) {
  s.use_augmentation = a.augmentation;
  s.use_osa = a.osa;
  if (!a.reflection) {
    s.weights.reflection = 0.0;
    s.signed_weight = 0.0;
  }
  if (!a.fraction) s.weights.fraction = 0.0;
  if (!a.similar) s.weights.similar = 0.0;
  return s;
}

inline std::vector<AblationConfig> standard_ablations() {
  std::vector<AblationConfig> out(4);
  out[1].name = "w/o augmentation";
  out[1].augmentation = false;
  out[2].name = "w/o pair losses";
  out[2].reflection = out[2].fraction = out[2].similar = false;
  out[3].name = "w/o OSA";
  out[3].osa = false;
  return out;
}

struct TrainedTrial {
  std::uint64_t seed = 0;
  EvalReport report;
};

/// Trains and evaluates one model per seed. Dataset and network both use
/// the seed (the dataset adds it to data.seed).
inline std::vector<TrainedTrial> train_trials(const DatasetSpec& data,
                                              const TrainSettings& settings,
                                              const std::vector<std::uint64_t>& seeds,
                                              const EvalSettings& eval = {},
                                              int threads = 0) {
  return run_parallel<TrainedTrial>(
      static_cast<int>(seeds.size()),
      [&](int i) {
        const std::uint64_t seed = seeds[static_cast<size_t>(i)];
        DatasetSpec d = data;
        d.seed = data.seed + seed;
        const PointSet points = generate(d);
        TrainSettings s = settings;
        s.seed = seed;
        const TrainResult r = train_ecomann(points, s);
        return TrainedTrial{seed, evaluate_model(r.model, data.kind, points, eval)};
      },
      threads);
}

struct AblationRow {
  std::string name;
  std::vector<double> P;  // per seed
  MeanStd P_stats;
  MeanStd mu_test;        // mean over seeds of each seed's mean
};

inline AblationRow summarize_trials(const std::string& name,
                                    const std::vector<TrainedTrial>& trials) {
  AblationRow row;
  row.name = name;
  std::vector<double> mu;
  for (const TrainedTrial& t : trials) {
    row.P.push_back(t.report.P);
    if (t.report.converged > 0) mu.push_back(t.report.mu_test.mean);
  }
  row.P_stats = mean_std(row.P);
  row.mu_test = mean_std(mu);
  return row;
}

inline std::vector<AblationRow> run_ablation(const DatasetSpec& data,
                                             const TrainSettings& base,
                                             const std::vector<AblationConfig>& configs,
                                             const std::vector<std::uint64_t>& seeds,
                                             const EvalSettings& eval = {},
                                             int threads = 0) {
  require(!configs.empty() && !seeds.empty(), "ablation needs configurations and seeds");
  std::vector<AblationRow> out;
  for (const AblationConfig& c : configs) {
    out.push_back(summarize_trials(
        c.name, train_trials(data, apply_ablation(base, c), seeds, eval, threads)));
  }
  return out;
}

/// P per (I_max, seed).
inline std::vector<SweepRow> level_sweep(const DatasetSpec& data,
                                         const TrainSettings& base,
                                         const std::vector<int>& levels,
                                         const std::vector<std::uint64_t>& seeds,
                                         const EvalSettings& eval = {},
                                         int threads = 0) {
  require(!levels.empty() && !seeds.empty(), "level sweep needs levels and seeds");
  std::vector<SweepRow> rows;
  for (int level : levels) {
    require(level >= 1, "augmentation levels must be at least 1");
    TrainSettings s = base;
    s.levels = level;
    for (const TrainedTrial& t : train_trials(data, s, seeds, eval, threads)) {
      rows.push_back({static_cast<double>(level), t.seed, true, t.report.P, 0.0});
    }
  }
  return rows;
}

}  // namespace seqplan
