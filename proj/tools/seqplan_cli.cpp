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

// seqplan command-line front end.
//
// Exit codes: 0 success, 1 configuration error, 2 planner failure,
// 3 training divergence.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "seqplan/datasets.hpp"
#include "seqplan/experiments.hpp"
#include "seqplan/io/files.hpp"
#include "seqplan/io/json_io.hpp"
#include "seqplan/io/manifest.hpp"
#include "seqplan/io/svg.hpp"
#include "seqplan/learning/train.hpp"

namespace fs = std::filesystem;
using namespace seqplan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPlanner = 2;
constexpr int kExitDivergence = 3;

constexpr const char* kOutEnv = "SEQPLAN_OUT";

struct Common {
  std::string out;
  std::string seeds = "0";
  std::vector<std::string> params;
  int threads = 0;
};

struct DataSource {
  std::string dataset;   // file path
  std::string generate;  // built-in kind
  std::string kind;      // ground truth for metrics
  int count = 0;
  double noise = 0.0;
  std::uint64_t data_seed = 0;
};

/// "0,1,5-9" -> {0, 1, 5, 6, 7, 8, 9}.
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::string item;
  std::stringstream ss(text);
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      const auto dash = item.find('-');
      if (dash == std::string::npos) {
        out.push_back(std::stoull(item));
      } else {
        const std::uint64_t a = std::stoull(item.substr(0, dash));
        const std::uint64_t b = std::stoull(item.substr(dash + 1));
        if (b < a) throw ConfigError("bad seed range '" + item + "'");
        for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("--seeds: cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("--seeds lists no seeds");
  return out;
}

std::vector<double> parse_values(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(text);
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError(flag + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError(flag + " lists no values");
  return out;
}

fs::path output_dir(const Common& c, const std::string& command) {
  if (!c.out.empty()) return c.out;
  const char* root = std::getenv(kOutEnv);
  return fs::path(root != nullptr && *root != '\0' ? root : "runs") / command;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--out", c.out,
                  std::string("Output directory (default: $") + kOutEnv + "/<command> or runs/<command>)");
  app->add_option("--seeds", c.seeds, "Seed list, e.g. 0,1,2 or 0-9");
  app->add_option("--params", c.params, "Overrides key=value (repeatable)");
  app->add_option("--threads", c.threads, "Worker threads for independent trials (0 = all cores)");
}

void add_data(CLI::App* app, DataSource& d) {
  app->add_option("--dataset", d.dataset, "Dataset file (one configuration per row)");
  app->add_option("--generate", d.generate,
                  "Generate a built-in dataset: sphere, circle3d, plane_arm, orient_arm");
  app->add_option("--kind", d.kind, "Ground-truth manifold for metrics (defaults to --generate)");
  app->add_option("--count", d.count, "Generated dataset size (default per kind)");
  app->add_option("--noise", d.noise, "Gaussian noise added to generated data");
  app->add_option("--data-seed", d.data_seed, "Seed offset for generated data");
}

std::optional<DatasetKind> metric_kind(const DataSource& d) {
  const std::string k = !d.kind.empty() ? d.kind : d.generate;
  if (k.empty()) return std::nullopt;
  try {
    return dataset_kind_from_string(k);
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
}

DatasetSpec generated_spec(const DataSource& d, std::uint64_t seed) {
  DatasetSpec s;
  try {
    s.kind = dataset_kind_from_string(d.generate);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("--generate: ") + e.what());
  }
  s.count = d.count > 0 ? d.count : default_dataset_size(s.kind);
  s.noise = d.noise;
  s.seed = d.data_seed + seed;
  if (s.noise < 0.0) throw ConfigError("--noise must be non-negative");
  return s;
}

PointSet load_data(const DataSource& d, std::uint64_t seed) {
  if (!d.dataset.empty() && !d.generate.empty()) {
    throw ConfigError("give either --dataset or --generate, not both");
  }
  if (!d.dataset.empty()) return read_dataset(d.dataset);
  if (!d.generate.empty()) return generate(generated_spec(d, seed));
  throw ConfigError("a dataset is required (--dataset FILE or --generate KIND)");
}

Json data_config(const DataSource& d) {
  return Json{{"dataset", d.dataset}, {"generate", d.generate}, {"kind", d.kind},
              {"count", d.count},     {"noise", d.noise},       {"data_seed", d.data_seed}};
}

TrainSettings training_from(const std::vector<std::string>& overrides) {
  Json j = Json::object();
  apply_overrides(j, overrides);
  return train_settings_from_json(j, "--params");
}

// ------------------------------------------------------------------ plan

struct PlanArgs {
  Common common;
  std::string task;
  std::string variant;
};

int cmd_plan(const PlanArgs& a) {
  if (a.task.empty()) throw ConfigError("plan needs --task");
  const TaskFile tf = load_task(a.task);
  Json pj = tf.planner.is_null() ? Json::object() : tf.planner;
  apply_overrides(pj, a.common.params);
  const PlannerParams params = planner_params_from_json(pj, "planner");
  PlannerVariant variant = tf.variant;
  if (!a.variant.empty()) {
    try {
      variant = planner_variant_from_string(a.variant);
    } catch (const PreconditionError& e) {
      throw ConfigError(std::string("--variant: ") + e.what());
    }
  }
  const std::vector<std::uint64_t> seeds = parse_seeds(a.common.seeds);

  const std::vector<PathResult> results =
      plan_trials(tf.task, params, variant, seeds, a.common.threads);

  RunWriter out(output_dir(a.common, "plan"));
  Json summary = Json::array();
  Json timing = Json::array();
  bool all_ok = true;
  for (size_t i = 0; i < results.size(); ++i) {
    const PathResult& r = results[i];
    Json rec = path_result_to_json(r);
    rec.erase("wall_seconds");
    rec["seed"] = seeds[i];
    summary.push_back(rec);
    timing.push_back(Json{{"seed", seeds[i]}, {"wall_seconds", r.wall_seconds}});
    all_ok = all_ok && r.success;
    const std::string tag = fmt::format("seed{}", seeds[i]);
    if (r.success) {
      PointSet w(static_cast<Eigen::Index>(r.waypoints.size()), tf.task.start.size());
      for (size_t k = 0; k < r.waypoints.size(); ++k) {
        w.row(static_cast<Eigen::Index>(k)) = r.waypoints[k].transpose();
      }
      out.write("waypoints_" + tag + ".txt", dataset_to_text(w));
    }
    out.write("path_" + tag + ".svg", svg_path_plot(r, tf.task, tf.name + " " + tag));
    if (r.success) {
      spdlog::info("{} seed {}: cost {:.4f}, {} waypoints", tf.name, seeds[i], r.cost,
                   r.waypoints.size());
    } else {
      spdlog::warn("{} seed {}: no path (stage {} found no intersection point)", tf.name,
                   seeds[i], r.failure_stage);
    }
  }
  const TrialSummary s = summarize(results);
  out.write_json("summary.json",
                 Json{{"task", tf.name},
                      {"variant", to_string(variant)},
                      {"successes", s.successes},
                      {"trials", s.trials},
                      {"cost_mean", s.successes > 0 ? Json(s.cost.mean) : Json(nullptr)},
                      {"cost_std", s.successes > 0 ? Json(s.cost.std) : Json(nullptr)},
                      {"runs", summary}});
  out.write_json("timing.json", timing, false);
  const int code = all_ok ? kExitOk : kExitPlanner;
  out.finish("plan",
             Json{{"task", a.task}, {"variant", to_string(variant)},
                  {"planner", planner_params_to_json(params)}},
             seeds, code);
  return code;
}

// ----------------------------------------------------------------- learn

struct LearnArgs {
  Common common;
  DataSource data;
};

int cmd_learn(const LearnArgs& a) {
  TrainSettings s = training_from(a.common.params);
  const std::vector<std::uint64_t> seeds = parse_seeds(a.common.seeds);
  s.seed = seeds.front();
  const std::optional<DatasetKind> kind = metric_kind(a.data);
  const PointSet data = load_data(a.data, s.seed);

  const TrainResult r = train_ecomann(data, s);

  RunWriter out(output_dir(a.common, "learn"));
  if (!a.data.generate.empty()) out.write("dataset.txt", dataset_to_text(data));
  out.write_json("model.json", model_to_json(r.model));
  Table hist({"epoch", "total", "norm", "reflection", "fraction", "similar", "align",
              "signed", "projection_error", "learning_rate"});
  for (size_t e = 0; e < r.history.epochs.size(); ++e) {
    const LossValues& v = r.history.epochs[e];
    hist.add({std::to_string(e), format_double(v.total), format_double(v.norm),
              format_double(v.reflection), format_double(v.fraction),
              format_double(v.similar), format_double(v.align),
              format_double(v.signed_label), format_double(r.history.projection_error[e]),
              format_double(r.history.learning_rate[e])});
  }
  out.write("history.csv", hist.to_csv());
  Json metrics{{"l", r.l}, {"epsilon_aug", r.epsilon_aug}, {"neighbors", r.neighbors},
               {"final_loss", r.history.epochs.back().total}};
  if (kind) {
    const EvalReport e = evaluate_model(r.model, *kind, data);
    metrics["evaluation"] = eval_report_to_json(e);
    spdlog::info("P = {:.1f}%, mu_test = {:.4f}", e.P, e.mu_test.mean);
  }
  out.write_json("metrics.json", metrics);
  Json cfg = train_settings_to_json(s);
  out.finish("learn", Json{{"data", data_config(a.data)}, {"training", cfg}}, seeds, kExitOk);
  return kExitOk;
}

// ------------------------------------------------------------------ eval

struct EvalArgs {
  Common common;
  DataSource data;
  std::string model;
  int test_points = 300;
  double threshold = 0.1;
};

int cmd_eval(const EvalArgs& a) {
  if (a.model.empty()) throw ConfigError("eval needs --model");
  const MlpModel model = load_model(a.model);
  const std::optional<DatasetKind> kind = metric_kind(a.data);
  if (!kind) throw ConfigError("eval needs --kind (or --generate) for the ground truth");
  const std::vector<std::uint64_t> seeds = parse_seeds(a.common.seeds);
  const PointSet data = load_data(a.data, seeds.front());
  if (data.cols() != model.input_dim()) {
    throw ConfigError("dataset columns do not match the model input size");
  }
  if (!a.common.params.empty()) throw ConfigError("eval takes no --params");
  EvalSettings es;
  es.test_points = a.test_points;
  es.threshold = a.threshold;
  es.seed = seeds.front();
  const EvalReport e = evaluate_model(model, *kind, data, es);

  RunWriter out(output_dir(a.common, "eval"));
  out.write_json("eval.json", eval_report_to_json(e));
  out.finish("eval",
             Json{{"model", a.model}, {"data", data_config(a.data)},
                  {"test_points", a.test_points}, {"threshold", a.threshold}},
             seeds, kExitOk);
  spdlog::info("P = {:.1f}% ({} of {} projections converged), mu_test = {:.4f}", e.P,
               e.converged, e.attempted, e.mu_test.mean);
  return kExitOk;
}

// ------------------------------------------------------- augment-preview

struct AugmentArgs {
  Common common;
  DataSource data;
};

int cmd_augment_preview(const AugmentArgs& a) {
  const TrainSettings s = training_from(a.common.params);
  const std::vector<std::uint64_t> seeds = parse_seeds(a.common.seeds);
  const PointSet data = load_data(a.data, seeds.front());
  const PreparedDataset p = prepare_dataset(data, s);
  AugmentSettings as;
  as.levels = s.levels;
  as.epsilon = p.epsilon_aug;
  as.fractions = s.fractions;
  std::mt19937_64 rng(seeds.front());
  const std::vector<AugmentedSample> samples =
      augment(p.data, p.tree, p.normals, as, rng, &p.partners);

  RunWriter out(output_dir(a.common, "augment-preview"));
  Table t({"base", "level", "label", "kind", "point"});
  ScatterGroup base{"on-manifold", {}};
  ScatterGroup plus{"augmented", {}};
  ScatterGroup minus{"reflections", {}};
  for (Eigen::Index i = 0; i < data.rows(); ++i) base.points.push_back(data.row(i).transpose());
  auto point_text = [](const Config& q) {
    std::string s;
    for (Eigen::Index i = 0; i < q.size(); ++i) s += (i ? " " : "") + format_double(q[i]);
    return s;
  };
  for (const AugmentedSample& x : samples) {
    t.add({std::to_string(x.base), std::to_string(x.level), format_double(x.label), "plus",
           point_text(x.point)});
    plus.points.push_back(x.point);
    if (x.reflection) {
      t.add({std::to_string(x.base), std::to_string(x.level), format_double(x.label),
             "reflection", point_text(*x.reflection)});
      minus.points.push_back(*x.reflection);
    }
  }
  out.write("augmented.csv", t.to_csv());
  const int b = data.cols() >= 3 ? 2 : 1;
  out.write("augment.svg", svg_scatter({base, plus, minus}, 0, b));
  out.write_json("augment.json", Json{{"samples", samples.size()},
                                      {"epsilon_aug", p.epsilon_aug},
                                      {"l", p.charts.l},
                                      {"neighbors", p.neighbors}});
  out.finish("augment-preview",
             Json{{"data", data_config(a.data)}, {"training", train_settings_to_json(s)}},
             seeds, kExitOk);
  spdlog::info("{} augmented samples, epsilon_aug = {:.4f}", samples.size(), p.epsilon_aug);
  return kExitOk;
}

// ----------------------------------------------------------------- sweep

struct SweepArgs {
  Common common;
  DataSource data;
  std::string task;
  std::string sweep;
  std::string variant;
};

int cmd_sweep(const SweepArgs& a) {
  const auto eq = a.sweep.find('=');
  if (eq == std::string::npos) throw ConfigError("--sweep must look like axis=v1,v2,...");
  SweepAxis axis;
  try {
    axis = sweep_axis_from_string(a.sweep.substr(0, eq));
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("--sweep: ") + e.what());
  }
  const std::vector<double> values = parse_values(a.sweep.substr(eq + 1), "--sweep");
  const std::vector<std::uint64_t> seeds = parse_seeds(a.common.seeds);

  std::vector<SweepRow> rows;
  Json cfg{{"axis", to_string(axis)}, {"values", values}};
  std::string metric_name = "cost";
  if (axis == SweepAxis::kLevels) {
    if (a.data.generate.empty()) throw ConfigError("a levels sweep needs --generate KIND");
    const TrainSettings s = training_from(a.common.params);
    const DatasetSpec spec = generated_spec(a.data, 0);
    std::vector<int> levels;
    for (double v : values) {
      if (v < 1.0 || v != std::floor(v)) throw ConfigError("levels must be positive integers");
      levels.push_back(static_cast<int>(v));
    }
    rows = level_sweep(spec, s, levels, seeds, {}, a.common.threads);
    cfg["data"] = data_config(a.data);
    cfg["training"] = train_settings_to_json(s);
    metric_name = "P";
  } else {
    if (a.task.empty()) throw ConfigError("rho and m sweeps need --task");
    const TaskFile tf = load_task(a.task);
    Json pj = tf.planner.is_null() ? Json::object() : tf.planner;
    apply_overrides(pj, a.common.params);
    const PlannerParams params = planner_params_from_json(pj, "planner");
    PlannerVariant variant = tf.variant;
    if (!a.variant.empty()) {
      try {
        variant = planner_variant_from_string(a.variant);
      } catch (const PreconditionError& e) {
        throw ConfigError(std::string("--variant: ") + e.what());
      }
    }
    try {
      rows = planner_sweep(tf.task, params, variant, axis, values, seeds, a.common.threads);
    } catch (const PreconditionError& e) {
      throw ConfigError(e.what());
    }
    cfg["task"] = a.task;
    cfg["variant"] = to_string(variant);
    cfg["planner"] = planner_params_to_json(params);
  }

  RunWriter out(output_dir(a.common, "sweep"));
  Table t({to_string(axis), "seed", "success", metric_name});
  Table timing({to_string(axis), "seed", "seconds"});
  for (const SweepRow& r : rows) {
    t.add({format_double(r.value), std::to_string(r.seed), r.success ? "1" : "0",
           r.success ? format_double(r.metric) : ""});
    timing.add({format_double(r.value), std::to_string(r.seed), format_double(r.seconds)});
  }
  out.write("sweep.csv", t.to_csv());
  out.write("timing.csv", timing.to_csv(), false);
  const std::vector<SweepPoint> points = aggregate_sweep(rows);
  Json agg = Json::array();
  for (const SweepPoint& p : points) {
    agg.push_back(Json{{"value", p.value},
                       {"trials", p.trials},
                       {"successes", p.successes},
                       {"mean", p.metric.mean},
                       {"std", p.metric.std}});
    spdlog::info("{} = {}: {} {:.4f} +- {:.4f} ({}/{} ok)", to_string(axis), p.value,
                 metric_name, p.metric.mean, p.metric.std, p.successes, p.trials);
  }
  out.write_json("summary.json", agg);
  out.write("sweep.svg", svg_sweep_plot(points, to_string(axis), metric_name,
                                        axis == SweepAxis::kRho));
  out.finish("sweep", cfg, seeds, kExitOk);
  return kExitOk;
}

// ---------------------------------------------------------------- ablate

struct AblateArgs {
  Common common;
  DataSource data;
};

int cmd_ablate(const AblateArgs& a) {
  DataSource d = a.data;
  if (d.generate.empty()) d.generate = "sphere";
  const TrainSettings s = training_from(a.common.params);
  const std::vector<std::uint64_t> seeds = parse_seeds(a.common.seeds);
  const DatasetSpec spec = generated_spec(d, 0);
  const std::vector<AblationRow> rows =
      run_ablation(spec, s, standard_ablations(), seeds, {}, a.common.threads);

  RunWriter out(output_dir(a.common, "ablate"));
  Table t({"ablation", "P_mean", "P_std", "mu_test_mean", "P_per_seed"});
  for (const AblationRow& r : rows) {
    std::string per;
    for (double p : r.P) per += (per.empty() ? "" : " ") + format_double(p);
    t.add({r.name, format_double(r.P_stats.mean), format_double(r.P_stats.std),
           format_double(r.mu_test.mean), per});
    spdlog::info("{:<18} P = {:6.2f} +- {:5.2f}", r.name, r.P_stats.mean, r.P_stats.std);
  }
  out.write("ablation.csv", t.to_csv());
  out.finish("ablate", Json{{"data", data_config(d)}, {"training", train_settings_to_json(s)}},
             seeds, kExitOk);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planning on sequenced manifolds and learned constraint manifolds"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Plan a sequenced-manifold task");
  add_common(plan_cmd, plan.common);
  plan_cmd->add_option("--task", plan.task, "Task file (JSON)");
  plan_cmd->add_option("--variant", plan.variant, "psm_star, greedy or single_tree");

  LearnArgs learn;
  auto* learn_cmd = app.add_subcommand("learn", "Train a constraint network on a dataset");
  add_common(learn_cmd, learn.common);
  add_data(learn_cmd, learn.data);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a trained model (mu and P)");
  add_common(eval_cmd, eval.common);
  add_data(eval_cmd, eval.data);
  eval_cmd->add_option("--model", eval.model, "Model file (JSON)");
  eval_cmd->add_option("--test-points", eval.test_points, "Projected test points");
  eval_cmd->add_option("--threshold", eval.threshold, "Distance threshold for P");

  AugmentArgs aug;
  auto* aug_cmd = app.add_subcommand("augment-preview", "Write one round of augmented samples");
  add_common(aug_cmd, aug.common);
  add_data(aug_cmd, aug.data);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep rho or m (planner) or levels (training)");
  add_common(sweep_cmd, sweep.common);
  add_data(sweep_cmd, sweep.data);
  sweep_cmd->add_option("--task", sweep.task, "Task file for planner sweeps");
  sweep_cmd->add_option("--sweep", sweep.sweep, "axis=v1,v2,... with axis rho, m or levels")
      ->required();
  sweep_cmd->add_option("--variant", sweep.variant, "psm_star, greedy or single_tree");

  AblateArgs ablate;
  auto* ablate_cmd = app.add_subcommand("ablate", "Training ablations over seeds");
  add_common(ablate_cmd, ablate.common);
  add_data(ablate_cmd, ablate.data);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*plan_cmd) return cmd_plan(plan);
    if (*learn_cmd) return cmd_learn(learn);
    if (*eval_cmd) return cmd_eval(eval);
    if (*aug_cmd) return cmd_augment_preview(aug);
    if (*sweep_cmd) return cmd_sweep(sweep);
    if (*ablate_cmd) return cmd_ablate(ablate);
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const TrainingDivergence& e) {
    spdlog::error("{}", e.what());
    return kExitDivergence;
  } catch (const PreconditionError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
