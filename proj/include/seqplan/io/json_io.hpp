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

// JSON documents: model files, task files, planner and training settings.
// Every document carries "schema_version".

#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "seqplan/core.hpp"
#include "seqplan/experiments.hpp"
#include "seqplan/io/files.hpp"
#include "seqplan/kinematics.hpp"
#include "seqplan/learning/learned.hpp"
#include "seqplan/learning/mlp.hpp"
#include "seqplan/learning/train.hpp"
#include "seqplan/manifold.hpp"
#include "seqplan/planner/free_space.hpp"
#include "seqplan/planner/psm.hpp"

namespace seqplan {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr int kModelFormatVersion = 1;

inline Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

inline Json read_json(const std::filesystem::path& path) {
  return parse_json(read_text(path), path.string());
}

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

namespace detail {

/// Typed access to a JSON object with the path kept for error messages.
class Reader {
 public:
  Reader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail("expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const Json& raw(const std::string& key) const {
    if (!j_.contains(key)) fail("missing field '" + key + "'");
    return j_.at(key);
  }
  std::string path(const std::string& key) const { return where_ + "." + key; }

  double number(const std::string& key) const {
    const Json& v = raw(key);
    if (!v.is_number()) fail("field '" + key + "' must be a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }
  long long integer(const std::string& key) const {
    const Json& v = raw(key);
    if (!v.is_number_integer()) fail("field '" + key + "' must be an integer");
    return v.get<long long>();
  }
  long long integer(const std::string& key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
  }
  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const Json& v = raw(key);
    if (!v.is_boolean()) fail("field '" + key + "' must be true or false");
    return v.get<bool>();
  }
  std::string string(const std::string& key) const {
    const Json& v = raw(key);
    if (!v.is_string()) fail("field '" + key + "' must be a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) const {
    return has(key) ? string(key) : fallback;
  }
  Eigen::VectorXd vector(const std::string& key) const {
    const Json& v = raw(key);
    if (!v.is_array()) fail("field '" + key + "' must be an array of numbers");
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail("field '" + key + "' must be an array of numbers");
      out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
  }
  std::vector<int> ints(const std::string& key) const {
    const Json& v = raw(key);
    if (!v.is_array()) fail("field '" + key + "' must be an array of integers");
    std::vector<int> out;
    for (const Json& x : v) {
      if (!x.is_number_integer()) fail("field '" + key + "' must be an array of integers");
      out.push_back(x.get<int>());
    }
    return out;
  }

  /// Rejects keys outside `known` (catches typos in overrides).
  void only(const std::set<std::string>& known) const {
    for (const auto& item : j_.items()) {
      if (!known.count(item.key())) fail("unknown field '" + item.key() + "'");
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(where_ + ": " + msg);
  }

 private:
  const Json& j_;
  std::string where_;
};

inline Json to_json_array(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline void check_schema(const Reader& r) {
  const long long v = r.integer("schema_version");
  if (v != kSchemaVersion) {
    r.fail("unsupported schema_version " + std::to_string(v) + " (expected " +
           std::to_string(kSchemaVersion) + ")");
  }
}

}  // namespace detail

// ---------------------------------------------------------------- models

inline Json model_to_json(const MlpModel& m) {
  m.validate();
  Json j;
  j["format"] = "seqplan-mlp";
  j["format_version"] = kModelFormatVersion;
  j["activation"] = "tanh";
  j["output_activation"] = "linear";
  j["widths"] = m.widths;
  j["parameter_layout"] = "per layer: W row-major, then b";
  j["parameters"] = detail::to_json_array(m.flatten());
  return j;
}

inline MlpModel model_from_json(const Json& j, const std::string& source = "model") {
  detail::Reader r(j, source);
  if (r.string("format") != "seqplan-mlp") r.fail("not a seqplan-mlp model file");
  if (r.integer("format_version") != kModelFormatVersion) {
    r.fail("unsupported format_version");
  }
  if (r.string("activation") != "tanh") r.fail("only tanh hidden layers are supported");
  const std::vector<int> widths = r.ints("widths");
  if (widths.size() < 2) r.fail("a model needs at least two widths");
  for (int w : widths) {
    if (w < 1) r.fail("layer widths must be positive");
  }
  MlpModel m = make_mlp(widths, 0);
  const Eigen::VectorXd p = r.vector("parameters");
  if (p.size() != m.num_params()) {
    r.fail("expected " + std::to_string(m.num_params()) + " parameters, found " +
           std::to_string(p.size()));
  }
  m.unflatten(p);
  return m;
}

inline void save_model(const std::filesystem::path& path, const MlpModel& m) {
  write_text(path, dump_json(model_to_json(m)));
}

inline MlpModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_json(path), path.string());
}

// -------------------------------------------------------------- settings

/// Parses "key=value" into (key, JSON value). Values that are not valid
/// JSON are kept as strings, so "variant=greedy" works unquoted.
inline std::pair<std::string, Json> parse_override(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + kv + "' is not of the form key=value");
  }
  const std::string key = kv.substr(0, eq);
  const std::string text = kv.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  return {key, value};
}

inline void apply_overrides(Json& j, const std::vector<std::string>& overrides) {
  if (j.is_null()) j = Json::object();
  for (const std::string& kv : overrides) {
    auto [key, value] = parse_override(kv);
    j[key] = value;
  }
}

inline Json planner_params_to_json(const PlannerParams& p) {
  return Json{{"alpha", p.alpha},
              {"beta", p.beta},
              {"epsilon", p.epsilon},
              {"rho", p.rho},
              {"r", p.r},
              {"m", p.m},
              {"gamma_rrt", p.gamma_rrt},
              {"collision_resolution", p.collision_resolution},
              {"rng_seed", p.rng_seed},
              {"projection_tolerance", p.projection.tolerance},
              {"projection_max_iterations", p.projection.max_iterations}};
}

inline PlannerParams planner_params_from_json(const Json& j,
                                              const std::string& where = "planner") {
  PlannerParams p;
  if (j.is_null()) return p;
  detail::Reader r(j, where);
  r.only({"alpha", "beta", "epsilon", "rho", "r", "m", "gamma_rrt",
          "collision_resolution", "rng_seed", "projection_tolerance",
          "projection_max_iterations"});
  p.alpha = r.number("alpha", p.alpha);
  p.beta = r.number("beta", p.beta);
  p.epsilon = r.number("epsilon", p.epsilon);
  p.rho = r.number("rho", p.rho);
  p.r = r.number("r", p.r);
  p.m = static_cast<int>(r.integer("m", p.m));
  p.gamma_rrt = r.number("gamma_rrt", p.gamma_rrt);
  p.collision_resolution = r.number("collision_resolution", p.collision_resolution);
  p.rng_seed = static_cast<std::uint64_t>(r.integer("rng_seed", 0));
  p.projection.tolerance = r.number("projection_tolerance", p.projection.tolerance);
  p.projection.max_iterations =
      static_cast<int>(r.integer("projection_max_iterations", p.projection.max_iterations));
  try {
    p.validate();
  } catch (const PreconditionError& e) {
    r.fail(e.what());
  }
  return p;
}

inline Json train_settings_to_json(const TrainSettings& s) {
  return Json{{"hidden", s.hidden},
              {"epochs", s.epochs},
              {"batch_rows", s.batch_rows},
              {"learning_rate", s.learning_rate},
              {"clip_norm", s.clip_norm},
              {"divergence_threshold", s.divergence_threshold},
              {"lr_patience", s.lr_patience},
              {"lr_window_steps", s.lr_window_steps},
              {"w_norm", s.weights.norm},
              {"w_reflection", s.weights.reflection},
              {"w_fraction", s.weights.fraction},
              {"w_similar", s.weights.similar},
              {"w_align", s.weights.align},
              {"align_form", s.weights.align_form == AlignForm::kSurrogate ? "surrogate"
                                                                            : "subspace"},
              {"fraction_warmup_epochs", s.fraction_warmup_epochs},
              {"signed_warmup_epochs", s.signed_warmup_epochs},
              {"warmup_min_steps", s.warmup_min_steps},
              {"signed_weight", s.signed_weight},
              {"levels", s.levels},
              {"epsilon_aug", s.epsilon_aug},
              {"fractions", s.fractions},
              {"neighbors", s.neighbors},
              {"osa_neighbors", s.osa_neighbors},
              {"l_override", s.l_override},
              {"use_augmentation", s.use_augmentation},
              {"use_osa", s.use_osa},
              {"seed", s.seed}};
}

inline TrainSettings train_settings_from_json(const Json& j,
                                              const std::string& where = "training") {
  TrainSettings s;
  if (j.is_null()) return s;
  detail::Reader r(j, where);
  r.only({"hidden", "epochs", "batch_rows", "learning_rate", "clip_norm",
          "divergence_threshold", "lr_patience", "lr_window_steps", "warmup_min_steps",
          "w_norm", "w_reflection", "w_fraction", "w_similar", "w_align", "align_form",
          "fraction_warmup_epochs", "signed_warmup_epochs", "signed_weight", "levels",
          "epsilon_aug", "fractions", "neighbors", "osa_neighbors", "l_override",
          "use_augmentation", "use_osa", "seed"});
  if (r.has("hidden")) s.hidden = r.ints("hidden");
  s.epochs = static_cast<int>(r.integer("epochs", s.epochs));
  s.batch_rows = static_cast<int>(r.integer("batch_rows", s.batch_rows));
  s.learning_rate = r.number("learning_rate", s.learning_rate);
  s.clip_norm = r.number("clip_norm", s.clip_norm);
  s.divergence_threshold = r.number("divergence_threshold", s.divergence_threshold);
  s.lr_patience = r.number("lr_patience", s.lr_patience);
  s.lr_window_steps = static_cast<int>(r.integer("lr_window_steps", s.lr_window_steps));
  s.weights.norm = r.number("w_norm", s.weights.norm);
  s.weights.reflection = r.number("w_reflection", s.weights.reflection);
  s.weights.fraction = r.number("w_fraction", s.weights.fraction);
  s.weights.similar = r.number("w_similar", s.weights.similar);
  s.weights.align = r.number("w_align", s.weights.align);
  const std::string form = r.string("align_form", "surrogate");
  if (form == "surrogate") {
    s.weights.align_form = AlignForm::kSurrogate;
  } else if (form == "subspace") {
    s.weights.align_form = AlignForm::kSubspace;
  } else {
    r.fail("align_form must be 'surrogate' or 'subspace'");
  }
  s.fraction_warmup_epochs =
      static_cast<int>(r.integer("fraction_warmup_epochs", s.fraction_warmup_epochs));
  s.signed_warmup_epochs =
      static_cast<int>(r.integer("signed_warmup_epochs", s.signed_warmup_epochs));
  s.warmup_min_steps = static_cast<int>(r.integer("warmup_min_steps", s.warmup_min_steps));
  s.signed_weight = r.number("signed_weight", s.signed_weight);
  s.levels = static_cast<int>(r.integer("levels", s.levels));
  s.epsilon_aug = r.number("epsilon_aug", s.epsilon_aug);
  if (r.has("fractions")) {
    const Eigen::VectorXd f = r.vector("fractions");
    s.fractions.assign(f.data(), f.data() + f.size());
  }
  s.neighbors = static_cast<int>(r.integer("neighbors", s.neighbors));
  s.osa_neighbors = static_cast<int>(r.integer("osa_neighbors", s.osa_neighbors));
  s.l_override = static_cast<int>(r.integer("l_override", s.l_override));
  s.use_augmentation = r.boolean("use_augmentation", s.use_augmentation);
  s.use_osa = r.boolean("use_osa", s.use_osa);
  s.seed = static_cast<std::uint64_t>(r.integer("seed", 0));
  if (s.epochs < 1) r.fail("epochs must be at least 1");
  if (s.batch_rows < 1) r.fail("batch_rows must be at least 1");
  if (s.learning_rate <= 0.0) r.fail("learning_rate must be positive");
  if (s.levels < 1) r.fail("levels must be at least 1");
  if (s.hidden.empty()) r.fail("hidden must list at least one layer");
  return s;
}

// ----------------------------------------------------------------- tasks

/// A task file: the sequenced problem plus optional planner defaults.
struct TaskFile {
  std::string name;
  SequencedTask task;
  PlannerVariant variant = PlannerVariant::kPsmStar;
  Json planner;  // raw planner section (null when absent)
};

namespace detail {

inline SerialChain chain_by_name(const Reader& r, const std::string& name) {
  if (name == "planar_arm_3dof") return planar_arm_3dof();
  if (name == "arm_6dof") return arm_6dof();
  r.fail("unknown chain '" + name + "' (expected planar_arm_3dof or arm_6dof)");
}

inline Manifold manifold_from_json(const Json& j, const std::string& where, int dim,
                                   const std::filesystem::path& base_dir) {
  Reader r(j, where);
  const std::string type = r.string("type");
  try {
    if (type == "sphere") {
      const Eigen::VectorXd c = r.has("center") ? r.vector("center")
                                                : Eigen::VectorXd::Zero(dim);
      if (c.size() != dim) r.fail("center must have " + std::to_string(dim) + " entries");
      return sphere(c, r.number("radius"));
    }
    if (type == "paraboloid") {
      const Eigen::VectorXd a = r.vector("coefficients");
      if (a.size() + 1 != dim) r.fail("paraboloid needs ambient_dim - 1 coefficients");
      return paraboloid(r.number("sign"), a, r.number("offset"));
    }
    if (type == "cylinder") {
      const std::vector<int> axes = r.has("axes") ? r.ints("axes") : std::vector<int>{0, 1};
      if (axes.size() != 2) r.fail("cylinder axes must list two coordinates");
      const Eigen::VectorXd c = r.has("center") ? r.vector("center") : Eigen::VectorXd::Zero(2);
      if (c.size() != 2) r.fail("cylinder center must have two entries");
      return cylinder(dim, r.number("radius"), axes[0], axes[1], c[0], c[1]);
    }
    if (type == "plane") {
      return axis_plane(dim, static_cast<int>(r.integer("axis")), r.number("offset"));
    }
    if (type == "point_goal") {
      const Eigen::VectorXd g = r.vector("goal");
      if (g.size() != dim) r.fail("goal must have " + std::to_string(dim) + " entries");
      return point_goal(g);
    }
    if (type == "intersect") {
      const Json& of = r.raw("of");
      if (!of.is_array() || of.size() < 2) r.fail("'of' must list at least two manifolds");
      Manifold m = manifold_from_json(of[0], r.path("of[0]"), dim, base_dir);
      for (size_t i = 1; i < of.size(); ++i) {
        m = intersect(m, manifold_from_json(of[i], r.path("of[" + std::to_string(i) + "]"),
                                            dim, base_dir));
      }
      return m;
    }
    if (type == "learned") {
      std::filesystem::path p = r.string("model");
      if (p.is_relative()) p = base_dir / p;
      MlpModel model = load_model(p);
      if (model.input_dim() != dim) r.fail("learned model input size differs from ambient_dim");
      return learned_manifold(model, r.string("name", "learned"));
    }
    if (type == "upright" || type == "ee_plane" || type == "grasp") {
      const ChainSlice slice{chain_by_name(r, r.string("chain")),
                             static_cast<int>(r.integer("offset", 0))};
      if (type == "upright") return upright_constraint(slice, dim);
      if (type == "ee_plane") {
        return ee_plane_constraint(slice, dim, static_cast<int>(r.integer("axis")),
                                   r.number("height"));
      }
      const Eigen::VectorXd t = r.vector("target");
      if (t.size() != 3) r.fail("grasp target must have three entries");
      return grasp_constraint(slice, dim, Eigen::Vector3d(t[0], t[1], t[2]));
    }
  } catch (const PreconditionError& e) {
    r.fail(e.what());
  }
  r.fail("unknown manifold type '" + type + "'");
}

inline TransitionHook hook_from_json(const Json& j, const std::string& where, int dim) {
  Reader r(j, where);
  const std::string type = r.string("type");
  if (type == "identity") return identity_hook();
  if (type == "release") return release_hook();
  if (type == "attach_sphere") return attach_sphere_hook(r.number("radius"));
  if (type == "attach_box" || type == "attach_box_at_anchor") {
    const Eigen::VectorXd half = r.vector("half_extent");
    if (half.size() != dim) r.fail("half_extent must have ambient_dim entries");
    if (type == "attach_box") return attach_box_hook(half);
    const Eigen::VectorXd anchor = r.vector("anchor");
    if (anchor.size() != dim) r.fail("anchor must have ambient_dim entries");
    return attach_box_at_anchor_hook(anchor, half);
  }
  r.fail("unknown hook type '" + type + "'");
}

inline Box box_from_json(const Json& j, const std::string& where, int dim) {
  Reader r(j, where);
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  if (r.has("lo")) {
    lo = r.vector("lo");
    hi = r.vector("hi");
  } else {
    const Eigen::VectorXd c = r.vector("center");
    const Eigen::VectorXd h = r.vector("half_extent");
    if (c.size() != h.size()) r.fail("center and half_extent differ in size");
    lo = c - h;
    hi = c + h;
  }
  if (lo.size() != dim || hi.size() != dim) r.fail("box must have ambient_dim entries");
  if ((hi.array() < lo.array()).any()) r.fail("box has hi < lo");
  return Box(lo, hi);
}

}  // namespace detail

/// Parses a task document. Relative model paths resolve against base_dir.
inline TaskFile task_from_json(const Json& j, const std::string& source,
                               const std::filesystem::path& base_dir = ".") {
  detail::Reader r(j, source);
  detail::check_schema(r);
  r.only({"schema_version", "name", "ambient_dim", "start", "bounds", "obstacles",
          "manifolds", "hooks", "planner", "variant", "description"});
  TaskFile tf;
  tf.name = r.string("name", "task");
  const Eigen::VectorXd start = r.vector("start");
  const int dim = static_cast<int>(r.integer("ambient_dim", start.size()));
  if (start.size() != dim) r.fail("start must have ambient_dim entries");
  tf.task.start = start;
  tf.task.bounds = detail::box_from_json(r.raw("bounds"), r.path("bounds"), dim);
  if (r.has("obstacles")) {
    const Json& obs = r.raw("obstacles");
    if (!obs.is_array()) r.fail("obstacles must be an array");
    for (size_t i = 0; i < obs.size(); ++i) {
      tf.task.obstacles.push_back(detail::box_from_json(
          obs[i], r.path("obstacles[" + std::to_string(i) + "]"), dim));
    }
  }
  const Json& ms = r.raw("manifolds");
  if (!ms.is_array() || ms.size() < 2) {
    r.fail("manifolds must list at least one constraint and the goal");
  }
  for (size_t i = 0; i < ms.size(); ++i) {
    tf.task.manifolds.push_back(detail::manifold_from_json(
        ms[i], r.path("manifolds[" + std::to_string(i) + "]"), dim, base_dir));
  }
  if (r.has("hooks")) {
    const Json& hs = r.raw("hooks");
    if (!hs.is_array()) r.fail("hooks must be an array");
    for (size_t i = 0; i < hs.size(); ++i) {
      tf.task.hooks.push_back(detail::hook_from_json(
          hs[i], r.path("hooks[" + std::to_string(i) + "]"), dim));
    }
  }
  if (r.has("variant")) {
    try {
      tf.variant = planner_variant_from_string(r.string("variant"));
    } catch (const PreconditionError& e) {
      r.fail(e.what());
    }
  }
  if (r.has("planner")) tf.planner = r.raw("planner");
  try {
    tf.task.validate(planner_params_from_json(tf.planner, r.path("planner")).epsilon);
  } catch (const PreconditionError& e) {
    r.fail(e.what());
  }
  return tf;
}

inline TaskFile load_task(const std::filesystem::path& path) {
  return task_from_json(read_json(path), path.string(), path.parent_path());
}

// --------------------------------------------------------------- results

inline Json path_result_to_json(const PathResult& r) {
  Json j;
  j["success"] = r.success;
  j["failure_stage"] = r.failure_stage;
  j["cost"] = r.success ? Json(r.cost) : Json(nullptr);
  j["waypoint_count"] = r.waypoints.size();
  j["segment_starts"] = r.segment_starts;
  j["tree_sizes"] = r.tree_sizes;
  j["goal_counts"] = r.goal_counts;
  int nodes = 0;
  for (int n : r.tree_sizes) nodes += n;
  j["nodes"] = nodes;
  j["iterations"] = r.iterations;
  j["extensions"] = r.extensions;
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

inline Json loss_values_to_json(const LossValues& v) {
  return Json{{"norm", v.norm},       {"reflection", v.reflection},
              {"fraction", v.fraction}, {"similar", v.similar},
              {"align", v.align},     {"signed", v.signed_label},
              {"total", v.total}};
}

inline Json eval_report_to_json(const EvalReport& e) {
  return Json{{"P", e.P},
              {"mu_test_mean", e.mu_test.mean},
              {"mu_test_std", e.mu_test.std},
              {"mu_train_mean", e.mu_train.mean},
              {"mu_train_std", e.mu_train.std},
              {"converged", e.converged},
              {"attempted", e.attempted}};
}

}  // namespace seqplan
