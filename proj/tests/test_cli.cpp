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

// Runs the seqplan_cli binary end to end.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "seqplan/io/files.hpp"
#include "seqplan/io/json_io.hpp"

namespace seqplan {
namespace {

namespace fs = std::filesystem;
const fs::path kSource = SEQPLAN_SOURCE_DIR;
const fs::path kCli = SEQPLAN_CLI;

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("seqplan_cli_" + name);
  fs::remove_all(d);
  return d;
}

int run(const std::string& args) {
  const std::string cmd = kCli.string() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string task(const std::string& name) {
  return (kSource / "demos" / "tasks" / (name + ".json")).string();
}

int count_lines(const fs::path& p) {
  std::ifstream in(p);
  int n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

TEST(CliPlan, MissingTaskIsAConfigError) {
  const fs::path out = fresh_dir("missing");
  EXPECT_EQ(run("plan --task " + task("does_not_exist") + " --out " + out.string()), 1);
  EXPECT_FALSE(fs::exists(out));
}

TEST(CliPlan, UnknownOverrideIsAConfigError) {
  const fs::path out = fresh_dir("override");
  EXPECT_EQ(run("plan --task " + task("point_3d") + " --params mm=3 --out " + out.string()),
            1);
  EXPECT_FALSE(fs::exists(out));
}

TEST(CliPlan, PointTaskCost) {
  const fs::path out = fresh_dir("plan");
  ASSERT_EQ(run("plan --task " + task("point_3d") + " --seeds 0 --out " + out.string()), 0);
  const Json s = read_json(out / "summary.json");
  EXPECT_EQ(s["successes"], 1);
  EXPECT_NEAR(s["cost_mean"].get<double>(), 14.47, 0.1 * 14.47);
  EXPECT_TRUE(fs::exists(out / "waypoints_seed0.txt"));
  EXPECT_TRUE(fs::exists(out / "path_seed0.svg"));
  const Json m = read_json(out / "manifest.json");
  EXPECT_EQ(m["exit_code"], 0);
  EXPECT_EQ(m["config"]["planner"]["m"], 1200);
}

TEST(CliPlan, RerunReproducesHashes) {
  const fs::path a = fresh_dir("rerun_a");
  const fs::path b = fresh_dir("rerun_b");
  ASSERT_EQ(run("plan --task " + task("point_3d") + " --seeds 3 --out " + a.string()), 0);
  ASSERT_EQ(run("plan --task " + task("point_3d") + " --seeds 3 --out " + b.string()), 0);
  const Json ma = read_json(a / "manifest.json");
  const Json mb = read_json(b / "manifest.json");
  EXPECT_EQ(ma["artifacts"], mb["artifacts"]);
}

TEST(CliPlan, EmptyIntersectionIsAPlannerFailure) {
  const fs::path out = fresh_dir("fail");
  EXPECT_EQ(run("plan --task " + task("no_intersection") + " --seeds 0 --out " + out.string()),
            2);
  const Json s = read_json(out / "summary.json");
  EXPECT_EQ(s["runs"][0]["success"], false);
  EXPECT_EQ(s["runs"][0]["failure_stage"], 0);
}

TEST(CliLearn, SphereModelHistoryAndEval) {
  const fs::path out = fresh_dir("learn");
  ASSERT_EQ(run("learn --generate sphere --seeds 0 --out " + out.string()), 0);
  const int epochs = TrainSettings{}.epochs;
  EXPECT_EQ(count_lines(out / "history.csv"), epochs + 2);  // header + initial row

  const std::string text = read_text(out / "model.json");
  EXPECT_EQ(dump_json(model_to_json(load_model(out / "model.json"))), text);

  const fs::path ev = fresh_dir("eval");
  ASSERT_EQ(run("eval --model " + (out / "model.json").string() +
                " --dataset " + (out / "dataset.txt").string() +
                " --kind sphere --out " + ev.string()),
            0);
  EXPECT_GE(read_json(ev / "eval.json")["P"].get<double>(), 90.0);
}

TEST(CliLearn, DivergenceExitsWithThree) {
  const fs::path out = fresh_dir("diverge");
  EXPECT_EQ(run("learn --generate sphere --count 100 --params divergence_threshold=1e-12 "
                "--out " + out.string()),
            3);
}

TEST(CliSweep, RhoTable) {
  const fs::path out = fresh_dir("sweep");
  ASSERT_EQ(run("sweep --task " + task("point_3d") + " --sweep rho=0.01,5 --seeds 0-1 --out " +
                out.string()),
            0);
  EXPECT_EQ(count_lines(out / "sweep.csv"), 5);
  const Json s = read_json(out / "summary.json");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_LE(s[0]["mean"].get<double>(), s[1]["mean"].get<double>());
  EXPECT_TRUE(fs::exists(out / "sweep.svg"));
}

TEST(CliAugment, PreviewWritesPoints) {
  const fs::path out = fresh_dir("augment");
  ASSERT_EQ(run("augment-preview --generate sphere --count 200 --out " + out.string()), 0);
  EXPECT_GT(count_lines(out / "augmented.csv"), 200);
  EXPECT_TRUE(fs::exists(out / "augment.svg"));
}

TEST(Cli, UnknownCommandFails) {
  EXPECT_NE(run("teleport"), 0);
}

}  // namespace
}  // namespace seqplan
