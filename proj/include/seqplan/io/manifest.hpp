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

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "seqplan/io/files.hpp"
#include "seqplan/io/json_io.hpp"

namespace seqplan {

/// The single writer of one run directory. Every file goes through it so
/// the manifest can list it with its hash. Timing files are listed but not
/// hashed, since wall-clock values differ between identical reruns.
class RunWriter {
 public:
  explicit RunWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }

  void write(const std::string& name, const std::string& text,
             bool deterministic = true) {
    std::lock_guard<std::mutex> lock(mutex_);
    write_text(dir_ / name, text);
    Json a{{"path", name}, {"bytes", text.size()}};
    if (deterministic) {
      a["fnv1a64"] = hash_hex(text);
    } else {
      a["fnv1a64"] = nullptr;
      a["note"] = "wall-clock values, not reproducible";
    }
    artifacts_.push_back(std::move(a));
  }

  void write_json(const std::string& name, const Json& j, bool deterministic = true) {
    write(name, dump_json(j), deterministic);
  }

  /// Writes manifest.json: command, resolved configuration, seeds and the
  /// artifacts written so far.
  void finish(const std::string& command, const Json& resolved_config,
              const std::vector<std::uint64_t>& seeds, int exit_code) {
    Json m;
    m["schema_version"] = kSchemaVersion;
    m["command"] = command;
    m["config"] = resolved_config;
    m["seeds"] = seeds;
    m["exit_code"] = exit_code;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      m["artifacts"] = artifacts_;
    }
    write_text(dir_ / "manifest.json", dump_json(m));
  }

 private:
  std::filesystem::path dir_;
  std::mutex mutex_;
  Json artifacts_ = Json::array();
};

}  // namespace seqplan
