// Copyright 2026 The algext Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Batch experiment runner.
//
// One experiment per INI file:
//
//   [experiment]  id, kind, check, field, rng_seed, shards
//   [params]      kind-specific keys
//   [budgets]     enumeration, dft, samples
//   [output]      dir
//
// A run produces <dir>/<id>.report.json, <dir>/<id>.rows.csv and one
// <dir>/<id>.<name>.artifact.json per extractor it builds. Every row carries
// a "mode" label (exact, sampled, heuristic, error) and a "pass" flag; the
// verdict is the conjunction of the row flags.

#ifndef ALGEXT_CLI_HARNESS_HPP_
#define ALGEXT_CLI_HARNESS_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "algext/common.hpp"
#include "json.hpp"

namespace algext {

struct Budgets {
  u64 enumeration = constants::kEnumerationBudget;
  u64 dft = constants::kDftBudget;
  u64 samples = constants::kRankSampleCount;
};

struct ExperimentConfig {
  std::string source;  // file path, or "<pinned>"
  std::string id;
  std::string kind;
  std::string check;
  std::string field;  // optional field token
  std::optional<u64> rng_seed;
  int shards = 1;
  std::map<std::string, std::string> params;
  Budgets budgets;
  std::string output_dir = "reports";

  // Canonical INI text; parse_config_text(to_ini()) reproduces the config.
  std::string to_ini() const;
  nlohmann::json to_json() const;
};

// ConfigError on syntax errors, unknown kinds/checks/keys, non-positive
// budgets, or a missing rng_seed for a sampled experiment.
ExperimentConfig parse_config_text(const std::string& text, const std::string& source = "<text>");
ExperimentConfig parse_config_file(const std::string& path);

// Kinds and their checks; the first check is the default.
const std::map<std::string, std::vector<std::string>>& experiment_kinds();

// Budgets after ALGEXT_BUDGET_OVERRIDE (a positive integer cap).
Budgets effective_budgets(const Budgets& b);

// The pinned-constants block echoed in every report.
nlohmann::json constants_block();

// Git blob hash: sha1("blob <len>\0" + bytes), lowercase hex.
std::string git_blob_sha1(const std::string& bytes);

struct ArtifactRef {
  std::string name;
  std::string sha1;
};

struct ExperimentReport {
  nlohmann::json config;
  std::vector<ArtifactRef> artifacts;
  std::string content_hash;  // sha1 over "name sha1\n" lines
  std::vector<nlohmann::json> rows;
  bool pass = false;
  std::optional<std::string> error;  // experiment-level failure
  double wall_seconds = 0;
  int shards = 1;
  std::vector<std::string> modes;
  // Serialized extractors built by the run, already wrapped.
  std::map<std::string, nlohmann::json> built;

  nlohmann::json to_json() const;
  // Header is the union of row keys in first-seen order.
  std::string rows_csv() const;
};

// Runs one experiment. Errors inside the experiment become an error row and
// a failing verdict; ConfigError propagates.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Writes the report, the CSV and the artifacts under `dir`.
void write_report(const ExperimentReport& r, const std::string& id, const std::string& dir);

// {"version": 1, "kind": kind, "artifact": payload}
nlohmann::json wrap_artifact(const std::string& kind, const nlohmann::json& payload);

// Evaluates the artifact on every whitespace-separated line of `input`.
// ArtifactVersionMismatch for unreadable, truncated or wrong-version files.
std::vector<std::string> replay(const std::string& artifact_path, const std::string& input_path);
std::vector<std::string> replay_json(const nlohmann::json& wrapped, const std::vector<std::string>& input_lines);

struct SuiteEntry {
  std::string config_path;
  std::string id;
  bool pass = false;
  std::string detail;
  double wall_seconds = 0;
};
struct SuiteReport {
  std::string name;
  std::vector<SuiteEntry> entries;
  bool pass = false;
  nlohmann::json to_json() const;
};

// Runs every *.cfg under data_dir()/configs/<name>, sorted by file name.
SuiteReport run_suite(const std::string& name, const std::string& report_dir);

std::vector<std::string> corpus_listing();

// Exit codes.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInfra = 2;

}  // namespace algext

#endif  // ALGEXT_CLI_HARNESS_HPP_
