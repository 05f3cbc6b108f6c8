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

// Internal to the harness: experiment bodies and their parameter tables.

#ifndef ALGEXT_SRC_EXPERIMENTS_HPP_
#define ALGEXT_SRC_EXPERIMENTS_HPP_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "algext/cli_harness.hpp"
#include "algext/finite_field.hpp"
#include "json.hpp"

namespace algext::detail {

struct RunContext {
  RunContext(const ExperimentConfig& c, Budgets b) : cfg(c), budgets(b) {}

  const ExperimentConfig& cfg;
  Budgets budgets;
  std::vector<nlohmann::json> rows;
  std::vector<ArtifactRef> artifacts;
  std::map<std::string, nlohmann::json> built;

  u64 seed() const { return cfg.rng_seed.value_or(1); }
  bool has(const std::string& key) const { return cfg.params.count(key) > 0; }
  std::string str(const std::string& key, const std::string& def) const;
  std::string str(const std::string& key) const;  // required
  u64 u64_param(const std::string& key, u64 def) const;
  u64 u64_param(const std::string& key) const;
  double num(const std::string& key, double def) const;
  double num(const std::string& key) const;
  bool flag(const std::string& key, bool def) const;
  std::vector<u64> u64_list(const std::string& key) const;
  std::vector<std::string> list(const std::string& key) const;
  // Fields from params "q" (whitespace-separated tokens), else experiment.field.
  std::vector<Field> fields() const;

  // Reads a data file (relative paths resolve under data_dir()), records its
  // hash, and returns the bytes.
  std::string use_file(const std::string& name, const std::string& path);
  // Records a built extractor under <id>.<name>.artifact.json.
  void add_built(const std::string& name, const std::string& kind, const nlohmann::json& payload);

  void row(nlohmann::json r) { rows.push_back(std::move(r)); }
};

// Accepts "0.125", "1/8", "2^-3", "2^20".
double parse_number(const std::string& s);

const std::set<std::string>& allowed_params(const std::string& kind, const std::string& check);
bool needs_seed(const ExperimentConfig& cfg);
void run_check(RunContext& ctx);

}  // namespace algext::detail

#endif  // ALGEXT_SRC_EXPERIMENTS_HPP_
