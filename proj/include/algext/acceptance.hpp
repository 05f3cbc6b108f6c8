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

// Acceptance criteria 1-14. Each criterion pins its experiment config and
// a verifier that re-reads the report rows against tolerances fixed here.
// A criterion passes only when the run passes, the verifier accepts, and the
// shipped config file under data_dir()/configs/acceptance is identical to the
// pinned one.

#ifndef ALGEXT_ACCEPTANCE_HPP_
#define ALGEXT_ACCEPTANCE_HPP_

#include <functional>
#include <string>
#include <vector>

#include "algext/cli_harness.hpp"

namespace algext {

struct Criterion {
  int id = 0;
  std::string title;
  std::string file;  // shipped config, relative to configs/acceptance
  std::string ini;   // pinned config text
  double time_limit_s = 0;
  // Returns an empty string when the rows meet the pinned tolerances.
  std::function<std::string(const ExperimentReport&)> verify;
};

const std::vector<Criterion>& acceptance_criteria();

struct CriterionResult {
  int id = 0;
  bool pass = false;
  std::string detail;
  double wall_seconds = 0;
};

// Runs one criterion; writes its report under `report_dir` when non-empty.
CriterionResult run_criterion(const Criterion& c, const std::string& report_dir);

}  // namespace algext

#endif  // ALGEXT_ACCEPTANCE_HPP_
