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

// algext run <config> | replay <artifact> <input> | suite <name> | corpus list

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "algext/cli_harness.hpp"

namespace {

using namespace algext;

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kIoError: return kExitInfra;
    default: return kExitFail;
  }
}

int cmd_run(const std::string& path, const std::string& out_dir) {
  auto cfg = parse_config_file(path);
  auto rep = run_experiment(cfg);
  const std::string dir = out_dir.empty() ? cfg.output_dir : out_dir;
  write_report(rep, cfg.id, dir);
  std::cout << (rep.pass ? "PASS " : "FAIL ") << cfg.id << " (" << rep.rows.size() << " rows, "
            << rep.wall_seconds << " s) -> " << dir << "/" << cfg.id << ".report.json\n";
  if (rep.error) std::cout << "  " << *rep.error << "\n";
  return rep.pass ? kExitPass : kExitFail;
}

int cmd_replay(const std::string& artifact, const std::string& input, const std::string& output) {
  auto lines = replay(artifact, input);
  std::ofstream file;
  if (!output.empty()) {
    file.open(output, std::ios::binary);
    if (!file) throw Error(ErrorCode::kIoError, "cannot write " + output);
  }
  std::ostream& os = output.empty() ? std::cout : file;
  for (auto& l : lines) os << l << "\n";
  return kExitPass;
}

int cmd_suite(const std::string& name, const std::string& out_dir) {
  auto rep = run_suite(name, out_dir);
  for (auto& e : rep.entries)
    std::cout << (e.pass ? "PASS " : "FAIL ") << e.id << " (" << e.wall_seconds << " s) " << e.detail << "\n";
  std::cout << "suite " << name << ": " << (rep.pass ? "pass" : "fail") << "\n";
  std::ofstream(out_dir + "/suite-" + name + ".json") << rep.to_json().dump(2) << "\n";
  return rep.pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"algext: extractor experiments over finite fields"};
  app.require_subcommand(1);

  std::string run_cfg, run_out;
  auto* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("config", run_cfg, "INI config file")->required();
  run->add_option("--out", run_out, "Report directory (default: output.dir of the config)");

  std::string art, input, rep_out;
  auto* rep = app.add_subcommand("replay", "Evaluate a serialized extractor on an input file");
  rep->add_option("artifact", art, "Artifact JSON")->required();
  rep->add_option("input", input, "One input per line")->required();
  rep->add_option("-o,--output", rep_out, "Output file (default: stdout)");

  std::string suite_name, suite_out = "reports";
  auto* suite = app.add_subcommand("suite", "Run a shipped suite (smoke, full)");
  suite->add_option("name", suite_name, "Suite name")->required()->check(CLI::IsMember({"smoke", "full"}));
  suite->add_option("--out", suite_out, "Report directory");

  auto* corpus = app.add_subcommand("corpus", "Corpus tools");
  auto* corpus_list = corpus->add_subcommand("list", "List corpus entries");
  corpus->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitFail;
  }

  try {
    if (*run) return cmd_run(run_cfg, run_out);
    if (*rep) return cmd_replay(art, input, rep_out);
    if (*suite) {
      std::filesystem::create_directories(suite_out);
      return cmd_suite(suite_name, suite_out);
    }
    if (*corpus_list) {
      for (auto& l : corpus_listing()) std::cout << l << "\n";
      return kExitPass;
    }
  } catch (const Error& e) {
    std::cerr << "algext: " << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "algext: " << e.what() << "\n";
    return kExitInfra;
  }
  return kExitFail;
}
