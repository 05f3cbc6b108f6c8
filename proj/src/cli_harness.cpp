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

#include "algext/cli_harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "algext/affine_ext.hpp"
#include "algext/lowbias_extract.hpp"
#include "algext/pipeline.hpp"
#include "algext/rank_extract.hpp"
#include "algext/variety_lab.hpp"
#include "experiments.hpp"

namespace algext {

namespace fs = std::filesystem;
using nlohmann::json;

// ------------------------------------------------------------------ config

namespace {

u64 parse_budget(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    u64 x = std::stoull(v, &used);
    if (used != v.size() || x == 0) throw std::invalid_argument("bad");
    return x;
  } catch (const std::exception&) {
    fail(ErrorCode::kConfigError, "budget '" + key + "' must be a positive integer, got '" + v + "'");
  }
}

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && ws(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && ws(s[i])) ++i;
  return s.substr(i);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& source) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::kConfigError, source + ": " + e.message() + " at line " + std::to_string(e.line()));
  }
  ExperimentConfig c;
  c.source = source;
  static const std::set<std::string> sections = {"experiment", "params", "budgets", "output"};
  for (auto& [name, sec] : tree) {
    if (!sections.count(name)) fail(ErrorCode::kConfigError, source + ": unknown section [" + name + "]");
    if (!sec.data().empty() && sec.empty())
      fail(ErrorCode::kConfigError, source + ": key '" + name + "' outside a section");
  }
  auto section = [&](const std::string& n) -> const pt::ptree* {
    auto it = tree.find(n);
    return it == tree.not_found() ? nullptr : &it->second;
  };
  const pt::ptree* ex = section("experiment");
  if (!ex) fail(ErrorCode::kConfigError, source + ": missing [experiment] section");
  static const std::set<std::string> ex_keys = {"id", "kind", "check", "field", "rng_seed", "shards"};
  for (auto& [k, v] : *ex) {
    if (!ex_keys.count(k)) fail(ErrorCode::kConfigError, source + ": unknown key experiment." + k);
    const std::string val = trim(v.data());
    if (k == "id") c.id = val;
    if (k == "kind") c.kind = val;
    if (k == "check") c.check = val;
    if (k == "field") c.field = val;
    if (k == "rng_seed") {
      try {
        std::size_t used = 0;
        c.rng_seed = std::stoull(val, &used);
        if (used != val.size() || val[0] == '-') throw std::invalid_argument("bad");
      } catch (const std::exception&) {
        fail(ErrorCode::kConfigError, source + ": rng_seed must be a nonnegative integer");
      }
    }
    if (k == "shards") c.shards = static_cast<int>(std::min<u64>(parse_budget("shards", val), 1024));
  }
  if (c.id.empty()) fail(ErrorCode::kConfigError, source + ": experiment.id is required");
  for (char ch : c.id)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_'))
      fail(ErrorCode::kConfigError, source + ": experiment.id may only use [A-Za-z0-9_-]");
  if (c.kind.empty()) fail(ErrorCode::kConfigError, source + ": experiment.kind is required");
  const auto& kinds = experiment_kinds();
  auto kit = kinds.find(c.kind);
  if (kit == kinds.end()) fail(ErrorCode::kConfigError, source + ": unknown experiment kind '" + c.kind + "'");
  if (c.check.empty()) c.check = kit->second.front();
  if (std::find(kit->second.begin(), kit->second.end(), c.check) == kit->second.end())
    fail(ErrorCode::kConfigError, source + ": kind " + c.kind + " has no check '" + c.check + "'");

  if (const pt::ptree* ps = section("params")) {
    const auto& allowed = detail::allowed_params(c.kind, c.check);
    for (auto& [k, v] : *ps) {
      if (!allowed.count(k))
        fail(ErrorCode::kConfigError, source + ": unknown parameter '" + k + "' for " + c.kind + "/" + c.check);
      c.params[k] = trim(v.data());
    }
  }
  if (const pt::ptree* bs = section("budgets")) {
    for (auto& [k, v] : *bs) {
      const std::string val = trim(v.data());
      if (k == "enumeration") c.budgets.enumeration = parse_budget(k, val);
      else if (k == "dft") c.budgets.dft = parse_budget(k, val);
      else if (k == "samples") c.budgets.samples = parse_budget(k, val);
      else fail(ErrorCode::kConfigError, source + ": unknown budget '" + k + "'");
    }
  }
  if (const pt::ptree* os = section("output")) {
    for (auto& [k, v] : *os) {
      if (k != "dir") fail(ErrorCode::kConfigError, source + ": unknown key output." + k);
      c.output_dir = trim(v.data());
    }
  }
  if (!c.rng_seed && detail::needs_seed(c))
    fail(ErrorCode::kConfigError, source + ": rng_seed is required for sampled experiment " + c.kind + "/" + c.check);
  return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string ExperimentConfig::to_ini() const {
  std::ostringstream os;
  os << "[experiment]\n"
     << "id = " << id << "\n"
     << "kind = " << kind << "\n"
     << "check = " << check << "\n";
  if (!field.empty()) os << "field = " << field << "\n";
  if (rng_seed) os << "rng_seed = " << *rng_seed << "\n";
  os << "shards = " << shards << "\n";
  if (!params.empty()) {
    os << "\n[params]\n";
    for (auto& [k, v] : params) os << k << " = " << v << "\n";
  }
  os << "\n[budgets]\n"
     << "enumeration = " << budgets.enumeration << "\n"
     << "dft = " << budgets.dft << "\n"
     << "samples = " << budgets.samples << "\n"
     << "\n[output]\n"
     << "dir = " << output_dir << "\n";
  return os.str();
}

json ExperimentConfig::to_json() const {
  json j = {{"id", id}, {"kind", kind}, {"check", check}, {"shards", shards}, {"params", params},
            {"budgets", {{"enumeration", budgets.enumeration}, {"dft", budgets.dft}, {"samples", budgets.samples}}},
            {"output_dir", output_dir}};
  j["field"] = field.empty() ? json(nullptr) : json(field);
  j["rng_seed"] = rng_seed ? json(*rng_seed) : json(nullptr);
  return j;
}

Budgets effective_budgets(const Budgets& b) {
  const char* env = std::getenv("ALGEXT_BUDGET_OVERRIDE");
  if (!env || !*env) return b;
  const u64 cap = parse_budget("ALGEXT_BUDGET_OVERRIDE", env);
  return Budgets{std::min(b.enumeration, cap), std::min(b.dft, cap), std::min(b.samples, cap)};
}

json constants_block() {
  namespace k = constants;
  return {{"c_star", k::kCharThresholdExponent},
          {"c0", k::kFieldFloorMultiplier},
          {"C_star", k::kModMConstant},
          {"constant_fraction_c", k::kConstantFractionC},
          {"enumeration_budget", k::kEnumerationBudget},
          {"dft_budget", k::kDftBudget},
          {"closure_cap", k::kClosureCap},
          {"regular_exhaustive_limit", k::kRegularExhaustiveLimit},
          {"regular_sample_count", k::kRegularSampleCount},
          {"rank_exhaustive_limit", k::kRankExhaustiveLimit},
          {"rank_sample_count", k::kRankSampleCount},
          {"log_saturation", k::kLogSaturation},
          {"bias_tolerance", k::kBiasTolerance}};
}

std::string git_blob_sha1(const std::string& bytes) {
  const std::string blob = "blob " + std::to_string(bytes.size()) + std::string(1, '\0') + bytes;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr) != 1)
    fail(ErrorCode::kIoError, "sha1 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

// ------------------------------------------------------------------ report

json ExperimentReport::to_json() const {
  json arts = json::array();
  for (auto& a : artifacts) arts.push_back({{"name", a.name}, {"sha1", a.sha1}});
  return {{"version", 1},
          {"config", config},
          {"constants", constants_block()},
          {"artifacts", arts},
          {"content_hash", content_hash},
          {"modes", modes},
          {"rows", rows},
          {"verdict", pass ? "pass" : "fail"},
          {"error", error ? json(*error) : json(nullptr)},
          {"wall_seconds", wall_seconds},
          {"shards", shards}};
}

namespace {

std::string csv_cell(const json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string ExperimentReport::rows_csv() const {
  // mode first, pass last, everything else in key order.
  std::vector<std::string> header = {"mode"};
  std::set<std::string> seen = {"mode", "pass"};
  for (auto& r : rows)
    for (auto& [k, v] : r.items())
      if (seen.insert(k).second) header.push_back(k);
  header.push_back("pass");
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (auto& r : rows) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) os << ",";
      auto it = r.find(header[i]);
      if (it != r.end()) os << csv_cell(*it);
    }
    os << "\n";
  }
  return os.str();
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  detail::RunContext ctx(cfg, effective_budgets(cfg.budgets));
  ExperimentReport rep;
  try {
    detail::run_check(ctx);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError || e.code() == ErrorCode::kIoError) throw;
    rep.error = e.what();
    ctx.rows.push_back({{"mode", "error"}, {"error", e.what()}, {"pass", false}});
  }
  rep.rows = std::move(ctx.rows);
  rep.artifacts = std::move(ctx.artifacts);
  rep.built = std::move(ctx.built);
  rep.shards = cfg.shards;
  rep.config = cfg.to_json();
  const Budgets eff = ctx.budgets;
  rep.config["effective_budgets"] = {{"enumeration", eff.enumeration}, {"dft", eff.dft}, {"samples", eff.samples}};
  if (const char* env = std::getenv("ALGEXT_BUDGET_OVERRIDE"); env && *env) rep.config["budget_override"] = env;

  std::string listing;
  for (auto& a : rep.artifacts) listing += a.name + " " + a.sha1 + "\n";
  rep.content_hash = git_blob_sha1(listing);

  std::set<std::string> modes;
  rep.pass = !rep.rows.empty();
  for (auto& r : rep.rows) {
    if (!r.contains("mode") || !r.contains("pass")) fail(ErrorCode::kInvalidArgument, "row without mode or pass");
    modes.insert(r["mode"].get<std::string>());
    rep.pass = rep.pass && r["pass"].get<bool>();
  }
  rep.modes.assign(modes.begin(), modes.end());
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

namespace {

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + p.string());
  out << body;
  if (!out) fail(ErrorCode::kIoError, "write failed for " + p.string());
}

}  // namespace

void write_report(const ExperimentReport& r, const std::string& id, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIoError, "cannot create " + dir + ": " + ec.message());
  write_file(fs::path(dir) / (id + ".report.json"), r.to_json().dump(2) + "\n");
  write_file(fs::path(dir) / (id + ".rows.csv"), r.rows_csv());
  for (auto& [name, art] : r.built) write_file(fs::path(dir) / (id + "." + name + ".artifact.json"), art.dump() + "\n");
}

// ------------------------------------------------------------------ replay

json wrap_artifact(const std::string& kind, const json& payload) {
  return {{"version", 1}, {"kind", kind}, {"artifact", payload}};
}

namespace {

std::vector<u64> parse_line(const std::string& line, std::size_t want, u64 limit) {
  std::istringstream ss(line);
  std::vector<u64> out;
  std::string tok;
  while (ss >> tok) {
    try {
      std::size_t used = 0;
      if (tok[0] == '-') throw std::invalid_argument("negative");
      out.push_back(std::stoull(tok, &used));
      if (used != tok.size()) throw std::invalid_argument("junk");
    } catch (const std::exception&) {
      fail(ErrorCode::kConfigError, "replay input: bad element '" + tok + "'");
    }
    if (out.back() >= limit) fail(ErrorCode::kOutOfRange, "replay input: element " + tok + " out of range");
  }
  if (out.size() != want)
    fail(ErrorCode::kLengthMismatch, "replay input: expected " + std::to_string(want) + " elements, got " +
                                         std::to_string(out.size()));
  return out;
}

std::string join(const std::vector<u64>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

std::vector<std::string> replay_json(const json& wrapped, const std::vector<std::string>& input_lines) {
  if (!wrapped.is_object() || !wrapped.contains("version") || !wrapped["version"].is_number_integer() ||
      wrapped["version"].get<i64>() != 1 || !wrapped.contains("kind") || !wrapped.contains("artifact"))
    fail(ErrorCode::kArtifactVersionMismatch, "artifact is not a version-1 algext artifact");
  const std::string kind = wrapped["kind"].get<std::string>();
  const json& a = wrapped["artifact"];
  std::function<std::string(const std::string&)> eval;
  try {
    if (kind == "ext11") {
      auto c = std::make_shared<Ext11Config>(Ext11Config::from_json(a));
      eval = [c](const std::string& l) { return c->eval(parse_line(l, 1, c->ctx->q())[0]).str(); };
    } else if (kind == "extN1") {
      auto c = std::make_shared<ExtN1Config>(ExtN1Config::from_json(a));
      eval = [c](const std::string& l) { return c->eval(parse_line(l, c->n, c->ctx->q())).str(); };
    } else if (kind == "full-rank") {
      auto c = std::make_shared<FullRankExtractor>(FullRankExtractor::from_json(a));
      eval = [c](const std::string& l) { return c->eval(parse_line(l, c->k, c->ctx->q())).str(); };
    } else if (kind == "composition") {
      auto c = std::make_shared<CompositionConfig>(CompositionConfig::from_json(a));
      eval = [c](const std::string& l) { return c->eval(parse_line(l, c->n, c->ctx->q())).str(); };
    } else if (kind == "affine") {
      auto c = std::make_shared<AffineExtractor>(AffineExtractor::from_json(a));
      eval = [c](const std::string& l) { return join(c->eval(parse_line(l, c->n, c->ctx->q()))); };
    } else if (kind == "bilinear") {
      auto c = std::make_shared<BilinearExtractor>(BilinearExtractor::from_json(a));
      eval = [c](const std::string& l) { return join(c->eval(parse_line(l, c->n(), c->params.p))); };
    } else if (kind == "dkl") {
      auto c = std::make_shared<DklExtractor>(DklExtractor::from_json(a));
      eval = [c](const std::string& l) {
        return join(c->eval(parse_line(l, c->matrix.n, c->matrix.ctx->q())));
      };
    } else {
      fail(ErrorCode::kArtifactVersionMismatch, "unknown artifact kind '" + kind + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kArtifactVersionMismatch, std::string("artifact payload does not match its kind: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kArtifactVersionMismatch) throw;
    fail(ErrorCode::kArtifactVersionMismatch, std::string("artifact payload does not match its kind: ") + e.what());
  }
  std::vector<std::string> out;
  for (auto& line : input_lines) {
    if (trim(line).empty()) continue;
    out.push_back(eval(line));
  }
  return out;
}

std::vector<std::string> replay(const std::string& artifact_path, const std::string& input_path) {
  std::ifstream af(artifact_path);
  if (!af) fail(ErrorCode::kIoError, "cannot open artifact " + artifact_path);
  json wrapped;
  try {
    af >> wrapped;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kArtifactVersionMismatch, artifact_path + " is truncated or not JSON");
  }
  std::ifstream in(input_path);
  if (!in) fail(ErrorCode::kIoError, "cannot open input " + input_path);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return replay_json(wrapped, lines);
}

// ------------------------------------------------------------------- suite

json SuiteReport::to_json() const {
  json es = json::array();
  for (auto& e : entries)
    es.push_back({{"config", e.config_path}, {"id", e.id}, {"verdict", e.pass ? "pass" : "fail"},
                  {"detail", e.detail}, {"wall_seconds", e.wall_seconds}});
  return {{"version", 1}, {"suite", name}, {"verdict", pass ? "pass" : "fail"}, {"experiments", es}};
}

SuiteReport run_suite(const std::string& name, const std::string& report_dir) {
  std::string sub;
  if (name == "smoke") sub = "smoke";
  else if (name == "full") sub = "acceptance";
  else fail(ErrorCode::kConfigError, "unknown suite '" + name + "' (smoke, full)");
  const fs::path dir = fs::path(data_dir()) / "configs" / sub;
  if (!fs::is_directory(dir)) fail(ErrorCode::kIoError, "missing suite directory " + dir.string());
  std::vector<fs::path> files;
  for (auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".cfg") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  SuiteReport rep;
  rep.name = name;
  rep.pass = !files.empty();
  for (auto& f : files) {
    SuiteEntry se;
    se.config_path = f.string();
    se.id = f.stem().string();
    const auto start = std::chrono::steady_clock::now();
    try {
      auto cfg = parse_config_file(f.string());
      se.id = cfg.id;
      auto r = run_experiment(cfg);
      write_report(r, cfg.id, (fs::path(report_dir) / name).string());
      se.pass = r.pass;
      if (r.error) se.detail = *r.error;
      else se.detail = std::to_string(r.rows.size()) + " rows";
    } catch (const std::exception& e) {
      se.pass = false;
      se.detail = e.what();
    }
    se.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rep.pass = rep.pass && se.pass;
    rep.entries.push_back(std::move(se));
  }
  return rep;
}

std::vector<std::string> corpus_listing() {
  std::vector<std::string> out;
  for (auto& e : load_corpus(default_corpus_path())) {
    std::ostringstream os;
    os << e.id << "\t" << e.family << "\tarity=" << e.arity
       << "\tdim=" << (e.raw.contains("declared_dim") ? e.raw["declared_dim"].dump() : "?")
       << "\tdeg=" << (e.raw.contains("degree_bound") ? e.raw["degree_bound"].dump() : "?")
       << "\tabs_irreducible=" << (e.abs_irreducible ? "yes" : "no");
    if (e.has_source) os << "\tsource=(" << e.n << "," << e.k << "," << e.d << ")";
    out.push_back(os.str());
  }
  return out;
}

}  // namespace algext
