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

#include "algext/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

namespace algext {

namespace {

using nlohmann::json;

// Pinned tolerances.
constexpr double kFourierTol = 1e-7;
constexpr double kDenseAffineTol = 1e-6;
constexpr double kSqrtQTol = 1e-6;  // times sqrt(q)
constexpr double kAffineSlack = 1e-6;
constexpr double kXorSlack = 1e-9;
constexpr double kExt11Eps = 0.125;

std::string rows_where(const ExperimentReport& r, const std::function<std::string(const json&)>& bad) {
  if (r.rows.empty()) return "no rows";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const json& row = r.rows[i];
    if (row.value("mode", "") == "error") return "row " + std::to_string(i) + ": " + row.value("error", "error");
    std::string why = bad(row);
    if (!why.empty()) return "row " + std::to_string(i) + ": " + why;
  }
  return "";
}

double num(const json& row, const char* key) { return row.at(key).get<double>(); }

std::string need(bool ok, const std::string& what) { return ok ? "" : what; }

std::string verify_c01(const ExperimentReport& r) {
  return rows_where(r, [](const json& w) {
    if (w["mode"] != "exact") return std::string("not exhaustive");
    if (std::pow(num(w, "p"), num(w, "t")) > 1048576.0) return std::string("p^t above 2^20");
    return need(w["min_rank"].get<int>() >= w["r"].get<int>() - w["k"].get<int>() + 1, "rank below r - k + 1");
  });
}

std::string verify_c02(const ExperimentReport& r) {
  std::set<int> ns;
  auto bad = rows_where(r, [&](const json& w) {
    ns.insert(w["n"].get<int>());
    if (w["p"].get<int>() != 2) return std::string("p != 2");
    if (num(w, "max_l1") > num(w, "bound_l1") + kFourierTol) return std::string("L1 above 2^r");
    return need(num(w, "max_linf") <= num(w, "bound_linf") + kFourierTol, "Linf above 2^-(r-k+1)");
  });
  if (!bad.empty()) return bad;
  return need(ns == std::set<int>{4, 6, 8}, "n grid is not {4, 6, 8}");
}

std::string verify_c03(const ExperimentReport& r) {
  std::set<int> codims;
  auto bad = rows_where(r, [&](const json& w) {
    codims.insert(w["codim"].get<int>());
    const double bound = std::pow(2.0, -5.0) * std::ldexp(1.0, w["codim"].get<int>()) * std::pow(2.0, num(w, "t") / 2);
    if (std::abs(bound - num(w, "bound")) > 1e-12) return std::string("bound differs from p^-(r-k+1) e p^(t/2)");
    return need(num(w, "max_distance") <= bound + kDenseAffineTol, "distance above the bound");
  });
  if (!bad.empty()) return bad;
  return need(codims == std::set<int>{0, 1, 2}, "codims 0, 1, 2 not all present");
}

std::string verify_c04(const ExperimentReport& r) {
  u64 max_n = 0;
  auto bad = rows_where(r, [&](const json& w) {
    max_n = std::max<u64>(max_n, w["N"].get<u64>());
    return need(w["pass"].get<bool>(), "exact distance above M/N or closed form mismatch");
  });
  if (!bad.empty()) return bad;
  return need(max_n <= 10000, "N above 10^4");
}

std::string verify_c05(const ExperimentReport& r) {
  std::set<std::pair<u64, int>> seen;
  auto bad = rows_where(r, [&](const json& w) {
    const int n = w["n"].get<int>(), m = w["m"].get<int>();
    const u64 q = w["q"].get<u64>();
    seen.insert({q, w["k"].get<int>()});
    if (w["ell"].get<u64>() != q - 1) return std::string("ell != q - 1");
    return need(w["max_fail_count"].get<u64>() <= static_cast<u64>(m * (n - m)), "failures above m(n-m)");
  });
  if (!bad.empty()) return bad;
  return need(seen.size() == 4, "grid q in {5, 7} x k in {1, 2} incomplete");
}

std::string verify_c06(const ExperimentReport& r) {
  return rows_where(r, [](const json& w) {
    if (w["mode"] != "exact") return std::string("not exhaustive");
    return need(w["max_fiber"].get<u64>() <= w["cap"].get<u64>(), "fiber above the Bezout cap");
  });
}

std::string verify_c07(const ExperimentReport& r) {
  return rows_where(r, [](const json& w) {
    const long double q = w["q"].get<u64>(), pts = w["points"].get<u64>(), d = w["degree"].get<u64>();
    const long double qk = std::pow(q, w["dim"].get<int>());
    if (pts > d * qk) return std::string("above d q^k");
    if (w["lower_applies"].get<bool>() && 2 * pts < qk) return std::string("below q^k / 2");
    return std::string();
  });
}

std::string verify_c08(const ExperimentReport& r) {
  return rows_where(r, [](const json& w) {
    if (w["d1"].get<int>() > 3 || w["d2"].get<int>() > 3) return std::string("degree above 3");
    const double tol = kSqrtQTol * std::sqrt(num(w, "q"));
    if (std::abs(num(w, "tolerance") - tol) > 1e-12) return std::string("tolerance not 1e-6 sqrt(q)");
    if (!w["applicable"].get<bool>()) return std::string();
    return need(w["exceed"].get<u64>() <= w["allowed"].get<u64>(), "more than d1 d2 characters above the bound");
  });
}

std::string verify_c09(const ExperimentReport& r) {
  return rows_where(r, [](const json& w) {
    if (w["mode"] != "exact") return std::string("not an exact measurement");
    return need(num(w, "distance") <= kExt11Eps, "distance above 1/8");
  });
}

std::string verify_c10(const ExperimentReport& r) {
  bool budget = false, measured = false;
  auto bad = rows_where(r, [&](const json& w) {
    const std::string stage = w.value("stage", "");
    if (stage == "budget") {
      budget = true;
      return need(num(w, "budget") <= num(w, "eps"), "6 eps1 2^ell + 4 eps1 + eps0 > eps");
    }
    if (stage == "measure") {
      measured = true;
      if (w["mode"] != "exact") return std::string("not an exact measurement");
      return need(num(w, "distance") <= num(w, "eps"), "distance above eps");
    }
    return std::string();
  });
  if (!bad.empty()) return bad;
  if (!budget) return "no budget row";
  return need(measured, "no measurement row");
}

std::string verify_c11(const ExperimentReport& r) {
  return rows_where(r, [](const json& w) {
    const double q = num(w, "q"), d = num(w, "d"), k = num(w, "k");
    if (q < 20 * std::pow(d, 5)) return std::string("q below 20 d^5");
    const double eps = 2 * k * d * d / q;
    return need(num(w, "trimmed_mass") <= 2 * eps, "trimmed mass above 2 eps");
  });
}

std::string verify_c12(const ExperimentReport& r) {
  bool uniform = false;
  std::map<int, int> per_sub;
  auto bad = rows_where(r, [&](const json& w) {
    const std::string stage = w["stage"];
    if (stage == "uniform-input") {
      uniform = true;
      return need(w["distance"] == "0/1", "uniform input output not exactly uniform");
    }
    if (stage != "bias") return std::string();
    ++per_sub[w["subspace"].get<int>()];
    if (!w["qualifies"].get<bool>()) return std::string();
    return need(num(w, "abs_bias") <= num(w, "bound") + kAffineSlack, "bias above D^(k/2) q^(-k/4)");
  });
  if (!bad.empty()) return bad;
  if (!uniform) return "no uniform-input row";
  for (auto& [s, n] : per_sub)
    if (n != 32) return "subspace " + std::to_string(s) + " has " + std::to_string(n) + " characters, not 32";
  return need(!per_sub.empty(), "no bias rows");
}

std::string verify_c13(const ExperimentReport& r) {
  if (r.rows.size() != 3 * 5 * 100) return "expected 1500 trials, got " + std::to_string(r.rows.size());
  return rows_where(r, [](const json& w) {
    const double bound = (num(w, "d") - 1) * std::sqrt(num(w, "q"));
    return need(num(w, "abs_sum") <= bound + kSqrtQTol * std::sqrt(num(w, "q")), "above (d-1) sqrt(q)");
  });
}

std::string verify_c14(const ExperimentReport& r) {
  if (r.rows.size() != 200) return "expected 200 distributions, got " + std::to_string(r.rows.size());
  return rows_where(r, [](const json& w) {
    if (w["cardinality"].get<u64>() > 1024) return std::string("group above 2^10");
    return need(num(w, "distance") <= num(w, "max_bias") * std::sqrt(num(w, "cardinality")) + kXorSlack,
                "distance above max_bias sqrt(|A|)");
  });
}

}  // namespace

const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> all = {
      {1, "Gabidulin rank bound", "c01-gabidulin-rank.cfg", R"([experiment]
id = c01-gabidulin-rank
kind = gabidulin-norms
check = min-rank
[params]
p = 2 3
max_s = 6
max_pt = 1048576
)", 10, verify_c01},
      {2, "Fourier norms", "c02-fourier-norms.cfg", R"([experiment]
id = c02-fourier-norms
kind = gabidulin-norms
check = fourier
[params]
p = 2
n = 4 6 8
tolerance = 1e-7
)", 30, verify_c02},
      {3, "(eps,e)-biased extraction", "c03-dense-affine.cfg", R"([experiment]
id = c03-dense-affine
kind = bias-spectrum
check = dense-affine
[params]
subspaces = affine_f2_12.json
t = 1 2 3 4 5
max_codim = 2
tolerance = 1e-6
)", 60, verify_c03},
      {4, "Mod-M floor", "c04-mod-m-floor.cfg", R"([experiment]
id = c04-mod-m-floor
kind = ext11
check = mod-m
[params]
n_full = 200
n_large = 1000 1009 1024 4096 9973 10000
m_small = 64
)", 10, verify_c04},
      {5, "Seeded rank extractor", "c05-seeded-rank.cfg", R"([experiment]
id = c05-seeded-rank
kind = rank-survey
check = subspace
[params]
q = 5 7
n = 3
k = 1 2
)", 60, verify_c05},
      {6, "DKL fiber finiteness", "c06-dkl-fibers.cfg", R"([experiment]
id = c06-dkl-fibers
kind = fiber-check
check = dkl
[params]
q = 101 1009
strategy = distinct_primes
)", 300, verify_c06},
      {7, "Point-count bounds", "c07-point-counts.cfg", R"([experiment]
id = c07-point-counts
kind = fiber-check
check = point-count
[params]
q = 101 1009 10007
lw_factor = 20
)", 300, verify_c07},
      {8, "Bombieri empirical", "c08-bombieri.cfg", R"([experiment]
id = c08-bombieri
kind = bias-spectrum
check = bombieri
[params]
q = 1009 10007
max_d1 = 3
max_d2 = 3
polys = X1; X2; X1 + X2; X1*X2; X1^2 + X2; X1^3 + X2; X1^2*X2
tolerance_sqrtq = 1e-6
)", 600, verify_c08},
      {9, "Ext(1,1,d) end-to-end", "c09-ext11.cfg", R"([experiment]
id = c09-ext11
kind = ext11
check = end-to-end
[params]
q = 10007 100003
entries = parabola cubic-graph
d = 2
eps = 1/8
measure = exact
)", 300, verify_c09},
      {10, "Composition smoke", "c10-composition.cfg", R"([experiment]
id = c10-composition
kind = composition
check = end-to-end
rng_seed = 10
[params]
q = 10007 100003 1000003 2147483647 2305843009213693951 4611686018427387847
entry = plane-product
eps = 1/2
measure = exact
)", 1200, verify_c10},
      {11, "Min-entropy floor", "c11-min-entropy.cfg", R"([experiment]
id = c11-min-entropy
kind = fiber-check
check = min-entropy
[params]
q = 101 1009 10007
lw_factor = 20
)", 300, verify_c11},
      {12, "Affine extractor", "c12-affine.cfg", R"([experiment]
id = c12-affine
kind = affine
check = bias
field = 10007
rng_seed = 12
[params]
n = 4
k = 2
m = 1
epsilon = 1/2
subspaces = 2
chars = 32
all_chars_when_feasible = false
slack = 1e-6
[budgets]
enumeration = 68719476736
)", 900, verify_c12},
      {13, "Weil bound", "c13-weil.cfg", R"([experiment]
id = c13-weil
kind = weil-check
check = exhaustive
rng_seed = 13
[params]
q = 101 1009 10007
d = 1 2 3 4 5
trials = 100
tolerance_sqrtq = 1e-6
)", 120, verify_c13},
      {14, "XOR-lemma consistency", "c14-xor.cfg", R"([experiment]
id = c14-xor
kind = bias-spectrum
check = xor
rng_seed = 14
[params]
count = 200
max_card = 1024
tolerance = 1e-9
)", 60, verify_c14},
  };
  return all;
}

CriterionResult run_criterion(const Criterion& c, const std::string& report_dir) {
  CriterionResult out;
  out.id = c.id;
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto pinned = parse_config_text(c.ini, "<pinned c" + std::to_string(c.id) + ">");
    const std::string shipped_path =
        (std::filesystem::path(data_dir()) / "configs" / "acceptance" / c.file).string();
    const auto shipped = parse_config_file(shipped_path);
    if (shipped.to_ini() != pinned.to_ini()) {
      out.detail = "shipped config " + c.file + " differs from the pinned config";
    } else {
      auto rep = run_experiment(pinned);
      if (!report_dir.empty()) write_report(rep, pinned.id, report_dir);
      const std::string why = c.verify(rep);
      out.pass = rep.pass && why.empty();
      if (!why.empty()) out.detail = why;
      else if (!rep.pass) out.detail = rep.error ? *rep.error : "a row failed";
      else out.detail = std::to_string(rep.rows.size()) + " rows";
    }
  } catch (const std::exception& e) {
    out.detail = e.what();
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace algext
