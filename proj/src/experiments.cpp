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

#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "algext/affine_ext.hpp"
#include "algext/group_fourier.hpp"
#include "algext/lowbias_extract.hpp"
#include "algext/pipeline.hpp"
#include "algext/rank_extract.hpp"
#include "algext/variety_lab.hpp"

namespace algext {

const std::map<std::string, std::vector<std::string>>& experiment_kinds() {
  static const std::map<std::string, std::vector<std::string>> kinds = {
      {"bias-spectrum", {"uniform", "dense-affine", "xor", "bombieri"}},
      {"rank-survey", {"subspace", "variety"}},
      {"fiber-check", {"dkl", "point-count", "min-entropy"}},
      {"gabidulin-norms", {"min-rank", "fourier"}},
      {"ext11", {"end-to-end", "mod-m"}},
      {"extN1", {"end-to-end"}},
      {"full-rank", {"end-to-end"}},
      {"composition", {"end-to-end"}},
      {"affine", {"bias"}},
      {"weil-check", {"exhaustive"}},
  };
  return kinds;
}

namespace detail {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------- params

double parse_number(const std::string& s) {
  auto as_double = [&](const std::string& t) {
    std::size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("junk");
    return v;
  };
  try {
    if (auto slash = s.find('/'); slash != std::string::npos) {
      const double den = as_double(s.substr(slash + 1));
      if (den == 0) throw std::invalid_argument("zero");
      return as_double(s.substr(0, slash)) / den;
    }
    if (auto caret = s.find('^'); caret != std::string::npos)
      return std::pow(as_double(s.substr(0, caret)), as_double(s.substr(caret + 1)));
    return as_double(s);
  } catch (const std::exception&) {
    fail(ErrorCode::kConfigError, "not a number: '" + s + "'");
  }
}

namespace {

std::vector<std::string> split_ws(const std::string& s, bool commas) {
  std::string t = s;
  if (commas) std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream ss(t);
  std::vector<std::string> out;
  for (std::string w; ss >> w;) out.push_back(w);
  return out;
}

u64 to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    u64 x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument("junk");
    return x;
  } catch (const std::exception&) {
    fail(ErrorCode::kConfigError, "parameter '" + key + "' must be a nonnegative integer, got '" + v + "'");
  }
}

}  // namespace

std::string RunContext::str(const std::string& key, const std::string& def) const {
  auto it = cfg.params.find(key);
  return it == cfg.params.end() ? def : it->second;
}

std::string RunContext::str(const std::string& key) const {
  auto it = cfg.params.find(key);
  if (it == cfg.params.end()) fail(ErrorCode::kConfigError, "missing parameter '" + key + "'");
  return it->second;
}

u64 RunContext::u64_param(const std::string& key, u64 def) const {
  return has(key) ? to_u64(key, str(key)) : def;
}
u64 RunContext::u64_param(const std::string& key) const { return to_u64(key, str(key)); }
double RunContext::num(const std::string& key, double def) const { return has(key) ? parse_number(str(key)) : def; }
double RunContext::num(const std::string& key) const { return parse_number(str(key)); }

bool RunContext::flag(const std::string& key, bool def) const {
  if (!has(key)) return def;
  const std::string v = str(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorCode::kConfigError, "parameter '" + key + "' must be true or false");
}

std::vector<u64> RunContext::u64_list(const std::string& key) const {
  std::vector<u64> out;
  for (auto& w : split_ws(str(key), true)) out.push_back(to_u64(key, w));
  if (out.empty()) fail(ErrorCode::kConfigError, "parameter '" + key + "' is empty");
  return out;
}

std::vector<std::string> RunContext::list(const std::string& key) const { return split_ws(str(key), true); }

std::vector<Field> RunContext::fields() const {
  std::vector<std::string> toks;
  if (has("q")) toks = split_ws(str("q"), false);
  else if (!cfg.field.empty()) toks = {cfg.field};
  else fail(ErrorCode::kConfigError, "experiment needs a field (experiment.field or params.q)");
  std::vector<Field> out;
  for (auto& t : toks) {
    try {
      out.push_back(parse_field_token(t));
    } catch (const Error& e) {
      fail(ErrorCode::kConfigError, "bad field '" + t + "': " + e.what());
    }
  }
  return out;
}

std::string RunContext::use_file(const std::string& name, const std::string& path) {
  fs::path p(path);
  if (p.is_relative()) p = fs::path(data_dir()) / p;
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  std::string bytes = ss.str();
  artifacts.push_back({name, git_blob_sha1(bytes)});
  return bytes;
}

void RunContext::add_built(const std::string& name, const std::string& kind, const json& payload) {
  json w = wrap_artifact(kind, payload);
  artifacts.push_back({name, git_blob_sha1(w.dump())});
  built[name] = std::move(w);
}

// --------------------------------------------------------------- helpers

namespace {

EnumOptions enum_opts(const RunContext& c) { return EnumOptions{c.budgets.enumeration, c.cfg.shards}; }

std::vector<CorpusEntry> load_corpus_for(RunContext& c) {
  const std::string path = c.str("corpus", "corpus.json");
  c.use_file("corpus", path);
  fs::path p(path);
  if (p.is_relative()) p = fs::path(data_dir()) / p;
  return load_corpus(p.string());
}

const CorpusEntry& find_entry(const std::vector<CorpusEntry>& corpus, const std::string& id) {
  for (auto& e : corpus)
    if (e.id == id) return e;
  fail(ErrorCode::kConfigError, "corpus has no entry '" + id + "'");
}

int declared_dim(const CorpusEntry& e) {
  return e.raw.contains("declared_dim") ? e.raw["declared_dim"].get<int>() : -1;
}

// Uniform points of V: draw the free coordinates, solve the eliminated ones,
// reject unless every remaining generator vanishes. Each point has exactly
// one free assignment, so accepted draws are uniform on V(F_q).
class PointSampler {
 public:
  explicit PointSampler(const VarietySpec& v) : v_(v), plan_(plan_enumeration(v)) {
    for (auto& s : plan_.solved) solve_.emplace_back(s.rest);
    for (int gi : plan_.remaining) check_.emplace_back(v.generators[gi]);
  }

  std::vector<u64> draw(std::mt19937_64& rng, u64 max_tries) {
    const FieldCtx& f = *v_.ctx;
    std::vector<u64> x(v_.arity, 0);
    for (u64 tries = 0; tries < max_tries; ++tries) {
      for (int var : plan_.free_vars) x[var] = uniform_below(rng, f.q());
      for (std::size_t s = 0; s < plan_.solved.size(); ++s)
        x[plan_.solved[s].var] = f.mul(plan_.solved[s].inv_coeff_neg, solve_[s](x));
      bool ok = true;
      for (auto& ev : check_)
        if (ev(x) != 0) {
          ok = false;
          break;
        }
      if (ok) return x;
    }
    fail(ErrorCode::kBudgetExceeded, "rejection sampler found no point in " + std::to_string(max_tries) + " tries");
  }

 private:
  const VarietySpec& v_;
  EnumerationPlan plan_;
  std::vector<PolyEvaluator> solve_, check_;
};

// Distance of ext(source) to uniform on m_out bits. Fills mode, distance,
// floor and samples/support.
json measure_source(RunContext& c, const AlgebraicSourceSpec& spec, int m_out,
                    const std::function<u64(const std::vector<u64>&)>& ext, const std::string& mode) {
  if (m_out > 62) fail(ErrorCode::kBudgetExceeded, "output of " + std::to_string(m_out) + " bits is too wide to measure");
  json r;
  if (mode == "exact") {
    auto src = build_source(spec, enum_opts(c));
    const Carrier& car = src.carrier();
    auto m = measure_extractor([&](u64 idx) { return ext(car.decode(idx)); }, m_out, src, MeasureMode::kExact, 0,
                               c.seed(), c.cfg.shards, c.budgets.enumeration);
    r["mode"] = "exact";
    r["distance"] = m.distance;
    r["distance_exact"] = u128_to_string(m.exact->num) + "/" + u128_to_string(m.exact->den);
    r["support"] = src.support_size();
    r["source_min_entropy"] = m.source_min_entropy;
    r["floor"] = 0.0;
    return r;
  }
  if (mode != "sampled") fail(ErrorCode::kConfigError, "measure must be exact, sampled or none");
  const u64 n = c.budgets.samples;
  std::mt19937_64 rng(c.seed());
  PointSampler sampler(spec.variety);
  const Carrier target = Carrier::residue_power(u64{1} << m_out, 1);
  CountBuilder cb(target);
  for (u64 i = 0; i < n; ++i) cb.add(ext(spec.map.eval(sampler.draw(rng, c.budgets.enumeration))));
  auto est = estimate_distance_to_uniform(cb.build(FiniteDistribution::Mode::kSampled));
  r["mode"] = "sampled";
  r["distance"] = est.value;
  r["floor"] = est.floor;
  r["samples"] = n;
  return r;
}

json error_row(const Error& e) { return {{"mode", "error"}, {"error", e.what()}, {"pass", false}}; }

std::string ratio_str(const Ratio& r) { return u128_to_string(r.num) + "/" + u128_to_string(r.den); }

// "3*X1^2*X2 - X2 + 1" over `arity` variables.
MultiPoly parse_poly(Field ctx, int arity, const std::string& text) {
  MultiPoly acc(ctx, arity);
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) fail(ErrorCode::kConfigError, "empty polynomial");
  std::size_t i = 0;
  while (i < s.size()) {
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') {
      neg = s[i] == '-';
      ++i;
    }
    std::size_t j = i;
    while (j < s.size() && s[j] != '+' && s[j] != '-') ++j;
    const std::string term = s.substr(i, j - i);
    if (term.empty()) fail(ErrorCode::kConfigError, "malformed polynomial '" + text + "'");
    MultiPoly t = MultiPoly::constant(ctx, arity, 1);
    std::stringstream fs(term);
    for (std::string factor; std::getline(fs, factor, '*');) {
      if (factor.empty()) fail(ErrorCode::kConfigError, "malformed polynomial '" + text + "'");
      if (factor[0] == 'X' || factor[0] == 'x') {
        auto caret = factor.find('^');
        u64 var = to_u64("poly", factor.substr(1, caret == std::string::npos ? std::string::npos : caret - 1));
        u64 e = caret == std::string::npos ? 1 : to_u64("poly", factor.substr(caret + 1));
        if (var < 1 || var > static_cast<u64>(arity))
          fail(ErrorCode::kConfigError, "polynomial variable X" + std::to_string(var) + " out of range");
        t = t * MultiPoly::monomial(ctx, arity, static_cast<int>(var - 1), static_cast<std::uint32_t>(e));
      } else {
        t = t.scale(ctx->from_int(static_cast<i64>(to_u64("poly", factor))));
      }
    }
    acc = neg ? acc - t : acc + t;
    i = j;
  }
  return acc;
}

std::string join_u64(const std::vector<u64>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

// ------------------------------------------------------- gabidulin-norms

void run_min_rank(RunContext& c) {
  const std::vector<u64> ps = c.has("p") ? c.u64_list("p") : std::vector<u64>{2, 3};
  const int max_s = static_cast<int>(c.u64_param("max_s", 6));
  const u64 max_pt = c.u64_param("max_pt", u64{1} << 20);
  for (u64 p : ps) {
    int t_cap = 0;
    for (u128 pw = p; pw <= max_pt; pw *= p) ++t_cap;
    for (int s = 1; s <= max_s; ++s)
      for (int r = 1; r <= s; ++r)
        for (int k = 1; k <= r; ++k) {
          const int t = std::min(k * s, t_cap);
          if (t < 1) continue;
          auto g = GabidulinParams::make(p, s, r, k, t);
          auto sv = min_rank_survey(gabidulin_matrices(g), p, g.rank_bound(), constants::kRankExhaustiveLimit, c.seed());
          c.row({{"mode", sv.exhaustive ? "exact" : "sampled"}, {"p", p}, {"s", s}, {"r", r}, {"k", k}, {"t", t},
                 {"combinations", sv.combinations}, {"min_rank", sv.min_rank}, {"bound", sv.bound},
                 {"pass", sv.pass}});
        }
  }
}

void run_fourier(RunContext& c) {
  const u64 p = c.u64_param("p", 2);
  const std::vector<u64> ns = c.has("n") ? c.u64_list("n") : std::vector<u64>{4, 6, 8};
  const double tol = c.num("tolerance", 1e-7);
  for (u64 n64 : ns) {
    const int n = static_cast<int>(n64);
    for (int r = 1; 2 * r <= n; ++r)
      for (int k = 1; k <= r; ++k) {
        const int t = k * (n - r);
        auto ext = build_bilinear(p, n, r, k, t);
        auto fc = fourier_norm_check(ext, tol, c.budgets.dft);
        c.row({{"mode", "exact"}, {"p", p}, {"n", n}, {"r", r}, {"s", n - r}, {"k", k}, {"t", t},
               {"characters", fc.characters}, {"max_l1", fc.max_l1}, {"bound_l1", fc.bound_l1},
               {"max_linf", fc.max_linf}, {"bound_linf", fc.bound_linf}, {"tolerance", tol}, {"pass", fc.pass}});
      }
  }
}

// --------------------------------------------------------- bias-spectrum

void run_uniform_spectrum(RunContext& c) {
  const Field f = c.fields().front();
  const int n = static_cast<int>(c.u64_param("n", 1));
  const double tol = c.num("tolerance", constants::kBiasTolerance);
  auto d = FiniteDistribution::uniform(Carrier::field_power(f, n));
  auto s = bias_spectrum(d, FourierOptions{c.budgets.dft, c.cfg.shards});
  const double mx = s.max_nontrivial();
  c.row({{"mode", "exact"}, {"field", f->token()}, {"n", n}, {"characters", s.entries.size()},
         {"max_nontrivial_bias", mx}, {"tolerance", tol}, {"pass", mx <= tol}});
}

void run_dense_affine(RunContext& c) {
  const std::string bytes = c.use_file("subspaces", c.str("subspaces", "affine_f2_12.json"));
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("subspace file: ") + e.what());
  }
  if (doc.value("version", 0) != 1 || doc.value("p", 0) != 2)
    fail(ErrorCode::kConfigError, "subspace file must be version 1 over p = 2");
  const int n = doc.at("n").get<int>();
  if (n < 4 || n > 20) fail(ErrorCode::kConfigError, "subspace file: n out of range");
  const std::vector<u64> ts = c.has("t") ? c.u64_list("t") : std::vector<u64>{1, 2, 3, 4, 5};
  const double tol = c.num("tolerance", 1e-6);
  const int max_codim = static_cast<int>(c.u64_param("max_codim", 2));
  const u64 size = u64{1} << n;

  std::vector<BilinearExtractor> exts;
  std::vector<std::vector<u64>> table;  // table[ti][x] = f_t(x), x a carrier index
  for (u64 t : ts) {
    exts.push_back(build_dense_affine_extractor(2, n, static_cast<int>(t)));
    std::vector<u64> tab(size);
    for (u64 x = 0; x < size; ++x) tab[x] = exts.back().eval_index(x);
    table.push_back(std::move(tab));
  }
  c.add_built("dense-affine-t" + std::to_string(ts.back()), "bilinear", exts.back().to_json());

  // Carrier index: x_1 is the most significant bit; equation bit j is x_{j+1}.
  auto carrier_index = [&](u64 x) {
    u64 idx = 0;
    for (int j = 0; j < n; ++j) idx |= ((x >> j) & 1) << (n - 1 - j);
    return idx;
  };
  struct Agg {
    u64 count = 0;
    double max_distance = 0, bound = 0;
    std::string worst;
    bool pass = true;
  };
  std::map<std::pair<int, std::size_t>, Agg> agg;
  auto fp = make_field(2, 1);
  for (auto& sj : doc.at("subspaces")) {
    const std::string id = sj.at("id").get<std::string>();
    std::vector<u64> rows = sj.at("rows").get<std::vector<u64>>();
    std::vector<u64> rhs = sj.at("rhs").get<std::vector<u64>>();
    const int codim = static_cast<int>(rows.size());
    if (rhs.size() != rows.size() || codim > max_codim)
      fail(ErrorCode::kConfigError, "subspace " + id + ": bad shape or codim above " + std::to_string(max_codim));
    std::vector<std::vector<u64>> m;
    for (u64 a : rows) {
      if (a >= size) fail(ErrorCode::kConfigError, "subspace " + id + ": row out of range");
      std::vector<u64> v(n);
      for (int j = 0; j < n; ++j) v[j] = (a >> j) & 1;
      m.push_back(v);
    }
    if (static_cast<int>(matrix_rank(*fp, m)) != codim)
      fail(ErrorCode::kConfigError, "subspace " + id + ": dependent equations");
    std::vector<u64> pts;
    for (u64 x = 0; x < size; ++x) {
      bool ok = true;
      for (int i = 0; i < codim && ok; ++i) ok = (std::popcount(rows[i] & x) & 1) == static_cast<int>(rhs[i] & 1);
      if (ok) pts.push_back(carrier_index(x));
    }
    if (pts.size() != (size >> codim)) fail(ErrorCode::kConfigError, "subspace " + id + ": wrong point count");
    const double e = std::ldexp(1.0, codim);
    for (std::size_t ti = 0; ti < exts.size(); ++ti) {
      const u64 outs = u64{1} << ts[ti];
      std::vector<u64> cnt(outs, 0);
      for (u64 x : pts) ++cnt[table[ti][x]];
      // TV = sum |c_y 2^t - N| / (2 N 2^t)
      u128 num = 0;
      const u128 N = pts.size();
      for (u64 cy : cnt) {
        const u128 a = static_cast<u128>(cy) * outs;
        num += a > N ? a - N : N - a;
      }
      Ratio dist = ratio_reduce(Ratio{num, 2 * N * outs});
      const double bound = dense_affine_error(exts[ti], e);
      Agg& g = agg[{codim, ti}];
      ++g.count;
      g.bound = bound;
      if (g.worst.empty() || dist.value() > g.max_distance) {
        g.max_distance = dist.value();
        g.worst = id;
      }
      if (dist.value() > bound + tol) g.pass = false;
    }
  }
  for (auto& [key, g] : agg)
    c.row({{"mode", "exact"}, {"codim", key.first}, {"e", 1 << key.first}, {"t", ts[key.second]},
           {"subspaces", g.count}, {"max_distance", g.max_distance}, {"bound", g.bound}, {"tolerance", tol},
           {"worst_subspace", g.worst}, {"pass", g.pass}});
}

void run_xor(RunContext& c) {
  const u64 count = c.u64_param("count", 200);
  const u64 max_card = c.u64_param("max_card", 1024);
  const double tol = c.num("tolerance", constants::kBiasTolerance);
  std::mt19937_64 rng(c.seed());
  for (u64 i = 0; i < count; ++i) {
    Carrier car = Carrier::residue_power(2, 1);
    for (;;) {
      const u64 kind = uniform_below(rng, 4);
      if (kind == 0) {
        const u64 base[] = {2, 3, 5, 7};
        const u64 p = base[uniform_below(rng, 4)];
        u64 dmax = 0;
        for (u64 card = p; card <= max_card; card *= p) ++dmax;
        if (dmax == 0) continue;
        car = Carrier::field_power(make_field(p, 1), 1 + static_cast<int>(uniform_below(rng, dmax)));
      } else if (kind == 1) {
        const int m = 2 + static_cast<int>(uniform_below(rng, 2));  // F_4 or F_8
        const u64 q = u64{1} << m;
        if (q > max_card) continue;
        int dmax = 0;
        for (u64 card = q; card <= max_card; card *= q) ++dmax;
        car = Carrier::field_power(make_field(2, m), 1 + static_cast<int>(uniform_below(rng, dmax)));
      } else {
        const u64 N = 2 + uniform_below(rng, 31);
        if (N > max_card) continue;
        int tmax = 0;
        for (u64 card = N; card <= max_card; card *= N) ++tmax;
        car = Carrier::residue_power(N, 1 + static_cast<int>(uniform_below(rng, tmax)));
      }
      break;
    }
    const u64 card = car.cardinality();
    const u64 support = 1 + uniform_below(rng, card);
    std::vector<u64> perm(card);
    for (u64 j = 0; j < card; ++j) perm[j] = j;
    for (u64 j = 0; j < support; ++j) std::swap(perm[j], perm[j + uniform_below(rng, card - j)]);
    std::vector<std::pair<u64, u64>> counts;
    for (u64 j = 0; j < support; ++j) counts.emplace_back(perm[j], 1 + uniform_below(rng, 100));
    std::sort(counts.begin(), counts.end());
    FiniteDistribution d(car, counts);
    auto x = xor_distance_check(d, FourierOptions{c.budgets.dft, c.cfg.shards});
    c.row({{"mode", "exact"}, {"index", i}, {"carrier", car.describe()}, {"cardinality", card},
           {"support", support}, {"max_bias", x.max_bias}, {"distance", x.measured_distance}, {"bound", x.bound},
           {"tolerance", tol}, {"pass", x.measured_distance <= x.bound + tol}});
  }
}

void run_bombieri(RunContext& c) {
  auto corpus = load_corpus_for(c);
  const auto fields = c.fields();
  const double tol = c.num("tolerance_sqrtq", 1e-6);
  const u64 max_d1 = c.u64_param("max_d1", 3);
  const u64 max_d2 = c.u64_param("max_d2", 3);
  std::vector<std::string> polys;
  {
    std::stringstream ss(c.str("polys", "X1; X2; X1 + X2; X1*X2; X1^2 + X2; X1^3 + X2; X1^2*X2"));
    for (std::string p; std::getline(ss, p, ';');)
      if (!p.empty()) polys.push_back(p);
  }
  std::vector<const CorpusEntry*> curves;
  if (c.has("entries")) {
    for (auto& id : c.list("entries")) curves.push_back(&find_entry(corpus, id));
  } else {
    for (auto& e : corpus)
      if (declared_dim(e) == 1 && e.abs_irreducible) curves.push_back(&e);
  }
  for (const Field& f : fields)
    for (const CorpusEntry* e : curves) {
      auto v = e->variety(f);
      if (v.bezout_degree() > max_d1) continue;
      for (auto& ptxt : polys) {
        auto poly = parse_poly(f, e->arity, ptxt);
        if (poly.degree() < 1 || static_cast<u64>(poly.degree()) > max_d2)
          fail(ErrorCode::kConfigError, "test polynomial '" + ptxt + "' must have degree in [1, max_d2]");
        const double t = tol * std::sqrt(static_cast<double>(f->q()));
        auto b = bombieri_check(v, poly, t, enum_opts(c));
        c.row({{"mode", "exact"}, {"q", f->q()}, {"entry", e->id}, {"poly", ptxt}, {"d1", b.d1}, {"d2", b.d2},
               {"points", b.points}, {"applicable", !b.constant_on_curve}, {"bound", b.bound},
               {"max_abs", b.max_abs}, {"exceed", b.exceed}, {"allowed", b.allowed}, {"tolerance", t},
               {"pass", b.constant_on_curve || b.pass}});
      }
    }
}

// ----------------------------------------------------------- rank-survey

void run_subspace_survey(RunContext& c) {
  const auto fields = c.fields();
  const int n = static_cast<int>(c.u64_param("n", 3));
  const std::vector<u64> ks = c.has("k") ? c.u64_list("k") : std::vector<u64>{1, 2};
  for (const Field& f : fields) {
    const u64 ell = c.has("ell") ? c.u64_param("ell") : f->q() - 1;
    for (u64 k64 : ks) {
      const int k = static_cast<int>(k64);
      auto subs = all_subspaces(*f, n, k);
      for (int m = 1; m <= k; ++m) {
        auto fam = build_seeded_family(n, m, f, ell);
        u64 worst = 0;
        bool pass = true;
        for (auto& basis : subs) {
          auto s = subspace_rank_survey(fam, basis, c.cfg.shards);
          worst = std::max(worst, s.fail_count);
          pass = pass && s.pass;
        }
        c.row({{"mode", "exact"}, {"q", f->q()}, {"n", n}, {"k", k}, {"m", m}, {"ell", ell},
               {"subspaces", subs.size()}, {"max_fail_count", worst},
               {"max_fail_fraction", static_cast<double>(worst) / static_cast<double>(ell)},
               {"bound", static_cast<double>(m * (n - m)) / static_cast<double>(ell)}, {"pass", pass}});
      }
    }
  }
}

void run_variety_survey(RunContext& c) {
  auto corpus = load_corpus_for(c);
  const Field f = c.fields().front();
  const auto& e = find_entry(corpus, c.str("entry"));
  auto v = e.variety(f);
  const int m = static_cast<int>(c.u64_param("m", 1));
  const u64 ell = c.u64_param("ell", std::min<u64>(f->q() - 1, 16));
  auto fam = build_seeded_family(e.arity, m, f, ell);
  auto s = variety_rank_survey(fam, v, static_cast<int>(c.u64_param("max_ext", 2)), enum_opts(c));
  c.row({{"mode", "heuristic"}, {"q", f->q()}, {"entry", e.id}, {"m", m}, {"ell", ell}, {"fail_count", s.fail_count},
         {"bound", s.bound}, {"fail_fraction", s.fail_fraction}, {"pass", s.pass}});
}

// ----------------------------------------------------------- fiber-check

void run_dkl_fibers(RunContext& c) {
  auto corpus = load_corpus_for(c);
  const auto fields = c.fields();
  const DegreeStrategy strat = parse_strategy(c.str("strategy", "distinct_primes"));
  std::vector<const CorpusEntry*> entries;
  if (c.has("entries")) {
    for (auto& id : c.list("entries")) entries.push_back(&find_entry(corpus, id));
  } else {
    for (auto& e : corpus)
      if (declared_dim(e) >= 1) entries.push_back(&e);
  }
  for (const Field& f : fields)
    for (const CorpusEntry* e : entries) {
      auto v = e->variety(f);
      const int m = declared_dim(*e);
      auto degs = choose_degrees(e->arity, v.bezout_degree(), strat);
      auto mat = build_regular_matrix(m, e->arity, m, f, MatrixTag::kVandermonde);
      auto ext = dkl_map(degs, mat);
      auto fc = fiber_finiteness_check(ext, v, 0, c.seed(), enum_opts(c));
      c.add_built("dkl-" + e->id + "-" + std::to_string(f->q()), "dkl", ext.to_json());
      c.row({{"mode", fc.exact ? "exact" : "sampled"}, {"q", f->q()}, {"entry", e->id}, {"m", m},
             {"degrees", join_u64(degs.degrees)}, {"certified_k", mat.certified_k},
             {"targets", fc.targets_inspected}, {"max_fiber", fc.max_fiber_size}, {"cap", fc.bezout_cap},
             {"pass", fc.pass && mat.certified_k == m}});
    }
}

void run_point_counts(RunContext& c) {
  auto corpus = load_corpus_for(c);
  const auto fields = c.fields();
  const double lw = c.num("lw_factor", 20);
  for (const Field& f : fields)
    for (auto& e : corpus) {
      const int k = declared_dim(e);
      if (k < 0) fail(ErrorCode::kConfigError, "entry " + e.id + " has no declared_dim");
      auto v = e.variety(f);
      const u64 cnt = count_points(v, enum_opts(c));
      const u64 d = v.bezout_degree();
      const long double q = static_cast<long double>(f->q());
      const long double qk = std::pow(q, k);
      const bool upper_ok = static_cast<long double>(cnt) <= static_cast<long double>(d) * qk;
      const bool lower_applies = e.abs_irreducible && q >= lw * std::pow(static_cast<long double>(d), 5);
      const bool lower_ok = !lower_applies || 2 * static_cast<long double>(cnt) >= qk;
      c.row({{"mode", "exact"}, {"q", f->q()}, {"entry", e.id}, {"dim", k}, {"degree", d}, {"points", cnt},
             {"upper", static_cast<double>(d * qk)}, {"upper_ok", upper_ok},
             {"lower_applies", lower_applies}, {"lower", static_cast<double>(qk / 2)}, {"lower_ok", lower_ok},
             {"pass", upper_ok && lower_ok}});
    }
}

void run_min_entropy(RunContext& c) {
  auto corpus = load_corpus_for(c);
  auto fields = c.fields();
  std::sort(fields.begin(), fields.end(), [](const Field& a, const Field& b) { return a->q() < b->q(); });
  const double lw = c.num("lw_factor", 20);
  for (auto& e : corpus) {
    if (!e.has_source) continue;
    const double d = static_cast<double>(e.d);
    Field chosen;
    for (auto& f : fields)
      if (static_cast<double>(f->q()) >= lw * std::pow(d, 5)) {
        chosen = f;
        break;
      }
    if (!chosen) {
      c.row({{"mode", "error"}, {"entry", e.id}, {"error", "no grid field with q >= 20 d^5"}, {"pass", false}});
      continue;
    }
    auto spec = e.source(chosen);
    auto src = build_source(spec, enum_opts(c));
    const double q = static_cast<double>(chosen->q());
    const double eps = 2.0 * e.k * d * d / q;
    const double kp = e.k * std::log2(q) - std::log2(d) - 2;
    const double tm = trimmed_mass(src, kp);
    c.row({{"mode", "exact"}, {"entry", e.id}, {"q", chosen->q()}, {"n", e.n}, {"k", e.k}, {"d", e.d},
           {"support", src.support_size()}, {"min_entropy", min_entropy(src).bits}, {"k_prime", kp},
           {"trimmed_mass", tm}, {"bound", 2 * eps}, {"pass", tm <= 2 * eps}});
  }
}

// ------------------------------------------------------------ extractors

void run_ext11(RunContext& c) {
  auto corpus = load_corpus_for(c);
  const auto fields = c.fields();
  const std::vector<std::string> ids = c.has("entries") ? c.list("entries") : std::vector<std::string>{"parabola"};
  const double eps = c.num("eps", 0.125);
  const std::string mode = c.str("measure", "exact");
  for (const Field& f : fields)
    for (auto& id : ids) {
      const auto& e = find_entry(corpus, id);
      const u64 d = c.u64_param("d", e.d);
      json r = {{"q", f->q()}, {"entry", id}, {"d", d}, {"eps", eps}};
      std::optional<Ext11Config> ext;
      try {
        ext = build_ext11(f, d, eps);
      } catch (const Error& err) {
        if (err.code() == ErrorCode::kConfigError) throw;
        r.update(error_row(err));
        r["stage"] = "build";
        c.row(r);
        continue;
      }
      c.add_built("ext11-" + id + "-" + std::to_string(f->q()), "ext11", ext->to_json());
      r["stage"] = "measure";
      r["branch"] = branch_name(ext->branch);
      r["m_out"] = ext->m_out;
      r["declared_error"] = ext->declared_error;
      try {
        auto spec = e.source(f);
        if (spec.n != 1) fail(ErrorCode::kShapeMismatch, "Ext11 needs a source with one output coordinate");
        r.update(measure_source(c, spec, ext->m_out,
                                [&](const std::vector<u64>& y) { return ext->eval_value(y[0]); }, mode));
        r["pass"] = r["distance"].get<double>() <= eps + r["floor"].get<double>();
      } catch (const Error& err) {
        if (err.code() == ErrorCode::kConfigError) throw;
        r.update(error_row(err));
      }
      c.row(r);
    }
}

void run_mod_m(RunContext& c) {
  const u64 n_full = c.u64_param("n_full", 200);
  const std::vector<u64> large = c.has("n_large") ? c.u64_list("n_large")
                                                   : std::vector<u64>{1000, 1009, 1024, 4096, 9973, 10000};
  const u64 m_small = c.u64_param("m_small", 64);
  auto check_n = [&](u64 N, const std::vector<u64>& ms) {
    double worst = 0;
    bool pass = true;
    for (u64 M : ms) {
      const Ratio closed = mod_m_uniform_distance(N, M);
      const Ratio meas = mod_m_measured_distance(ModMExtractor::make(N, 1, M));
      const bool same = ratio_le(closed, meas) && ratio_le(meas, closed);
      pass = pass && same && ratio_le(meas, Ratio{M, N});
      worst = std::max(worst, meas.value() * static_cast<double>(N) / static_cast<double>(M));
    }
    c.row({{"mode", "exact"}, {"N", N}, {"pairs", ms.size()}, {"max_distance_over_floor", worst}, {"pass", pass}});
  };
  for (u64 N = 2; N <= n_full; ++N) {
    std::vector<u64> ms;
    for (u64 M = 2; M <= N; ++M) ms.push_back(M);
    check_n(N, ms);
  }
  for (u64 N : large) {
    if (N > 10000) fail(ErrorCode::kConfigError, "n_large entries must be <= 10^4");
    std::vector<u64> ms;
    for (u64 M = 2; M <= std::min(N, m_small); ++M) ms.push_back(M);
    for (u64 M = m_small * 2; M <= N; M *= 2) ms.push_back(M);
    if (N > m_small) ms.push_back(N);
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    check_n(N, ms);
  }
}

void run_extN1(RunContext& c) {
  auto corpus = load_corpus_for(c);
  const Field f = c.fields().front();
  const auto& e = find_entry(corpus, c.str("entry"));
  auto spec = e.source(f);
  const u64 d = c.u64_param("d", e.d);
  const double eps = c.num("eps", 0.5);
  auto ext = build_extN1(f, spec.n, d, eps);
  c.add_built("extN1", "extN1", ext.to_json());
  json r = {{"q", f->q()}, {"entry", e.id}, {"n", spec.n}, {"d", d}, {"eps", eps}, {"d_prime", ext.d_prime},
            {"m_out", ext.m_out()}, {"declared_error", ext.inner.declared_error}};
  const std::string mode = c.str("measure", "sampled");
  if (mode == "none") {
    r.update({{"mode", "exact"}, {"pass", ext.inner.declared_error <= eps}});
  } else {
    r.update(measure_source(c, spec, ext.m_out(), [&](const std::vector<u64>& y) { return ext.eval_value(y); }, mode));
    r["pass"] = r["distance"].get<double>() <= eps + r["floor"].get<double>();
  }
  c.row(r);
}

void run_full_rank(RunContext& c) {
  auto corpus = load_corpus_for(c);
  const Field f = c.fields().front();
  const auto& e = find_entry(corpus, c.str("entry"));
  auto spec = e.source(f);
  const int k = static_cast<int>(c.u64_param("k", static_cast<u64>(spec.n)));
  if (k != spec.n) fail(ErrorCode::kConfigError, "full-rank needs a source on F_q^k, k = n");
  const u64 d = c.u64_param("d", e.d);
  const double eps = c.num("eps", 0.5);
  auto ext = build_full_rank_ext(f, k, d, eps);
  c.add_built("full-rank", "full-rank", ext.to_json());
  json r = {{"q", f->q()}, {"entry", e.id}, {"k", k}, {"d", d}, {"eps", eps}, {"m_out", ext.m_out()},
            {"declared_error", ext.declared_error}};
  const std::string mode = c.str("measure", "sampled");
  if (mode == "none") {
    r.update({{"mode", "exact"}, {"pass", ext.declared_error <= eps}});
  } else {
    r.update(measure_source(c, spec, ext.m_out(), [&](const std::vector<u64>& y) { return ext.eval(y).to_u64(); }, mode));
    r["pass"] = r["distance"].get<double>() <= eps + r["floor"].get<double>();
  }
  c.row(r);
}

void run_composition(RunContext& c) {
  std::optional<std::vector<CorpusEntry>> corpus;
  const CorpusEntry* entry = nullptr;
  int n, k;
  u64 d;
  if (c.has("entry")) {
    corpus = load_corpus_for(c);
    entry = &find_entry(*corpus, c.str("entry"));
    if (!entry->has_source) fail(ErrorCode::kConfigError, "entry " + entry->id + " has no source");
    n = entry->n;
    k = entry->k;
    d = c.u64_param("d", entry->d);
  } else {
    n = static_cast<int>(c.u64_param("n"));
    k = static_cast<int>(c.u64_param("k"));
    d = c.u64_param("d");
  }
  const double eps = c.num("eps", 0.5);
  const std::string mode = c.str("measure", entry ? "exact" : "none");
  auto fields = c.fields();
  std::sort(fields.begin(), fields.end(), [](const Field& a, const Field& b) { return a->q() < b->q(); });

  // The smallest grid field on which the construction exists.
  std::optional<CompositionConfig> comp;
  for (const Field& f : fields) {
    json probe = {{"stage", "probe"}, {"mode", "exact"}, {"q", f->q()}, {"n", n}, {"k", k}, {"d", d}, {"eps", eps}};
    try {
      comp = build_composition(f, n, k, d, eps);
      probe["feasible"] = true;
    } catch (const Error& err) {
      if (err.code() == ErrorCode::kConfigError) throw;
      probe["feasible"] = false;
      probe["reason"] = err.what();
    }
    probe["pass"] = true;  // informational
    c.row(probe);
    if (comp) break;
  }
  if (!comp) {
    c.row({{"stage", "select"}, {"mode", "error"}, {"error", "no feasible field in the grid"}, {"pass", false}});
    return;
  }
  const CompositionConfig& cc = *comp;
  c.add_built("composition", "composition", cc.to_json());
  c.row({{"stage", "budget"}, {"mode", "exact"}, {"q", cc.ctx->q()}, {"ell", cc.ell}, {"eps1", cc.eps1},
         {"eps0", cc.eps0}, {"budget", cc.budget}, {"eps", eps}, {"m_out", cc.m_out()},
         {"pass", cc.empty || cc.budget <= eps}});

  // Serialized-then-reloaded config must agree with the in-process one.
  {
    auto back = CompositionConfig::from_json(cc.to_json());
    std::mt19937_64 rng(c.seed());
    bool same = true;
    const u64 trials = c.u64_param("wiring_trials", 32);
    for (u64 i = 0; i < trials; ++i) {
      std::vector<u64> x(n);
      for (auto& v : x) v = uniform_below(rng, cc.ctx->q());
      same = same && back.eval(x) == cc.eval(x);
    }
    c.row({{"stage", "round-trip"}, {"mode", "exact"}, {"trials", trials}, {"pass", same}});
  }
  if (mode == "none") return;
  json r = {{"stage", "measure"}, {"q", cc.ctx->q()}, {"eps", eps}};
  try {
    if (!entry) fail(ErrorCode::kConfigError, "measurement needs params.entry");
    auto spec = entry->source(cc.ctx);
    r.update(measure_source(c, spec, cc.m_out(), [&](const std::vector<u64>& y) { return cc.eval(y).to_u64(); }, mode));
    r["pass"] = r["distance"].get<double>() <= eps + r["floor"].get<double>();
  } catch (const Error& err) {
    if (err.code() == ErrorCode::kConfigError) throw;
    r.update(error_row(err));
  }
  c.row(r);
}

// ---------------------------------------------------------------- affine

void run_affine(RunContext& c) {
  const u64 q = c.fields().front()->q();
  const int n = static_cast<int>(c.u64_param("n", 4));
  const int k = static_cast<int>(c.u64_param("k", 2));
  const int m = static_cast<int>(c.u64_param("m", 1));
  const double epsilon = c.num("epsilon", 0.5);
  auto gd = good_degrees(n, q, epsilon, c.flag("relax", false));
  auto ext = build_affine_ext(n, m, q, gd);
  c.add_built("affine", "affine", ext.to_json());
  c.row({{"stage", "degrees"}, {"mode", "exact"}, {"q", q}, {"primes", join_u64(gd.primes)},
         {"degrees", join_u64(gd.degrees)}, {"D", gd.D}, {"lcm_ok", gd.lcm_ok}, {"pass", true}});

  if (c.flag("check_uniform", true)) {
    auto out = uniform_input_output(ext, c.budgets.enumeration);
    const Ratio dist = distance_to_uniform(out);
    c.row({{"stage", "uniform-input"}, {"mode", "exact"}, {"support", out.support_size()},
           {"distance", ratio_str(dist)}, {"pass", dist.num == 0}});
  }
  const u64 subspaces = c.u64_param("subspaces", 2);
  CharacterChoice chars;
  chars.count = c.u64_param("chars", 32);
  chars.all_when_feasible = c.flag("all_chars_when_feasible", true);
  const double slack = c.num("slack", 1e-6);
  for (u64 s = 0; s < subspaces; ++s) {
    auto sub = sample_subspace(n, k, q, c.seed() + s);
    chars.rng_seed = c.seed() + 1000 + s;
    auto rep = measure_affine_bias(ext, sub, chars, c.budgets.enumeration, c.cfg.shards);
    for (auto& row : rep.rows) {
      const bool ok = !row.qualifies || row.abs_bias <= row.proof_bound + slack;
      c.row({{"stage", "bias"}, {"mode", "exact"}, {"subspace", s}, {"pivots", sub.pivots}, {"c_index", row.c_index},
             {"nonzero_pivots", row.nonzero_pivots}, {"qualifies", row.qualifies}, {"abs_bias", row.abs_bias},
             {"bound", row.proof_bound}, {"slack", slack}, {"pass", ok}});
    }
  }
}

// ------------------------------------------------------------ weil-check

void run_weil(RunContext& c) {
  const auto fields = c.fields();
  const std::vector<u64> ds = c.has("d") ? c.u64_list("d") : std::vector<u64>{3};
  const int trials = static_cast<int>(c.u64_param("trials", 50));
  const double tol = c.num("tolerance_sqrtq", 1e-6);
  for (std::size_t fi = 0; fi < fields.size(); ++fi)
    for (u64 d : ds) {
      const u64 q = fields[fi]->q();
      auto w = weil_sum_check(q, static_cast<int>(d), trials, c.seed() + 1000 * fi + d);
      const double t = tol * std::sqrt(static_cast<double>(q));
      for (std::size_t i = 0; i < w.trials.size(); ++i) {
        auto& tr = w.trials[i];
        c.row({{"mode", "exact"}, {"q", q}, {"d", d}, {"trial", i}, {"coeffs", join_u64(tr.coeffs)},
               {"abs_sum", tr.abs_sum}, {"bound", w.bound}, {"tolerance", t}, {"pass", tr.abs_sum <= w.bound + t}});
      }
    }
}

struct CheckSpec {
  std::set<std::string> keys;
  void (*run)(RunContext&);
};

const std::map<std::pair<std::string, std::string>, CheckSpec>& checks() {
  static const std::map<std::pair<std::string, std::string>, CheckSpec> t = {
      {{"gabidulin-norms", "min-rank"}, {{"p", "max_s", "max_pt"}, run_min_rank}},
      {{"gabidulin-norms", "fourier"}, {{"p", "n", "tolerance"}, run_fourier}},
      {{"bias-spectrum", "uniform"}, {{"q", "n", "tolerance"}, run_uniform_spectrum}},
      {{"bias-spectrum", "dense-affine"}, {{"subspaces", "t", "tolerance", "max_codim"}, run_dense_affine}},
      {{"bias-spectrum", "xor"}, {{"count", "max_card", "tolerance"}, run_xor}},
      {{"bias-spectrum", "bombieri"},
       {{"q", "corpus", "entries", "polys", "max_d1", "max_d2", "tolerance_sqrtq"}, run_bombieri}},
      {{"rank-survey", "subspace"}, {{"q", "n", "k", "ell"}, run_subspace_survey}},
      {{"rank-survey", "variety"}, {{"q", "corpus", "entry", "m", "ell", "max_ext"}, run_variety_survey}},
      {{"fiber-check", "dkl"}, {{"q", "corpus", "entries", "strategy"}, run_dkl_fibers}},
      {{"fiber-check", "point-count"}, {{"q", "corpus", "lw_factor"}, run_point_counts}},
      {{"fiber-check", "min-entropy"}, {{"q", "corpus", "lw_factor"}, run_min_entropy}},
      {{"ext11", "end-to-end"}, {{"q", "corpus", "entries", "d", "eps", "measure"}, run_ext11}},
      {{"ext11", "mod-m"}, {{"n_full", "n_large", "m_small"}, run_mod_m}},
      {{"extN1", "end-to-end"}, {{"q", "corpus", "entry", "d", "eps", "measure"}, run_extN1}},
      {{"full-rank", "end-to-end"}, {{"q", "corpus", "entry", "k", "d", "eps", "measure"}, run_full_rank}},
      {{"composition", "end-to-end"},
       {{"q", "corpus", "entry", "n", "k", "d", "eps", "measure", "wiring_trials"}, run_composition}},
      {{"affine", "bias"},
       {{"q", "n", "k", "m", "epsilon", "relax", "check_uniform", "subspaces", "chars", "all_chars_when_feasible",
         "slack"},
        run_affine}},
      {{"weil-check", "exhaustive"}, {{"q", "d", "trials", "tolerance_sqrtq"}, run_weil}},
  };
  return t;
}

const CheckSpec& find_check(const std::string& kind, const std::string& check) {
  auto it = checks().find({kind, check});
  if (it == checks().end()) fail(ErrorCode::kConfigError, "no experiment " + kind + "/" + check);
  return it->second;
}

}  // namespace

const std::set<std::string>& allowed_params(const std::string& kind, const std::string& check) {
  return find_check(kind, check).keys;
}

bool needs_seed(const ExperimentConfig& cfg) {
  auto get = [&](const std::string& k) {
    auto it = cfg.params.find(k);
    return it == cfg.params.end() ? std::string() : it->second;
  };
  if (get("measure") == "sampled") return true;
  if ((cfg.kind == "extN1" || cfg.kind == "full-rank") && get("measure").empty()) return true;
  if (cfg.kind == "weil-check" || cfg.kind == "affine" || cfg.kind == "composition") return true;
  if (cfg.kind == "bias-spectrum" && cfg.check == "xor") return true;
  if (cfg.kind == "gabidulin-norms" && cfg.check == "min-rank") {
    const std::string v = get("max_pt");
    return !v.empty() && parse_number(v) > static_cast<double>(constants::kRankExhaustiveLimit);
  }
  return false;
}

void run_check(RunContext& ctx) { find_check(ctx.cfg.kind, ctx.cfg.check).run(ctx); }

}  // namespace detail
}  // namespace algext
