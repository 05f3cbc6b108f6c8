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

#include "algext/variety_lab.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>

namespace algext {

namespace {

bool same_field(const Field& a, const Field& b) {
  return a.get() == b.get() || (a->p() == b->p() && a->modulus() == b->modulus());
}

u64 sat_mul(u64 a, u64 b) {
  u128 r = static_cast<u128>(a) * b;
  return r > std::numeric_limits<u64>::max() ? std::numeric_limits<u64>::max() : static_cast<u64>(r);
}

}  // namespace

// -------------------------------------------------------------- MultiPoly

MultiPoly::MultiPoly(Field ctx, int arity) : ctx_(std::move(ctx)), arity_(arity) {
  if (!ctx_) fail(ErrorCode::kInvalidArgument, "null field");
  if (arity_ < 0) fail(ErrorCode::kInvalidArgument, "negative arity");
}

MultiPoly::MultiPoly(Field ctx, int arity, std::vector<Term> terms) : MultiPoly(std::move(ctx), arity) {
  terms_ = std::move(terms);
  normalize();
}

MultiPoly MultiPoly::constant(Field ctx, int arity, u64 c) {
  return MultiPoly(ctx, arity, {Term{c, std::vector<std::uint32_t>(arity, 0)}});
}

MultiPoly MultiPoly::variable(Field ctx, int arity, int i) { return monomial(std::move(ctx), arity, i, 1); }

MultiPoly MultiPoly::monomial(Field ctx, int arity, int i, std::uint32_t e, u64 c) {
  if (i < 0 || i >= arity) fail(ErrorCode::kArityMismatch, "variable index out of range");
  std::vector<std::uint32_t> ex(arity, 0);
  ex[i] = e;
  return MultiPoly(ctx, arity, {Term{c, ex}});
}

void MultiPoly::normalize() {
  for (auto& t : terms_) {
    if (static_cast<int>(t.exps.size()) != arity_) fail(ErrorCode::kArityMismatch, "exponent vector length");
    if (t.coeff >= ctx_->q()) fail(ErrorCode::kOutOfRange, "coefficient outside field");
  }
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.exps < b.exps; });
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!out.empty() && out.back().exps == t.exps)
      out.back().coeff = ctx_->add(out.back().coeff, t.coeff);
    else
      out.push_back(std::move(t));
  }
  terms_.clear();
  degree_ = kZeroDegree;
  for (auto& t : out) {
    if (t.coeff == 0) continue;
    int deg = 0;
    for (auto e : t.exps) deg += static_cast<int>(e);
    degree_ = std::max(degree_, deg);
    terms_.push_back(std::move(t));
  }
}

void MultiPoly::check_same(const MultiPoly& o) const {
  if (!same_field(ctx_, o.ctx_)) fail(ErrorCode::kCtxMismatch, "polynomials over different fields");
  if (arity_ != o.arity_) fail(ErrorCode::kArityMismatch, "polynomials of different arity");
}

bool MultiPoly::is_constant() const { return degree_ <= 0; }

std::vector<std::uint32_t> MultiPoly::max_exponents() const {
  std::vector<std::uint32_t> m(arity_, 0);
  for (auto& t : terms_)
    for (int i = 0; i < arity_; ++i) m[i] = std::max(m[i], t.exps[i]);
  return m;
}

std::vector<int> MultiPoly::variables() const {
  std::vector<int> v;
  auto m = max_exponents();
  for (int i = 0; i < arity_; ++i)
    if (m[i]) v.push_back(i);
  return v;
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
  check_same(o);
  std::vector<Term> t = terms_;
  t.insert(t.end(), o.terms_.begin(), o.terms_.end());
  return MultiPoly(ctx_, arity_, std::move(t));
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const { return *this + o.scale(ctx_->neg(1)); }

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
  check_same(o);
  std::vector<Term> t;
  t.reserve(terms_.size() * o.terms_.size());
  for (auto& a : terms_)
    for (auto& b : o.terms_) {
      Term r{ctx_->mul(a.coeff, b.coeff), a.exps};
      for (int i = 0; i < arity_; ++i) r.exps[i] += b.exps[i];
      t.push_back(std::move(r));
    }
  return MultiPoly(ctx_, arity_, std::move(t));
}

MultiPoly MultiPoly::scale(u64 c) const {
  std::vector<Term> t = terms_;
  for (auto& x : t) x.coeff = ctx_->mul(x.coeff, c);
  return MultiPoly(ctx_, arity_, std::move(t));
}

bool MultiPoly::operator==(const MultiPoly& o) const {
  return same_field(ctx_, o.ctx_) && arity_ == o.arity_ && terms_ == o.terms_;
}

u64 MultiPoly::eval(const std::vector<u64>& point) const {
  if (static_cast<int>(point.size()) != arity_) fail(ErrorCode::kArityMismatch, "point length");
  return PolyEvaluator(*this)(point);
}

MultiPoly MultiPoly::lift(Field big, const std::function<u64(u64)>& embed) const {
  std::vector<Term> t = terms_;
  for (auto& x : t) x.coeff = embed(x.coeff);
  return MultiPoly(std::move(big), arity_, std::move(t));
}

std::string MultiPoly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    if (!first) os << " + ";
    first = false;
    bool mono = std::any_of(it->exps.begin(), it->exps.end(), [](auto e) { return e > 0; });
    if (!mono || it->coeff != 1) {
      std::string c = ctx_->element_str(it->coeff);
      bool wrap = mono && c.find('+') != std::string::npos;
      os << (wrap ? "(" + c + ")" : c);
      if (mono) os << "*";
    }
    bool firstv = true;
    for (int i = 0; i < arity_; ++i) {
      if (!it->exps[i]) continue;
      if (!firstv) os << "*";
      firstv = false;
      os << "X" << (i + 1);
      if (it->exps[i] > 1) os << "^" << it->exps[i];
    }
  }
  return os.str();
}

nlohmann::json MultiPoly::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (auto& t : terms_) {
    nlohmann::json c;
    if (t.coeff < ctx_->p())
      c = t.coeff;
    else
      c = {{"packed", t.coeff}};
    terms.push_back({{"coeff", c}, {"exps", t.exps}});
  }
  return {{"arity", arity_}, {"terms", terms}};
}

MultiPoly MultiPoly::from_json(Field ctx, const nlohmann::json& j, const std::map<std::string, u64>& params,
                               int arity) {
  try {
    if (j.contains("arity")) arity = j.at("arity").get<int>();
    if (arity < 0) fail(ErrorCode::kConfigError, "polynomial without arity");
    std::vector<Term> terms;
    for (const auto& t : j.at("terms")) {
      const auto& c = t.at("coeff");
      u64 v = 0;
      if (c.is_number_integer()) {
        v = c.is_number_unsigned() ? ctx->from_int(static_cast<i64>(c.get<u64>() % ctx->p()))
                                   : ctx->from_int(c.get<i64>());
      } else if (c.is_object()) {
        v = c.at("packed").get<u64>();
      } else if (c.is_string()) {
        std::string name = c.get<std::string>();
        bool negate = !name.empty() && name[0] == '-';
        if (negate) name = name.substr(1);
        auto it = params.find(name);
        if (it == params.end()) fail(ErrorCode::kConfigError, "unknown coefficient parameter '" + name + "'");
        v = negate ? ctx->neg(it->second) : it->second;
      } else {
        fail(ErrorCode::kConfigError, "bad coefficient");
      }
      terms.push_back(Term{v, t.at("exps").get<std::vector<std::uint32_t>>()});
    }
    return MultiPoly(ctx, arity, std::move(terms));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("polynomial json: ") + e.what());
  }
}

// ---------------------------------------------------------- PolyEvaluator

PolyEvaluator::PolyEvaluator(const MultiPoly& f) : ctx_(f.field().get()), arity_(f.arity()) {
  var_exps_.assign(arity_, {});
  for (auto& t : f.terms())
    for (int i = 0; i < arity_; ++i)
      if (t.exps[i]) var_exps_[i].push_back(t.exps[i]);
  for (auto& v : var_exps_) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  for (auto& t : f.terms()) {
    CompiledTerm ct{t.coeff, {}};
    for (int i = 0; i < arity_; ++i) {
      if (!t.exps[i]) continue;
      int slot = static_cast<int>(std::lower_bound(var_exps_[i].begin(), var_exps_[i].end(), t.exps[i]) -
                                  var_exps_[i].begin());
      ct.factors.emplace_back(i, slot);
    }
    terms_.push_back(std::move(ct));
  }
}

u64 PolyEvaluator::operator()(const std::vector<u64>& point) const {
  if (static_cast<int>(point.size()) != arity_) fail(ErrorCode::kArityMismatch, "point length");
  thread_local std::vector<std::vector<u64>> pw;
  if (pw.size() < static_cast<std::size_t>(arity_)) pw.resize(arity_);
  for (int i = 0; i < arity_; ++i) {
    const auto& ex = var_exps_[i];
    if (ex.empty()) continue;
    auto& row = pw[i];
    row.resize(ex.size());
    const u64 x = point[i];
    u64 cur = 1;
    std::uint32_t prev = 0;
    for (std::size_t s = 0; s < ex.size(); ++s) {
      std::uint32_t step = ex[s] - prev;
      cur = ctx_->mul(cur, step == 1 ? x : ctx_->pow(x, step));
      row[s] = cur;
      prev = ex[s];
    }
  }
  u64 acc = 0;
  for (const auto& t : terms_) {
    u64 v = t.coeff;
    for (auto [var, slot] : t.factors) v = ctx_->mul(v, pw[var][slot]);
    acc = ctx_->add(acc, v);
  }
  return acc;
}

// ---------------------------------------------------------- PolynomialMap

PolynomialMap::PolynomialMap(int arity, std::vector<MultiPoly> components)
    : arity_(arity), components_(std::move(components)) {
  for (auto& c : components_)
    if (c.arity() != arity_) fail(ErrorCode::kArityMismatch, "component arity");
}

PolynomialMap::PolynomialMap(int arity, std::vector<MultiPoly> components, std::vector<MultiPoly> basis,
                             std::vector<std::vector<u64>> coeffs)
    : PolynomialMap(arity, std::move(components)) {
  for (auto& h : basis)
    if (h.arity() != arity_) fail(ErrorCode::kArityMismatch, "basis arity");
  for (std::size_t j = 1; j < basis.size(); ++j)
    if (basis[j].degree() > basis[j - 1].degree())
      fail(ErrorCode::kInvalidArgument, "span basis degrees must be non-increasing");
  if (coeffs.size() != components_.size()) fail(ErrorCode::kShapeMismatch, "one coefficient row per component");
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (coeffs[i].size() != basis.size() + 1) fail(ErrorCode::kShapeMismatch, "coefficient row length");
    const auto& ctx = components_[i].field();
    MultiPoly acc = MultiPoly::constant(ctx, arity_, coeffs[i].back());
    for (std::size_t j = 0; j < basis.size(); ++j) acc = acc + basis[j].scale(coeffs[i][j]);
    if (!(acc == components_[i])) fail(ErrorCode::kInvalidArgument, "component not reproduced by span basis");
  }
  basis_ = std::move(basis);
  coeffs_ = std::move(coeffs);
}

std::vector<int> PolynomialMap::h_degrees() const {
  std::vector<int> d;
  const auto& src = basis_ ? *basis_ : components_;
  for (auto& h : src)
    if (!h.is_constant()) d.push_back(h.degree());
  std::sort(d.rbegin(), d.rend());
  return d;
}

int PolynomialMap::degree() const {
  int d = MultiPoly::kZeroDegree;
  for (auto& c : components_) d = std::max(d, c.degree());
  return d;
}

std::vector<u64> PolynomialMap::eval(const std::vector<u64>& point) const {
  std::vector<u64> y(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) y[i] = components_[i].eval(point);
  return y;
}

nlohmann::json PolynomialMap::to_json() const {
  nlohmann::json j;
  j["arity"] = arity_;
  j["components"] = nlohmann::json::array();
  for (auto& c : components_) j["components"].push_back(c.to_json()["terms"]);
  if (basis_) {
    j["basis"] = nlohmann::json::array();
    for (auto& h : *basis_) j["basis"].push_back(h.to_json()["terms"]);
    j["basis_coeffs"] = coeffs_;
  }
  return j;
}

PolynomialMap PolynomialMap::from_json(Field ctx, const nlohmann::json& j,
                                       const std::map<std::string, u64>& params) {
  try {
    int arity = j.at("arity").get<int>();
    auto parse_list = [&](const nlohmann::json& arr) {
      std::vector<MultiPoly> out;
      for (const auto& t : arr) out.push_back(MultiPoly::from_json(ctx, {{"terms", t}}, params, arity));
      return out;
    };
    auto comps = parse_list(j.at("components"));
    if (j.contains("basis")) {
      std::vector<std::vector<u64>> coeffs;
      for (const auto& row : j.at("basis_coeffs")) {
        std::vector<u64> r;
        for (const auto& c : row) r.push_back(c.is_number_unsigned() ? c.get<u64>() : ctx->from_int(c.get<i64>()));
        coeffs.push_back(r);
      }
      return PolynomialMap(arity, std::move(comps), parse_list(j.at("basis")), std::move(coeffs));
    }
    return PolynomialMap(arity, std::move(comps));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("map json: ") + e.what());
  }
}

// ------------------------------------------------------------ VarietySpec

u64 VarietySpec::bezout_degree() const {
  if (degree_bound) return *degree_bound;
  u64 d = 1;
  for (auto& g : generators)
    if (g.degree() > 0) d = sat_mul(d, static_cast<u64>(g.degree()));
  return d;
}

VarietySpec VarietySpec::lift(Field big) const {
  VarietySpec out = *this;
  out.ctx = big;
  if (same_field(ctx, big)) return out;
  const u64 gen = subfield_generator_image(*ctx, *big);
  const FieldCtx& small = *ctx;
  const FieldCtx& large = *big;
  auto embed = [&](u64 a) { return embed_element(small, large, gen, a); };
  out.generators.clear();
  for (auto& g : generators) out.generators.push_back(g.lift(big, embed));
  return out;
}

nlohmann::json VarietySpec::to_json() const {
  nlohmann::json j;
  j["field"] = ctx->token();
  j["arity"] = arity;
  j["generators"] = nlohmann::json::array();
  for (auto& g : generators) j["generators"].push_back(g.to_json()["terms"]);
  if (declared_dim) j["declared_dim"] = *declared_dim;
  if (degree_bound) j["degree_bound"] = *degree_bound;
  return j;
}

VarietySpec VarietySpec::from_json(Field ctx, const nlohmann::json& j, const std::map<std::string, u64>& params) {
  try {
    VarietySpec v;
    v.ctx = ctx;
    v.arity = j.at("arity").get<int>();
    for (const auto& t : j.at("generators")) v.generators.push_back(MultiPoly::from_json(ctx, {{"terms", t}}, params, v.arity));
    if (j.contains("declared_dim")) v.declared_dim = j.at("declared_dim").get<int>();
    if (j.contains("degree_bound")) v.degree_bound = j.at("degree_bound").get<u64>();
    return v;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("variety json: ") + e.what());
  }
}

// ------------------------------------------------------------ enumeration

u128 EnumerationPlan::work(u64 q) const {
  u128 w = 1;
  const u128 cap = static_cast<u128>(1) << 100;
  for (std::size_t i = 0; i < free_vars.size() && w < cap; ++i) w *= q;
  return w;
}

EnumerationPlan plan_enumeration(const VarietySpec& v) {
  const int r = v.arity;
  for (auto& g : v.generators)
    if (g.arity() != r) fail(ErrorCode::kArityMismatch, "generator arity");
  std::vector<int> solved_by(r, -1);
  std::vector<std::vector<int>> deps(r);
  std::vector<EnumerationPlan::Solved> pending(r, {0, 0, MultiPoly(v.ctx, r)});
  std::vector<bool> used(v.generators.size(), false);

  auto depends_on = [&](int from, int target) {
    // Does `from` (transitively through solved variables) need `target`?
    std::vector<int> stack{from};
    std::vector<bool> seen(r, false);
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      if (x == target) return true;
      if (seen[x]) continue;
      seen[x] = true;
      if (solved_by[x] >= 0)
        for (int y : deps[x]) stack.push_back(y);
    }
    return false;
  };

  for (std::size_t gi = 0; gi < v.generators.size(); ++gi) {
    const auto& g = v.generators[gi];
    if (g.is_zero()) {
      used[gi] = true;
      continue;
    }
    for (int j = 0; j < r; ++j) {
      if (solved_by[j] >= 0) continue;
      int hits = 0;
      const Term* lin = nullptr;
      for (auto& t : g.terms()) {
        if (t.exps[j] == 0) continue;
        ++hits;
        bool pure = t.exps[j] == 1;
        for (int i = 0; i < r && pure; ++i)
          if (i != j && t.exps[i]) pure = false;
        if (pure) lin = &t;
      }
      if (hits != 1 || !lin) continue;
      MultiPoly rest = g - MultiPoly::monomial(v.ctx, r, j, 1, lin->coeff);
      auto vars = rest.variables();
      bool cycle = false;
      for (int y : vars) cycle = cycle || depends_on(y, j);
      if (cycle) continue;
      solved_by[j] = static_cast<int>(gi);
      deps[j] = vars;
      pending[j] = {j, v.ctx->neg(v.ctx->inv(lin->coeff)), rest};
      used[gi] = true;
      break;
    }
  }

  EnumerationPlan plan;
  std::vector<int> state(r, 0);  // 0 new, 1 visiting, 2 done
  std::function<void(int)> visit = [&](int x) {
    if (state[x] == 2 || solved_by[x] < 0) return;
    state[x] = 1;
    for (int y : deps[x]) visit(y);
    state[x] = 2;
    plan.solved.push_back(pending[x]);
  };
  for (int j = 0; j < r; ++j) {
    if (solved_by[j] < 0)
      plan.free_vars.push_back(j);
    else
      visit(j);
  }
  for (std::size_t gi = 0; gi < v.generators.size(); ++gi)
    if (!used[gi]) plan.remaining.push_back(static_cast<int>(gi));
  return plan;
}

void for_each_point(const VarietySpec& v, const EnumOptions& opt,
                    const std::function<void(int, const std::vector<u64>&)>& fn) {
  const auto plan = plan_enumeration(v);
  const FieldCtx& f = *v.ctx;
  const u64 q = f.q();
  const u128 work = plan.work(q);
  if (work > opt.budget)
    fail(ErrorCode::kBudgetExceeded, "point scan needs " + u128_to_string(work) + " evaluations over " + f.token());
  for (int gi : plan.remaining)
    if (v.generators[gi].is_constant()) return;  // nonzero constant: empty variety

  std::vector<PolyEvaluator> solve_eval, check_eval;
  for (auto& s : plan.solved) solve_eval.emplace_back(s.rest);
  for (int gi : plan.remaining) check_eval.emplace_back(v.generators[gi]);
  const int nf = static_cast<int>(plan.free_vars.size());

  auto run_range = [&](int shard, u64 lead_begin, u64 lead_end) {
    std::vector<u64> x(v.arity, 0);
    auto emit = [&]() {
      for (std::size_t s = 0; s < plan.solved.size(); ++s)
        x[plan.solved[s].var] = f.mul(plan.solved[s].inv_coeff_neg, solve_eval[s](x));
      for (auto& ev : check_eval)
        if (ev(x) != 0) return;
      fn(shard, x);
    };
    if (nf == 0) {
      if (lead_begin == 0) emit();
      return;
    }
    for (u64 lead = lead_begin; lead < lead_end; ++lead) {
      for (int i = 1; i < nf; ++i) x[plan.free_vars[i]] = 0;
      x[plan.free_vars[0]] = lead;
      while (true) {
        emit();
        int i = nf - 1;
        while (i >= 1) {
          u64& c = x[plan.free_vars[i]];
          if (++c < q) break;
          c = 0;
          --i;
        }
        if (i < 1) break;
      }
    }
  };

  const u64 lead_count = nf == 0 ? 1 : q;
  const int shards = std::max(1, std::min<int>(opt.shards, static_cast<int>(std::min<u64>(lead_count, 1024))));
  if (shards == 1) {
    run_range(0, 0, lead_count);
    return;
  }
  std::vector<std::thread> pool;
  for (int s = 0; s < shards; ++s) {
    u64 b = lead_count * s / shards, e = lead_count * (s + 1) / shards;
    pool.emplace_back([&, s, b, e] { run_range(s, b, e); });
  }
  for (auto& t : pool) t.join();
}

u64 count_points(const VarietySpec& v, const EnumOptions& opt) {
  std::vector<u64> per(std::max(1, opt.shards), 0);
  for_each_point(v, opt, [&](int s, const std::vector<u64>&) { ++per[s]; });
  return std::accumulate(per.begin(), per.end(), u64{0});
}

std::vector<std::vector<u64>> enumerate_points(const VarietySpec& v, const EnumOptions& opt) {
  std::vector<std::vector<std::vector<u64>>> per(std::max(1, opt.shards));
  for_each_point(v, opt, [&](int s, const std::vector<u64>& x) { per[s].push_back(x); });
  std::vector<std::vector<u64>> out;
  for (auto& p : per) out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- sources

DegreeBudget degree_budget(const VarietySpec& v, const PolynomialMap& f, int k, u64 d) {
  DegreeBudget b;
  b.bezout_deg_v = v.bezout_degree();
  auto h = f.h_degrees();
  for (int i = 0; i < k; ++i) {
    // Fewer nonconstant h than k: the remaining factors are degree 0.
    u64 di = i < static_cast<int>(h.size()) ? static_cast<u64>(h[i]) : 0;
    b.product_top_k = sat_mul(b.product_top_k, di);
  }
  b.d_satisfied = static_cast<u128>(b.bezout_deg_v) * b.product_top_k <= d;
  return b;
}

AlgebraicSourceSpec AlgebraicSourceSpec::make(VarietySpec v, PolynomialMap f, int k, u64 d) {
  if (f.arity() != v.arity) fail(ErrorCode::kArityMismatch, "map arity differs from ambient arity");
  auto b = degree_budget(v, f, k, d);
  if (!b.d_satisfied)
    fail(ErrorCode::kBoundViolation, "deg V * prod deg h = " +
                                         u128_to_string(static_cast<u128>(b.bezout_deg_v) * b.product_top_k) +
                                         " exceeds d = " + std::to_string(d));
  AlgebraicSourceSpec s{std::move(v), std::move(f), 0, k, d};
  s.n = s.map.target_arity();
  return s;
}

FiniteDistribution image_distribution(const VarietySpec& v, const PolynomialMap& f, const EnumOptions& opt) {
  auto carrier = Carrier::field_power(v.ctx, f.target_arity());
  const u64 q = v.ctx->q();
  const int shards = std::max(1, opt.shards);
  std::vector<PolyEvaluator> comp;
  for (auto& c : f.components()) comp.emplace_back(c);
  const bool dense = carrier.cardinality() <= (u64{1} << 24);
  std::vector<std::vector<u64>> dense_counts(dense ? shards : 0, std::vector<u64>(dense ? carrier.cardinality() : 0));
  std::vector<CountBuilder> sparse;
  if (!dense)
    for (int s = 0; s < shards; ++s) sparse.emplace_back(carrier);
  std::vector<u64> hits(shards, 0);
  for_each_point(v, opt, [&](int s, const std::vector<u64>& x) {
    u64 idx = 0;
    for (auto& c : comp) idx = idx * q + c(x);
    ++hits[s];
    if (dense)
      ++dense_counts[s][idx];
    else
      sparse[s].add(idx);
  });
  if (std::accumulate(hits.begin(), hits.end(), u64{0}) == 0)
    fail(ErrorCode::kEmptyVariety, "V has no rational points over " + v.ctx->token());
  if (dense) {
    std::vector<std::pair<u64, u64>> counts;
    for (u64 i = 0; i < carrier.cardinality(); ++i) {
      u64 c = 0;
      for (int s = 0; s < shards; ++s) c += dense_counts[s][i];
      if (c) counts.emplace_back(i, c);
    }
    return FiniteDistribution(carrier, std::move(counts));
  }
  for (int s = 1; s < shards; ++s) sparse[0].merge(sparse[s]);
  return sparse[0].build();
}

FiniteDistribution build_source(const AlgebraicSourceSpec& spec, const EnumOptions& opt) {
  return image_distribution(spec.variety, spec.map, opt);
}

DimensionEstimate dimension_from_counts(const std::vector<u64>& counts, u64 q) {
  DimensionEstimate est;
  est.counts = counts;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!counts[i]) continue;
    xs.push_back(static_cast<double>(i + 1) * std::log2(static_cast<double>(q)));
    ys.push_back(std::log2(static_cast<double>(counts[i])));
  }
  if (xs.empty()) fail(ErrorCode::kAllCountsZero, "no extension has rational points");
  if (xs.size() == 1) {
    est.slope = ys[0] / xs[0];
  } else {
    double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    est.slope = sxy / sxx;
  }
  est.dim_estimate = static_cast<int>(std::lround(est.slope));
  if (est.dim_estimate < 0) est.dim_estimate = 0;
  return est;
}

DimensionEstimate estimate_dimension(const VarietySpec& v, int max_ext, const EnumOptions& opt) {
  if (max_ext < 1) fail(ErrorCode::kInvalidArgument, "max_ext must be at least 1");
  const FieldCtx& base = *v.ctx;
  // Check every extension's budget before scanning any of them.
  auto plan = plan_enumeration(v);
  for (int i = 1; i <= max_ext; ++i) {
    u128 qi = 1;
    for (int t = 0; t < i; ++t) qi *= base.q();
    if (qi > std::numeric_limits<u64>::max()) fail(ErrorCode::kBudgetExceeded, "extension too large");
    if (plan.work(static_cast<u64>(qi)) > opt.budget)
      fail(ErrorCode::kBudgetExceeded, "extension of degree " + std::to_string(i) + " exceeds the scan budget");
  }
  std::vector<u64> counts;
  for (int i = 1; i <= max_ext; ++i) {
    Field big = i == 1 ? v.ctx : make_field(base.p(), base.m() * i);
    counts.push_back(count_points(v.lift(big), opt));
  }
  return dimension_from_counts(counts, base.q());
}

std::vector<std::vector<u64>> fiber_points(const PolynomialMap& f, const VarietySpec& v, const std::vector<u64>& b,
                                           const EnumOptions& opt) {
  if (static_cast<int>(b.size()) != f.target_arity()) fail(ErrorCode::kArityMismatch, "target point length");
  std::vector<PolyEvaluator> comp;
  for (auto& c : f.components()) comp.emplace_back(c);
  std::vector<std::vector<std::vector<u64>>> per(std::max(1, opt.shards));
  for_each_point(v, opt, [&](int s, const std::vector<u64>& x) {
    for (std::size_t i = 0; i < comp.size(); ++i)
      if (comp[i](x) != b[i]) return;
    per[s].push_back(x);
  });
  std::vector<std::vector<u64>> out;
  for (auto& p : per) out.insert(out.end(), p.begin(), p.end());
  std::sort(out.begin(), out.end());
  return out;
}

BombieriCheck bombieri_check(const VarietySpec& curve, const MultiPoly& f, double tol, const EnumOptions& opt) {
  const FieldCtx& k = *curve.ctx;
  const u64 q = k.q();
  if (q > (u64{1} << 26)) fail(ErrorCode::kBudgetExceeded, "value histogram too large");
  BombieriCheck r;
  r.d1 = static_cast<int>(curve.bezout_degree());
  r.d2 = f.degree();
  const double d1 = r.d1, d2 = r.d2;
  r.bound = (d1 * d1 + 2 * d1 * d2 - 3 * d1) * std::sqrt(static_cast<double>(q)) + d1 * d1;
  r.allowed = static_cast<u64>(r.d1) * static_cast<u64>(std::max(r.d2, 0));

  PolyEvaluator ev(f);
  const int shards = std::max(1, opt.shards);
  std::vector<std::vector<u64>> hist(shards, std::vector<u64>(q, 0));
  for_each_point(curve, opt, [&](int s, const std::vector<u64>& x) { ++hist[s][ev(x)]; });
  for (int s = 1; s < shards; ++s)
    for (u64 y = 0; y < q; ++y) hist[0][y] += hist[s][y];
  std::vector<std::pair<u64, double>> values;
  for (u64 y = 0; y < q; ++y)
    if (hist[0][y]) {
      values.emplace_back(y, static_cast<double>(hist[0][y]));
      r.points += hist[0][y];
    }
  r.constant_on_curve = values.size() <= 1;
  if (r.constant_on_curve) return r;

  std::mutex mu;
  parallel_for(q - 1, shards, [&](std::size_t b, std::size_t e) {
    double m = 0;
    u64 over = 0;
    for (std::size_t i = b; i < e; ++i) {
      const u64 alpha = i + 1;
      std::complex<double> acc = 0;
      for (auto& [y, c] : values) acc += c * k.root(k.trace(k.mul(alpha, y)));
      double a = std::abs(acc);
      m = std::max(m, a);
      if (a > r.bound + tol) ++over;
    }
    std::lock_guard<std::mutex> lock(mu);
    r.max_abs = std::max(r.max_abs, m);
    r.exceed += over;
  });
  r.pass = r.exceed <= r.allowed;
  return r;
}

u64 least_nonresidue(u64 p) {
  if (p < 3 || !is_prime_u64(p)) fail(ErrorCode::kInvalidArgument, "least non-residue needs an odd prime");
  for (u64 a = 2; a < p; ++a)
    if (powmod(a, (p - 1) / 2, p) == p - 1) return a;
  fail(ErrorCode::kInvalidArgument, "no non-residue found");
}

// ----------------------------------------------------------------- corpus

std::map<std::string, u64> CorpusEntry::params(const FieldCtx& ctx) const {
  std::map<std::string, u64> out;
  if (ctx.p() == 2) return out;
  // Nonresidue of F_q: least packed element whose (q-1)/2 power is -1.
  for (u64 a = 2; a < ctx.q(); ++a)
    if (ctx.pow(a, (ctx.q() - 1) / 2) == ctx.neg(1)) {
      out["nonresidue"] = a;
      break;
    }
  return out;
}

VarietySpec CorpusEntry::variety(Field ctx) const {
  auto v = VarietySpec::from_json(ctx, raw, params(*ctx));
  return v;
}

PolynomialMap CorpusEntry::map(Field ctx) const {
  if (!has_source || !raw.at("source").contains("map")) {
    std::vector<MultiPoly> id;
    for (int i = 0; i < arity; ++i) id.push_back(MultiPoly::variable(ctx, arity, i));
    return PolynomialMap(arity, std::move(id));
  }
  nlohmann::json m = raw.at("source").at("map");
  m["arity"] = arity;
  return PolynomialMap::from_json(ctx, m, params(*ctx));
}

AlgebraicSourceSpec CorpusEntry::source(Field ctx) const {
  if (!has_source) fail(ErrorCode::kConfigError, "corpus entry '" + id + "' has no source parameters");
  auto s = AlgebraicSourceSpec::make(variety(ctx), map(ctx), k, d);
  if (s.n != n) fail(ErrorCode::kConfigError, "corpus entry '" + id + "': n does not match the map");
  return s;
}

std::vector<CorpusEntry> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open corpus " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, "corpus " + path + ": " + e.what());
  }
  std::vector<CorpusEntry> out;
  try {
    if (j.at("version").get<int>() != 1) fail(ErrorCode::kArtifactVersionMismatch, "corpus version");
    for (const auto& e : j.at("entries")) {
      CorpusEntry c;
      c.raw = e;
      c.id = e.at("id").get<std::string>();
      c.family = e.at("family").get<std::string>();
      c.arity = e.at("arity").get<int>();
      c.abs_irreducible = e.value("abs_irreducible", false);
      if (e.contains("source")) {
        c.has_source = true;
        c.k = e.at("source").at("k").get<int>();
        c.d = e.at("source").at("d").get<u64>();
        c.n = e.at("source").contains("map") ? static_cast<int>(e.at("source").at("map").at("components").size())
                                             : c.arity;
      }
      out.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, "corpus " + path + ": " + e.what());
  }
  return out;
}

std::string default_corpus_path() { return data_dir() + "/corpus.json"; }

}  // namespace algext
