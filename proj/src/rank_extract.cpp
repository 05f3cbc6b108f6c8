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

#include "algext/rank_extract.hpp"

#include <atomic>
#include <mutex>
#include <numeric>
#include <optional>
#include <unordered_map>

namespace algext {

namespace {

u64 binomial_capped(u64 n, u64 k, u64 cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  u128 r = 1;
  for (u64 i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > cap) return cap + 1;
  }
  return static_cast<u64>(r);
}

u64 sat_mul(u64 a, u64 b) {
  u128 r = static_cast<u128>(a) * b;
  return r > std::numeric_limits<u64>::max() ? std::numeric_limits<u64>::max() : static_cast<u64>(r);
}

bool next_combination(std::vector<int>& c, int n) {
  const int k = static_cast<int>(c.size());
  int i = k - 1;
  while (i >= 0 && c[i] == n - k + i) --i;
  if (i < 0) return false;
  ++c[i];
  for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  return true;
}

bool columns_independent(const FieldCtx& ctx, const std::vector<std::vector<u64>>& a, const std::vector<int>& cols) {
  std::vector<std::vector<u64>> sub(a.size(), std::vector<u64>(cols.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) sub[i][j] = a[i][cols[j]];
  return matrix_rank(ctx, std::move(sub)) == cols.size();
}

Field field_from(const nlohmann::json& j) { return parse_field_token(j.at("field").get<std::string>()); }

}  // namespace

// ------------------------------------------------------------ linear algebra

std::vector<std::vector<u64>> row_reduce(const FieldCtx& ctx, std::vector<std::vector<u64>> rows) {
  if (rows.empty()) return rows;
  const std::size_t cols = rows[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t piv = r;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[r], rows[piv]);
    const u64 inv = ctx.inv(rows[r][c]);
    for (auto& x : rows[r]) x = ctx.mul(x, inv);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      const u64 f = rows[i][c];
      for (std::size_t k = c; k < cols; ++k) rows[i][k] = ctx.sub(rows[i][k], ctx.mul(f, rows[r][k]));
    }
    ++r;
  }
  rows.resize(r);
  return rows;
}

std::size_t matrix_rank(const FieldCtx& ctx, std::vector<std::vector<u64>> rows) {
  for (auto& row : rows)
    if (!rows.empty() && row.size() != rows[0].size()) fail(ErrorCode::kShapeMismatch, "ragged matrix");
  return row_reduce(ctx, std::move(rows)).size();
}

std::vector<std::vector<std::vector<u64>>> all_subspaces(const FieldCtx& ctx, int n, int k) {
  if (k < 0 || k > n) fail(ErrorCode::kShapeMismatch, "subspace dimension out of range");
  std::vector<std::vector<std::vector<u64>>> out;
  if (k == 0) {
    out.emplace_back();
    return out;
  }
  std::vector<int> piv(k);
  std::iota(piv.begin(), piv.end(), 0);
  const u64 q = ctx.q();
  do {
    // Free slots: row i, column j > piv[i], j not a pivot.
    std::vector<std::pair<int, int>> slots;
    for (int i = 0; i < k; ++i)
      for (int j = piv[i] + 1; j < n; ++j)
        if (std::find(piv.begin(), piv.end(), j) == piv.end()) slots.emplace_back(i, j);
    u128 total = 1;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      total *= q;
      if (total > (u128{1} << 32)) fail(ErrorCode::kBudgetExceeded, "too many subspaces");
    }
    for (u64 idx = 0; idx < static_cast<u64>(total); ++idx) {
      std::vector<std::vector<u64>> b(k, std::vector<u64>(n, 0));
      for (int i = 0; i < k; ++i) b[i][piv[i]] = 1;
      u64 rest = idx;
      for (std::size_t s = slots.size(); s-- > 0;) {
        b[slots[s].first][slots[s].second] = rest % q;
        rest /= q;
      }
      out.push_back(std::move(b));
    }
  } while (next_combination(piv, n));
  return out;
}

// ------------------------------------------------------------------ degrees

const char* strategy_name(DegreeStrategy s) {
  return s == DegreeStrategy::kDistinctPrimes ? "distinct_primes" : "prime_powers";
}

DegreeStrategy parse_strategy(const std::string& s) {
  if (s == "distinct_primes") return DegreeStrategy::kDistinctPrimes;
  if (s == "prime_powers") return DegreeStrategy::kPrimePowers;
  fail(ErrorCode::kConfigError, "unknown degree strategy '" + s + "'");
}

CoprimeDegrees choose_degrees(int n, u64 d, DegreeStrategy strategy) {
  if (n < 1) fail(ErrorCode::kInvalidArgument, "need at least one degree");
  CoprimeDegrees out;
  out.n = n;
  out.d = d;
  out.strategy = strategy;
  const auto& primes = sieve_primes();
  if (strategy == DegreeStrategy::kDistinctPrimes) {
    auto it = std::upper_bound(primes.begin(), primes.end(), d);
    for (int i = 0; i < n; ++i, ++it) {
      if (it == primes.end()) fail(ErrorCode::kParamsInfeasible, "degrees exceed the prime sieve");
      out.degrees.push_back(*it);
    }
  } else {
    if (static_cast<std::size_t>(n) > primes.size()) fail(ErrorCode::kParamsInfeasible, "degrees exceed the prime sieve");
    for (int i = 0; i < n; ++i) {
      u128 v = primes[i];
      while (v <= d) v *= primes[i];
      if (v > std::numeric_limits<u64>::max()) fail(ErrorCode::kParamsInfeasible, "degree overflow");
      out.degrees.push_back(static_cast<u64>(v));
    }
  }
  return out;
}

nlohmann::json CoprimeDegrees::to_json() const {
  return {{"n", n}, {"d", d}, {"strategy", strategy_name(strategy)}, {"degrees", degrees}};
}

CoprimeDegrees CoprimeDegrees::from_json(const nlohmann::json& j) {
  try {
    CoprimeDegrees c = choose_degrees(j.at("n").get<int>(), j.at("d").get<u64>(),
                                      parse_strategy(j.at("strategy").get<std::string>()));
    if (j.contains("degrees") && j.at("degrees").get<std::vector<u64>>() != c.degrees)
      fail(ErrorCode::kConfigError, "stored degrees disagree with the strategy");
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("degrees json: ") + e.what());
  }
}

// ----------------------------------------------------------------- matrices

const char* matrix_tag_name(MatrixTag t) {
  switch (t) {
    case MatrixTag::kVandermonde: return "vandermonde";
    case MatrixTag::kIdentity: return "identity";
    case MatrixTag::kAllOnes: return "all_ones";
    case MatrixTag::kDropOne: return "drop_one";
    case MatrixTag::kCustom: return "custom";
  }
  return "custom";
}

MatrixTag parse_matrix_tag(const std::string& s) {
  for (MatrixTag t : {MatrixTag::kVandermonde, MatrixTag::kIdentity, MatrixTag::kAllOnes, MatrixTag::kDropOne,
                      MatrixTag::kCustom})
    if (s == matrix_tag_name(t)) return t;
  fail(ErrorCode::kConfigError, "unknown matrix tag '" + s + "'");
}

int certify_regularity(const FieldCtx& ctx, const std::vector<std::vector<u64>>& a, int k, bool* sampled) {
  const int n = a.empty() ? 0 : static_cast<int>(a[0].size());
  if (sampled) *sampled = false;
  // k columns independent implies every smaller set is, so search downward.
  for (int kk = k; kk >= 1; --kk) {
    const u64 subsets = binomial_capped(n, kk, constants::kRegularExhaustiveLimit);
    bool ok = true;
    if (subsets <= constants::kRegularExhaustiveLimit) {
      std::vector<int> c(kk);
      std::iota(c.begin(), c.end(), 0);
      do {
        if (!columns_independent(ctx, a, c)) {
          ok = false;
          break;
        }
      } while (next_combination(c, n));
      if (ok) return kk;
    } else {
      std::mt19937_64 rng(0x5eed0000u + kk);
      std::vector<int> all(n);
      for (u64 t = 0; t < constants::kRegularSampleCount && ok; ++t) {
        std::iota(all.begin(), all.end(), 0);
        for (int i = 0; i < kk; ++i) std::swap(all[i], all[i + uniform_below(rng, n - i)]);
        std::vector<int> c(all.begin(), all.begin() + kk);
        std::sort(c.begin(), c.end());
        ok = columns_independent(ctx, a, c);
      }
      if (ok) {
        if (sampled) *sampled = true;
        return kk;
      }
    }
  }
  return 0;
}

RegularMatrix custom_matrix(Field ctx, std::vector<std::vector<u64>> entries, int k) {
  RegularMatrix r;
  r.ctx = ctx;
  r.m = static_cast<int>(entries.size());
  r.n = r.m ? static_cast<int>(entries[0].size()) : 0;
  for (auto& row : entries) {
    if (static_cast<int>(row.size()) != r.n) fail(ErrorCode::kShapeMismatch, "ragged matrix");
    for (u64 x : row)
      if (x >= ctx->q()) fail(ErrorCode::kOutOfRange, "matrix entry outside the field");
  }
  if (k < 0 || k > std::min(r.m, r.n)) fail(ErrorCode::kShapeMismatch, "regularity target exceeds the shape");
  r.entries = std::move(entries);
  r.tag = MatrixTag::kCustom;
  r.certified_k = certify_regularity(*ctx, r.entries, k, &r.sampled);
  return r;
}

RegularMatrix build_regular_matrix(int m, int n, int k, Field ctx, MatrixTag tag) {
  if (m < 1 || n < 1) fail(ErrorCode::kShapeMismatch, "empty matrix");
  const FieldCtx& f = *ctx;
  std::vector<std::vector<u64>> a(m, std::vector<u64>(n, 0));
  const u64 minus_one = f.neg(1);
  switch (tag) {
    case MatrixTag::kVandermonde: {
      // Nodes are the first n nonzero elements.
      if (f.q() - 1 < static_cast<u64>(n)) fail(ErrorCode::kFieldTooSmall, "not enough Vandermonde nodes");
      for (int j = 0; j < n; ++j) {
        u64 pw = 1;
        for (int i = 0; i < m; ++i) {
          a[i][j] = pw;
          pw = f.mul(pw, static_cast<u64>(j + 1));
        }
      }
      break;
    }
    case MatrixTag::kIdentity:
      if (m != n) fail(ErrorCode::kShapeMismatch, "identity needs m == n");
      for (int i = 0; i < n; ++i) a[i][i] = 1;
      break;
    case MatrixTag::kAllOnes:
      if (m != 1) fail(ErrorCode::kShapeMismatch, "all_ones needs m == 1");
      for (auto& x : a[0]) x = 1;
      break;
    case MatrixTag::kDropOne:
      if (m != n - 1) fail(ErrorCode::kShapeMismatch, "drop_one needs m == n - 1");
      for (int i = 0; i < m; ++i) {
        a[i][i] = 1;
        a[i][n - 1] = minus_one;
      }
      break;
    case MatrixTag::kCustom:
      fail(ErrorCode::kInvalidArgument, "custom matrices are built with custom_matrix");
  }
  RegularMatrix r = custom_matrix(ctx, std::move(a), k);
  r.tag = tag;
  return r;
}

nlohmann::json RegularMatrix::to_json() const {
  return {{"field", ctx->token()}, {"tag", matrix_tag_name(tag)}, {"m", m}, {"n", n},
          {"certified_k", certified_k}, {"sampled", sampled}, {"entries", entries}};
}

RegularMatrix RegularMatrix::from_json(const nlohmann::json& j) {
  try {
    RegularMatrix r;
    r.ctx = field_from(j);
    r.tag = parse_matrix_tag(j.at("tag").get<std::string>());
    r.m = j.at("m").get<int>();
    r.n = j.at("n").get<int>();
    r.entries = j.at("entries").get<std::vector<std::vector<u64>>>();
    r.certified_k = j.at("certified_k").get<int>();
    r.sampled = j.value("sampled", false);
    if (static_cast<int>(r.entries.size()) != r.m) fail(ErrorCode::kShapeMismatch, "row count");
    for (auto& row : r.entries) {
      if (static_cast<int>(row.size()) != r.n) fail(ErrorCode::kShapeMismatch, "column count");
      for (u64 x : row)
        if (x >= r.ctx->q()) fail(ErrorCode::kOutOfRange, "matrix entry outside the field");
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("matrix json: ") + e.what());
  }
}

// ---------------------------------------------------------------------- DKL

DklExtractor dkl_map(const CoprimeDegrees& degs, const RegularMatrix& mat) {
  if (static_cast<int>(degs.degrees.size()) != mat.n)
    fail(ErrorCode::kDegreeCountMismatch, "need one degree per matrix column");
  std::vector<MultiPoly> comps;
  for (int i = 0; i < mat.m; ++i) {
    std::vector<Term> terms;
    for (int j = 0; j < mat.n; ++j) {
      if (mat.entries[i][j] == 0) continue;
      if (degs.degrees[j] > std::numeric_limits<std::uint32_t>::max())
        fail(ErrorCode::kParamsInfeasible, "degree too large for a monomial");
      std::vector<std::uint32_t> e(mat.n, 0);
      e[j] = static_cast<std::uint32_t>(degs.degrees[j]);
      terms.push_back(Term{mat.entries[i][j], e});
    }
    comps.emplace_back(mat.ctx, mat.n, std::move(terms));
  }
  return DklExtractor{degs, mat, PolynomialMap(mat.n, std::move(comps))};
}

std::vector<u64> DklExtractor::eval(const std::vector<u64>& a) const {
  if (static_cast<int>(a.size()) != matrix.n) fail(ErrorCode::kArityMismatch, "point arity");
  const FieldCtx& f = *matrix.ctx;
  std::vector<u64> pw(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) pw[j] = f.pow(a[j], degrees.degrees[j]);
  std::vector<u64> out(matrix.m, 0);
  for (int i = 0; i < matrix.m; ++i)
    for (int j = 0; j < matrix.n; ++j) out[i] = f.add(out[i], f.mul(matrix.entries[i][j], pw[j]));
  return out;
}

std::vector<u64> DklExtractor::row_degrees() const {
  std::vector<u64> out(matrix.m, 0);
  for (int i = 0; i < matrix.m; ++i)
    for (int j = 0; j < matrix.n; ++j)
      if (matrix.entries[i][j]) out[i] = std::max(out[i], degrees.degrees[j]);
  return out;
}

nlohmann::json DklExtractor::to_json() const {
  return {{"kind", "dkl"}, {"degrees", degrees.to_json()}, {"matrix", matrix.to_json()}};
}

DklExtractor DklExtractor::from_json(const nlohmann::json& j) {
  try {
    return dkl_map(CoprimeDegrees::from_json(j.at("degrees")), RegularMatrix::from_json(j.at("matrix")));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("dkl json: ") + e.what());
  }
}

FiberCheck fiber_finiteness_check(const DklExtractor& ext, const VarietySpec& v, u64 sample_targets, u64 rng_seed,
                                  const EnumOptions& opt) {
  if (v.arity != ext.matrix.n) fail(ErrorCode::kArityMismatch, "variety arity differs from the map");
  FiberCheck out;
  out.bezout_cap = v.bezout_degree();
  for (u64 r : ext.row_degrees()) out.bezout_cap = sat_mul(out.bezout_cap, r);
  if (sample_targets == 0) {
    auto img = image_distribution(v, ext.map, opt);
    out.max_fiber_size = img.max_count();
    out.targets_inspected = img.support_size();
  } else {
    out.exact = false;
    auto carrier = Carrier::field_power(ext.matrix.ctx, ext.matrix.m);
    std::mt19937_64 rng(rng_seed);
    std::unordered_map<u64, std::size_t> slot;
    for (u64 t = 0; t < sample_targets; ++t) slot.emplace(uniform_below(rng, carrier.cardinality()), slot.size());
    std::vector<std::atomic<u64>> hits(slot.size());
    for_each_point(v, opt, [&](int, const std::vector<u64>& x) {
      auto it = slot.find(carrier.encode(ext.map.eval(x)));
      if (it != slot.end()) hits[it->second].fetch_add(1, std::memory_order_relaxed);
    });
    for (auto& h : hits) out.max_fiber_size = std::max<u64>(out.max_fiber_size, h.load());
    out.targets_inspected = slot.size();
  }
  out.pass = out.max_fiber_size <= out.bezout_cap;
  return out;
}

// ------------------------------------------------------------ seeded family

SeededRankFamily build_seeded_family(int n, int m, Field ctx, std::size_t ell) {
  if (m < 1 || m > n) fail(ErrorCode::kShapeMismatch, "need 1 <= m <= n");
  if (ell < 1) fail(ErrorCode::kInvalidArgument, "need at least one seed");
  const FieldCtx& f = *ctx;
  if (f.q() - 1 < std::max<u64>(static_cast<u64>(n), ell))
    fail(ErrorCode::kFieldTooSmall, "need q - 1 >= max(n, l)");
  SeededRankFamily fam;
  fam.ctx = ctx;
  fam.n = n;
  fam.m = m;
  fam.omega = 0;
  for (u64 w = 1; w < f.q(); ++w) {
    if (f.order(w) >= static_cast<u64>(n)) {
      fam.omega = w;
      break;
    }
  }
  for (std::size_t i = 0; i < ell; ++i) fam.seeds.push_back(i + 1);
  return fam;
}

std::vector<std::vector<u64>> SeededRankFamily::matrix(std::size_t i) const {
  const FieldCtx& f = *ctx;
  std::vector<std::vector<u64>> a(m, std::vector<u64>(n));
  u64 base = seeds.at(i);
  for (int r = 0; r < m; ++r) {
    u64 pw = 1;
    for (int j = 0; j < n; ++j) {
      a[r][j] = pw;
      pw = f.mul(pw, base);
    }
    base = f.mul(base, omega);
  }
  return a;
}

std::vector<u64> SeededRankFamily::apply(std::size_t i, const std::vector<u64>& x) const {
  if (static_cast<int>(x.size()) != n) fail(ErrorCode::kArityMismatch, "input length");
  const FieldCtx& f = *ctx;
  auto a = matrix(i);
  std::vector<u64> y(m, 0);
  for (int r = 0; r < m; ++r)
    for (int j = 0; j < n; ++j) y[r] = f.add(y[r], f.mul(a[r][j], x[j]));
  return y;
}

nlohmann::json SeededRankFamily::to_json() const {
  return {{"kind", "seeded_rank"}, {"field", ctx->token()}, {"n", n}, {"m", m}, {"omega", omega}, {"seeds", seeds}};
}

SeededRankFamily SeededRankFamily::from_json(const nlohmann::json& j) {
  try {
    auto fam = build_seeded_family(j.at("n").get<int>(), j.at("m").get<int>(), field_from(j),
                                   j.at("seeds").size());
    if (j.at("omega").get<u64>() != fam.omega || j.at("seeds").get<std::vector<u64>>() != fam.seeds)
      fail(ErrorCode::kConfigError, "stored seeded family differs from its deterministic rebuild");
    return fam;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("seeded family json: ") + e.what());
  }
}

RankSurvey subspace_rank_survey(const SeededRankFamily& fam, const std::vector<std::vector<u64>>& basis, int shards) {
  const FieldCtx& f = *fam.ctx;
  for (auto& b : basis)
    if (static_cast<int>(b.size()) != fam.n) fail(ErrorCode::kShapeMismatch, "basis vector length");
  const std::size_t k = basis.size();
  if (matrix_rank(f, basis) != k) fail(ErrorCode::kRankDeficientInput, "basis vectors are dependent");
  if (k < static_cast<std::size_t>(fam.m)) fail(ErrorCode::kShapeMismatch, "subspace dimension below m");
  RankSurvey out;
  out.seeds = fam.size();
  out.per_seed.assign(fam.size(), 0);
  parallel_for(fam.size(), shards, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      // Rows of the image: phi_i applied to each basis vector.
      std::vector<std::vector<u64>> img;
      for (auto& v : basis) img.push_back(fam.apply(i, v));
      out.per_seed[i] = static_cast<int>(matrix_rank(f, std::move(img)));
    }
  });
  for (int r : out.per_seed)
    if (r < fam.m) ++out.fail_count;
  const u64 allowed = static_cast<u64>(fam.m) * static_cast<u64>(fam.n - fam.m);
  out.fail_fraction = static_cast<double>(out.fail_count) / static_cast<double>(out.seeds);
  out.bound = static_cast<double>(allowed) / static_cast<double>(out.seeds);
  out.pass = out.fail_count <= allowed;
  return out;
}

RankSurvey variety_rank_survey(const SeededRankFamily& fam, const VarietySpec& v, int max_ext,
                               const EnumOptions& opt) {
  if (v.arity != fam.n) fail(ErrorCode::kArityMismatch, "variety arity differs from the family");
  if (max_ext < 1) fail(ErrorCode::kInvalidArgument, "max_ext must be at least 1");
  const FieldCtx& base = *fam.ctx;
  EnumOptions serial = opt;
  serial.shards = 1;
  const int dim_v = v.declared_dim ? *v.declared_dim : estimate_dimension(v, max_ext, serial).dim_estimate;
  const int target = std::min(fam.m, dim_v);

  std::vector<Field> fields;
  std::vector<VarietySpec> lifted;
  std::vector<std::vector<std::vector<std::vector<u64>>>> mats(max_ext);  // [ext][seed] matrix
  for (int e = 1; e <= max_ext; ++e) {
    Field big = e == 1 ? fam.ctx : make_field(base.p(), base.m() * e);
    VarietySpec lv = v.lift(big);
    if (plan_enumeration(lv).work(big->q()) > opt.budget)
      fail(ErrorCode::kBudgetExceeded, "variety scan over extension exceeds the budget");
    const u64 gen = e == 1 ? 0 : subfield_generator_image(base, *big);
    for (std::size_t i = 0; i < fam.size(); ++i) {
      auto a = fam.matrix(i);
      if (e > 1)
        for (auto& row : a)
          for (auto& x : row) x = embed_element(base, *big, gen, x);
      mats[e - 1].push_back(std::move(a));
    }
    fields.push_back(big);
    lifted.push_back(std::move(lv));
  }

  RankSurvey out;
  out.heuristic = true;
  out.seeds = fam.size();
  out.per_seed.assign(fam.size(), 0);
  std::vector<std::optional<Error>> errors(fam.size());
  parallel_for(fam.size(), opt.shards, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      try {
        std::vector<u64> counts;
        for (int x = 0; x < max_ext; ++x) {
          const FieldCtx& f = *fields[x];
          const auto& a = mats[x][i];
          std::vector<std::vector<u64>> img;
          for_each_point(lifted[x], serial, [&](int, const std::vector<u64>& pt) {
            std::vector<u64> y(fam.m, 0);
            for (int r = 0; r < fam.m; ++r)
              for (int j = 0; j < fam.n; ++j) y[r] = f.add(y[r], f.mul(a[r][j], pt[j]));
            img.push_back(std::move(y));
          });
          std::sort(img.begin(), img.end());
          counts.push_back(std::unique(img.begin(), img.end()) - img.begin());
        }
        out.per_seed[i] = dimension_from_counts(counts, base.q()).dim_estimate;
      } catch (const Error& err) {
        errors[i] = err;
      }
    }
  });
  for (auto& err : errors)
    if (err) throw *err;
  for (int d : out.per_seed)
    if (d < target) ++out.fail_count;
  const u64 allowed = static_cast<u64>(fam.m) * static_cast<u64>(fam.n - fam.m);
  out.fail_fraction = static_cast<double>(out.fail_count) / static_cast<double>(out.seeds);
  out.bound = static_cast<double>(allowed) / static_cast<double>(out.seeds);
  out.pass = out.fail_count <= allowed;
  return out;
}

}  // namespace algext
