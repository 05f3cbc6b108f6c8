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

#include "algext/affine_ext.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace algext {
namespace {

u64 checked_pow(u64 base, int e, u64 cap) {
  u64 r = 1;
  for (int i = 0; i < e; ++i) {
    if (base != 0 && r > cap / base) return cap + 1;
    r *= base;
  }
  return r;
}

u64 mulq(u64 a, u64 b, u64 q) {
  return q < (u64{1} << 32) ? (a * b) % q : mulmod(a, b, q);
}

Field prime_field(u64 q) {
  if (!is_prime_u64(q)) fail(ErrorCode::kNonPrime, std::to_string(q) + " is not prime");
  return make_field(q, 1);
}

}  // namespace

// ------------------------------------------------------------ good degrees

GoodDegrees good_degrees(int n, u64 q, double epsilon, bool relax) {
  if (n < 1) fail(ErrorCode::kInvalidArgument, "n must be positive");
  if (!is_prime_u64(q)) fail(ErrorCode::kNonPrime, std::to_string(q) + " is not prime");
  GoodDegrees g;
  g.n = n;
  g.q = q;
  g.epsilon = epsilon;
  int r = 0;
  while ((u64{1} << r) < static_cast<u64>(n)) ++r;
  for (u64 p : sieve_primes()) {
    if (static_cast<int>(g.primes.size()) == r) break;
    if ((q - 1) % p == 0) continue;
    if (g.D > ~u64{0} / p) fail(ErrorCode::kLcmTooLarge, "D overflows 64 bits");
    g.primes.push_back(p);
    g.D *= p;
  }
  std::vector<u64> divs;
  for (u64 mask = 0; mask < (u64{1} << r); ++mask) {
    u64 d = 1;
    for (int i = 0; i < r; ++i)
      if (mask >> i & 1) d *= g.primes[i];
    divs.push_back(d);
  }
  std::sort(divs.begin(), divs.end());
  if (divs.size() < static_cast<std::size_t>(n)) fail(ErrorCode::kBoundViolation, "too few divisors of D");
  g.degrees.assign(divs.begin(), divs.begin() + n);
  g.lcm_ok = std::log(static_cast<double>(g.D)) <= epsilon * std::log(static_cast<double>(q)) + 1e-12;
  if (!g.lcm_ok && !relax)
    fail(ErrorCode::kLcmTooLarge, "D = " + std::to_string(g.D) + " exceeds q^epsilon");
  return g;
}

nlohmann::json GoodDegrees::to_json() const {
  return {{"n", n}, {"q", q}, {"epsilon", epsilon}, {"primes", primes},
          {"degrees", degrees}, {"D", D}, {"lcm_ok", lcm_ok}};
}

GoodDegrees GoodDegrees::from_json(const nlohmann::json& j) {
  try {
    auto g = good_degrees(j.at("n").get<int>(), j.at("q").get<u64>(), j.at("epsilon").get<double>(), true);
    if (j.at("degrees").get<std::vector<u64>>() != g.degrees || j.at("D").get<u64>() != g.D)
      fail(ErrorCode::kConfigError, "stored degrees differ from their rebuild");
    return g;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("good degrees json: ") + e.what());
  }
}

// ---------------------------------------------------------------- extractor

AffineExtractor build_affine_ext(int n, int m, u64 q, const GoodDegrees& degrees) {
  if (m < 1 || m > n) fail(ErrorCode::kShapeMismatch, "need 1 <= m <= n");
  if (degrees.n != n || degrees.degrees.size() != static_cast<std::size_t>(n))
    fail(ErrorCode::kShapeMismatch, "degree list length differs from n");
  AffineExtractor e;
  e.ctx = prime_field(q);
  for (u64 d : degrees.degrees)
    if (gcd_u64(d, q - 1) != 1) fail(ErrorCode::kInvalidArgument, "degree shares a factor with q - 1");
  e.n = n;
  e.m = m;
  e.A = build_regular_matrix(m, n, m, e.ctx, MatrixTag::kVandermonde);
  if (e.A.certified_k != m) fail(ErrorCode::kBoundViolation, "Vandermonde matrix is not m-regular");
  e.degrees = degrees;
  return e;
}

std::vector<u64> AffineExtractor::eval(const std::vector<u64>& x) const {
  if (x.size() != static_cast<std::size_t>(n)) fail(ErrorCode::kLengthMismatch, "input length differs from n");
  const u64 q = ctx->q();
  std::vector<u64> out(m, 0);
  for (int j = 0; j < n; ++j) {
    if (x[j] >= q) fail(ErrorCode::kOutOfRange, "coordinate outside the field");
    const u64 v = powmod(x[j], degrees.degrees[j], q);
    for (int i = 0; i < m; ++i) out[i] = (out[i] + mulq(A.entries[i][j], v, q)) % q;
  }
  return out;
}

nlohmann::json AffineExtractor::to_json() const {
  return {{"kind", "affine"}, {"n", n}, {"m", m}, {"degrees", degrees.to_json()}, {"matrix", A.to_json()}};
}

AffineExtractor AffineExtractor::from_json(const nlohmann::json& j) {
  try {
    auto g = GoodDegrees::from_json(j.at("degrees"));
    auto e = build_affine_ext(j.at("n").get<int>(), j.at("m").get<int>(), g.q, g);
    if (RegularMatrix::from_json(j.at("matrix")).entries != e.A.entries)
      fail(ErrorCode::kConfigError, "stored matrix differs from its rebuild");
    return e;
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::kConfigError, std::string("affine json: ") + ex.what());
  }
}

FiniteDistribution uniform_input_output(const AffineExtractor& ext, u64 budget) {
  const u64 q = ext.ctx->q();
  const auto out = ext.output_carrier();
  const u64 size = out.cardinality();
  if (checked_pow(q, ext.n, ~u64{0} - 1) > ~u64{0} - 1) fail(ErrorCode::kBudgetExceeded, "q^n overflows counts");
  if (size > budget / q / static_cast<u64>(ext.n))
    fail(ErrorCode::kBudgetExceeded, "convolution over F_q^m exceeds the budget");
  std::vector<u64> dist(size, 0);
  dist[0] = 1;
  for (int j = 0; j < ext.n; ++j) {
    // Pushforward of x -> x^{d_j} A_j, then convolve.
    std::vector<u64> col(ext.m);
    for (int i = 0; i < ext.m; ++i) col[i] = ext.A.entries[i][j];
    std::vector<u64> shift(q);
    for (u64 x = 0; x < q; ++x) {
      const u64 v = powmod(x, ext.degrees.degrees[j], q);
      std::vector<u64> y(ext.m);
      for (int i = 0; i < ext.m; ++i) y[i] = mulq(col[i], v, q);
      shift[x] = out.encode(y);
    }
    std::vector<u64> next(size, 0);
    for (u64 a = 0; a < size; ++a) {
      if (dist[a] == 0) continue;
      if (ext.m == 1) {
        for (u64 x = 0; x < q; ++x) {
          u64 b = a + shift[x];
          if (b >= q) b -= q;
          next[b] += dist[a];
        }
      } else {
        for (u64 x = 0; x < q; ++x) next[out.add(a, shift[x])] += dist[a];
      }
    }
    dist.swap(next);
  }
  std::vector<std::pair<u64, u64>> counts;
  for (u64 a = 0; a < size; ++a)
    if (dist[a]) counts.emplace_back(a, dist[a]);
  return FiniteDistribution(out, std::move(counts));
}

// ---------------------------------------------------------------- subspaces

std::vector<u64> AffineSubspace::point(const std::vector<u64>& t) const {
  if (t.size() != static_cast<std::size_t>(k)) fail(ErrorCode::kLengthMismatch, "parameter length differs from k");
  const u64 q = ctx->q();
  std::vector<u64> x(n);
  for (int j = 0; j < n; ++j) {
    u64 v = maps[j][0];
    for (int i = 0; i < k; ++i) v = (v + mulq(maps[j][i + 1], t[i] % q, q)) % q;
    x[j] = v;
  }
  return x;
}

AffineSubspace sample_subspace(int n, int k, u64 q, u64 rng_seed) {
  if (k < 0 || k > n) fail(ErrorCode::kKTooLarge, "k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  AffineSubspace s;
  s.ctx = prime_field(q);
  s.n = n;
  s.k = k;
  std::mt19937_64 rng(rng_seed);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) std::swap(idx[i], idx[i + static_cast<int>(uniform_below(rng, n - i))]);
  s.pivots.assign(idx.begin(), idx.begin() + k);
  std::sort(s.pivots.begin(), s.pivots.end());
  s.maps.assign(n, std::vector<u64>(k + 1, 0));
  int seen = 0;
  for (int j = 0; j < n; ++j) {
    if (seen < k && s.pivots[seen] == j) {
      s.maps[j][seen + 1] = 1;
      ++seen;
      continue;
    }
    for (int i = 0; i <= seen; ++i) s.maps[j][i] = uniform_below(rng, q);
  }
  return s;
}

nlohmann::json AffineSubspace::to_json() const {
  return {{"kind", "affine_subspace"}, {"field", ctx->token()}, {"n", n}, {"k", k},
          {"pivots", pivots}, {"maps", maps}};
}

AffineSubspace AffineSubspace::from_json(const nlohmann::json& j) {
  try {
    AffineSubspace s;
    s.ctx = parse_field_token(j.at("field").get<std::string>());
    if (!s.ctx->is_prime_field()) fail(ErrorCode::kConfigError, "affine subspaces live over prime fields");
    s.n = j.at("n").get<int>();
    s.k = j.at("k").get<int>();
    s.pivots = j.at("pivots").get<std::vector<int>>();
    s.maps = j.at("maps").get<std::vector<std::vector<u64>>>();
    if (s.k < 0 || s.k > s.n || s.pivots.size() != static_cast<std::size_t>(s.k) ||
        s.maps.size() != static_cast<std::size_t>(s.n))
      fail(ErrorCode::kConfigError, "subspace shape");
    int seen = 0;
    for (int j2 = 0; j2 < s.n; ++j2) {
      auto& row = s.maps[j2];
      if (row.size() != static_cast<std::size_t>(s.k + 1)) fail(ErrorCode::kConfigError, "map length");
      for (u64 c : row)
        if (c >= s.ctx->q()) fail(ErrorCode::kConfigError, "map coefficient outside the field");
      const bool pivot = seen < s.k && s.pivots[seen] == j2;
      if (pivot) ++seen;
      // Echelon shape: only t_1..t_seen may appear, pivots are exactly t_seen.
      for (int i = seen + 1; i <= s.k; ++i)
        if (row[i] != 0) fail(ErrorCode::kConfigError, "map not in echelon form");
      if (pivot) {
        for (int i = 0; i <= s.k; ++i)
          if (row[i] != (i == seen ? 1u : 0u)) fail(ErrorCode::kConfigError, "pivot map is not t_i");
      }
    }
    if (seen != s.k) fail(ErrorCode::kConfigError, "pivots are not increasing");
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("subspace json: ") + e.what());
  }
}

// --------------------------------------------------------------------- bias

AffineBiasReport measure_affine_bias(const AffineExtractor& ext, const AffineSubspace& sub,
                                     const CharacterChoice& chars, u64 budget, int shards) {
  if (sub.n != ext.n || sub.ctx->q() != ext.ctx->q())
    fail(ErrorCode::kShapeMismatch, "subspace and extractor disagree on n or q");
  const u64 q = ext.ctx->q();
  const int n = ext.n, k = sub.k;
  const u64 points = checked_pow(q, k, budget);
  if (points > budget) fail(ErrorCode::kBudgetExceeded, "q^k exceeds the budget");
  const auto out = ext.output_carrier();
  const u64 nonzero = out.cardinality() - 1;

  AffineBiasReport rep;
  std::vector<u64> cs;
  if (chars.all_when_feasible && nonzero <= budget / points) {
    rep.exhaustive_chars = true;
    for (u64 c = 1; c <= nonzero; ++c) cs.push_back(c);
  } else {
    std::mt19937_64 rng(chars.rng_seed);
    std::set<u64> seen;
    const u64 want = std::min(chars.count, nonzero);
    while (seen.size() < want) {
      u64 c = 1 + uniform_below(rng, nonzero);
      if (seen.insert(c).second) cs.push_back(c);
    }
    if (cs.size() > budget / points) fail(ErrorCode::kBudgetExceeded, "characters times q^k exceeds the budget");
  }

  const bool tables = q <= (u64{1} << 24);
  std::vector<std::vector<u64>> pw(n);
  if (tables)
    for (int j = 0; j < n; ++j) {
      pw[j].resize(q);
      for (u64 x = 0; x < q; ++x) pw[j][x] = powmod(x, ext.degrees.degrees[j], q);
    }
  auto power = [&](int j, u64 x) { return tables ? pw[j][x] : powmod(x, ext.degrees.degrees[j], q); };
  const double bound = std::pow(static_cast<double>(ext.degrees.D), k / 2.0) * std::pow(static_cast<double>(q), -k / 4.0);

  rep.rows.resize(cs.size());
  parallel_for(cs.size(), shards, [&](std::size_t b0, std::size_t e0) {
    for (std::size_t ci = b0; ci < e0; ++ci) {
      AffineBiasRow& row = rep.rows[ci];
      row.c_index = cs[ci];
      const auto c = out.decode(cs[ci]);
      row.b.assign(n, 0);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < ext.m; ++i) row.b[j] = (row.b[j] + mulq(c[i], ext.A.entries[i][j], q)) % q;
      for (int p : sub.pivots)
        if (row.b[p] != 0) ++row.nonzero_pivots;

      // Coordinates moving with the innermost parameter vs. the rest.
      std::vector<int> inner, outer;
      for (int j = 0; j < n; ++j) {
        if (row.b[j] == 0) continue;
        (k > 0 && sub.maps[j][k] != 0 ? inner : outer).push_back(j);
      }
      std::vector<u64> hist(q, 0);
      std::vector<u64> t(std::max(k - 1, 0), 0);
      const u64 outer_points = k > 0 ? points / q : 1;
      std::vector<u64> val(n), step(n);
      for (u64 o = 0; o < outer_points; ++o) {
        u64 base = 0;
        for (int j = 0; j < n; ++j) {
          if (row.b[j] == 0) continue;
          u64 v = sub.maps[j][0];
          for (int i = 0; i + 1 < k; ++i) v = (v + mulq(sub.maps[j][i + 1], t[i], q)) % q;
          val[j] = v;
          step[j] = k > 0 ? sub.maps[j][k] : 0;
        }
        for (int j : outer) base = (base + mulq(row.b[j], power(j, val[j]), q)) % q;
        if (k == 0) {
          ++hist[base];
        } else {
          for (u64 x = 0; x < q; ++x) {
            u64 acc = base;
            for (int j : inner) {
              acc += mulq(row.b[j], power(j, val[j]), q);
              if (acc >= q) acc -= q;
              val[j] += step[j];
              if (val[j] >= q) val[j] -= q;
            }
            ++hist[acc];
          }
        }
        for (int i = 0; i + 1 < k; ++i) {
          if (++t[i] < q) break;
          t[i] = 0;
        }
      }
      std::complex<double> sum = 0;
      for (u64 a = 0; a < q; ++a)
        if (hist[a]) sum += static_cast<double>(hist[a]) * ext.ctx->root(a);
      row.abs_bias = std::abs(sum) / static_cast<double>(points);
      row.proof_bound = bound;
      row.qualifies = 2 * row.nonzero_pivots >= k;
      row.pass = !row.qualifies || row.abs_bias <= bound + 1e-6;
    }
  });
  for (auto& row : rep.rows) {
    rep.max_bias = std::max(rep.max_bias, row.abs_bias);
    if (row.qualifies) {
      ++rep.qualifying;
      rep.max_qualifying_bias = std::max(rep.max_qualifying_bias, row.abs_bias);
    }
    rep.pass = rep.pass && row.pass;
  }
  return rep;
}

// --------------------------------------------------------------------- weil

double weil_sum(const FieldCtx& ctx, const std::vector<u64>& coeffs) {
  std::vector<u64> hist(ctx.p(), 0);
  for (u64 x = 0; x < ctx.q(); ++x) {
    u64 v = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) v = ctx.add(ctx.mul(v, x), coeffs[i]);
    ++hist[ctx.trace(v)];
  }
  std::complex<double> sum = 0;
  for (u64 a = 0; a < ctx.p(); ++a)
    if (hist[a]) sum += static_cast<double>(hist[a]) * ctx.root(a);
  return std::abs(sum);
}

WeilCheck weil_sum_check(u64 q, int d, int trials, u64 rng_seed) {
  auto f = prime_field(q);
  if (d < 1 || static_cast<u64>(d) % q == 0)
    fail(ErrorCode::kInvalidArgument, "degree must be positive and prime to the characteristic");
  WeilCheck w;
  w.q = q;
  w.d = d;
  w.bound = (d - 1) * std::sqrt(static_cast<double>(q));
  w.tolerance = 1e-6 * std::sqrt(static_cast<double>(q));
  std::mt19937_64 rng(rng_seed);
  for (int i = 0; i < trials; ++i) {
    WeilTrial t;
    t.coeffs.resize(d + 1);
    for (int a = 0; a < d; ++a) t.coeffs[a] = uniform_below(rng, q);
    t.coeffs[d] = 1 + uniform_below(rng, q - 1);
    t.abs_sum = weil_sum(*f, t.coeffs);
    t.pass = t.abs_sum <= w.bound + w.tolerance;
    w.max_abs = std::max(w.max_abs, t.abs_sum);
    w.pass = w.pass && t.pass;
    w.trials.push_back(std::move(t));
  }
  return w;
}

}  // namespace algext
