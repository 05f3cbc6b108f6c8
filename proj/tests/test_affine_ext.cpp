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

#include <map>
#include <numeric>
#include <set>

#include "algext/affine_ext.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace algext;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kInvalidArgument;
}

long long opow(long long b, long long e, long long q) {
  long long r = 1;
  b = oracle::md(b, q);
  while (e-- > 0) r = r * b % q;
  return r;
}

// Direct bias of c over the subspace.
double oracle_bias(const AffineExtractor& ext, const AffineSubspace& sub, const std::vector<u64>& c) {
  const long long q = static_cast<long long>(ext.ctx->q());
  std::complex<double> acc = 0;
  double count = 0;
  for (auto& t : oracle::all_vectors(q, sub.k)) {
    long long phase = 0;
    for (int j = 0; j < ext.n; ++j) {
      long long x = static_cast<long long>(sub.maps[j][0]);
      for (int i = 0; i < sub.k; ++i) x += static_cast<long long>(sub.maps[j][i + 1]) * t[i];
      const long long y = opow(x, static_cast<long long>(ext.degrees.degrees[j]), q);
      for (int i = 0; i < ext.m; ++i) phase += static_cast<long long>(c[i] * ext.A.entries[i][j] % q) * y % q;
    }
    acc += std::polar(1.0, 2 * std::acos(-1.0) * static_cast<double>(oracle::md(phase, q)) / static_cast<double>(q));
    count += 1;
  }
  return std::abs(acc) / count;
}

}  // namespace

TEST_CASE("good_degrees examples") {
  auto a = good_degrees(4, 11, 1.0, true);
  CHECK(a.primes == std::vector<u64>{3, 7});
  CHECK(a.D == 21);
  CHECK(a.degrees == std::vector<u64>{1, 3, 7, 21});
  CHECK_FALSE(a.lcm_ok);
  auto b = good_degrees(1, 11, 0.5, false);
  CHECK(b.primes.empty());
  CHECK(b.D == 1);
  CHECK(b.degrees == std::vector<u64>{1});
  CHECK(b.lcm_ok);
  auto c = good_degrees(4, 13, 1.0, true);
  CHECK(c.primes == std::vector<u64>{5, 7});
  CHECK(c.D == 35);
  CHECK(c.degrees == std::vector<u64>{1, 5, 7, 35});
  // q - 1 = 2 * 5003: 3 and 5 are both coprime to it.
  auto d = good_degrees(4, 10007, 0.5, false);
  CHECK(d.primes == std::vector<u64>{3, 5});
  CHECK(d.D == 15);
  CHECK(d.lcm_ok);
  CHECK(good_degrees(3, 31, 1.0, true).degrees == std::vector<u64>{1, 7, 11});
  CHECK(code_of([] { good_degrees(4, 12, 1.0, true); }) == ErrorCode::kNonPrime);
  CHECK(code_of([] { good_degrees(4, 11, 1.0, false); }) == ErrorCode::kLcmTooLarge);
  CHECK(code_of([] { good_degrees(0, 11, 1.0, true); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("good_degrees invariants over a grid") {
  for (u64 q = 2; q < 600; ++q) {
    if (!oracle::is_prime(static_cast<long long>(q))) continue;
    for (int n = 1; n <= 40; ++n) {
      auto g = good_degrees(n, q, 1.0, true);
      REQUIRE(g.degrees.size() == static_cast<std::size_t>(n));
      int r = 0;
      while ((1 << r) < n) ++r;
      REQUIRE(g.primes.size() == static_cast<std::size_t>(r));
      u64 prod = 1;
      for (u64 p : g.primes) {
        REQUIRE(oracle::is_prime(static_cast<long long>(p)));
        REQUIRE(std::gcd(p, q - 1) == 1);
        prod *= p;
      }
      REQUIRE(prod == g.D);
      for (std::size_t i = 0; i < g.degrees.size(); ++i) {
        REQUIRE(std::gcd(g.degrees[i], q - 1) == 1);
        REQUIRE(g.D % g.degrees[i] == 0);
        if (i) REQUIRE(g.degrees[i - 1] < g.degrees[i]);
      }
      // Smallest primes: every skipped prime below the last one divides q - 1.
      if (!g.primes.empty())
        for (u64 p = 2; p < g.primes.back(); ++p)
          if (oracle::is_prime(static_cast<long long>(p)) &&
              std::find(g.primes.begin(), g.primes.end(), p) == g.primes.end())
            REQUIRE((q - 1) % p == 0);
    }
  }
}

TEST_CASE("build_affine_ext examples") {
  auto id = build_affine_ext(1, 1, 11, good_degrees(1, 11, 1.0, true));
  for (u64 x = 0; x < 11; ++x) CHECK(id.eval({x}) == std::vector<u64>{x});
  auto g2 = good_degrees(2, 11, 1.0, true);
  auto two = build_affine_ext(2, 1, 11, g2);
  CHECK(two.A.entries == std::vector<std::vector<u64>>{{1, 1}});
  for (u64 a = 0; a < 11; ++a)
    for (u64 b = 0; b < 11; ++b)
      CHECK(two.eval({a, b})[0] == static_cast<u64>((a + opow(b, 3, 11)) % 11));
  CHECK(code_of([] { build_affine_ext(4, 1, 3, good_degrees(4, 3, 1.0, true)); }) == ErrorCode::kFieldTooSmall);
  CHECK(code_of([&] { build_affine_ext(2, 3, 11, g2); }) == ErrorCode::kShapeMismatch);
  CHECK(code_of([&] { build_affine_ext(3, 1, 11, g2); }) == ErrorCode::kShapeMismatch);
  CHECK(code_of([&] { two.eval({1}); }) == ErrorCode::kLengthMismatch);
}

TEST_CASE("uniform input gives exactly uniform output") {
  for (u64 q : {5, 7, 11, 13})
    for (int n = 1; n <= 3; ++n)
      for (int m = 1; m <= n; ++m) {
        if (q - 1 < static_cast<u64>(n)) continue;
        auto ext = build_affine_ext(n, m, q, good_degrees(n, q, 1.0, true));
        auto conv = uniform_input_output(ext);
        auto direct = FiniteDistribution::uniform(ext.input_carrier())
                          .push_forward(ext.output_carrier(), [&](u64 x) {
                            return ext.output_carrier().encode(ext.eval(ext.input_carrier().decode(x)));
                          });
        CHECK(conv.counts() == direct.counts());
        CHECK(distance_to_uniform(conv).num == 0);
      }
}

TEST_CASE("sample_subspace examples and echelon invariants") {
  auto full = sample_subspace(3, 3, 7, 5);
  CHECK(full.pivots == std::vector<int>{0, 1, 2});
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i <= 3; ++i) CHECK(full.maps[j][i] == (i == j + 1 ? 1u : 0u));
  CHECK(full.point({4, 5, 6}) == std::vector<u64>{4, 5, 6});
  auto pt = sample_subspace(4, 0, 7, 5);
  CHECK(pt.pivots.empty());
  CHECK(pt.maps.size() == 4);
  for (auto& row : pt.maps) CHECK(row.size() == 1);
  auto a = sample_subspace(6, 3, 101, 9), b = sample_subspace(6, 3, 101, 9);
  CHECK(a.maps == b.maps);
  CHECK(a.pivots == b.pivots);
  CHECK(code_of([] { sample_subspace(3, 4, 7, 1); }) == ErrorCode::kKTooLarge);
  CHECK(code_of([] { sample_subspace(3, 1, 8, 1); }) == ErrorCode::kNonPrime);

  std::map<std::vector<int>, int> pivot_hist;
  for (u64 seed = 0; seed < 600; ++seed) {
    auto s = sample_subspace(5, 2, 7, seed);
    pivot_hist[s.pivots]++;
    int seen = 0;
    for (int j = 0; j < 5; ++j) {
      const bool pivot = seen < 2 && s.pivots[seen] == j;
      if (pivot) {
        ++seen;
        CHECK(s.point({3, 4})[j] == (seen == 1 ? 3u : 4u));
      }
      for (int i = seen + 1; i <= 2; ++i) CHECK(s.maps[j][i] == 0);
    }
    // The parametrization is injective.
    std::set<std::vector<u64>> pts;
    for (auto& t : oracle::all_vectors(7, 2)) pts.insert(s.point({static_cast<u64>(t[0]), static_cast<u64>(t[1])}));
    CHECK(pts.size() == 49);
  }
  CHECK(pivot_hist.size() == 10);  // all C(5,2) pivot sets occur
  for (auto& [k, v] : pivot_hist) CHECK(v > 25);
}

TEST_CASE("measure_affine_bias examples") {
  auto ext = build_affine_ext(2, 1, 11, good_degrees(2, 11, 1.0, true));
  auto rep = measure_affine_bias(ext, sample_subspace(2, 2, 11, 3));
  CHECK(rep.exhaustive_chars);
  CHECK(rep.rows.size() == 10);
  CHECK(rep.max_bias <= 1e-9);
  CHECK(rep.pass);

  // A line in the first coordinate and c with b_1 = 0.
  auto e3 = build_affine_ext(3, 2, 11, good_degrees(3, 11, 1.0, true));
  AffineSubspace line;
  line.ctx = e3.ctx;
  line.n = 3;
  line.k = 1;
  line.pivots = {0};
  line.maps = {{0, 1}, {4, 0}, {9, 0}};
  auto lr = measure_affine_bias(e3, line);
  bool saw_constant = false;
  for (auto& row : lr.rows) {
    auto c = e3.output_carrier().decode(row.c_index);
    CHECK(row.abs_bias == doctest::Approx(oracle_bias(e3, line, c)).epsilon(1e-9));
    if (row.b[0] == 0) {
      saw_constant = true;
      CHECK(row.abs_bias == doctest::Approx(1.0));
      CHECK_FALSE(row.qualifies);
    } else {
      CHECK(row.qualifies);
    }
  }
  CHECK(saw_constant);
  auto again = measure_affine_bias(e3, line);
  for (std::size_t i = 0; i < lr.rows.size(); ++i) CHECK(again.rows[i].abs_bias == lr.rows[i].abs_bias);
  CHECK(code_of([&] { measure_affine_bias(e3, sample_subspace(3, 3, 11, 1), {}, 100); }) ==
        ErrorCode::kBudgetExceeded);
}

TEST_CASE("bias sums agree with direct enumeration") {
  for (u64 q : {7, 11, 13})
    for (int n = 2; n <= 4; ++n)
      for (int m = 1; m <= std::min(n, 2); ++m)
        for (int k = 0; k <= std::min(n, 3); ++k) {
          auto ext = build_affine_ext(n, m, q, good_degrees(n, q, 1.0, true));
          auto sub = sample_subspace(n, k, q, q * 100 + n * 10 + k);
          auto rep = measure_affine_bias(ext, sub);
          CHECK(rep.exhaustive_chars);
          for (auto& row : rep.rows) {
            auto c = ext.output_carrier().decode(row.c_index);
            REQUIRE(row.abs_bias == doctest::Approx(oracle_bias(ext, sub, c)).epsilon(1e-9));
          }
        }
  // Sampled characters are distinct and deterministic.
  auto ext = build_affine_ext(4, 2, 101, good_degrees(4, 101, 1.0, true));
  auto sub = sample_subspace(4, 1, 101, 4);
  CharacterChoice ch{32, 7, false};
  auto r1 = measure_affine_bias(ext, sub, ch), r2 = measure_affine_bias(ext, sub, ch);
  CHECK(r1.rows.size() == 32);
  std::set<u64> ids;
  for (std::size_t i = 0; i < 32; ++i) {
    ids.insert(r1.rows[i].c_index);
    CHECK(r1.rows[i].c_index == r2.rows[i].c_index);
  }
  CHECK(ids.size() == 32);
  auto sharded = measure_affine_bias(ext, sub, ch, u64{1} << 36, 4);
  for (std::size_t i = 0; i < 32; ++i) CHECK(sharded.rows[i].abs_bias == r1.rows[i].abs_bias);
}

TEST_CASE("intermediate bound on qualifying characters at small q") {
  for (u64 q : {101, 211}) {
    auto ext = build_affine_ext(4, 1, q, good_degrees(4, q, 1.0, true));
    for (u64 seed = 1; seed <= 4; ++seed) {
      auto rep = measure_affine_bias(ext, sample_subspace(4, 2, q, seed), CharacterChoice{32, seed, false});
      CHECK(rep.pass);
      CHECK(rep.qualifying == 32);  // m = 1: every b_j is c
    }
  }
}

TEST_CASE("affine json round trips") {
  auto ext = build_affine_ext(4, 2, 13, good_degrees(4, 13, 1.0, true));
  auto back = AffineExtractor::from_json(nlohmann::json::parse(ext.to_json().dump()));
  for (u64 x = 0; x < 28561; x += 97) {
    auto v = ext.input_carrier().decode(x);
    CHECK(back.eval(v) == ext.eval(v));
  }
  auto j = ext.to_json();
  j["matrix"]["entries"][1][2] = 5;
  CHECK(code_of([&] { AffineExtractor::from_json(j); }) == ErrorCode::kConfigError);
  j = ext.to_json();
  j["degrees"]["degrees"][1] = 3;
  CHECK(code_of([&] { AffineExtractor::from_json(j); }) == ErrorCode::kConfigError);
  auto sub = sample_subspace(5, 3, 13, 2);
  auto sb = AffineSubspace::from_json(sub.to_json());
  CHECK(sb.maps == sub.maps);
  auto sj = sub.to_json();
  sj["maps"][sub.pivots[0]][2] = 1;
  CHECK(code_of([&] { AffineSubspace::from_json(sj); }) == ErrorCode::kConfigError);
}

TEST_CASE("weil_sum examples") {
  auto f7 = make_field(7, 1);
  CHECK(weil_sum(*f7, {0, 0, 0, 1}) <= 2 * std::sqrt(7.0) + 1e-9);
  CHECK(weil_sum(*f7, {0, 0, 0, 1}) > 1.0);
  CHECK(weil_sum(*f7, {0, 1}) < 1e-9);
  // gcd(5, 6) = 1: x^5 permutes F_7.
  CHECK(weil_sum(*f7, {0, 0, 0, 0, 0, 1}) < 1e-9);
  auto w = weil_sum_check(101, 3, 50, 1);
  CHECK(w.trials.size() == 50);
  CHECK(w.pass);
  CHECK(w.bound == doctest::Approx(2 * std::sqrt(101.0)));
  for (auto& t : w.trials) CHECK(t.coeffs[3] != 0);
  CHECK(code_of([] { weil_sum_check(100, 3, 1); }) == ErrorCode::kNonPrime);
  CHECK(code_of([] { weil_sum_check(5, 5, 1); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { weil_sum_check(5, 0, 1); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("weil sums agree with the definition and respect the bound") {
  for (u64 q : {11, 31, 101})
    for (int d = 1; d <= 5; ++d) {
      auto w = weil_sum_check(q, d, 20, q + d);
      CHECK(w.pass);
      for (auto& t : w.trials) {
        std::complex<double> acc = 0;
        for (long long x = 0; x < static_cast<long long>(q); ++x) {
          std::vector<long long> cs(t.coeffs.begin(), t.coeffs.end());
          long long v = 0;
          for (std::size_t i = cs.size(); i-- > 0;) v = (v * x + cs[i]) % static_cast<long long>(q);
          acc += std::polar(1.0, 2 * std::acos(-1.0) * static_cast<double>(v) / static_cast<double>(q));
        }
        CHECK(t.abs_sum == doctest::Approx(std::abs(acc)).scale(1.0).epsilon(1e-9));
      }
    }
}
