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

#include <numeric>
#include <random>
#include <set>

#include "algext/rank_extract.hpp"
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

std::vector<oracle::Vec> to_vecs(const std::vector<std::vector<u64>>& a) {
  std::vector<oracle::Vec> out;
  for (auto& r : a) out.emplace_back(r.begin(), r.end());
  return out;
}

// Number of k-dim subspaces of F_q^n.
u64 gaussian_binomial(u64 q, int n, int k) {
  u128 num = 1, den = 1;
  for (int i = 0; i < k; ++i) {
    u128 a = 1, b = 1;
    for (int t = 0; t < n - i; ++t) a *= q;
    for (int t = 0; t < i + 1; ++t) b *= q;
    num *= a - 1;
    den *= b - 1;
  }
  return static_cast<u64>(num / den);
}

VarietySpec variety(Field f, int r, std::vector<MultiPoly> gens, int dim, u64 deg) {
  VarietySpec v;
  v.ctx = f;
  v.arity = r;
  v.generators = std::move(gens);
  v.declared_dim = dim;
  v.degree_bound = deg;
  return v;
}

}  // namespace

TEST_CASE("choose_degrees examples") {
  CHECK(choose_degrees(3, 2, DegreeStrategy::kDistinctPrimes).degrees == std::vector<u64>{3, 5, 7});
  CHECK(choose_degrees(3, 2, DegreeStrategy::kPrimePowers).degrees == std::vector<u64>{4, 3, 5});
  CHECK(choose_degrees(1, 1, DegreeStrategy::kDistinctPrimes).degrees == std::vector<u64>{2});
  CHECK(choose_degrees(2, 0, DegreeStrategy::kPrimePowers).degrees == std::vector<u64>{2, 3});
  CHECK(code_of([] { choose_degrees(2, 999999, DegreeStrategy::kDistinctPrimes); }) == ErrorCode::kParamsInfeasible);
}

TEST_CASE("choose_degrees: coprime, above d, prefix-stable, degree cap") {
  for (u64 d = 0; d <= 1000; ++d) {
    for (auto s : {DegreeStrategy::kDistinctPrimes, DegreeStrategy::kPrimePowers}) {
      auto full = choose_degrees(64, d, s).degrees;
      REQUIRE(full.size() == 64);
      for (std::size_t i = 0; i < full.size(); ++i) {
        REQUIRE(full[i] > d);
        for (std::size_t j = i + 1; j < full.size(); ++j) REQUIRE(std::gcd(full[i], full[j]) == 1);
      }
      for (int n : {1, 2, 7, 33}) {
        auto part = choose_degrees(n, d, s).degrees;
        REQUIRE(std::equal(part.begin(), part.end(), full.begin()));
      }
      if (s == DegreeStrategy::kPrimePowers)
        for (int n = 1; n <= 64; ++n)
          REQUIRE(*std::max_element(full.begin(), full.begin() + n) <= 2 * nth_prime(n) * std::max<u64>(d, 1));
    }
  }
}

TEST_CASE("build_regular_matrix examples") {
  auto all1 = build_regular_matrix(1, 4, 1, make_field(2, 1), MatrixTag::kAllOnes);
  CHECK(all1.certified_k == 1);
  CHECK(all1.entries == std::vector<std::vector<u64>>{{1, 1, 1, 1}});
  auto f5 = make_field(5, 1);
  auto v = build_regular_matrix(2, 3, 2, f5, MatrixTag::kVandermonde);
  CHECK(v.entries == std::vector<std::vector<u64>>{{1, 1, 1}, {1, 2, 3}});
  CHECK(v.certified_k == 2);
  CHECK_FALSE(v.sampled);
  auto f7 = make_field(7, 1);
  auto d1 = build_regular_matrix(2, 3, 2, f7, MatrixTag::kDropOne);
  CHECK(d1.entries == std::vector<std::vector<u64>>{{1, 0, 6}, {0, 1, 6}});
  CHECK(d1.certified_k == 2);
  auto id = build_regular_matrix(3, 3, 3, f7, MatrixTag::kIdentity);
  CHECK(id.certified_k == 3);
  CHECK(code_of([&] { build_regular_matrix(2, 3, 2, f7, MatrixTag::kIdentity); }) == ErrorCode::kShapeMismatch);
  CHECK(code_of([&] { build_regular_matrix(2, 3, 2, f7, MatrixTag::kAllOnes); }) == ErrorCode::kShapeMismatch);
  CHECK(code_of([&] { build_regular_matrix(2, 4, 2, f7, MatrixTag::kDropOne); }) == ErrorCode::kShapeMismatch);
  CHECK(code_of([&] { build_regular_matrix(2, 5, 2, f5, MatrixTag::kVandermonde); }) == ErrorCode::kFieldTooSmall);
  CHECK(code_of([&] { build_regular_matrix(2, 3, 3, f5, MatrixTag::kVandermonde); }) == ErrorCode::kShapeMismatch);
}

TEST_CASE("certificates drop to the largest verified k") {
  auto f5 = make_field(5, 1);
  CHECK(custom_matrix(f5, {{1, 1}, {1, 1}}, 2).certified_k == 1);
  CHECK(custom_matrix(f5, {{0, 1}, {0, 2}}, 2).certified_k == 0);
  CHECK(custom_matrix(f5, {{1, 0, 1}, {0, 1, 1}}, 2).certified_k == 2);
  CHECK(custom_matrix(f5, {{1, 0, 1}, {0, 1, 0}}, 2).certified_k == 1);
  // Beyond the exhaustive limit the certificate is sampled.
  auto big = build_regular_matrix(12, 40, 12, make_field(41, 1), MatrixTag::kVandermonde);
  CHECK(big.sampled);
  CHECK(big.certified_k == 12);
}

TEST_CASE("Vandermonde matrices are m-regular (exhaustive minors)") {
  for (u64 q : {2, 3, 4, 5, 7, 8, 9, 11, 13, 16}) {
    auto f = q == 4 ? make_field(2, 2) : q == 8 ? make_field(2, 3) : q == 9 ? make_field(3, 2)
                    : q == 16 ? make_field(2, 4) : make_field(q, 1);
    for (int n = 1; n < static_cast<int>(q); ++n)
      for (int m = 1; m <= n; ++m) {
        auto v = build_regular_matrix(m, n, m, f, MatrixTag::kVandermonde);
        REQUIRE(v.certified_k == m);
        REQUIRE_FALSE(v.sampled);
      }
  }
  // Independent check of every maximal minor for prime q.
  for (long long q : {5, 7, 11}) {
    auto f = make_field(q, 1);
    for (int n = 2; n < q; ++n)
      for (int m = 1; m <= n; ++m) {
        auto v = build_regular_matrix(m, n, m, f, MatrixTag::kVandermonde);
        std::vector<int> c(m);
        std::iota(c.begin(), c.end(), 0);
        while (true) {
          std::vector<oracle::Vec> sub(m, oracle::Vec(m));
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) sub[i][j] = static_cast<long long>(v.entries[i][c[j]]);
          REQUIRE(oracle::rank_mod_p(sub, q) == m);
          int i = m - 1;
          while (i >= 0 && c[i] == n - m + i) --i;
          if (i < 0) break;
          ++c[i];
          for (int j = i + 1; j < m; ++j) c[j] = c[j - 1] + 1;
        }
      }
  }
  for (u64 q : {32, 37, 49, 61, 64}) {
    auto f = q == 32 ? make_field(2, 5) : q == 49 ? make_field(7, 2) : q == 64 ? make_field(2, 6) : make_field(q, 1);
    const int n = static_cast<int>(q) - 1;
    for (int m : {1, 2, 3, n - 1, n}) {
      auto v = build_regular_matrix(m, n, m, f, MatrixTag::kVandermonde);
      REQUIRE(v.certified_k == m);
    }
  }
}

TEST_CASE("matrix_rank matches the oracle") {
  std::mt19937_64 rng(5);
  for (long long p : {2, 3, 7, 101}) {
    auto f = make_field(p, 1);
    for (int it = 0; it < 200; ++it) {
      int r = 1 + static_cast<int>(uniform_below(rng, 5)), c = 1 + static_cast<int>(uniform_below(rng, 5));
      std::vector<std::vector<u64>> a(r, std::vector<u64>(c));
      for (auto& row : a)
        for (auto& x : row) x = uniform_below(rng, 4) == 0 ? 0 : uniform_below(rng, p);
      CHECK(static_cast<int>(matrix_rank(*f, a)) == oracle::rank_mod_p(to_vecs(a), p));
    }
  }
  CHECK(code_of([] { matrix_rank(*make_field(3, 1), {{1, 2}, {1}}); }) == ErrorCode::kShapeMismatch);
}

TEST_CASE("all_subspaces enumerates each subspace once") {
  for (long long q : {2, 3, 5}) {
    auto f = make_field(q, 1);
    for (int n = 1; n <= 3; ++n)
      for (int k = 0; k <= n; ++k) {
        auto subs = all_subspaces(*f, n, k);
        CHECK(subs.size() == gaussian_binomial(q, n, k));
        std::set<std::set<oracle::Vec>> spans;
        for (auto& b : subs) {
          std::set<oracle::Vec> span;
          for (auto& coeffs : oracle::all_vectors(q, k)) {
            oracle::Vec v(n, 0);
            for (int i = 0; i < k; ++i)
              for (int j = 0; j < n; ++j) v[j] = (v[j] + coeffs[i] * static_cast<long long>(b[i][j])) % q;
            span.insert(v);
          }
          CHECK(span.size() == static_cast<std::size_t>(std::pow(q, k) + 0.5));
          spans.insert(span);
        }
        CHECK(spans.size() == subs.size());
      }
  }
  CHECK(all_subspaces(*make_field(2, 1), 4, 2).size() == 35);
}

TEST_CASE("dkl_map examples") {
  auto f7 = make_field(7, 1);
  auto sq = dkl_map(choose_degrees(1, 1, DegreeStrategy::kDistinctPrimes), custom_matrix(f7, {{1}}, 1));
  CHECK(sq.eval({3}) == std::vector<u64>{2});
  CHECK(sq.map.components()[0].degree() == 2);
  CoprimeDegrees d35{2, 2, {3, 5}, DegreeStrategy::kDistinctPrimes};
  auto e = dkl_map(d35, build_regular_matrix(1, 2, 1, f7, MatrixTag::kAllOnes));
  CHECK(e.eval({2, 3}) == std::vector<u64>{6});
  CHECK(e.map.eval({2, 3}) == std::vector<u64>{6});
  CHECK(e.row_degrees() == std::vector<u64>{5});
  auto id = dkl_map(choose_degrees(3, 2, DegreeStrategy::kDistinctPrimes),
                    build_regular_matrix(3, 3, 3, f7, MatrixTag::kIdentity));
  CHECK(id.map.components()[2] == MultiPoly::monomial(f7, 3, 2, 7));
  CHECK(id.row_degrees() == std::vector<u64>{3, 5, 7});
  CHECK(code_of([&] { dkl_map(d35, build_regular_matrix(3, 3, 3, f7, MatrixTag::kIdentity)); }) ==
        ErrorCode::kDegreeCountMismatch);
}

TEST_CASE("dkl evaluation matches the polynomial map and component degrees") {
  std::mt19937_64 rng(9);
  auto f = make_field(3, 3);
  auto degs = choose_degrees(4, 3, DegreeStrategy::kPrimePowers);
  auto ext = dkl_map(degs, build_regular_matrix(2, 4, 2, f, MatrixTag::kVandermonde));
  for (int i = 0; i < 2; ++i) CHECK(static_cast<u64>(ext.map.components()[i].degree()) == ext.row_degrees()[i]);
  for (int it = 0; it < 500; ++it) {
    std::vector<u64> a(4);
    for (auto& x : a) x = uniform_below(rng, f->q());
    CHECK(ext.eval(a) == ext.map.eval(a));
  }
}

TEST_CASE("fiber_finiteness_check examples") {
  auto f7 = make_field(7, 1);
  auto line = variety(f7, 1, {}, 1, 1);
  auto cube = dkl_map(CoprimeDegrees{1, 1, {3}, DegreeStrategy::kDistinctPrimes}, custom_matrix(f7, {{1}}, 1));
  auto r1 = fiber_finiteness_check(cube, line);
  CHECK(r1.max_fiber_size == 3);
  CHECK(r1.bezout_cap == 3);
  CHECK(r1.pass);
  auto f11 = make_field(11, 1);
  auto parab = variety(f11, 2, {MultiPoly(f11, 2, {Term{1, {0, 1}}, Term{10, {2, 0}}})}, 1, 2);
  auto e = dkl_map(CoprimeDegrees{2, 2, {3, 5}, DegreeStrategy::kDistinctPrimes},
                   build_regular_matrix(1, 2, 1, f11, MatrixTag::kAllOnes));
  auto r2 = fiber_finiteness_check(e, parab);
  CHECK(r2.bezout_cap == 10);
  CHECK(r2.max_fiber_size <= 10);
  CHECK(r2.pass);
  auto pt = variety(f11, 2, {MultiPoly(f11, 2, {Term{1, {1, 0}}, Term{7, {0, 0}}}), MultiPoly::variable(f11, 2, 1)}, 0, 1);
  auto r3 = fiber_finiteness_check(e, pt);
  CHECK(r3.max_fiber_size == 1);
  CHECK(r3.pass);
  auto sampled = fiber_finiteness_check(e, parab, 20, 3);
  CHECK_FALSE(sampled.exact);
  CHECK(sampled.max_fiber_size <= r2.max_fiber_size);
  EnumOptions tiny;
  tiny.budget = 3;
  CHECK(code_of([&] { fiber_finiteness_check(e, parab, 0, 1, tiny); }) == ErrorCode::kBudgetExceeded);
}

TEST_CASE("dkl fibers respect the Bezout cap on the corpus") {
  auto corpus = load_corpus(default_corpus_path());
  for (u64 q : {11, 13, 31}) {
    auto f = make_field(q, 1);
    for (auto& c : corpus) {
      auto v = c.variety(f);
      const int m = std::max(1, *v.declared_dim);
      auto ext = dkl_map(choose_degrees(v.arity, v.bezout_degree(), DegreeStrategy::kDistinctPrimes),
                         build_regular_matrix(m, v.arity, m, f, MatrixTag::kVandermonde));
      auto r = fiber_finiteness_check(ext, v);
      CAPTURE(c.id);
      CHECK(r.pass);
    }
  }
}

TEST_CASE("build_seeded_family examples") {
  auto f5 = make_field(5, 1);
  auto fam = build_seeded_family(2, 1, f5, 3);
  REQUIRE(fam.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(fam.matrix(i) == std::vector<std::vector<u64>>{{1, i + 1}});
  auto f7 = make_field(7, 1);
  auto fam2 = build_seeded_family(3, 2, f7, 4);
  CHECK(fam2.omega == 2);  // 2 has order 3 in F_7
  for (std::size_t i = 0; i < 4; ++i) {
    const u64 s = fam2.seeds[i], ws = f7->mul(fam2.omega, s);
    CHECK(fam2.matrix(i) == std::vector<std::vector<u64>>{{1, s, f7->mul(s, s)}, {1, ws, f7->mul(ws, ws)}});
  }
  CHECK(code_of([&] { build_seeded_family(2, 1, f5, 6); }) == ErrorCode::kFieldTooSmall);
  CHECK(code_of([&] { build_seeded_family(2, 0, f5, 2); }) == ErrorCode::kShapeMismatch);
  CHECK(code_of([&] { build_seeded_family(6, 1, f5, 2); }) == ErrorCode::kFieldTooSmall);
}

TEST_CASE("omega is the first element of large enough order") {
  for (u64 q : {5, 7, 8, 9, 13, 16, 101}) {
    auto f = q == 8 ? make_field(2, 3) : q == 9 ? make_field(3, 2) : q == 16 ? make_field(2, 4) : make_field(q, 1);
    for (int n = 1; n < static_cast<int>(std::min<u64>(q, 12)); ++n) {
      auto fam = build_seeded_family(n, 1, f, 1);
      CHECK(f->order(fam.omega) >= static_cast<u64>(n));
      for (u64 w = 1; w < fam.omega; ++w) CHECK(f->order(w) < static_cast<u64>(n));
    }
  }
}

TEST_CASE("subspace_rank_survey examples") {
  auto f5 = make_field(5, 1);
  auto fam = build_seeded_family(2, 1, f5, 4);
  auto full = subspace_rank_survey(fam, {{1, 0}, {0, 1}});
  CHECK(full.fail_count == 0);
  CHECK(full.pass);
  const u64 s1 = fam.seeds[0];
  auto kern = subspace_rank_survey(fam, {{1, f5->neg(s1)}});
  CHECK(kern.fail_count == 1);
  CHECK(kern.per_seed[0] == 0);
  CHECK(kern.fail_fraction == doctest::Approx(0.25));
  CHECK(kern.bound == doctest::Approx(0.25));
  CHECK(kern.pass);
  auto f101 = make_field(101, 1);
  auto fam4 = build_seeded_family(4, 2, f101, 64);
  std::mt19937_64 rng(11);
  for (int it = 0; it < 20; ++it) {
    std::vector<std::vector<u64>> b(2, std::vector<u64>(4));
    for (auto& r : b)
      for (auto& x : r) x = uniform_below(rng, 101);
    if (matrix_rank(*f101, b) < 2) continue;
    auto s = subspace_rank_survey(fam4, b, 4);
    CHECK(s.fail_count <= 4);
    CHECK(s.pass);
  }
  CHECK(code_of([&] { subspace_rank_survey(fam, {{1, 2}, {2, 4}}); }) == ErrorCode::kRankDeficientInput);
  CHECK(code_of([&] { subspace_rank_survey(fam, {{1, 2, 3}}); }) == ErrorCode::kShapeMismatch);
}

TEST_CASE("seeded failures stay within m(n-m) on every small subspace") {
  for (u64 q : {4, 5, 7, 8}) {
    auto f = q == 4 ? make_field(2, 2) : q == 8 ? make_field(2, 3) : make_field(q, 1);
    for (int k = 1; k <= 2; ++k)
      for (int m = 1; m <= k; ++m) {
        auto fam = build_seeded_family(3, m, f, q - 1);
        for (auto& b : all_subspaces(*f, 3, k)) {
          auto s = subspace_rank_survey(fam, b);
          REQUIRE(s.pass);
          if (f->is_prime_field()) {
            for (std::size_t i = 0; i < fam.size(); ++i) {
              std::vector<std::vector<u64>> img;
              for (auto& v : b) img.push_back(fam.apply(i, v));
              REQUIRE(oracle::rank_mod_p(to_vecs(img), static_cast<long long>(q)) == s.per_seed[i]);
            }
          }
        }
      }
  }
}

TEST_CASE("variety_rank_survey examples") {
  auto f7 = make_field(7, 1);
  auto axis = variety(f7, 3, {MultiPoly::variable(f7, 3, 1), MultiPoly::variable(f7, 3, 2)}, 1, 1);
  auto fam = build_seeded_family(3, 1, f7, 6);
  auto r = variety_rank_survey(fam, axis, 2);
  CHECK(r.heuristic);
  CHECK(r.fail_count == 0);
  for (int d : r.per_seed) CHECK(d == 1);
  auto f11 = make_field(11, 1);
  auto parab = variety(f11, 2, {MultiPoly(f11, 2, {Term{1, {0, 1}}, Term{10, {2, 0}}})}, 1, 2);
  auto famp = build_seeded_family(2, 1, f11, 8);
  auto rp = variety_rank_survey(famp, parab, 3);
  CHECK(rp.fail_fraction <= 1.0 / 8);
  CHECK(rp.pass);
  auto pt = variety(f11, 2, {MultiPoly::variable(f11, 2, 0), MultiPoly::variable(f11, 2, 1)}, 0, 1);
  auto rz = variety_rank_survey(famp, pt, 2);
  for (int d : rz.per_seed) CHECK(d == 0);
  CHECK(rz.fail_count == 0);
  CHECK(code_of([&] { variety_rank_survey(fam, parab, 2); }) == ErrorCode::kArityMismatch);
}

TEST_CASE("json round trips replay exactly") {
  auto f = make_field(3, 2);
  auto ext = dkl_map(choose_degrees(3, 4, DegreeStrategy::kPrimePowers),
                     build_regular_matrix(2, 3, 2, f, MatrixTag::kVandermonde));
  auto back = DklExtractor::from_json(nlohmann::json::parse(ext.to_json().dump()));
  CHECK(back.matrix.entries == ext.matrix.entries);
  CHECK(back.degrees.degrees == ext.degrees.degrees);
  for (u64 a = 0; a < 9; ++a) CHECK(back.eval({a, 1, 2}) == ext.eval({a, 1, 2}));
  auto fam = build_seeded_family(3, 2, f, 5);
  auto fb = SeededRankFamily::from_json(fam.to_json());
  CHECK(fb.omega == fam.omega);
  CHECK(fb.seeds == fam.seeds);
  auto j = fam.to_json();
  j["omega"] = 7;
  CHECK(code_of([&] { SeededRankFamily::from_json(j); }) == ErrorCode::kConfigError);
  auto jd = ext.degrees.to_json();
  jd["degrees"] = std::vector<u64>{5, 3, 7};
  CHECK(code_of([&] { CoprimeDegrees::from_json(jd); }) == ErrorCode::kConfigError);
  auto jm = ext.matrix.to_json();
  jm["entries"][0][0] = 9;
  CHECK(code_of([&] { RegularMatrix::from_json(jm); }) == ErrorCode::kOutOfRange);
}
