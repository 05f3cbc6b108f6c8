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

#include <random>

#include "algext/group_fourier.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace algext;

namespace {

bool ratio_is(const Ratio& r, u64 num, u64 den) {
  Ratio want = ratio_reduce({num, den});
  return r.num == want.num && r.den == want.den;
}

FiniteDistribution random_distribution(const Carrier& c, std::mt19937_64& rng, int max_count = 9) {
  std::vector<std::pair<u64, u64>> v;
  const u64 support = 1 + uniform_below(rng, c.cardinality());
  for (u64 i = 0; i < support; ++i)
    v.emplace_back(uniform_below(rng, c.cardinality()), 1 + uniform_below(rng, max_count));
  return FiniteDistribution(c, v);
}

// Points of F_p^n where each linear form takes the matching rhs value.
std::vector<u64> affine_points(const Carrier& c, const std::vector<std::vector<u64>>& forms,
                               const std::vector<u64>& rhs) {
  const auto& f = *c.field();
  std::vector<u64> pts;
  for (u64 x = 0; x < c.cardinality(); ++x) {
    auto v = c.decode(x);
    bool ok = true;
    for (std::size_t r = 0; r < forms.size() && ok; ++r) {
      u64 acc = 0;
      for (int i = 0; i < c.dim(); ++i) acc = f.add(acc, f.mul(forms[r][i], v[i]));
      ok = acc == rhs[r];
    }
    if (ok) pts.push_back(x);
  }
  return pts;
}

}  // namespace

TEST_CASE("carrier indexing is lexicographic and invertible") {
  auto c = Carrier::field_power(make_field(3, 1), 2);
  CHECK(c.cardinality() == 9);
  CHECK(c.decode(5) == std::vector<u64>{1, 2});
  for (u64 i = 0; i < 9; ++i) CHECK(c.encode(c.decode(i)) == i);
  auto z = Carrier::residue_power(10, 3);
  CHECK(z.cardinality() == 1000);
  CHECK(z.add(z.encode({9, 9, 9}), z.encode({1, 2, 3})) == z.encode({0, 1, 2}));
  CHECK_THROWS_AS(Carrier::field_power(make_field(2, 32), 3), Error);
}

TEST_CASE("statistical distance examples") {
  auto c = Carrier::residue_power(10, 1);
  auto u = FiniteDistribution::uniform(c);
  CHECK(ratio_is(statistical_distance(u, u), 0, 1));
  CHECK(ratio_is(statistical_distance(FiniteDistribution::point_mass(c, 4), u), 9, 10));
  auto partial = FiniteDistribution::uniform_over(c, {0, 1, 2, 3, 4, 5, 6});
  CHECK(ratio_is(statistical_distance(u, partial), 3, 10));
  CHECK(ratio_is(distance_to_uniform(partial), 3, 10));
  auto other = Carrier::residue_power(5, 2);
  CHECK_THROWS_AS(statistical_distance(u, FiniteDistribution::uniform(other)), Error);
  try {
    statistical_distance(u, FiniteDistribution::uniform(other));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kCarrierMismatch);
  }
}

TEST_CASE("min-entropy examples") {
  auto c = Carrier::residue_power(8, 1);
  CHECK(min_entropy(FiniteDistribution::uniform(c)).bits == doctest::Approx(3.0));
  CHECK(min_entropy(FiniteDistribution::point_mass(c, 3)).bits == 0.0);
  FiniteDistribution d(Carrier::residue_power(3, 1), {{0, 2}, {1, 1}, {2, 1}});
  auto h = min_entropy(d);
  CHECK(h.bits == doctest::Approx(1.0));
  CHECK(ratio_is(h.max_weight, 1, 2));
  CHECK_THROWS_AS(FiniteDistribution(c, {}), Error);
}

TEST_CASE("bias spectrum examples") {
  auto f5 = Carrier::field_power(make_field(5, 1), 1);
  auto s = bias_spectrum(FiniteDistribution::uniform(f5));
  CHECK(s.entries[0] == std::complex<double>(1.0, 0.0));
  for (u64 a = 1; a < 5; ++a) CHECK(std::abs(s.entries[a]) < 1e-9);

  auto f2 = Carrier::field_power(make_field(2, 1), 4);
  auto pm = bias_spectrum(FiniteDistribution::point_mass(f2, 0));
  for (auto& e : pm.entries) CHECK(std::abs(e - 1.0) < 1e-15);

  // H = {x : x_0 = 0} in F_2^3, size 4; annihilator = {000, 100}.
  auto c3 = Carrier::field_power(make_field(2, 1), 3);
  auto h = FiniteDistribution::uniform_over(c3, affine_points(c3, {{1, 0, 0}}, {0}));
  auto sh = bias_spectrum(h);
  int ones = 0, zeros = 0;
  for (auto& e : sh.entries) {
    if (std::abs(e - 1.0) < 1e-12) ++ones;
    if (std::abs(e) < 1e-12) ++zeros;
  }
  CHECK(ones == 2);
  CHECK(zeros == 6);
  CHECK(std::abs(sh.entries[c3.encode({1, 0, 0})] - 1.0) < 1e-12);

  FourierOptions tight;
  tight.budget = 10;
  CHECK_THROWS_AS(bias_spectrum(h, tight), Error);
}

TEST_CASE("classify_bias examples") {
  auto c = Carrier::field_power(make_field(2, 1), 4);
  auto cls = classify_bias(bias_spectrum(FiniteDistribution::uniform(c)), 0.01);
  CHECK(cls.e_count == 0);
  CHECK(cls.strongly);
  CHECK(cls.witness_subgroup_size == 1);

  // Codim 2 affine subspace of F_3^3 at epsilon 0: witness 3^2.
  auto c3 = Carrier::field_power(make_field(3, 1), 3);
  auto pts = affine_points(c3, {{1, 1, 0}, {0, 2, 1}}, {2, 1});
  REQUIRE(pts.size() == 3);
  auto a = classify_bias(bias_spectrum(FiniteDistribution::uniform_over(c3, pts)), 0.0);
  CHECK(a.witness_subgroup_size == 9);
  CHECK(a.e_count == 8);
  CHECK(a.strongly);

  auto f3 = Carrier::field_power(make_field(3, 1), 1);
  auto b = classify_bias(bias_spectrum(FiniteDistribution::uniform_over(f3, {0, 1})), 0.1);
  CHECK(b.e_count == 2);
  auto sp = bias_spectrum(FiniteDistribution::uniform_over(f3, {0, 1}));
  CHECK(std::abs(sp.entries[1]) == doctest::Approx(0.5));
  CHECK(b.witness_subgroup_size == 3);
}

TEST_CASE("classify_bias: closure of the violator set") {
  auto c = Carrier::residue_power(4, 1);
  // Mass 1/3 on {0, 1, 2}: every nontrivial character has bias 1/3.
  auto all = classify_bias(bias_spectrum(FiniteDistribution(c, {{0, 1}, {1, 1}, {2, 1}})), 0.2);
  CHECK(all.e_count == 3);
  CHECK(all.witness_subgroup_size == 4);
  CHECK(all.strongly);
  // Mass (3/4, 1/4) on {0, 2}: chi_2 has bias 1, chi_1 and chi_3 bias 1/2.
  auto sub = classify_bias(bias_spectrum(FiniteDistribution(c, {{0, 3}, {2, 1}})), 0.6);
  CHECK(sub.e_count == 1);
  CHECK(sub.witness_subgroup_size == 2);
  CHECK(sub.strongly);
  // Mass (1/2, 1/4, 1/4) on {0, 1, 3}: chi_1 = chi_3 = 1/2, chi_2 = 0.
  // {0, 1, 3} is not closed, the generated subgroup is all of Z_4.
  auto open = classify_bias(bias_spectrum(FiniteDistribution(c, {{0, 2}, {1, 1}, {3, 1}})), 0.25);
  CHECK(open.e_count == 2);
  CHECK(open.witness_subgroup_size == 4);
  CHECK_FALSE(open.strongly);
}

TEST_CASE("xor_distance_check examples") {
  auto c = Carrier::field_power(make_field(2, 1), 2);
  auto u = xor_distance_check(FiniteDistribution::uniform(c));
  CHECK(u.max_bias < 1e-12);
  CHECK(u.measured_distance == 0.0);
  CHECK(u.holds);
  auto pm = xor_distance_check(FiniteDistribution::point_mass(c, 0));
  CHECK(pm.bound == doctest::Approx(2.0));
  CHECK(pm.measured_distance == doctest::Approx(0.75));
  CHECK(pm.holds);
  auto c3 = Carrier::field_power(make_field(2, 1), 3);
  auto h = xor_distance_check(FiniteDistribution::uniform_over(c3, affine_points(c3, {{1, 1, 0}}, {0})));
  CHECK(h.max_bias == doctest::Approx(1.0));
  CHECK(h.measured_distance == doctest::Approx(0.5));
  CHECK(h.bound == doctest::Approx(std::sqrt(8.0)));
  CHECK(h.holds);
}

TEST_CASE("entropy_bound_check examples") {
  auto c = Carrier::field_power(make_field(2, 1), 4);
  // Uniform on 2^4 with tiny epsilon: k = 4 - log(2/eps').
  auto u = entropy_bound_check(FiniteDistribution::uniform(c), 1e-6, 1, 0.5);
  CHECK(u.k == doctest::Approx(2.0));
  CHECK(u.close);
  CHECK(u.trimmed == 0.0);
  auto pm = entropy_bound_check(FiniteDistribution::point_mass(c, 0), 1.0, 16, 0.5);
  CHECK(pm.k <= 0);
  CHECK(pm.close);
  // Uniform on half of F_2^4: eight atoms of mass 1/8. At k = 4 each atom
  // carries 1/8 - 1/16 of excess, total 1/2; at k = 3 nothing is trimmed.
  std::vector<u64> half;
  for (u64 x = 0; x < 16; ++x)
    if ((x & 1U) == 0) half.push_back(x);
  auto h = FiniteDistribution::uniform_over(c, half);
  CHECK(trimmed_mass(h, 4.0) == doctest::Approx(0.5));
  CHECK(trimmed_mass(h, 3.0) == 0.0);
  CHECK(trimmed_mass(h, 3.5) == doctest::Approx(1.0 - 8 * std::exp2(-3.5)));
}

TEST_CASE("spectrum matches the naive transform") {
  std::mt19937_64 rng(11);
  // Prime field powers and residue groups.
  for (auto [p, n] : std::vector<std::pair<u64, int>>{{2, 5}, {3, 3}, {5, 2}, {7, 2}}) {
    auto c = Carrier::field_power(make_field(p, 1), n);
    auto d = random_distribution(c, rng);
    auto s = bias_spectrum(d);
    std::vector<std::pair<oracle::Vec, double>> dist;
    for (auto& [x, cnt] : d.counts()) {
      oracle::Vec v;
      for (u64 t : c.decode(x)) v.push_back(static_cast<long long>(t));
      dist.emplace_back(v, static_cast<double>(cnt) / static_cast<double>(d.total()));
    }
    auto alphas = oracle::all_vectors(static_cast<long long>(p), n);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      const auto& a = alphas[i];
      auto want = oracle::fourier_coeff(dist, static_cast<long long>(p), [&](const oracle::Vec& x) {
        long long acc = 0;
        for (int k = 0; k < n; ++k) acc += a[k] * x[k];
        return acc;
      });
      REQUIRE(std::abs(s.entries[i] - want) < 1e-9);
    }
  }
  for (auto [N, t] : std::vector<std::pair<u64, int>>{{4, 3}, {6, 2}, {10, 2}, {5000, 1}}) {
    auto c = Carrier::residue_power(N, t);
    auto d = random_distribution(c, rng);
    auto s = bias_spectrum(d);
    std::vector<std::pair<oracle::Vec, double>> dist;
    for (auto& [x, cnt] : d.counts()) {
      oracle::Vec v;
      for (u64 u : c.decode(x)) v.push_back(static_cast<long long>(u));
      dist.emplace_back(v, static_cast<double>(cnt) / static_cast<double>(d.total()));
    }
    auto alphas = oracle::all_vectors(static_cast<long long>(N), t);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      const auto& a = alphas[i];
      auto want = oracle::fourier_coeff(dist, static_cast<long long>(N), [&](const oracle::Vec& x) {
        long long acc = 0;
        for (int k = 0; k < t; ++k) acc += a[k] * x[k];
        return acc;
      });
      REQUIRE(std::abs(s.entries[i] - want) < 1e-9);
    }
  }
  // Extension field: characters through the reference trace.
  auto f = make_field(2, 2);
  oracle::Gf g{2, 2, {1, 1, 1}};
  auto c = Carrier::field_power(f, 2);
  auto d = random_distribution(c, rng);
  auto s = bias_spectrum(d);
  for (u64 alpha = 0; alpha < c.cardinality(); ++alpha) {
    auto a = c.decode(alpha);
    std::vector<std::pair<u64, double>> dist;
    for (auto& [x, cnt] : d.counts()) dist.emplace_back(x, static_cast<double>(cnt) / d.total());
    auto want = oracle::fourier_coeff(dist, 2, [&](u64 x) {
      auto v = c.decode(x);
      long long acc = 0;
      for (int k = 0; k < 2; ++k)
        acc += g.trace(g.mul(g.unpack(static_cast<long long>(a[k])), g.unpack(static_cast<long long>(v[k]))));
      return acc;
    });
    REQUIRE(std::abs(s.entries[alpha] - want) < 1e-9);
  }
}

TEST_CASE("spectrum invariants: trivial entry, magnitude, Parseval") {
  std::mt19937_64 rng(5);
  std::vector<Carrier> carriers = {Carrier::field_power(make_field(2, 1), 8),
                                   Carrier::field_power(make_field(3, 2), 2),
                                   Carrier::field_power(make_field(2, 3), 2),
                                   Carrier::residue_power(12, 2), Carrier::residue_power(7, 3)};
  for (const auto& c : carriers) {
    for (int it = 0; it < 5; ++it) {
      auto d = random_distribution(c, rng, 50);
      auto s = bias_spectrum(d);
      CHECK(s.entries[0] == std::complex<double>(1.0, 0.0));
      double energy = 0;
      for (auto& e : s.entries) {
        REQUIRE(std::abs(e) <= 1 + 1e-9);
        energy += std::norm(e);
      }
      double coll = 0;
      for (auto& pc : d.counts()) {
        double w = static_cast<double>(pc.second) / d.total();
        coll += w * w;
      }
      CHECK(std::abs(energy - static_cast<double>(c.cardinality()) * coll) < 1e-7);
    }
  }
}

TEST_CASE("parallel spectrum equals the serial one") {
  std::mt19937_64 rng(9);
  auto c = Carrier::field_power(make_field(3, 1), 5);
  auto d = random_distribution(c, rng);
  FourierOptions par;
  par.shards = 4;
  auto a = bias_spectrum(d), b = bias_spectrum(d, par);
  CHECK(a.entries == b.entries);
}

TEST_CASE("distance is symmetric and satisfies the triangle inequality") {
  std::mt19937_64 rng(1);
  auto c = Carrier::residue_power(6, 3);
  for (int it = 0; it < 200; ++it) {
    auto a = random_distribution(c, rng), b = random_distribution(c, rng), e = random_distribution(c, rng);
    Ratio ab = statistical_distance(a, b), ba = statistical_distance(b, a);
    REQUIRE(ab.num == ba.num);
    REQUIRE(ab.den == ba.den);
    double lhs = statistical_distance(a, e).value();
    REQUIRE(lhs <= ab.value() + statistical_distance(b, e).value() + 1e-15);
    REQUIRE(ab.value() <= 1.0);
  }
}

TEST_CASE("spectrum of a projection composes characters") {
  std::mt19937_64 rng(2);
  auto f = make_field(3, 1);
  auto big = Carrier::field_power(f, 4);
  auto small = Carrier::field_power(f, 2);
  for (int it = 0; it < 5; ++it) {
    auto d = random_distribution(big, rng);
    // Projection onto coordinates (0, 2).
    auto proj = [&](u64 x) {
      auto v = big.decode(x);
      return small.encode({v[0], v[2]});
    };
    auto image = d.push_forward(small, proj);
    auto si = bias_spectrum(image), sd = bias_spectrum(d);
    for (u64 psi = 0; psi < small.cardinality(); ++psi) {
      auto w = small.decode(psi);
      u64 lifted = big.encode({w[0], 0, w[1], 0});
      REQUIRE(std::abs(si.entries[psi] - sd.entries[lifted]) < 1e-9);
    }
  }
}

TEST_CASE("XOR lemma holds on random distributions") {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 50; ++it) {
    auto c = it % 2 ? Carrier::field_power(make_field(2, 1), 6) : Carrier::residue_power(9, 2);
    auto x = xor_distance_check(random_distribution(c, rng));
    REQUIRE(x.holds);
  }
}

TEST_CASE("sampled mode: labeled, debiased, floor reported") {
  std::mt19937_64 rng(4);
  auto c = Carrier::residue_power(64, 1);
  auto u = FiniteDistribution::uniform(c);
  auto s = FiniteDistribution::sample(u, 20000, rng);
  CHECK(s.mode() == FiniteDistribution::Mode::kSampled);
  CHECK(s.total() == 20000);
  auto est = estimate_distance_to_uniform(s);
  CHECK_FALSE(est.exact);
  CHECK(est.floor == doctest::Approx(0.5 * std::sqrt(64.0 / 20000)));
  CHECK(std::abs(est.value) <= est.floor);
  auto sp = bias_spectrum(s);
  CHECK(sp.sampled);
  CHECK(sp.n_samples == 20000);
  std::mt19937_64 again(4);
  auto s2 = FiniteDistribution::sample(u, 20000, again);
  CHECK(s2.counts() == s.counts());
}

TEST_CASE("distribution json round trip and spectrum csv") {
  auto c = Carrier::field_power(make_field(2, 2), 2);
  FiniteDistribution d(c, {{3, 2}, {7, 5}, {15, 1}});
  auto back = FiniteDistribution::from_json(nlohmann::json::parse(d.to_json().dump()));
  CHECK(back.carrier() == c);
  CHECK(back.counts() == d.counts());
  std::mt19937_64 rng(0);
  auto s = FiniteDistribution::sample(d, 100, rng);
  auto sback = FiniteDistribution::from_json(s.to_json());
  CHECK(sback.mode() == FiniteDistribution::Mode::kSampled);
  CHECK(sback.counts() == s.counts());
  auto csv = bias_spectrum(d).to_csv();
  CHECK(csv.rfind("character_index,real,imag,abs\n0,1,0,1\n", 0) == 0);
  CHECK_THROWS_AS(FiniteDistribution::from_json(nlohmann::json::parse("{\"carrier\":{}}")), Error);
}
