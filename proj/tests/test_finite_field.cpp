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
#include <set>

#include "algext/finite_field.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace algext;

namespace {

std::vector<Field> small_fields() {
  std::vector<Field> out;
  for (u64 p : {2, 3, 5, 7, 11, 13, 31, 61}) out.push_back(make_field(p, 1));
  for (int m = 2; m <= 6; ++m) out.push_back(make_field(2, m));
  out.push_back(make_field(3, 2));
  out.push_back(make_field(3, 3));
  out.push_back(make_field(5, 2));
  out.push_back(make_field(7, 2));
  return out;
}

oracle::Gf as_oracle(const FieldCtx& f) {
  oracle::Gf g{static_cast<long long>(f.p()), f.m(), {}};
  for (u64 c : f.modulus()) g.modulus.push_back(static_cast<long long>(c));
  return g;
}

}  // namespace

TEST_CASE("make_field picks the expected moduli") {
  auto f5 = make_field(5, 1);
  CHECK(f5->q() == 5);
  auto f4 = make_field(2, 2);
  CHECK(f4->modulus() == std::vector<u64>{1, 1, 1});
  CHECK(f4->token() == "2^2/1,1,1");
  CHECK_THROWS_AS(make_field(4, 1), Error);
  try {
    make_field(4, 1);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonPrime);
  }
}

TEST_CASE("default modulus is the smallest irreducible in enumeration order") {
  for (auto [p, m] : std::vector<std::pair<u64, int>>{{2, 2}, {2, 3}, {2, 4}, {2, 5}, {2, 6},
                                                     {3, 2}, {3, 3}, {3, 4}, {5, 2}, {5, 3}, {7, 2}}) {
    auto f = make_field(p, m);
    long long count = 1;
    for (int i = 0; i < m; ++i) count *= static_cast<long long>(p);
    oracle::Vec expected;
    for (long long k = 0; k < count; ++k) {
      oracle::Vec g(m + 1, 0);
      long long t = k;
      for (int i = 0; i < m; ++i) {
        g[i] = t % static_cast<long long>(p);
        t /= static_cast<long long>(p);
      }
      g[m] = 1;
      if (!oracle::reducible(g, static_cast<long long>(p))) {
        expected = g;
        break;
      }
    }
    std::vector<u64> got = f->modulus();
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(static_cast<long long>(got[i]) == expected[i]);
  }
}

TEST_CASE("irreducibility test agrees with trial division") {
  for (u64 p : {2, 3, 5}) {
    for (int m = 2; m <= 4; ++m) {
      long long count = 1;
      for (int i = 0; i < m; ++i) count *= static_cast<long long>(p);
      for (long long k = 0; k < count; ++k) {
        std::vector<u64> f(m + 1, 0);
        oracle::Vec g(m + 1, 0);
        long long t = k;
        for (int i = 0; i < m; ++i) {
          f[i] = static_cast<u64>(t % static_cast<long long>(p));
          g[i] = static_cast<long long>(f[i]);
          t /= static_cast<long long>(p);
        }
        f[m] = 1;
        g[m] = 1;
        CHECK(is_irreducible_mod_p(f, p) == !oracle::reducible(g, static_cast<long long>(p)));
      }
    }
  }
}

TEST_CASE("modulus and cardinality errors") {
  auto code_of = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  CHECK(code_of([] { make_field(2, 2, std::vector<u64>{1, 0, 1}); }) == ErrorCode::kReducibleModulus);
  CHECK(code_of([] { make_field(2, 64); }) == ErrorCode::kCardinalityOverflow);
  CHECK(code_of([] { make_field(3, 41); }) == ErrorCode::kCardinalityOverflow);
  CHECK_NOTHROW(make_field(2, 63));
  auto f4 = make_field(2, 2);
  auto f5 = make_field(5, 1);
  CHECK(code_of([&] { (void)f5->elem(0).inv(); }) == ErrorCode::kDivisionByZero);
  CHECK(code_of([&] { (void)(f4->elem(1) + f5->elem(1)); }) == ErrorCode::kCtxMismatch);
  CHECK(code_of([&] { (void)f5->order(0); }) == ErrorCode::kZeroElement);
}

TEST_CASE("arithmetic examples") {
  auto f5 = make_field(5, 1);
  CHECK((f5->elem(2) + f5->elem(4)).v == 1);
  CHECK(f5->elem(3).inv().v == 2);
  auto f4 = make_field(2, 2);
  auto x = f4->elem(2);
  CHECK((x * x).v == 3);  // X + 1
  CHECK(f5->elem(0).pow(0).v == 1);
  CHECK(f5->elem(3).pow(0).v == 1);
}

TEST_CASE("trace examples") {
  auto f4 = make_field(2, 2);
  CHECK(f4->trace(0) == 0);
  CHECK(f4->trace(1) == 0);
  CHECK(f4->trace(2) == 1);
}

TEST_CASE("multiplicative order examples") {
  auto f5 = make_field(5, 1);
  CHECK(f5->order(1) == 1);
  CHECK(f5->order(2) == 4);
  auto f4 = make_field(2, 2);
  CHECK(f4->order(2) == 3);
}

TEST_CASE("enumeration order and length") {
  auto f2 = make_field(2, 1);
  auto e2 = enumerate_field(*f2);
  REQUIRE(e2.size() == 2);
  CHECK(e2[0].v == 0);
  CHECK(e2[1].v == 1);
  auto f4 = make_field(2, 2);
  auto e4 = enumerate_field(*f4);
  REQUIRE(e4.size() == 4);
  CHECK(f4->element_str(e4[2].v) == "X");
  CHECK(f4->element_str(e4[3].v) == "X+1");
  CHECK(enumerate_field(*make_field(3, 2)).size() == 9);
}

TEST_CASE("arithmetic matches the reference field exhaustively for q <= 64") {
  for (const auto& f : small_fields()) {
    auto g = as_oracle(*f);
    const u64 q = f->q();
    CAPTURE(f->token());
    for (u64 a = 0; a < q; ++a) {
      auto va = g.unpack(static_cast<long long>(a));
      for (u64 b = 0; b < q; ++b) {
        auto vb = g.unpack(static_cast<long long>(b));
        REQUIRE(f->add(a, b) == static_cast<u64>(g.pack(g.add(va, vb))));
        REQUIRE(f->mul(a, b) == static_cast<u64>(g.pack(g.mul(va, vb))));
        REQUIRE(f->add(f->sub(a, b), b) == a);
      }
      if (a != 0) REQUIRE(f->mul(a, f->inv(a)) == 1);
    }
  }
}

TEST_CASE("field axioms hold on all triples for q <= 64") {
  for (const auto& f : small_fields()) {
    const u64 q = f->q();
    CAPTURE(f->token());
    for (u64 a = 0; a < q; ++a)
      for (u64 b = 0; b < q; ++b) {
        REQUIRE(f->mul(a, b) == f->mul(b, a));
        REQUIRE(f->add(a, b) == f->add(b, a));
        for (u64 c = 0; c < q; ++c) {
          REQUIRE(f->mul(f->mul(a, b), c) == f->mul(a, f->mul(b, c)));
          REQUIRE(f->add(f->add(a, b), c) == f->add(a, f->add(b, c)));
          REQUIRE(f->mul(a, f->add(b, c)) == f->add(f->mul(a, b), f->mul(a, c)));
        }
      }
  }
}

TEST_CASE("trace is linear and matches its definition for q <= 64") {
  for (const auto& f : small_fields()) {
    auto g = as_oracle(*f);
    const u64 q = f->q(), p = f->p();
    for (u64 x = 0; x < q; ++x) {
      REQUIRE(f->trace(x) == static_cast<u64>(g.trace(g.unpack(static_cast<long long>(x)))));
    }
    for (u64 x = 0; x < q; ++x)
      for (u64 y = 0; y < q; ++y)
        for (u64 a = 0; a < p; ++a)
          for (u64 b = 0; b < p; b += (p > 5 ? p / 3 : 1)) {
            u64 lhs = f->trace(f->add(f->scalar_mul(a, x), f->scalar_mul(b, y)));
            u64 rhs = (a * f->trace(x) + b * f->trace(y)) % p;
            REQUIRE(lhs == rhs);
          }
  }
}

TEST_CASE("Frobenius is additive for q <= 64") {
  for (const auto& f : small_fields()) {
    const u64 q = f->q(), p = f->p();
    for (u64 x = 0; x < q; ++x)
      for (u64 y = 0; y < q; ++y) REQUIRE(f->pow(f->add(x, y), p) == f->add(f->pow(x, p), f->pow(y, p)));
  }
}

TEST_CASE("orders agree with repeated multiplication") {
  for (const auto& f : small_fields()) {
    auto g = as_oracle(*f);
    for (u64 x = 1; x < f->q(); ++x) {
      REQUIRE(f->order(x) == static_cast<u64>(g.order(g.unpack(static_cast<long long>(x)))));
    }
  }
}

TEST_CASE("characters: trivial, definition, orthogonality") {
  auto f5 = make_field(5, 1);
  for (u64 x = 0; x < 5; ++x) CHECK(std::abs(f5->character(0, x) - 1.0) < 1e-15);
  const double pi = std::acos(-1.0);
  CHECK(std::abs(f5->character(1, 1) - std::polar(1.0, 2 * pi / 5)) < 1e-12);
  std::complex<double> s = 0;
  for (u64 x = 0; x < 5; ++x) s += f5->character(2, x);
  CHECK(std::abs(s) < 1e-12);

  for (auto f : {make_field(2, 10), make_field(1021, 1), make_field(3, 6), make_field(5, 4),
                 make_field(31, 2)}) {
    const u64 q = f->q();
    CAPTURE(f->token());
    for (u64 a = 1; a < q; ++a) {
      std::complex<double> acc = 0;
      for (u64 x = 0; x < q; ++x) acc += f->character(a, x);
      REQUIRE(std::abs(acc) <= 1e-9 * static_cast<double>(q));
    }
  }
}

TEST_CASE("character map is additive and alpha to chi_alpha is injective") {
  auto f = make_field(3, 3);
  const u64 q = f->q();
  std::set<std::vector<u64>> seen;
  for (u64 a = 0; a < q; ++a) {
    std::vector<u64> row;
    for (u64 x = 0; x < q; ++x) {
      for (u64 y = 0; y < q; y += 5) {
        auto lhs = f->character(a, f->add(x, y));
        auto rhs = f->character(a, x) * f->character(a, y);
        REQUIRE(std::abs(lhs - rhs) < 1e-12);
      }
      row.push_back(f->trace(f->mul(a, x)));
    }
    seen.insert(row);
  }
  CHECK(seen.size() == q);
}

TEST_CASE("randomized arithmetic in large fields") {
  std::mt19937_64 rng(7);
  for (auto f : {make_field(2, 40), make_field(2, 63), make_field(1000000007ULL, 2),
                 make_field(2305843009213693951ULL, 1), make_field(18446744073709551557ULL, 1),
                 make_field(3, 40)}) {
    CAPTURE(f->token());
    std::uniform_int_distribution<u64> pick(0, f->q() - 1);
    for (int it = 0; it < 300; ++it) {
      u64 a = pick(rng), b = pick(rng), c = pick(rng);
      REQUIRE(f->mul(a, f->add(b, c)) == f->add(f->mul(a, b), f->mul(a, c)));
      REQUIRE(f->mul(f->mul(a, b), c) == f->mul(a, f->mul(b, c)));
      if (a != 0) REQUIRE(f->mul(a, f->inv(a)) == 1);
      REQUIRE(f->pow(a, f->q() - 1) == (a == 0 ? 0 : 1));
      REQUIRE(f->trace(f->add(a, b)) == static_cast<u64>((static_cast<u128>(f->trace(a)) + f->trace(b)) % f->p()));
    }
  }
}

TEST_CASE("primality and factorization") {
  for (long long n = 0; n < 20000; ++n) REQUIRE(is_prime_u64(static_cast<u64>(n)) == oracle::is_prime(n));
  CHECK(is_prime_u64(2305843009213693951ULL));
  CHECK(is_prime_u64(18446744073709551557ULL));
  CHECK_FALSE(is_prime_u64(3215031751ULL));           // strong pseudoprime to bases 2,3,5,7
  CHECK_FALSE(is_prime_u64(3825123056546413051ULL));  // strong pseudoprime to bases up to 23
  std::mt19937_64 rng(3);
  for (int it = 0; it < 200; ++it) {
    u64 n = rng() | 1U;
    u64 prod = 1;
    for (auto& [p, e] : factor_u64(n)) {
      REQUIRE(is_prime_u64(p));
      for (int i = 0; i < e; ++i) prod *= p;
    }
    REQUIRE(prod == n);
  }
  CHECK(nth_prime(1) == 2);
  CHECK(nth_prime(3) == 5);
}

TEST_CASE("field tokens round trip") {
  for (auto f : {make_field(2, 2), make_field(3, 3), make_field(101, 1), make_field(2, 40)}) {
    auto g = parse_field_token(f->token());
    CHECK(g->token() == f->token());
  }
  CHECK(parse_field_token("7")->q() == 7);
  CHECK_THROWS_AS(parse_field_token("x^y"), Error);
}

TEST_CASE("subfield embedding is a ring homomorphism") {
  auto small = make_field(2, 2);
  auto big = make_field(2, 4);
  u64 gen = subfield_generator_image(*small, *big);
  for (u64 a = 0; a < 4; ++a)
    for (u64 b = 0; b < 4; ++b) {
      u64 ea = embed_element(*small, *big, gen, a), eb = embed_element(*small, *big, gen, b);
      REQUIRE(embed_element(*small, *big, gen, small->mul(a, b)) == big->mul(ea, eb));
      REQUIRE(embed_element(*small, *big, gen, small->add(a, b)) == big->add(ea, eb));
    }
}
