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

// Prime fields and their extensions.
//
// An element of F_q, q = p^m, is stored as its packed coefficient vector in
// the polynomial basis 1, X, ..., X^{m-1}: the integer sum_i c_i p^i. The
// packed value doubles as the element's position in enumeration order, so
// F_4 enumerates as 0, 1, X, X+1.

#ifndef ALGEXT_FINITE_FIELD_HPP_
#define ALGEXT_FINITE_FIELD_HPP_

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "algext/common.hpp"

namespace algext {

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 a, u64 e, u64 m);
u64 gcd_u64(u64 a, u64 b);

// Deterministic Miller-Rabin, valid on the whole u64 range.
bool is_prime_u64(u64 n);
// Prime factorization (Pollard rho), ascending primes with multiplicity.
std::vector<std::pair<u64, int>> factor_u64(u64 n);
// Primes up to constants::kSieveLimit.
const std::vector<u64>& sieve_primes();
// The i-th prime, 1-indexed (nth_prime(1) == 2).
u64 nth_prime(std::size_t i);

class FieldCtx;
using Field = std::shared_ptr<const FieldCtx>;

struct FieldElement {
  const FieldCtx* ctx = nullptr;
  u64 v = 0;

  bool is_zero() const { return v == 0; }
  std::vector<u64> coeffs() const;

  FieldElement operator+(const FieldElement& o) const;
  FieldElement operator-(const FieldElement& o) const;
  FieldElement operator*(const FieldElement& o) const;
  FieldElement operator/(const FieldElement& o) const;
  FieldElement operator-() const;
  FieldElement inv() const;
  FieldElement pow(u64 e) const;
  bool operator==(const FieldElement& o) const { return ctx == o.ctx && v == o.v; }
  bool operator!=(const FieldElement& o) const { return !(*this == o); }
};

class FieldCtx {
 public:
  // Use make_field; the constructor trusts its arguments.
  FieldCtx(u64 p, int m, std::vector<u64> modulus);

  u64 p() const { return p_; }
  int m() const { return m_; }
  u64 q() const { return q_; }
  // Monic modulus, low degree first, length m + 1.
  const std::vector<u64>& modulus() const { return modulus_; }
  bool is_prime_field() const { return m_ == 1; }
  // Bits per coefficient in the frozen bit encoding.
  int coeff_bits() const { return coeff_bits_; }

  u64 add(u64 a, u64 b) const;
  u64 sub(u64 a, u64 b) const;
  u64 neg(u64 a) const;
  u64 mul(u64 a, u64 b) const;
  u64 inv(u64 a) const;
  u64 div(u64 a, u64 b) const { return mul(a, inv(b)); }
  u64 pow(u64 a, u64 e) const;
  // Residue of n in the prime subfield.
  u64 from_int(i64 n) const;
  u64 scalar_mul(u64 c, u64 a) const;  // c in F_p

  u64 coeff(u64 a, int i) const;
  std::vector<u64> coeffs(u64 a) const;
  u64 from_coeffs(const std::vector<u64>& c) const;

  u64 trace(u64 a) const;
  // e^{2 pi i k / p}
  std::complex<double> root(u64 k) const;
  // chi_alpha(x) = e^{2 pi i Tr(alpha x) / p}
  std::complex<double> character(u64 alpha, u64 x) const;
  u64 order(u64 w) const;
  const std::vector<std::pair<u64, int>>& group_order_factors() const { return qm1_factors_; }

  FieldElement elem(u64 v) const;
  FieldElement zero() const { return elem(0); }
  FieldElement one() const { return elem(1); }
  std::string token() const;
  std::string element_str(u64 a) const;

 private:
  u64 mul_ext(u64 a, u64 b) const;
  u64 mul_gf2(u64 a, u64 b) const;

  u64 p_;
  int m_;
  u64 q_;
  int coeff_bits_;
  std::vector<u64> modulus_;
  std::vector<u64> pow_p_;      // p^i
  std::vector<u64> tr_basis_;   // Tr(X^i)
  u64 gf2_mod_ = 0;             // modulus bits below X^m, p == 2 only
  std::vector<std::complex<double>> roots_;
  std::vector<std::pair<u64, int>> qm1_factors_;
};

// Lexicographically smallest irreducible modulus when none is supplied.
Field make_field(u64 p, int m, std::optional<std::vector<u64>> modulus = std::nullopt);
Field parse_field_token(const std::string& token);
bool is_irreducible_mod_p(const std::vector<u64>& f, u64 p);

std::vector<FieldElement> enumerate_field(const FieldCtx& ctx);

// Image of the generator X of `small` inside `big` (first root of the small
// modulus in enumeration order), used to embed F_{p^m} into F_{p^{mi}}.
u64 subfield_generator_image(const FieldCtx& small, const FieldCtx& big);
u64 embed_element(const FieldCtx& small, const FieldCtx& big, u64 gen_image, u64 a);

}  // namespace algext

#endif  // ALGEXT_FINITE_FIELD_HPP_
