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

// Affine extractor over a prime field F_q:
//
//   E(x) = A (x_1^{d_1}, ..., x_n^{d_n})^T
//
// with A an m x n Vandermonde matrix and every d_i a divisor of D coprime to
// q - 1, so each coordinate power map is a bijection.

#ifndef ALGEXT_AFFINE_EXT_HPP_
#define ALGEXT_AFFINE_EXT_HPP_

#include <vector>

#include "algext/common.hpp"
#include "algext/finite_field.hpp"
#include "algext/group_fourier.hpp"
#include "algext/rank_extract.hpp"
#include "json.hpp"

namespace algext {

struct GoodDegrees {
  int n = 0;
  u64 q = 0;
  double epsilon = 0;
  std::vector<u64> primes;   // least r primes coprime to q - 1
  std::vector<u64> degrees;  // n smallest divisors of D, increasing
  u64 D = 1;
  bool lcm_ok = false;       // D <= q^epsilon

  nlohmann::json to_json() const;
  static GoodDegrees from_json(const nlohmann::json& j);
};

// r = ceil(log2 n). NonPrime when q is not prime; LcmTooLarge when D > q^eps
// and relax is false.
GoodDegrees good_degrees(int n, u64 q, double epsilon, bool relax);

struct AffineExtractor {
  Field ctx;
  int n = 0, m = 0;
  RegularMatrix A;
  GoodDegrees degrees;

  std::vector<u64> eval(const std::vector<u64>& x) const;
  Carrier input_carrier() const { return Carrier::field_power(ctx, n); }
  Carrier output_carrier() const { return Carrier::field_power(ctx, m); }
  nlohmann::json to_json() const;
  static AffineExtractor from_json(const nlohmann::json& j);
};

// Vandermonde on nodes 1..n. FieldTooSmall when q - 1 < n; ShapeMismatch
// unless 1 <= m <= n and degrees.n == n.
AffineExtractor build_affine_ext(int n, int m, u64 q, const GoodDegrees& degrees);

// Exact output distribution of E on uniform input, by convolving the n
// coordinate pushforwards over F_q^m.
FiniteDistribution uniform_input_output(const AffineExtractor& ext,
                                        u64 budget = constants::kEnumerationBudget);

// x_j = maps[j][0] + sum_i maps[j][i] t_i.
struct AffineSubspace {
  Field ctx;
  int n = 0, k = 0;
  std::vector<int> pivots;             // 0-based, increasing
  std::vector<std::vector<u64>> maps;  // n rows of length k + 1

  std::vector<u64> point(const std::vector<u64>& t) const;
  nlohmann::json to_json() const;
  static AffineSubspace from_json(const nlohmann::json& j);
};

// Echelon form: coordinate pivots[i] equals t_{i+1}, coordinates before
// pivots[i] only see t_1..t_i. KTooLarge when k > n.
AffineSubspace sample_subspace(int n, int k, u64 q, u64 rng_seed);

struct CharacterChoice {
  u64 count = 32;  // random nonzero c
  u64 rng_seed = 1;
  bool all_when_feasible = true;
};

struct AffineBiasRow {
  u64 c_index = 0;  // carrier index of c in F_q^m
  std::vector<u64> b;  // c^T A
  int nonzero_pivots = 0;
  double abs_bias = 0;
  double proof_bound = 0;  // D^{k/2} q^{-k/4}
  bool qualifies = false;  // 2 * nonzero_pivots >= k
  bool pass = true;        // bias <= bound + 1e-6, or not qualifying
};

struct AffineBiasReport {
  std::vector<AffineBiasRow> rows;
  double max_bias = 0;
  double max_qualifying_bias = 0;
  u64 qualifying = 0;
  bool exhaustive_chars = false;
  bool pass = true;
};

// Exact sums over the q^k subspace points for each selected character.
// BudgetExceeded when q^k, times the character count, exceeds `budget`.
AffineBiasReport measure_affine_bias(const AffineExtractor& ext, const AffineSubspace& sub,
                                     const CharacterChoice& chars = {},
                                     u64 budget = u64{1} << 36, int shards = 1);

struct WeilTrial {
  std::vector<u64> coeffs;  // a_0..a_d
  double abs_sum = 0;
  bool pass = false;
};

struct WeilCheck {
  u64 q = 0;
  int d = 0;
  std::vector<WeilTrial> trials;
  double max_abs = 0;
  double bound = 0;  // (d - 1) sqrt(q)
  double tolerance = 0;
  bool pass = true;
};

// |sum_x chi(f(x))| for f with coefficients a_0..a_d over the prime field.
double weil_sum(const FieldCtx& ctx, const std::vector<u64>& coeffs);

// Random f of degree exactly d. NonPrime for composite q; InvalidArgument
// when d < 1 or p divides d.
WeilCheck weil_sum_check(u64 q, int d, int trials, u64 rng_seed = 1);

}  // namespace algext

#endif  // ALGEXT_AFFINE_EXT_HPP_
