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

// Extractor stack for algebraic sources over F_q.
//
//   Ext11         (1,1,d) sources; mod-M extractor when p is large, the
//                 strongly-biased extractor otherwise.
//   ExtN1         (n,1,d) sources; rank-1 DKL map into Ext11.
//   Seeded        multiply-shift hash over GF(2^n_b).
//   FullRank      (k,k,d) sources on F_q^k.
//   Composition   (n,k,d) sources: ExtN1 picks a seeded rank map that
//                 projects onto F_q^{k-1}, then FullRank.
//
// All outputs are little-endian bit strings. Elements of F_q are written
// coefficient-wise with coeff_bits() bits per coefficient.

#ifndef ALGEXT_PIPELINE_HPP_
#define ALGEXT_PIPELINE_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "algext/common.hpp"
#include "algext/finite_field.hpp"
#include "algext/group_fourier.hpp"
#include "algext/lowbias_extract.hpp"
#include "algext/rank_extract.hpp"
#include "json.hpp"

namespace algext {

Bits encode_element(const FieldCtx& ctx, u64 a);

// Largest b with TV(U_range mod 2^b, U_{2^b}) <= budget; the loss is exact.
struct Fold {
  int bits = 0;
  Ratio loss;
};
Fold fold_to_bits(u64 range, double budget);

enum class Ext11Branch { kSmallChar, kLargeChar };
const char* branch_name(Ext11Branch b);

struct Ext11Config {
  Field ctx;
  u64 d = 1;
  double eps = 0;
  Ext11Branch branch = Ext11Branch::kLargeChar;
  double threshold = 0;  // (d/eps)^{c*}
  double eps0 = 0;       // 8 d^2 / sqrt(q)
  // large_char: x viewed in Z_p^m, last coordinate reduced mod M.
  u64 M_max = 0;  // largest M passing the mod-M inequality
  std::optional<ModMExtractor> modm;
  // small_char: coefficient vector through the strongly-biased extractor.
  std::optional<StronglyBiasedExtractor> sb;
  u64 range = 0;  // natural output range before folding
  Fold fold;
  int m_out = 0;
  double analytic_error = 0;
  double declared_error = 0;  // analytic + fold loss, <= eps

  // Output as an integer in [0, 2^m_out).
  u64 eval_value(u64 x) const;
  Bits eval(u64 x) const;
  nlohmann::json to_json() const;
  static Ext11Config from_json(const nlohmann::json& j);
};

// FieldTooSmall when q < c0 d^5 / eps^2; ParamsInfeasible when the chosen
// branch has no admissible parameters.
Ext11Config build_ext11(Field ctx, u64 d, double eps);
// large_char iff p > (d/eps)^{c*}.
Ext11Branch ext11_branch(const FieldCtx& ctx, u64 d, double eps);
Bits extract11(const Ext11Config& cfg, u64 x);

struct ExtN1Config {
  Field ctx;
  int n = 0;
  u64 d = 0;
  double eps = 0;
  DklExtractor F;   // m = 1, all-ones row, prime-power degrees > d
  u64 d_prime = 0;  // 2 p_n d^2
  Ext11Config inner;

  int m_out() const { return inner.m_out; }
  u64 eval_value(const std::vector<u64>& x) const;
  Bits eval(const std::vector<u64>& x) const;
  nlohmann::json to_json() const;
  static ExtN1Config from_json(const nlohmann::json& j);
};
ExtN1Config build_extN1(Field ctx, int n, u64 d, double eps);

// h_{a,b}(x) = first out_len bits of a x + b in GF(2^n_b), a = 0 read as 1.
struct SeededExtractorConfig {
  int n_b = 0;
  int delta = 0;
  double eps = 0;
  int seed_len = 0;  // 2 n_b
  int out_len = 0;   // max(0, n_b - delta - 2 ceil(log2(1/eps)))
  Field gf;          // GF(2^n_b)

  nlohmann::json to_json() const;
  static SeededExtractorConfig from_json(const nlohmann::json& j);
};
SeededExtractorConfig build_seeded_extractor(int n_b, int delta, double eps);
// LengthMismatch for x, SeedLengthMismatch for the seed.
Bits seeded_extract(const SeededExtractorConfig& cfg, const Bits& x, const Bits& seed);
u64 seeded_extract_value(const SeededExtractorConfig& cfg, u64 x, u64 a, u64 b);

// (x_1, x_2) in F_q^{k-1} x F_q  ->  (Ext1(x_1, y_1), y_2), (y_1, y_2) = Ext2(x_2),
// with y_1 the first seed_len bits.
struct FullRankExtractor {
  Field ctx;
  int k = 0;
  u64 d = 0;
  double eps = 0;
  Ext11Config ext2;
  std::optional<SeededExtractorConfig> ext1;  // k > 1
  int ell = 0;                                // seed bits taken from Ext2
  double declared_error = 0;

  int m_out() const;
  Bits eval(const std::vector<u64>& x) const;
  nlohmann::json to_json() const;
  static FullRankExtractor from_json(const nlohmann::json& j);
};
// FieldTooSmall when q < c0 (k d)^5 / eps^2; ParamsInfeasible when Ext2 has
// fewer output bits than Ext1's seed.
FullRankExtractor build_full_rank_ext(Field ctx, int k, u64 d, double eps);
// Wires given components; ParamsInfeasible when ext2.m_out < ext1.seed_len.
FullRankExtractor assemble_full_rank(Field ctx, int k, u64 d, double eps, Ext11Config ext2,
                                     std::optional<SeededExtractorConfig> ext1);

struct CompositionConfig {
  Field ctx;
  int n = 0, k = 0;
  u64 d = 0;
  double eps = 0;
  bool empty = false;  // k = 0
  int ell = 0;         // ceil(log2(2 n^2 / eps))
  double eps1 = 0;     // (eps/2) / (6 2^ell + 4)
  double eps0 = 0;     // rank family failure fraction (k-1)(n-k+1) / 2^ell
  double budget = 0;   // 6 eps1 2^ell + 4 eps1 + eps0
  std::optional<ExtN1Config> ext1;
  std::optional<SeededRankFamily> family;
  std::optional<FullRankExtractor> ext2;

  int m_out() const;
  // (Ext1(x), Ext2(phi_y(x))), y = first ell bits of Ext1(x).
  Bits eval(const std::vector<u64>& x) const;
  nlohmann::json to_json() const;
  static CompositionConfig from_json(const nlohmann::json& j);
};
CompositionConfig build_composition(Field ctx, int n, int k, u64 d, double eps);

enum class MeasureMode { kExact, kMonteCarlo };

struct Measurement {
  MeasureMode mode = MeasureMode::kExact;
  double distance = 0;
  std::optional<Ratio> exact;
  double floor = 0;
  double source_min_entropy = 0;
  u64 samples = 0;
};

// Distance of f(source) to uniform on [0, 2^m_out). Exact mode walks the
// support; Monte-Carlo draws `samples` points. BudgetExceeded when the exact
// support exceeds `budget`.
Measurement measure_extractor(const std::function<u64(u64)>& f, int m_out, const FiniteDistribution& source,
                              MeasureMode mode = MeasureMode::kExact, u64 samples = 0, u64 rng_seed = 1,
                              int shards = 1, u64 budget = constants::kEnumerationBudget);

}  // namespace algext

#endif  // ALGEXT_PIPELINE_HPP_
