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

// Rank extractors for varieties.
//
// The deterministic (DKL) map sends a to (sum_j c_ij a_j^{d_j})_i for a
// k-regular matrix C and pairwise coprime degrees d_j > deg V. The seeded
// family indexes linear maps by nonzero seeds s with rows
// ((omega^{i} s)^{j})_j; all but m(n-m) seeds keep a k-dimensional subspace
// of rank at least m.

#ifndef ALGEXT_RANK_EXTRACT_HPP_
#define ALGEXT_RANK_EXTRACT_HPP_

#include <string>
#include <vector>

#include "algext/common.hpp"
#include "algext/finite_field.hpp"
#include "algext/variety_lab.hpp"
#include "json.hpp"

namespace algext {

// Rank over ctx of a row-major matrix.
std::size_t matrix_rank(const FieldCtx& ctx, std::vector<std::vector<u64>> rows);
// Reduced row echelon form; returns the nonzero rows.
std::vector<std::vector<u64>> row_reduce(const FieldCtx& ctx, std::vector<std::vector<u64>> rows);
// Every k-dimensional subspace of F_q^n, as RREF bases in lexicographic
// order of their pivot pattern and free entries.
std::vector<std::vector<std::vector<u64>>> all_subspaces(const FieldCtx& ctx, int n, int k);

enum class DegreeStrategy { kDistinctPrimes, kPrimePowers };
const char* strategy_name(DegreeStrategy s);
DegreeStrategy parse_strategy(const std::string& s);

struct CoprimeDegrees {
  int n = 0;
  u64 d = 0;
  std::vector<u64> degrees;
  DegreeStrategy strategy = DegreeStrategy::kDistinctPrimes;

  nlohmann::json to_json() const;
  static CoprimeDegrees from_json(const nlohmann::json& j);
};

// distinct_primes: the n smallest primes > d. prime_powers: for the first n
// primes, the least power exceeding d.
CoprimeDegrees choose_degrees(int n, u64 d, DegreeStrategy strategy);

enum class MatrixTag { kVandermonde, kIdentity, kAllOnes, kDropOne, kCustom };
const char* matrix_tag_name(MatrixTag t);
MatrixTag parse_matrix_tag(const std::string& s);

struct RegularMatrix {
  Field ctx;
  int m = 0, n = 0;
  std::vector<std::vector<u64>> entries;  // m rows of n packed elements
  int certified_k = 0;
  bool sampled = false;  // certificate from random column subsets
  MatrixTag tag = MatrixTag::kCustom;

  nlohmann::json to_json() const;
  static RegularMatrix from_json(const nlohmann::json& j);
};

// Builds the matrix and certifies the largest k' <= k such that every k'
// columns are independent.
RegularMatrix build_regular_matrix(int m, int n, int k, Field ctx, MatrixTag tag);
RegularMatrix custom_matrix(Field ctx, std::vector<std::vector<u64>> entries, int k);
// Largest k' <= k certified for `entries`; sets *sampled when C(n,k') is
// beyond the exhaustive limit.
int certify_regularity(const FieldCtx& ctx, const std::vector<std::vector<u64>>& entries, int k,
                       bool* sampled);

struct DklExtractor {
  CoprimeDegrees degrees;
  RegularMatrix matrix;
  PolynomialMap map;

  std::vector<u64> eval(const std::vector<u64>& a) const;
  // max d_j over the nonzero entries of each row
  std::vector<u64> row_degrees() const;
  nlohmann::json to_json() const;
  static DklExtractor from_json(const nlohmann::json& j);
};
DklExtractor dkl_map(const CoprimeDegrees& degs, const RegularMatrix& m);

struct FiberCheck {
  u64 max_fiber_size = 0;
  u64 bezout_cap = 0;
  u64 targets_inspected = 0;
  bool exact = true;
  bool pass = false;
};
// sample_targets == 0 inspects every image point; otherwise that many
// uniformly drawn targets in F_q^m.
FiberCheck fiber_finiteness_check(const DklExtractor& ext, const VarietySpec& v, u64 sample_targets = 0,
                                  u64 rng_seed = 1, const EnumOptions& opt = {});

struct SeededRankFamily {
  Field ctx;
  int n = 0, m = 0;
  u64 omega = 0;
  std::vector<u64> seeds;

  std::size_t size() const { return seeds.size(); }
  // m x n matrix of seed i
  std::vector<std::vector<u64>> matrix(std::size_t i) const;
  std::vector<u64> apply(std::size_t i, const std::vector<u64>& x) const;
  nlohmann::json to_json() const;
  static SeededRankFamily from_json(const nlohmann::json& j);
};
SeededRankFamily build_seeded_family(int n, int m, Field ctx, std::size_t ell);

struct RankSurvey {
  u64 fail_count = 0;
  u64 seeds = 0;
  double fail_fraction = 0;
  double bound = 0;  // m(n-m)/l
  bool pass = false;
  std::vector<int> per_seed;  // rank, or image dimension estimate
  bool heuristic = false;
};
// basis: k vectors in F_q^n with k >= m.
RankSurvey subspace_rank_survey(const SeededRankFamily& fam, const std::vector<std::vector<u64>>& basis,
                                int shards = 1);
// Image dimension per seed from image point counts over F_{q^e},
// e = 1..max_ext. A seed fails when its estimate is below min(m, dim V).
RankSurvey variety_rank_survey(const SeededRankFamily& fam, const VarietySpec& v, int max_ext,
                               const EnumOptions& opt = {});

}  // namespace algext

#endif  // ALGEXT_RANK_EXTRACT_HPP_
