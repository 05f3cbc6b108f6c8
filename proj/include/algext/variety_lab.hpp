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

// Sparse polynomials over F_q, affine varieties given by generators, and the
// algebraic sources f(U_{V(F_q)}) built from them.
//
// Rational points are found by brute force, after eliminating every variable
// that some generator determines linearly (c*X_j + h with X_j absent from h).
// Dimension estimates come from point-count slopes and are heuristic.

#ifndef ALGEXT_VARIETY_LAB_HPP_
#define ALGEXT_VARIETY_LAB_HPP_

#include <climits>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "algext/common.hpp"
#include "algext/finite_field.hpp"
#include "algext/group_fourier.hpp"
#include "json.hpp"

namespace algext {

struct Term {
  u64 coeff = 0;                 // nonzero, packed field element
  std::vector<std::uint32_t> exps;
  bool operator==(const Term& o) const { return coeff == o.coeff && exps == o.exps; }
};

class MultiPoly {
 public:
  static constexpr int kZeroDegree = INT_MIN;

  MultiPoly(Field ctx, int arity);  // zero polynomial
  MultiPoly(Field ctx, int arity, std::vector<Term> terms);
  static MultiPoly constant(Field ctx, int arity, u64 c);
  static MultiPoly variable(Field ctx, int arity, int i);
  // c * X_i^e
  static MultiPoly monomial(Field ctx, int arity, int i, std::uint32_t e, u64 c = 1);

  const Field& field() const { return ctx_; }
  int arity() const { return arity_; }
  // Sorted by exponent vector, no duplicates, no zero coefficients.
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  int degree() const { return degree_; }
  // Largest exponent of each variable.
  std::vector<std::uint32_t> max_exponents() const;
  std::vector<int> variables() const;

  MultiPoly operator+(const MultiPoly& o) const;
  MultiPoly operator-(const MultiPoly& o) const;
  MultiPoly operator*(const MultiPoly& o) const;
  MultiPoly scale(u64 c) const;
  bool operator==(const MultiPoly& o) const;

  u64 eval(const std::vector<u64>& point) const;
  // Same polynomial with coefficients mapped into a larger field.
  MultiPoly lift(Field big, const std::function<u64(u64)>& embed) const;

  std::string str() const;
  nlohmann::json to_json() const;
  // Coefficients are integers (reduced into the prime subfield), objects
  // {"packed": v}, or names looked up in `params`.
  // `arity` overrides a missing "arity" key.
  static MultiPoly from_json(Field ctx, const nlohmann::json& j,
                             const std::map<std::string, u64>& params = {}, int arity = -1);

 private:
  void normalize();
  void check_same(const MultiPoly& o) const;

  Field ctx_;
  int arity_;
  std::vector<Term> terms_;
  int degree_ = kZeroDegree;
};

// Precomputes per-variable exponent tables so repeated evaluation on many
// points shares powers across terms.
class PolyEvaluator {
 public:
  explicit PolyEvaluator(const MultiPoly& f);
  u64 operator()(const std::vector<u64>& point) const;

 private:
  const FieldCtx* ctx_;
  int arity_;
  std::vector<std::vector<std::uint32_t>> var_exps_;  // sorted distinct exponents per variable
  struct CompiledTerm {
    u64 coeff;
    std::vector<std::pair<int, int>> factors;  // (variable, slot in var_exps_)
  };
  std::vector<CompiledTerm> terms_;
};

class PolynomialMap {
 public:
  PolynomialMap(int arity, std::vector<MultiPoly> components);
  // components[i] = sum_j coeffs[i][j] * basis[j] + coeffs[i][s]; verified.
  PolynomialMap(int arity, std::vector<MultiPoly> components, std::vector<MultiPoly> basis,
                std::vector<std::vector<u64>> coeffs);

  int arity() const { return arity_; }
  int target_arity() const { return static_cast<int>(components_.size()); }
  const std::vector<MultiPoly>& components() const { return components_; }
  const std::optional<std::vector<MultiPoly>>& basis() const { return basis_; }
  const std::vector<std::vector<u64>>& basis_coeffs() const { return coeffs_; }
  // Degrees of h_1 >= h_2 >= ...: the basis when present, else the
  // nonconstant components sorted descending.
  std::vector<int> h_degrees() const;
  int degree() const;

  std::vector<u64> eval(const std::vector<u64>& point) const;
  nlohmann::json to_json() const;
  static PolynomialMap from_json(Field ctx, const nlohmann::json& j,
                                 const std::map<std::string, u64>& params = {});

 private:
  int arity_;
  std::vector<MultiPoly> components_;
  std::optional<std::vector<MultiPoly>> basis_;
  std::vector<std::vector<u64>> coeffs_;
};

struct VarietySpec {
  Field ctx;
  int arity = 0;
  std::vector<MultiPoly> generators;
  std::optional<int> declared_dim;
  std::optional<u64> degree_bound;

  // degree_bound, or the product of generator degrees.
  u64 bezout_degree() const;
  VarietySpec lift(Field big) const;
  nlohmann::json to_json() const;
  static VarietySpec from_json(Field ctx, const nlohmann::json& j,
                               const std::map<std::string, u64>& params = {});
};

struct EnumOptions {
  u64 budget = constants::kEnumerationBudget;  // evaluations of free coordinates
  int shards = 1;
};

// Elimination order and free coordinates used by the point scan.
struct EnumerationPlan {
  std::vector<int> free_vars;
  struct Solved {
    int var;
    u64 inv_coeff_neg;  // -1 / c
    MultiPoly rest;     // generator minus its c*X_var term
  };
  std::vector<Solved> solved;  // in evaluation order
  std::vector<int> remaining;  // generator indices still to test
  u128 work(u64 q) const;
};
EnumerationPlan plan_enumeration(const VarietySpec& v);

// Calls fn(point) for every rational point. With shards > 1, fn runs
// concurrently on disjoint slices of the leading free coordinate and is
// passed the shard index.
void for_each_point(const VarietySpec& v, const EnumOptions& opt,
                    const std::function<void(int shard, const std::vector<u64>&)>& fn);
u64 count_points(const VarietySpec& v, const EnumOptions& opt = {});
// All points, lexicographically sorted.
std::vector<std::vector<u64>> enumerate_points(const VarietySpec& v, const EnumOptions& opt = {});

struct DegreeBudget {
  u64 bezout_deg_v = 1;
  u64 product_top_k = 1;
  bool d_satisfied = false;
};
DegreeBudget degree_budget(const VarietySpec& v, const PolynomialMap& f, int k, u64 d);

struct AlgebraicSourceSpec {
  VarietySpec variety;
  PolynomialMap map;
  int n = 0, k = 0;
  u64 d = 0;

  // Throws BoundViolation when deg V * prod_{i<=k} deg h_i > d.
  static AlgebraicSourceSpec make(VarietySpec v, PolynomialMap f, int k, u64 d);
  DegreeBudget budget() const { return degree_budget(variety, map, k, d); }
};

FiniteDistribution build_source(const AlgebraicSourceSpec& spec, const EnumOptions& opt = {});
// Same, given only a variety and a map.
FiniteDistribution image_distribution(const VarietySpec& v, const PolynomialMap& f,
                                      const EnumOptions& opt = {});

struct DimensionEstimate {
  int dim_estimate = 0;
  double slope = 0;
  std::vector<u64> counts;  // counts[i-1] over F_{q^i}
  bool heuristic = true;
};
DimensionEstimate estimate_dimension(const VarietySpec& v, int max_ext, const EnumOptions& opt = {});
// Slope of log(count_i) against i * log q; exposed for image surveys.
DimensionEstimate dimension_from_counts(const std::vector<u64>& counts, u64 q);

std::vector<std::vector<u64>> fiber_points(const PolynomialMap& f, const VarietySpec& v,
                                           const std::vector<u64>& b, const EnumOptions& opt = {});

// Character sums S_alpha = sum_{x in C(F_q)} chi_alpha(f(x)) for every
// nonzero alpha, compared with (d1^2 + 2 d1 d2 - 3 d1) sqrt(q) + d1^2 where
// d1 = deg C and d2 = deg f. At most d1 d2 characters may exceed the bound.
struct BombieriCheck {
  u64 points = 0;
  int d1 = 0, d2 = 0;
  double bound = 0;
  double max_abs = 0;
  u64 exceed = 0;
  u64 allowed = 0;
  bool constant_on_curve = false;  // check not applicable
  bool pass = false;
};
BombieriCheck bombieri_check(const VarietySpec& curve, const MultiPoly& f, double tol,
                             const EnumOptions& opt = {});

// Least quadratic nonresidue modulo an odd prime.
u64 least_nonresidue(u64 p);

// One entry of the shipped corpus, instantiated over a field.
struct CorpusEntry {
  std::string id;
  std::string family;  // curve, surface, subspace, point, union, plane
  int arity = 0;
  bool abs_irreducible = false;
  bool has_source = false;  // carries (n, k, d) and a map
  int n = 0, k = 0;
  u64 d = 0;
  nlohmann::json raw;

  VarietySpec variety(Field ctx) const;
  PolynomialMap map(Field ctx) const;
  AlgebraicSourceSpec source(Field ctx) const;
  std::map<std::string, u64> params(const FieldCtx& ctx) const;
};
std::vector<CorpusEntry> load_corpus(const std::string& path);
std::string default_corpus_path();

}  // namespace algext

#endif  // ALGEXT_VARIETY_LAB_HPP_
