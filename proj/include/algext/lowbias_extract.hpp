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

// Extractors for sources with few large Fourier coefficients.
//
// Gabidulin matrices: for u in F_{p^s}^k, M_u has column j equal to the
// coordinates of f_u(g_j), f_u = sum_i u_i X^{p^{i-1}}, g_j = X^{j-1}. Every
// nonzero F_p-combination has rank >= r - k + 1. The bilinear extractor
// sends (x, y) in F_p^s x F_p^r to (x^T M_i y)_i.

#ifndef ALGEXT_LOWBIAS_EXTRACT_HPP_
#define ALGEXT_LOWBIAS_EXTRACT_HPP_

#include <optional>
#include <string>
#include <vector>

#include "algext/common.hpp"
#include "algext/finite_field.hpp"
#include "algext/group_fourier.hpp"
#include "json.hpp"

namespace algext {

// Matrix over F_p, row-major.
using PMatrix = std::vector<std::vector<u64>>;

struct GabidulinParams {
  u64 p = 2;
  int s = 1, r = 1, k = 1, t = 1;
  Field big;               // F_{p^s}
  std::vector<u64> basis;  // g_1..g_r, packed elements of F_{p^s}

  // Throws BoundViolation unless 1 <= k <= r <= s and 1 <= t <= k s;
  // BasisDependent when `basis` is not F_p-independent.
  static GabidulinParams make(u64 p, int s, int r, int k, int t,
                              std::optional<std::vector<u64>> basis = std::nullopt);
  int rank_bound() const { return r - k + 1; }
};

// M_1..M_t, each s x r. Matrix index i*s + a comes from u = X^a e_{i+1}.
std::vector<PMatrix> gabidulin_matrices(const GabidulinParams& g);

struct MinRankSurvey {
  int min_rank = 0;
  int bound = 0;
  bool exhaustive = true;
  u64 combinations = 0;
  bool pass = false;
};
// Exhaustive over the p^t - 1 nonzero combinations when p^t <= budget,
// else constants::kRankSampleCount random ones.
MinRankSurvey min_rank_survey(const std::vector<PMatrix>& mats, u64 p, int bound,
                              u64 budget = constants::kRankExhaustiveLimit, u64 rng_seed = 1);

std::size_t rank_mod_prime(PMatrix a, u64 p);

struct BilinearExtractor {
  GabidulinParams params;
  std::vector<PMatrix> matrices;

  int n() const { return params.r + params.s; }
  int t() const { return params.t; }
  // x = (x_s-block, y_r-block)
  std::vector<u64> eval(const std::vector<u64>& x) const;
  // Same on carrier indices of F_p^n and F_p^t.
  u64 eval_index(u64 x) const;
  Carrier input_carrier() const;
  Carrier output_carrier() const;
  nlohmann::json to_json() const;
  static BilinearExtractor from_json(const nlohmann::json& j);
};

// Requires 2r <= n, s = n - r.
BilinearExtractor build_bilinear(u64 p, int n, int r, int k, int t);

struct FourierNormCheck {
  double max_l1 = 0;
  double max_linf = 0;
  double bound_l1 = 0;    // p^r
  double bound_linf = 0;  // p^{-(r-k+1)}
  u64 characters = 0;
  bool pass = false;
};
// Exact transform of psi o f over F_p^n for every nontrivial psi of F_p^t.
FourierNormCheck fourier_norm_check(const BilinearExtractor& ext, double tol = 1e-7,
                                    u64 budget = constants::kDftBudget * 16);

struct ModMExtractor {
  u64 N = 1;
  int t = 1;
  u64 M = 1;

  static ModMExtractor make(u64 N, int t, u64 M);
  std::vector<u64> eval(const std::vector<u64>& a) const;
  Carrier input_carrier() const { return Carrier::residue_power(N, t); }
  // Z_N^{t-1} x Z_M, encoded mixed radix with Z_M last.
  u64 output_size() const;
  u64 eval_index(u64 a) const;
};
std::vector<u64> mod_m_extract(const ModMExtractor& ext, const std::vector<u64>& a);
// Distance of a mod M (a uniform in [0, N)) to uniform on Z_M.
Ratio mod_m_uniform_distance(u64 N, u64 M);
// Same, by pushing the uniform distribution through the extractor.
Ratio mod_m_measured_distance(const ModMExtractor& ext);

// Dense-affine instance on F_p^n: r = floor(n/2), k = 2.
BilinearExtractor build_dense_affine_extractor(u64 p, int n, int t);
// p^{-(r-k+1)} * e * p^{t/2}
double dense_affine_error(const BilinearExtractor& ext, double e);
// Largest t with t <= n - 3 - 2 log_p(e / eps), or 0.
int dense_affine_max_t(u64 p, int n, double e, double eps);

struct StronglyBiasedExtractor {
  u64 p = 2;
  int n = 0, n_prime = 0, t = 0;
  double eps = 0, e = 1, eps_prime = 0;
  bool saturated = false;  // log(1/0) sentinel used
  BilinearExtractor f;

  // f applied to the first n' coordinates.
  std::vector<u64> eval(const std::vector<u64>& x) const;
  nlohmann::json to_json() const;
  static StronglyBiasedExtractor from_json(const nlohmann::json& j);
};
// n' = min(floor(2 log_p(1/eps) - 2 log_p(16 e / eps'^2)), n),
// t = floor(n' - 3 - 2 log_p(2 e / eps')). ParamsInfeasible when t < 1.
StronglyBiasedExtractor build_strongly_biased_extractor(int n, u64 p, double eps, double e, double eps_prime);

struct ConstantFractionExtractor {
  BilinearExtractor f;
  double eps = 0;             // d p^{-n/2}
  double declared_error = 0;  // (p^r eps + p^{-(r-k+1)} e) p^{t/2}
  double c = constants::kConstantFractionC;
};
// r = floor(n/4), s = n - r, k = max(1, floor(r/2)),
// t = floor(n/c - 2 log_p(d e / eps')).
ConstantFractionExtractor build_constant_fraction_extractor(int n, u64 p, double d, double e, double eps_prime);

// Uniform distribution on offset + span(basis) in F_p^n.
FiniteDistribution affine_uniform(Field fp, const std::vector<std::vector<u64>>& basis,
                                  const std::vector<u64>& offset);

// (p^r * eps + p^{-(r-k+1)} * e) * p^{t/2}
double bilinear_error_bound(const BilinearExtractor& ext, double eps, double e);

}  // namespace algext

#endif  // ALGEXT_LOWBIAS_EXTRACT_HPP_
