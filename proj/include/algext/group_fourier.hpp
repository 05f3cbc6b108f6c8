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

// Exact distributions on finite abelian groups and their Fourier spectra.
//
// A carrier is F_q^n or Z_N^t. Elements and characters are both addressed
// by a u64 index in mixed radix, first coordinate most significant, so the
// index order is the lexicographic order on coordinate vectors. Character
// alpha of F_q^n is x -> prod_i chi_{alpha_i}(x_i); character a of Z_N^t is
// x -> e^{2 pi i <a, x> / N}.

#ifndef ALGEXT_GROUP_FOURIER_HPP_
#define ALGEXT_GROUP_FOURIER_HPP_

#include <complex>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "algext/common.hpp"
#include "algext/finite_field.hpp"
#include "json.hpp"

namespace algext {

class Carrier {
 public:
  enum class Kind { kFieldPower, kResiduePower };

  static Carrier field_power(Field ctx, int n);
  static Carrier residue_power(u64 modulus, int t);

  Kind kind() const { return kind_; }
  const Field& field() const { return field_; }
  int dim() const { return dim_; }
  // q for field powers, N for residue powers.
  u64 base() const { return base_; }
  u64 cardinality() const { return card_; }
  // Order of the characters' values: p for field powers, N otherwise.
  u64 phase_modulus() const;

  std::vector<u64> decode(u64 index) const;
  u64 encode(const std::vector<u64>& coords) const;
  u64 add(u64 a, u64 b) const;
  u64 neg(u64 a) const;
  // Integer phase k of chi_alpha(x) = e^{2 pi i k / phase_modulus()}.
  u64 phase(u64 alpha, u64 x) const;
  std::complex<double> character(u64 alpha, u64 x) const;
  std::complex<double> root(u64 k) const;

  bool operator==(const Carrier& o) const;
  bool operator!=(const Carrier& o) const { return !(*this == o); }
  std::string describe() const;
  nlohmann::json to_json() const;
  static Carrier from_json(const nlohmann::json& j);

 private:
  Kind kind_ = Kind::kResiduePower;
  Field field_;
  int dim_ = 0;
  u64 base_ = 1;
  u64 card_ = 1;
};

// Probability weights as counts over a shared total. In exact mode the total
// is the sum of the counts; in sampled mode the counts are sample tallies and
// the total is the number of samples.
class FiniteDistribution {
 public:
  enum class Mode { kExact, kSampled };

  FiniteDistribution(Carrier carrier, std::vector<std::pair<u64, u64>> counts,
                     Mode mode = Mode::kExact);

  static FiniteDistribution uniform(const Carrier& c);
  static FiniteDistribution point_mass(const Carrier& c, u64 index);
  static FiniteDistribution uniform_over(const Carrier& c, const std::vector<u64>& support);
  // Tally of n independent draws from d.
  static FiniteDistribution sample(const FiniteDistribution& d, u64 n, std::mt19937_64& rng);

  const Carrier& carrier() const { return carrier_; }
  // Sorted by index, all counts positive.
  const std::vector<std::pair<u64, u64>>& counts() const { return counts_; }
  u64 total() const { return total_; }
  Mode mode() const { return mode_; }
  std::size_t support_size() const { return counts_.size(); }
  u64 count(u64 index) const;
  double weight(u64 index) const;
  u64 max_count() const;

  // Image under a map of carriers.
  FiniteDistribution push_forward(const Carrier& target, const std::function<u64(u64)>& f) const;

  nlohmann::json to_json() const;
  static FiniteDistribution from_json(const nlohmann::json& j);

 private:
  Carrier carrier_;
  std::vector<std::pair<u64, u64>> counts_;
  u64 total_ = 0;
  Mode mode_;
};

// Accumulates counts for a distribution before sorting.
class CountBuilder {
 public:
  explicit CountBuilder(Carrier carrier) : carrier_(std::move(carrier)) {}
  void add(u64 index, u64 c = 1);
  void merge(const CountBuilder& o);
  FiniteDistribution build(FiniteDistribution::Mode mode = FiniteDistribution::Mode::kExact) const;

 private:
  Carrier carrier_;
  std::vector<std::pair<u64, u64>> raw_;
};

// Exact total variation distance.
Ratio statistical_distance(const FiniteDistribution& a, const FiniteDistribution& b);
Ratio distance_to_uniform(const FiniteDistribution& d);

struct DistanceEstimate {
  double value = 0;  // exact distance, or debiased plug-in estimate
  double floor = 0;  // 0 in exact mode
  bool exact = true;
};
// In sampled mode: plug-in minus (|support| - 1) / (2 n), floor sqrt(|A|/n)/2.
DistanceEstimate estimate_distance_to_uniform(const FiniteDistribution& d);

struct MinEntropy {
  Ratio max_weight;
  double bits = 0;
};
MinEntropy min_entropy(const FiniteDistribution& d);

struct BiasSpectrum {
  Carrier carrier;
  std::vector<std::complex<double>> entries;  // indexed by character
  bool sampled = false;
  u64 n_samples = 0;

  double max_nontrivial() const;
  std::string to_csv() const;
};

struct FourierOptions {
  u64 budget = constants::kDftBudget;  // cardinality * support size
  int shards = 1;
};
BiasSpectrum bias_spectrum(const FiniteDistribution& d, const FourierOptions& opt = {});

struct BiasClass {
  u64 e_count = 0;
  bool strongly = false;
  u64 witness_subgroup_size = 1;
  bool inconclusive = false;  // closure passed constants::kClosureCap
  std::vector<u64> violators;
};
// Violators are nontrivial characters with |bias| > epsilon + kBiasTolerance.
BiasClass classify_bias(const BiasSpectrum& s, double epsilon);

struct XorCheck {
  double max_bias = 0;
  double measured_distance = 0;
  double bound = 0;
  bool holds = false;
};
XorCheck xor_distance_check(const FiniteDistribution& d, const FourierOptions& opt = {});

// Mass above 2^{-k} per atom: the distance from d to the nearest source of
// min-entropy at least k, when k <= log |A|.
double trimmed_mass(const FiniteDistribution& d, double k);

struct EntropyBoundCheck {
  double k = 0;
  double trimmed = 0;
  bool close = false;
};
EntropyBoundCheck entropy_bound_check(const FiniteDistribution& d, double epsilon, double e,
                                      double eps_prime);

}  // namespace algext

#endif  // ALGEXT_GROUP_FOURIER_HPP_
