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

#ifndef ALGEXT_COMMON_HPP_
#define ALGEXT_COMMON_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace algext {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

enum class ErrorCode {
  kNonPrime,
  kReducibleModulus,
  kCardinalityOverflow,
  kDivisionByZero,
  kCtxMismatch,
  kZeroElement,
  kCarrierMismatch,
  kEmptySupport,
  kBudgetExceeded,
  kArityMismatch,
  kEmptyVariety,
  kAllCountsZero,
  kFieldTooSmall,
  kShapeMismatch,
  kDegreeCountMismatch,
  kRankDeficientInput,
  kBasisDependent,
  kBoundViolation,
  kLengthMismatch,
  kOutOfRange,
  kParamsInfeasible,
  kSeedLengthMismatch,
  kLcmTooLarge,
  kKTooLarge,
  kConfigError,
  kArtifactVersionMismatch,
  kInvalidArgument,
  kIoError,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

// Pinned values for every unnamed constant in the constructions. Reports
// echo this block so runs are reproducible.
namespace constants {
inline constexpr double kCharThresholdExponent = 4.0;   // c-star
inline constexpr double kFieldFloorMultiplier = 32.0;   // c0
inline constexpr double kModMConstant = 4.0;            // C-star
inline constexpr double kConstantFractionC = 8.0;       // c
inline constexpr u64 kEnumerationBudget = u64{1} << 30;
inline constexpr u64 kDftBudget = u64{1} << 24;
inline constexpr u64 kClosureCap = u64{1} << 20;
inline constexpr u64 kRegularExhaustiveLimit = 1000000;
inline constexpr u64 kRegularSampleCount = 10000;
inline constexpr u64 kRankExhaustiveLimit = u64{1} << 20;
inline constexpr u64 kRankSampleCount = 100000;
inline constexpr u64 kSieveLimit = 1000000;
inline constexpr double kLogSaturation = 1e6;
inline constexpr double kBiasTolerance = 1e-9;
}  // namespace constants

// Exact nonnegative rational with 128-bit parts.
struct Ratio {
  u128 num = 0;
  u128 den = 1;
  double value() const {
    return static_cast<double>(static_cast<long double>(num) /
                               static_cast<long double>(den));
  }
};

bool ratio_le(const Ratio& a, const Ratio& b);
Ratio ratio_reduce(Ratio r);

// log base 2 and base b; log(0) saturates to the sentinel.
double log2_sat(double x);
double logb_sat(double x, double base);

std::string u128_to_string(u128 v);

// Little-endian bit string.
struct Bits {
  std::vector<std::uint8_t> b;
  std::size_t size() const { return b.size(); }
  void append_value(u64 v, int len);
  void append(const Bits& o) { b.insert(b.end(), o.b.begin(), o.b.end()); }
  Bits slice(std::size_t begin, std::size_t end) const;
  u64 to_u64() const;  // requires size() <= 64
  std::string str() const;
  bool operator==(const Bits& o) const { return b == o.b; }
};

// Root of the versioned data directory: $ALGEXT_DATA_DIR when set, else the
// build-time default.
std::string data_dir();

// Portable draws from mt19937_64. The std distributions are
// implementation-defined, which would break cross-machine replay.
u64 uniform_below(std::mt19937_64& rng, u64 n);  // uniform in [0, n), n >= 1
double uniform_unit(std::mt19937_64& rng);       // uniform in [0, 1)

// Splits [0, n) into `shards` contiguous ranges and runs fn(begin, end) on
// each, one thread per range. shards <= 1 runs inline.
template <typename Fn>
void parallel_for(std::size_t n, int shards, Fn&& fn) {
  if (shards <= 1 || n < 2) {
    fn(std::size_t{0}, n);
    return;
  }
  std::size_t parts = std::min<std::size_t>(static_cast<std::size_t>(shards), n);
  std::vector<std::thread> pool;
  pool.reserve(parts);
  for (std::size_t i = 0; i < parts; ++i) {
    std::size_t b = n * i / parts, e = n * (i + 1) / parts;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace algext

#endif  // ALGEXT_COMMON_HPP_
