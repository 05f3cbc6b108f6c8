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

#include "algext/common.hpp"

#include <cstdlib>

#include <algorithm>

namespace algext {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonPrime: return "NonPrime";
    case ErrorCode::kReducibleModulus: return "ReducibleModulus";
    case ErrorCode::kCardinalityOverflow: return "CardinalityOverflow";
    case ErrorCode::kDivisionByZero: return "DivisionByZero";
    case ErrorCode::kCtxMismatch: return "CtxMismatch";
    case ErrorCode::kZeroElement: return "ZeroElement";
    case ErrorCode::kCarrierMismatch: return "CarrierMismatch";
    case ErrorCode::kEmptySupport: return "EmptySupport";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kArityMismatch: return "ArityMismatch";
    case ErrorCode::kEmptyVariety: return "EmptyVariety";
    case ErrorCode::kAllCountsZero: return "AllCountsZero";
    case ErrorCode::kFieldTooSmall: return "FieldTooSmall";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kDegreeCountMismatch: return "DegreeCountMismatch";
    case ErrorCode::kRankDeficientInput: return "RankDeficientInput";
    case ErrorCode::kBasisDependent: return "BasisDependent";
    case ErrorCode::kBoundViolation: return "BoundViolation";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kParamsInfeasible: return "ParamsInfeasible";
    case ErrorCode::kSeedLengthMismatch: return "SeedLengthMismatch";
    case ErrorCode::kLcmTooLarge: return "LcmTooLarge";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kArtifactVersionMismatch: return "ArtifactVersionMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

namespace {

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Sign of a*b - c*d with 256-bit intermediates.
int cmp_products(u128 a, u128 b, u128 c, u128 d) {
  auto mul = [](u128 x, u128 y, u128& hi, u128& lo) {
    const u128 mask = (u128{1} << 64) - 1;
    u128 x0 = x & mask, x1 = x >> 64, y0 = y & mask, y1 = y >> 64;
    u128 p00 = x0 * y0, p01 = x0 * y1, p10 = x1 * y0, p11 = x1 * y1;
    u128 mid = (p00 >> 64) + (p01 & mask) + (p10 & mask);
    lo = (p00 & mask) | (mid << 64);
    hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
  };
  u128 h1, l1, h2, l2;
  mul(a, b, h1, l1);
  mul(c, d, h2, l2);
  if (h1 != h2) return h1 < h2 ? -1 : 1;
  if (l1 != l2) return l1 < l2 ? -1 : 1;
  return 0;
}

}  // namespace

bool ratio_le(const Ratio& a, const Ratio& b) {
  return cmp_products(a.num, b.den, b.num, a.den) <= 0;
}

Ratio ratio_reduce(Ratio r) {
  if (r.num == 0) return Ratio{0, 1};
  u128 g = gcd128(r.num, r.den);
  return Ratio{r.num / g, r.den / g};
}

double log2_sat(double x) {
  if (x <= 0.0) return -constants::kLogSaturation;
  if (std::isinf(x)) return constants::kLogSaturation;
  return std::log2(x);
}

double logb_sat(double x, double base) {
  if (x <= 0.0) return -constants::kLogSaturation;
  if (std::isinf(x)) return constants::kLogSaturation;
  return std::log(x) / std::log(base);
}

std::string u128_to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

void Bits::append_value(u64 v, int len) {
  for (int i = 0; i < len; ++i) b.push_back(static_cast<std::uint8_t>((v >> i) & 1U));
}

Bits Bits::slice(std::size_t begin, std::size_t end) const {
  Bits out;
  if (begin > b.size()) begin = b.size();
  if (end > b.size()) end = b.size();
  if (begin < end) out.b.assign(b.begin() + begin, b.begin() + end);
  return out;
}

u64 Bits::to_u64() const {
  if (b.size() > 64) fail(ErrorCode::kLengthMismatch, "bit string longer than 64");
  u64 v = 0;
  for (std::size_t i = 0; i < b.size(); ++i) v |= static_cast<u64>(b[i] & 1U) << i;
  return v;
}

std::string Bits::str() const {
  std::string s;
  s.reserve(b.size());
  for (auto x : b) s.push_back(x ? '1' : '0');
  return s;
}

std::string data_dir() {
  if (const char* env = std::getenv("ALGEXT_DATA_DIR"); env && *env) return env;
#ifdef ALGEXT_DATA_DIR
  return ALGEXT_DATA_DIR;
#else
  return "data/v1";
#endif
}

u64 uniform_below(std::mt19937_64& rng, u64 n) {
  if (n <= 1) return 0;
  // Reject the top partial block so every residue is equally likely.
  const u64 limit = std::numeric_limits<u64>::max() - std::numeric_limits<u64>::max() % n;
  u64 x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace algext
