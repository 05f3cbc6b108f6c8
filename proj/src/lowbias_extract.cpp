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

#include "algext/lowbias_extract.hpp"

#include <bit>

namespace algext {

namespace {

u64 ipow(u64 b, int e) {
  u128 r = 1;
  for (int i = 0; i < e; ++i) {
    r *= b;
    if (r > std::numeric_limits<u64>::max()) fail(ErrorCode::kCardinalityOverflow, "power overflows 64 bits");
  }
  return static_cast<u64>(r);
}

// Rank of a rows x cols matrix over F_2, rows as bit masks.
int rank_gf2(const std::vector<u64>& rows_in) {
  u64 pivot[64] = {};
  int rank = 0;
  for (u64 v : rows_in) {
    while (v) {
      const int hb = 63 - std::countl_zero(v);
      if (!pivot[hb]) {
        pivot[hb] = v;
        ++rank;
        break;
      }
      v ^= pivot[hb];
    }
  }
  return rank;
}

// Small-prime elimination over a flat buffer; inv[] holds inverses mod p.
int rank_small(std::vector<std::uint32_t>& a, int rows, int cols, std::uint32_t p, const std::vector<std::uint32_t>& inv) {
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = r;
    while (piv < rows && a[piv * cols + c] == 0) ++piv;
    if (piv == rows) continue;
    if (piv != r)
      for (int k = 0; k < cols; ++k) std::swap(a[piv * cols + k], a[r * cols + k]);
    const std::uint32_t iv = inv[a[r * cols + c]];
    for (int k = c; k < cols; ++k) a[r * cols + k] = a[r * cols + k] * iv % p;
    for (int i = r + 1; i < rows; ++i) {
      const std::uint32_t f = a[i * cols + c];
      if (!f) continue;
      for (int k = c; k < cols; ++k) a[i * cols + k] = (a[i * cols + k] + (p - f) * a[r * cols + k]) % p;
    }
    ++r;
  }
  return r;
}

void check_shapes(const std::vector<PMatrix>& mats) {
  for (auto& m : mats) {
    if (m.size() != mats[0].size()) fail(ErrorCode::kShapeMismatch, "matrices differ in shape");
    for (auto& row : m)
      if (row.size() != mats[0][0].size()) fail(ErrorCode::kShapeMismatch, "ragged matrix");
  }
}

}  // namespace

std::size_t rank_mod_prime(PMatrix a, u64 p) {
  if (a.empty()) return 0;
  const std::size_t cols = a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < a.size(); ++c) {
    std::size_t piv = r;
    while (piv < a.size() && a[piv][c] % p == 0) ++piv;
    if (piv == a.size()) continue;
    std::swap(a[r], a[piv]);
    const u64 iv = powmod(a[r][c] % p, p - 2, p);
    for (auto& x : a[r]) x = mulmod(x % p, iv, p);
    for (std::size_t i = r + 1; i < a.size(); ++i) {
      const u64 f = a[i][c] % p;
      if (!f) continue;
      for (std::size_t k = c; k < cols; ++k) a[i][k] = (a[i][k] % p + p - mulmod(f, a[r][k], p)) % p;
    }
    ++r;
  }
  return r;
}

// --------------------------------------------------------------- Gabidulin

GabidulinParams GabidulinParams::make(u64 p, int s, int r, int k, int t, std::optional<std::vector<u64>> basis) {
  if (!(1 <= k && k <= r && r <= s)) fail(ErrorCode::kBoundViolation, "need 1 <= k <= r <= s");
  if (t < 1 || static_cast<i64>(t) > static_cast<i64>(k) * s) fail(ErrorCode::kBoundViolation, "need 1 <= t <= k s");
  GabidulinParams g;
  g.p = p;
  g.s = s;
  g.r = r;
  g.k = k;
  g.t = t;
  g.big = make_field(p, s);
  if (basis) {
    if (static_cast<int>(basis->size()) != r) fail(ErrorCode::kLengthMismatch, "need r basis elements");
    g.basis = *basis;
  } else {
    u64 pw = 1;
    for (int j = 0; j < r; ++j, pw *= p) g.basis.push_back(pw);
  }
  PMatrix rows;
  for (u64 b : g.basis) {
    if (b >= g.big->q()) fail(ErrorCode::kOutOfRange, "basis element outside F_{p^s}");
    rows.push_back(g.big->coeffs(b));
  }
  if (rank_mod_prime(rows, p) != static_cast<std::size_t>(r))
    fail(ErrorCode::kBasisDependent, "basis is not independent over F_p");
  return g;
}

std::vector<PMatrix> gabidulin_matrices(const GabidulinParams& g) {
  const FieldCtx& f = *g.big;
  std::vector<PMatrix> out;
  for (int idx = 0; idx < g.t; ++idx) {
    const int i = idx / g.s, a = idx % g.s;
    const u64 u = ipow(g.p, a);  // X^a, packed
    PMatrix m(g.s, std::vector<u64>(g.r));
    for (int j = 0; j < g.r; ++j) {
      // u * g_j^{p^i}
      u64 x = g.basis[j];
      for (int e = 0; e < i; ++e) x = f.pow(x, g.p);
      auto col = f.coeffs(f.mul(u, x));
      for (int row = 0; row < g.s; ++row) m[row][j] = col[row];
    }
    out.push_back(std::move(m));
  }
  return out;
}

MinRankSurvey min_rank_survey(const std::vector<PMatrix>& mats, u64 p, int bound, u64 budget, u64 rng_seed) {
  MinRankSurvey out;
  out.bound = bound;
  if (mats.empty()) fail(ErrorCode::kInvalidArgument, "no matrices");
  check_shapes(mats);
  const int t = static_cast<int>(mats.size());
  const int rows = static_cast<int>(mats[0].size()), cols = rows ? static_cast<int>(mats[0][0].size()) : 0;
  out.min_rank = std::min(rows, cols);

  u128 space = 1;
  for (int i = 0; i < t && space <= budget; ++i) space *= p;
  out.exhaustive = space <= budget;

  if (p == 2 && cols <= 64) {
    std::vector<std::vector<u64>> bm(t, std::vector<u64>(rows, 0));
    for (int i = 0; i < t; ++i)
      for (int a = 0; a < rows; ++a)
        for (int b = 0; b < cols; ++b)
          if (mats[i][a][b] & 1) bm[i][a] |= u64{1} << b;
    std::vector<u64> cur(rows, 0);
    auto step = [&](int l) {
      for (int a = 0; a < rows; ++a) cur[a] ^= bm[l][a];
    };
    if (out.exhaustive) {
      // Gray code: combination g(c) differs from g(c-1) in one matrix.
      const u64 total = static_cast<u64>(space);
      for (u64 c = 1; c < total; ++c) {
        step(std::countr_zero(c));
        out.min_rank = std::min(out.min_rank, rank_gf2(cur));
      }
      out.combinations = total - 1;
    } else {
      std::mt19937_64 rng(rng_seed);
      for (u64 it = 0; it < constants::kRankSampleCount; ++it) {
        std::fill(cur.begin(), cur.end(), 0);
        bool any = false;
        for (int i = 0; i < t; ++i)
          if (rng() & 1) {
            step(i);
            any = true;
          }
        if (!any) {
          --it;
          continue;
        }
        out.min_rank = std::min(out.min_rank, rank_gf2(cur));
      }
      out.combinations = constants::kRankSampleCount;
    }
  } else if (p < 65536) {
    const std::uint32_t pp = static_cast<std::uint32_t>(p);
    std::vector<std::uint32_t> inv(pp, 0);
    for (std::uint32_t x = 1; x < pp; ++x) inv[x] = static_cast<std::uint32_t>(powmod(x, p - 2, p));
    std::vector<std::vector<std::uint32_t>> flat(t, std::vector<std::uint32_t>(rows * cols));
    for (int i = 0; i < t; ++i)
      for (int a = 0; a < rows; ++a)
        for (int b = 0; b < cols; ++b) flat[i][a * cols + b] = static_cast<std::uint32_t>(mats[i][a][b] % p);
    std::vector<std::uint32_t> cur(rows * cols, 0), work;
    auto add = [&](int l, std::uint32_t mult) {
      for (std::size_t x = 0; x < cur.size(); ++x) cur[x] = (cur[x] + mult * flat[l][x]) % pp;
    };
    auto measure = [&] {
      work = cur;
      out.min_rank = std::min(out.min_rank, rank_small(work, rows, cols, pp, inv));
    };
    if (out.exhaustive) {
      // Odometer; a digit wrapping from p-1 to 0 adds the matrix once more.
      std::vector<std::uint32_t> digit(t, 0);
      const u64 total = static_cast<u64>(space);
      for (u64 c = 1; c < total; ++c) {
        int l = 0;
        while (digit[l] == pp - 1) {
          digit[l] = 0;
          add(l, 1);
          ++l;
        }
        ++digit[l];
        add(l, 1);
        measure();
      }
      out.combinations = total - 1;
    } else {
      std::mt19937_64 rng(rng_seed);
      for (u64 it = 0; it < constants::kRankSampleCount; ++it) {
        std::fill(cur.begin(), cur.end(), 0);
        bool any = false;
        for (int i = 0; i < t; ++i) {
          const auto c = static_cast<std::uint32_t>(uniform_below(rng, p));
          if (c) {
            add(i, c);
            any = true;
          }
        }
        if (!any) {
          --it;
          continue;
        }
        measure();
      }
      out.combinations = constants::kRankSampleCount;
    }
  } else {
    // Large p: random combinations only.
    out.exhaustive = false;
    std::mt19937_64 rng(rng_seed);
    for (u64 it = 0; it < constants::kRankSampleCount; ++it) {
      PMatrix cur(rows, std::vector<u64>(cols, 0));
      bool any = false;
      for (int i = 0; i < t; ++i) {
        const u64 c = uniform_below(rng, p);
        if (!c) continue;
        any = true;
        for (int a = 0; a < rows; ++a)
          for (int b = 0; b < cols; ++b) cur[a][b] = (cur[a][b] + mulmod(c, mats[i][a][b] % p, p)) % p;
      }
      if (!any) {
        --it;
        continue;
      }
      out.min_rank = std::min<int>(out.min_rank, static_cast<int>(rank_mod_prime(cur, p)));
    }
    out.combinations = constants::kRankSampleCount;
  }
  out.pass = out.min_rank >= bound;
  return out;
}

// ---------------------------------------------------------------- bilinear

BilinearExtractor build_bilinear(u64 p, int n, int r, int k, int t) {
  if (r < 1 || 2 * r > n) fail(ErrorCode::kShapeMismatch, "need 1 <= r and 2r <= n");
  BilinearExtractor ext;
  ext.params = GabidulinParams::make(p, n - r, r, k, t);
  ext.matrices = gabidulin_matrices(ext.params);
  return ext;
}

std::vector<u64> BilinearExtractor::eval(const std::vector<u64>& x) const {
  const int s = params.s, r = params.r;
  if (static_cast<int>(x.size()) != s + r) fail(ErrorCode::kLengthMismatch, "input length must be r + s");
  const u64 p = params.p;
  std::vector<u64> out(matrices.size(), 0);
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    u64 acc = 0;
    for (int a = 0; a < s; ++a) {
      if (x[a] % p == 0) continue;
      u64 row = 0;
      for (int b = 0; b < r; ++b) row = (row + mulmod(matrices[i][a][b], x[s + b] % p, p)) % p;
      acc = (acc + mulmod(x[a] % p, row, p)) % p;
    }
    out[i] = acc;
  }
  return out;
}

Carrier BilinearExtractor::input_carrier() const { return Carrier::field_power(make_field(params.p, 1), n()); }
Carrier BilinearExtractor::output_carrier() const {
  return Carrier::field_power(make_field(params.p, 1), static_cast<int>(matrices.size()));
}

u64 BilinearExtractor::eval_index(u64 x) const {
  // Mixed radix, first coordinate most significant.
  const u64 p = params.p;
  std::vector<u64> v(n());
  for (int i = n() - 1; i >= 0; --i) {
    v[i] = x % p;
    x /= p;
  }
  u64 idx = 0;
  for (u64 y : eval(v)) idx = idx * p + y;
  return idx;
}

nlohmann::json BilinearExtractor::to_json() const {
  return {{"kind", "bilinear"}, {"p", params.p}, {"s", params.s}, {"r", params.r}, {"k", params.k},
          {"t", params.t}, {"field", params.big->token()}, {"basis", params.basis}, {"matrices", matrices}};
}

BilinearExtractor BilinearExtractor::from_json(const nlohmann::json& j) {
  try {
    BilinearExtractor ext;
    ext.params = GabidulinParams::make(j.at("p").get<u64>(), j.at("s").get<int>(), j.at("r").get<int>(),
                                       j.at("k").get<int>(), j.at("t").get<int>(),
                                       j.at("basis").get<std::vector<u64>>());
    if (j.at("field").get<std::string>() != ext.params.big->token())
      fail(ErrorCode::kConfigError, "field modulus differs from the default tower");
    ext.matrices = gabidulin_matrices(ext.params);
    if (j.contains("matrices") && j.at("matrices").get<std::vector<PMatrix>>() != ext.matrices)
      fail(ErrorCode::kConfigError, "stored matrices differ from their rebuild");
    return ext;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("bilinear json: ") + e.what());
  }
}

FourierNormCheck fourier_norm_check(const BilinearExtractor& ext, double tol, u64 budget) {
  const u64 p = ext.params.p;
  const int n = ext.n(), t = static_cast<int>(ext.matrices.size());
  FourierNormCheck out;
  out.bound_l1 = std::pow(static_cast<double>(p), ext.params.r);
  out.bound_linf = std::pow(static_cast<double>(p), -ext.params.rank_bound());
  const u128 work = static_cast<u128>(ipow(p, n)) * ipow(p, t);
  if (work > budget) fail(ErrorCode::kBudgetExceeded, "p^n * p^t exceeds the transform budget");
  const u64 size = ipow(p, n), chars = ipow(p, t);

  // f(x) for every x, as coordinates.
  std::vector<std::vector<std::uint32_t>> fx(size);
  for (u64 x = 0; x < size; ++x) {
    u64 y = ext.eval_index(x);
    fx[x].resize(t);
    for (int i = t - 1; i >= 0; --i) {
      fx[x][i] = static_cast<std::uint32_t>(y % p);
      y /= p;
    }
  }
  out.characters = chars - 1;
  if (p == 2) {
    std::vector<u64> mask(size, 0);
    for (u64 x = 0; x < size; ++x)
      for (int i = 0; i < t; ++i)
        if (fx[x][i]) mask[x] |= u64{1} << (t - 1 - i);
    std::vector<i64> h(size);
    for (u64 u = 1; u < chars; ++u) {
      for (u64 x = 0; x < size; ++x) h[x] = (std::popcount(mask[x] & u) & 1) ? -1 : 1;
      for (u64 len = 1; len < size; len <<= 1)
        for (u64 i = 0; i < size; i += len << 1)
          for (u64 j = i; j < i + len; ++j) {
            const i64 a = h[j], b = h[j + len];
            h[j] = a + b;
            h[j + len] = a - b;
          }
      i64 l1 = 0, linf = 0;
      for (i64 v : h) {
        l1 += v < 0 ? -v : v;
        linf = std::max<i64>(linf, v < 0 ? -v : v);
      }
      out.max_l1 = std::max(out.max_l1, static_cast<double>(l1) / static_cast<double>(size));
      out.max_linf = std::max(out.max_linf, static_cast<double>(linf) / static_cast<double>(size));
    }
  } else {
    std::vector<std::complex<double>> root(p), h(size), tmp(p);
    for (u64 k = 0; k < p; ++k) root[k] = std::polar(1.0, 2 * M_PI * static_cast<double>(k) / static_cast<double>(p));
    std::vector<u64> u(t);
    for (u64 ui = 1; ui < chars; ++ui) {
      u64 rest = ui;
      for (int i = t - 1; i >= 0; --i) {
        u[i] = rest % p;
        rest /= p;
      }
      for (u64 x = 0; x < size; ++x) {
        u64 ph = 0;
        for (int i = 0; i < t; ++i) ph += u[i] * fx[x][i];
        h[x] = root[ph % p];
      }
      // Length-p transform along each axis, conjugate kernel.
      for (u64 stride = 1; stride < size; stride *= p) {
        for (u64 base = 0; base < size; ++base) {
          if ((base / stride) % p) continue;
          for (u64 w = 0; w < p; ++w) {
            std::complex<double> acc = 0;
            for (u64 x = 0; x < p; ++x) acc += h[base + x * stride] * std::conj(root[(w * x) % p]);
            tmp[w] = acc;
          }
          for (u64 w = 0; w < p; ++w) h[base + w * stride] = tmp[w];
        }
      }
      double l1 = 0, linf = 0;
      for (auto& v : h) {
        l1 += std::abs(v);
        linf = std::max(linf, std::abs(v));
      }
      out.max_l1 = std::max(out.max_l1, l1 / static_cast<double>(size));
      out.max_linf = std::max(out.max_linf, linf / static_cast<double>(size));
    }
  }
  out.pass = out.max_l1 <= out.bound_l1 + tol && out.max_linf <= out.bound_linf + tol;
  return out;
}

// ------------------------------------------------------------------- mod M

ModMExtractor ModMExtractor::make(u64 N, int t, u64 M) {
  if (N < 1 || t < 1) fail(ErrorCode::kOutOfRange, "need N >= 1 and t >= 1");
  if (M < 1 || M > N) fail(ErrorCode::kOutOfRange, "need 1 <= M <= N");
  return ModMExtractor{N, t, M};
}

std::vector<u64> ModMExtractor::eval(const std::vector<u64>& a) const {
  if (static_cast<int>(a.size()) != t) fail(ErrorCode::kLengthMismatch, "input length must be t");
  for (u64 x : a)
    if (x >= N) fail(ErrorCode::kOutOfRange, "coordinate outside [0, N)");
  std::vector<u64> out = a;
  out.back() %= M;
  return out;
}

std::vector<u64> mod_m_extract(const ModMExtractor& ext, const std::vector<u64>& a) { return ext.eval(a); }

u64 ModMExtractor::output_size() const {
  u128 s = M;
  for (int i = 0; i + 1 < t; ++i) {
    s *= N;
    if (s > std::numeric_limits<u64>::max()) fail(ErrorCode::kCardinalityOverflow, "output space too large");
  }
  return static_cast<u64>(s);
}

u64 ModMExtractor::eval_index(u64 a) const {
  // Last coordinate is the least significant digit.
  const u64 last = a % N;
  return (a / N) * M + last % M;
}

Ratio mod_m_uniform_distance(u64 N, u64 M) {
  if (M < 1 || M > N) fail(ErrorCode::kOutOfRange, "need 1 <= M <= N");
  const u64 rem = N % M;
  return ratio_reduce(Ratio{static_cast<u128>(rem) * (M - rem), static_cast<u128>(N) * M});
}

Ratio mod_m_measured_distance(const ModMExtractor& ext) {
  const u64 in = ipow(ext.N, ext.t);
  if (in > (u64{1} << 26)) fail(ErrorCode::kBudgetExceeded, "input space too large to enumerate");
  const u64 out_size = ext.output_size();
  std::vector<u64> counts(out_size, 0);
  for (u64 a = 0; a < in; ++a) ++counts[ext.eval_index(a)];
  // sum |c/T - 1/U| / 2 = sum |c U - T| / (2 T U)
  u128 num = 0;
  for (u64 c : counts) {
    const u128 cu = static_cast<u128>(c) * out_size;
    num += cu > in ? cu - in : in - cu;
  }
  return ratio_reduce(Ratio{num, static_cast<u128>(2) * in * out_size});
}

// ------------------------------------------------------------ dense affine

BilinearExtractor build_dense_affine_extractor(u64 p, int n, int t) {
  if (n < 4) fail(ErrorCode::kParamsInfeasible, "dense-affine extractor needs n >= 4");
  return build_bilinear(p, n, n / 2, 2, t);
}

double dense_affine_error(const BilinearExtractor& ext, double e) {
  const double p = static_cast<double>(ext.params.p);
  return std::pow(p, -ext.params.rank_bound()) * e * std::pow(p, ext.params.t / 2.0);
}

int dense_affine_max_t(u64 p, int n, double e, double eps) {
  const double t = n - 3 - 2 * logb_sat(e / eps, static_cast<double>(p));
  return t < 1 ? 0 : static_cast<int>(std::floor(t + 1e-9));
}

double bilinear_error_bound(const BilinearExtractor& ext, double eps, double e) {
  const double p = static_cast<double>(ext.params.p);
  return (std::pow(p, ext.params.r) * eps + std::pow(p, -ext.params.rank_bound()) * e) *
         std::pow(p, ext.params.t / 2.0);
}

// ---------------------------------------------------------- strongly biased

StronglyBiasedExtractor build_strongly_biased_extractor(int n, u64 p, double eps, double e, double eps_prime) {
  if (n < 1 || e < 1 || !(eps_prime > 0 && eps_prime < 1) || eps < 0)
    fail(ErrorCode::kInvalidArgument, "need n >= 1, e >= 1, 0 < eps' < 1, eps >= 0");
  StronglyBiasedExtractor out;
  out.p = p;
  out.n = n;
  out.eps = eps;
  out.e = e;
  out.eps_prime = eps_prime;
  const double base = static_cast<double>(p);
  double log_inv_eps;
  if (eps <= 0) {
    log_inv_eps = constants::kLogSaturation;
    out.saturated = true;
  } else {
    log_inv_eps = logb_sat(1 / eps, base);
  }
  const double np = 2 * log_inv_eps - 2 * logb_sat(16 * e / (eps_prime * eps_prime), base);
  out.n_prime = np >= n ? n : static_cast<int>(std::floor(np + 1e-9));
  const double t = out.n_prime - 3 - 2 * logb_sat(2 * e / eps_prime, base);
  if (t < 1 - 1e-9) fail(ErrorCode::kParamsInfeasible, "strongly-biased extractor has t < 1");
  out.t = static_cast<int>(std::floor(t + 1e-9));
  out.f = build_dense_affine_extractor(p, out.n_prime, out.t);
  return out;
}

std::vector<u64> StronglyBiasedExtractor::eval(const std::vector<u64>& x) const {
  if (static_cast<int>(x.size()) != n) fail(ErrorCode::kLengthMismatch, "input length must be n");
  return f.eval(std::vector<u64>(x.begin(), x.begin() + n_prime));
}

nlohmann::json StronglyBiasedExtractor::to_json() const {
  return {{"kind", "strongly_biased"}, {"n", n},         {"p", p}, {"eps", eps}, {"e", e},
          {"eps_prime", eps_prime},    {"n_prime", n_prime}, {"t", t}, {"f", f.to_json()}};
}

StronglyBiasedExtractor StronglyBiasedExtractor::from_json(const nlohmann::json& j) {
  try {
    auto out = build_strongly_biased_extractor(j.at("n").get<int>(), j.at("p").get<u64>(), j.at("eps").get<double>(),
                                               j.at("e").get<double>(), j.at("eps_prime").get<double>());
    if (j.at("n_prime").get<int>() != out.n_prime || j.at("t").get<int>() != out.t)
      fail(ErrorCode::kConfigError, "stored strongly-biased parameters differ from their rebuild");
    return out;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("strongly-biased json: ") + e.what());
  }
}

// ---------------------------------------------------------- constant fraction

ConstantFractionExtractor build_constant_fraction_extractor(int n, u64 p, double d, double e, double eps_prime) {
  const double c = constants::kConstantFractionC;
  if (n < c) fail(ErrorCode::kParamsInfeasible, "n below the constant-fraction floor");
  const int r = n / 4, s = n - r, k = std::max(1, r / 2);
  const double base = static_cast<double>(p);
  const double tt = n / c - 2 * logb_sat(d * e / eps_prime, base);
  if (tt < 1 - 1e-9) fail(ErrorCode::kParamsInfeasible, "constant-fraction extractor has t < 1");
  const int t = static_cast<int>(std::min<double>(std::floor(tt + 1e-9), static_cast<double>(k) * s));
  ConstantFractionExtractor out;
  out.f = build_bilinear(p, n, r, k, t);
  out.eps = d * std::pow(base, -n / 2.0);
  out.declared_error = bilinear_error_bound(out.f, out.eps, e);
  if (out.declared_error > eps_prime)
    fail(ErrorCode::kParamsInfeasible, "constant-fraction error bound exceeds eps'");
  return out;
}

// ---------------------------------------------------------------- helpers

FiniteDistribution affine_uniform(Field fp, const std::vector<std::vector<u64>>& basis, const std::vector<u64>& offset) {
  const FieldCtx& f = *fp;
  const int n = static_cast<int>(offset.size());
  for (auto& b : basis)
    if (static_cast<int>(b.size()) != n) fail(ErrorCode::kShapeMismatch, "basis vector length");
  auto carrier = Carrier::field_power(fp, n);
  const u64 q = f.q();
  const u64 count = ipow(q, static_cast<int>(basis.size()));
  std::vector<u64> support;
  support.reserve(count);
  std::vector<u64> coef(basis.size(), 0), pt(n);
  for (u64 c = 0; c < count; ++c) {
    u64 rest = c;
    for (std::size_t i = basis.size(); i-- > 0;) {
      coef[i] = rest % q;
      rest /= q;
    }
    pt = offset;
    for (std::size_t i = 0; i < basis.size(); ++i)
      if (coef[i])
        for (int j = 0; j < n; ++j) pt[j] = f.add(pt[j], f.mul(coef[i], basis[i][j]));
    support.push_back(carrier.encode(pt));
  }
  std::sort(support.begin(), support.end());
  if (std::adjacent_find(support.begin(), support.end()) != support.end())
    fail(ErrorCode::kRankDeficientInput, "affine basis is dependent");
  return FiniteDistribution::uniform_over(carrier, support);
}

}  // namespace algext
