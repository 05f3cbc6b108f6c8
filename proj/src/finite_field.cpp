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

#include "algext/finite_field.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

namespace algext {

u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>((static_cast<u128>(a) * b) % m);
}

u64 powmod(u64 a, u64 e, u64 m) {
  if (m == 1) return 0;
  u64 r = 1;
  a %= m;
  while (e > 0) {
    if (e & 1U) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

u64 gcd_u64(u64 a, u64 b) {
  while (b != 0) {
    u64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 sp : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % sp == 0) return n == sp;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace {

u64 pollard_brent(u64 n) {
  if (n % 2 == 0) return 2;
  for (u64 c = 1;; ++c) {
    u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
    u64 r = 1;
    const u64 block = 128;
    auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      u64 k = 0;
      while (k < r && g == 1) {
        ys = y;
        for (u64 i = 0; i < std::min(block, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = gcd_u64(q, n);
        k += block;
      }
      r <<= 1;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd_u64(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_rec(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime_u64(n)) {
    out.push_back(n);
    return;
  }
  for (u64 sp = 2; sp < 100; ++sp) {
    if (n % sp == 0) {
      out.push_back(sp);
      factor_rec(n / sp, out);
      return;
    }
  }
  u64 d = pollard_brent(n);
  factor_rec(d, out);
  factor_rec(n / d, out);
}

using Poly = std::vector<u64>;  // low degree first

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mod(Poly a, const Poly& f, u64 p) {
  trim(a);
  const std::size_t df = f.size() - 1;
  while (a.size() > df) {
    u64 c = a.back();
    std::size_t shift = a.size() - 1 - df;
    if (c != 0) {
      for (std::size_t j = 0; j <= df; ++j) {
        a[shift + j] = (a[shift + j] + p - mulmod(c, f[j], p)) % p;
      }
    }
    a.pop_back();
    trim(a);
  }
  return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f, u64 p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
    }
  }
  return poly_mod(std::move(r), f, p);
}

Poly poly_powmod(Poly base, u64 e, const Poly& f, u64 p) {
  Poly r{1};
  base = poly_mod(base, f, p);
  while (e > 0) {
    if (e & 1U) r = poly_mulmod(r, base, f, p);
    base = poly_mulmod(base, base, f, p);
    e >>= 1;
  }
  return r;
}

Poly poly_gcd(Poly a, Poly b, u64 p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    // make b monic, then a mod b
    u64 inv = powmod(b.back(), p - 2, p);
    for (auto& c : b) c = mulmod(c, inv, p);
    Poly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

Poly sub_x(Poly a, u64 p) {
  if (a.size() < 2) a.resize(2, 0);
  a[1] = (a[1] + p - 1) % p;
  trim(a);
  return a;
}

std::vector<u64> distinct_prime_factors(u64 n) {
  std::vector<u64> out;
  for (auto& [q, e] : factor_u64(n)) out.push_back(q);
  return out;
}

}  // namespace

std::vector<std::pair<u64, int>> factor_u64(u64 n) {
  std::vector<u64> flat;
  factor_rec(n, flat);
  std::sort(flat.begin(), flat.end());
  std::vector<std::pair<u64, int>> out;
  for (u64 f : flat) {
    if (!out.empty() && out.back().first == f) {
      ++out.back().second;
    } else {
      out.emplace_back(f, 1);
    }
  }
  return out;
}

const std::vector<u64>& sieve_primes() {
  static const std::vector<u64> primes = [] {
    const u64 limit = constants::kSieveLimit;
    std::vector<bool> composite(limit + 1, false);
    std::vector<u64> out;
    for (u64 i = 2; i <= limit; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

u64 nth_prime(std::size_t i) {
  const auto& primes = sieve_primes();
  if (i == 0 || i > primes.size()) {
    fail(ErrorCode::kParamsInfeasible, "prime index outside the sieve range");
  }
  return primes[i - 1];
}

bool is_irreducible_mod_p(const std::vector<u64>& f_in, u64 p) {
  Poly f = f_in;
  trim(f);
  if (f.size() < 2) return false;
  const int m = static_cast<int>(f.size()) - 1;
  u64 lead_inv = powmod(f.back(), p - 2, p);
  for (auto& c : f) c = mulmod(c, lead_inv, p);
  if (m == 1) return true;
  if (f[0] == 0) return false;
  // X^{p^i} mod f for i = 0..m
  std::vector<Poly> frob(m + 1);
  frob[0] = poly_mod(Poly{0, 1}, f, p);
  for (int i = 1; i <= m; ++i) frob[i] = poly_powmod(frob[i - 1], p, f, p);
  Poly xm = sub_x(frob[m], p);
  if (!xm.empty()) return false;
  for (u64 r : distinct_prime_factors(static_cast<u64>(m))) {
    Poly g = sub_x(frob[m / static_cast<int>(r)], p);
    Poly h = poly_gcd(f, g, p);
    if (h.size() != 1) return false;
  }
  return true;
}

FieldCtx::FieldCtx(u64 p, int m, std::vector<u64> modulus)
    : p_(p), m_(m), modulus_(std::move(modulus)) {
  q_ = 1;
  pow_p_.resize(m_ + 1);
  for (int i = 0; i <= m_; ++i) {
    pow_p_[i] = q_;
    if (i < m_) q_ *= p_;
  }
  coeff_bits_ = 0;
  while (coeff_bits_ < 64 && (u64{1} << coeff_bits_) < p_) ++coeff_bits_;
  if (p_ == 2) {
    for (int i = 0; i < m_; ++i) gf2_mod_ |= (modulus_[i] & 1U) << i;
  }
  if (p_ <= (u64{1} << 22)) {
    roots_.resize(p_);
    for (u64 k = 0; k < p_; ++k) {
      long double ang = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k) /
                        static_cast<long double>(p_);
      roots_[k] = {static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang))};
    }
  }
  tr_basis_.assign(m_, 0);
  for (int i = 0; i < m_; ++i) {
    u64 x = pow_p_[i];  // packed X^i
    u64 acc = 0;
    u64 y = x;
    for (int j = 0; j < m_; ++j) {
      acc = add(acc, y);
      y = pow(y, p_);
    }
    tr_basis_[i] = acc;  // lies in F_p
  }
  qm1_factors_ = factor_u64(q_ - 1);
}

u64 FieldCtx::add(u64 a, u64 b) const {
  if (m_ == 1) {
    u64 s = a + b;
    return (s >= p_ || s < a) ? s - p_ : s;
  }
  if (p_ == 2) return a ^ b;
  u64 r = 0;
  for (int i = 0; i < m_; ++i) {
    u64 ca = a % p_, cb = b % p_;
    a /= p_;
    b /= p_;
    u64 s = ca + cb;
    if (s >= p_) s -= p_;
    r += s * pow_p_[i];
  }
  return r;
}

u64 FieldCtx::neg(u64 a) const {
  if (m_ == 1) return a == 0 ? 0 : p_ - a;
  if (p_ == 2) return a;
  u64 r = 0;
  for (int i = 0; i < m_; ++i) {
    u64 c = a % p_;
    a /= p_;
    r += (c == 0 ? 0 : p_ - c) * pow_p_[i];
  }
  return r;
}

u64 FieldCtx::sub(u64 a, u64 b) const { return add(a, neg(b)); }

u64 FieldCtx::mul_gf2(u64 a, u64 b) const {
  u128 prod = 0;
  u128 aa = a;
  while (b != 0) {
    if (b & 1U) prod ^= aa;
    aa <<= 1;
    b >>= 1;
  }
  const u128 full = (static_cast<u128>(1) << m_) | gf2_mod_;
  for (int i = 2 * m_ - 2; i >= m_; --i) {
    if ((prod >> i) & 1U) prod ^= full << (i - m_);
  }
  return static_cast<u64>(prod);
}

u64 FieldCtx::mul_ext(u64 a, u64 b) const {
  u64 da[64], db[64];
  for (int i = 0; i < m_; ++i) {
    da[i] = a % p_;
    a /= p_;
    db[i] = b % p_;
    b /= p_;
  }
  u64 prod[128] = {};
  for (int i = 0; i < m_; ++i) {
    if (da[i] == 0) continue;
    for (int j = 0; j < m_; ++j) {
      prod[i + j] = (prod[i + j] + mulmod(da[i], db[j], p_)) % p_;
    }
  }
  for (int i = 2 * m_ - 2; i >= m_; --i) {
    u64 c = prod[i];
    if (c == 0) continue;
    for (int j = 0; j < m_; ++j) {
      u64 t = mulmod(c, modulus_[j], p_);
      u64& slot = prod[i - m_ + j];
      slot = (slot + p_ - t) % p_;
    }
    prod[i] = 0;
  }
  u64 r = 0;
  for (int i = 0; i < m_; ++i) r += prod[i] * pow_p_[i];
  return r;
}

u64 FieldCtx::mul(u64 a, u64 b) const {
  if (m_ == 1) return mulmod(a, b, p_);
  if (p_ == 2) return mul_gf2(a, b);
  return mul_ext(a, b);
}

u64 FieldCtx::pow(u64 a, u64 e) const {
  u64 r = 1;
  while (e > 0) {
    if (e & 1U) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

u64 FieldCtx::inv(u64 a) const {
  if (a == 0) fail(ErrorCode::kDivisionByZero, "inverse of zero");
  return pow(a, q_ - 2);
}

u64 FieldCtx::from_int(i64 n) const {
  i128 r = static_cast<i128>(n) % static_cast<i128>(p_);
  if (r < 0) r += static_cast<i128>(p_);
  return static_cast<u64>(r);
}

u64 FieldCtx::scalar_mul(u64 c, u64 a) const {
  if (m_ == 1) return mulmod(c, a, p_);
  if (p_ == 2) return (c & 1U) ? a : 0;
  u64 r = 0;
  for (int i = 0; i < m_; ++i) {
    u64 d = a % p_;
    a /= p_;
    r += mulmod(c, d, p_) * pow_p_[i];
  }
  return r;
}

u64 FieldCtx::coeff(u64 a, int i) const { return (a / pow_p_[i]) % p_; }

std::vector<u64> FieldCtx::coeffs(u64 a) const {
  std::vector<u64> c(m_);
  for (int i = 0; i < m_; ++i) {
    c[i] = a % p_;
    a /= p_;
  }
  return c;
}

u64 FieldCtx::from_coeffs(const std::vector<u64>& c) const {
  if (static_cast<int>(c.size()) != m_) fail(ErrorCode::kLengthMismatch, "coefficient vector length");
  u64 r = 0;
  for (int i = 0; i < m_; ++i) {
    if (c[i] >= p_) fail(ErrorCode::kOutOfRange, "coefficient out of range");
    r += c[i] * pow_p_[i];
  }
  return r;
}

u64 FieldCtx::trace(u64 a) const {
  if (m_ == 1) return a;
  u64 acc = 0;
  for (int i = 0; i < m_; ++i) {
    u64 c = a % p_;
    a /= p_;
    if (c != 0) acc = (acc + mulmod(c, tr_basis_[i], p_)) % p_;
  }
  return acc;
}

std::complex<double> FieldCtx::root(u64 k) const {
  k %= p_;
  if (!roots_.empty()) return roots_[k];
  long double ang = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k) /
                    static_cast<long double>(p_);
  return {static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang))};
}

std::complex<double> FieldCtx::character(u64 alpha, u64 x) const {
  return root(trace(mul(alpha, x)));
}

u64 FieldCtx::order(u64 w) const {
  if (w == 0) fail(ErrorCode::kZeroElement, "order of zero");
  u64 ord = q_ - 1;
  for (auto& [r, e] : qm1_factors_) {
    for (int i = 0; i < e; ++i) {
      if (pow(w, ord / r) == 1) {
        ord /= r;
      } else {
        break;
      }
    }
  }
  return ord;
}

FieldElement FieldCtx::elem(u64 v) const {
  if (v >= q_) fail(ErrorCode::kOutOfRange, "element index out of range");
  return FieldElement{this, v};
}

std::string FieldCtx::token() const {
  std::ostringstream os;
  os << p_ << '^' << m_ << '/';
  for (int i = 0; i <= m_; ++i) {
    if (i) os << ',';
    os << modulus_[i];
  }
  return os.str();
}

std::string FieldCtx::element_str(u64 a) const {
  if (m_ == 1) return std::to_string(a);
  auto c = coeffs(a);
  std::string s;
  for (int i = m_ - 1; i >= 0; --i) {
    if (c[i] == 0) continue;
    if (!s.empty()) s += "+";
    if (i == 0) {
      s += std::to_string(c[i]);
    } else {
      if (c[i] != 1) s += std::to_string(c[i]);
      s += "X";
      if (i > 1) s += "^" + std::to_string(i);
    }
  }
  return s.empty() ? "0" : s;
}

static void check_same(const FieldElement& a, const FieldElement& b) {
  if (a.ctx == nullptr || a.ctx != b.ctx) fail(ErrorCode::kCtxMismatch, "elements from different fields");
}

std::vector<u64> FieldElement::coeffs() const { return ctx->coeffs(v); }
FieldElement FieldElement::operator+(const FieldElement& o) const {
  check_same(*this, o);
  return {ctx, ctx->add(v, o.v)};
}
FieldElement FieldElement::operator-(const FieldElement& o) const {
  check_same(*this, o);
  return {ctx, ctx->sub(v, o.v)};
}
FieldElement FieldElement::operator*(const FieldElement& o) const {
  check_same(*this, o);
  return {ctx, ctx->mul(v, o.v)};
}
FieldElement FieldElement::operator/(const FieldElement& o) const {
  check_same(*this, o);
  return {ctx, ctx->div(v, o.v)};
}
FieldElement FieldElement::operator-() const { return {ctx, ctx->neg(v)}; }
FieldElement FieldElement::inv() const { return {ctx, ctx->inv(v)}; }
FieldElement FieldElement::pow(u64 e) const { return {ctx, ctx->pow(v, e)}; }

Field make_field(u64 p, int m, std::optional<std::vector<u64>> modulus) {
  if (!is_prime_u64(p)) fail(ErrorCode::kNonPrime, std::to_string(p) + " is not prime");
  if (m < 1) fail(ErrorCode::kInvalidArgument, "extension degree must be at least 1");
  u128 q = 1;
  for (int i = 0; i < m; ++i) {
    q *= p;
    if (q > std::numeric_limits<u64>::max()) {
      fail(ErrorCode::kCardinalityOverflow, "p^m exceeds the 64-bit cardinality cap");
    }
  }
  std::vector<u64> f;
  if (modulus) {
    f = *modulus;
    if (static_cast<int>(f.size()) != m + 1 || f.back() != 1) {
      fail(ErrorCode::kReducibleModulus, "modulus must be monic of degree m");
    }
    for (u64 c : f) {
      if (c >= p) fail(ErrorCode::kReducibleModulus, "modulus coefficient out of range");
    }
    if (!is_irreducible_mod_p(f, p)) fail(ErrorCode::kReducibleModulus, "modulus is reducible");
  } else if (m == 1) {
    f = {0, 1};
  } else {
    const u64 count = static_cast<u64>(q);
    for (u64 k = 0; k < count; ++k) {
      f.assign(m + 1, 0);
      u64 t = k;
      for (int i = 0; i < m; ++i) {
        f[i] = t % p;
        t /= p;
      }
      f[m] = 1;
      if (f[0] == 0) continue;
      if (is_irreducible_mod_p(f, p)) break;
    }
  }
  return std::make_shared<const FieldCtx>(p, m, f);
}

Field parse_field_token(const std::string& token) {
  try {
    std::size_t slash = token.find('/');
    std::string head = token.substr(0, slash);
    std::size_t caret = head.find('^');
    u64 p = std::stoull(head.substr(0, caret));
    int m = caret == std::string::npos ? 1 : std::stoi(head.substr(caret + 1));
    if (slash == std::string::npos) return make_field(p, m);
    std::vector<u64> f;
    std::stringstream ss(token.substr(slash + 1));
    std::string part;
    while (std::getline(ss, part, ',')) f.push_back(std::stoull(part));
    return make_field(p, m, f);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorCode::kConfigError, "malformed field token '" + token + "'");
  }
}

std::vector<FieldElement> enumerate_field(const FieldCtx& ctx) {
  std::vector<FieldElement> out;
  out.reserve(ctx.q());
  for (u64 v = 0; v < ctx.q(); ++v) out.push_back(FieldElement{&ctx, v});
  return out;
}

u64 subfield_generator_image(const FieldCtx& small, const FieldCtx& big) {
  if (small.p() != big.p() || big.m() % small.m() != 0) {
    fail(ErrorCode::kCtxMismatch, "not a subfield");
  }
  if (small.m() == 1) return 0;
  if (small.m() == big.m() && small.modulus() == big.modulus()) return small.p();  // X itself
  if (big.q() > (u64{1} << 32)) fail(ErrorCode::kBudgetExceeded, "root search field too large");
  const auto& f = small.modulus();
  for (u64 beta = 0; beta < big.q(); ++beta) {
    u64 acc = 0;
    for (int i = small.m(); i >= 0; --i) acc = big.add(big.mul(acc, beta), big.from_int(static_cast<i64>(f[i])));
    if (acc == 0) return beta;
  }
  fail(ErrorCode::kReducibleModulus, "no root of the subfield modulus found");
}

u64 embed_element(const FieldCtx& small, const FieldCtx& big, u64 gen_image, u64 a) {
  if (small.m() == 1) return big.from_int(static_cast<i64>(a));
  auto c = small.coeffs(a);
  u64 acc = 0;
  for (int i = small.m() - 1; i >= 0; --i) {
    acc = big.add(big.mul(acc, gen_image), big.from_int(static_cast<i64>(c[i])));
  }
  return acc;
}

}  // namespace algext
