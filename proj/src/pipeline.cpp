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

#include "algext/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace algext {
namespace {

u64 low_mask(int bits) { return bits >= 64 ? ~u64{0} : (u64{1} << bits) - 1; }

Field field_of(const nlohmann::json& j) { return parse_field_token(j.at("field").get<std::string>()); }

// Mixed radix, first coordinate most significant.
u64 pack_radix(const std::vector<u64>& v, u64 base) {
  u64 out = 0;
  for (u64 c : v) out = out * base + c;
  return out;
}

u64 ceil_log2_real(double x) {
  if (x <= 1) return 0;
  return static_cast<u64>(std::ceil(std::log2(x) - 1e-12));
}

template <typename Fn>
auto json_guard(const char* what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string(what) + " json: " + e.what());
  }
}

}  // namespace

Bits encode_element(const FieldCtx& ctx, u64 a) {
  Bits out;
  for (u64 c : ctx.coeffs(a)) out.append_value(c, ctx.coeff_bits());
  return out;
}

Fold fold_to_bits(u64 range, double budget) {
  if (range == 0) fail(ErrorCode::kInvalidArgument, "empty range");
  int b = 0;
  while (b < 63 && (u64{1} << (b + 1)) <= range) ++b;
  for (; b > 0; --b) {
    Ratio loss = mod_m_uniform_distance(range, u64{1} << b);
    if (loss.value() <= budget) return {b, loss};
  }
  return {0, Ratio{0, 1}};
}

const char* branch_name(Ext11Branch b) { return b == Ext11Branch::kSmallChar ? "small_char" : "large_char"; }

// ------------------------------------------------------------------- Ext11

Ext11Branch ext11_branch(const FieldCtx& ctx, u64 d, double eps) {
  const double threshold = std::pow(static_cast<double>(d) / eps, constants::kCharThresholdExponent);
  return static_cast<double>(ctx.p()) > threshold ? Ext11Branch::kLargeChar : Ext11Branch::kSmallChar;
}

Ext11Config build_ext11(Field ctx, u64 d, double eps) {
  if (d < 1) fail(ErrorCode::kInvalidArgument, "degree must be positive");
  if (!(eps > 0 && eps < 1)) fail(ErrorCode::kInvalidArgument, "eps must lie in (0, 1)");
  const double q = static_cast<double>(ctx->q()), p = static_cast<double>(ctx->p());
  const double dd = static_cast<double>(d);
  const double floor = constants::kFieldFloorMultiplier * std::pow(dd, 5) / (eps * eps);
  if (q < floor)
    fail(ErrorCode::kFieldTooSmall, "q = " + std::to_string(ctx->q()) + " below c0 d^5 / eps^2 = " +
                                        std::to_string(floor));
  Ext11Config c;
  c.ctx = ctx;
  c.d = d;
  c.eps = eps;
  c.eps0 = 8 * dd * dd / std::sqrt(q);
  c.threshold = std::pow(dd / eps, constants::kCharThresholdExponent);
  c.branch = ext11_branch(*ctx, d, eps);

  if (c.branch == Ext11Branch::kLargeChar) {
    // 8 d^2 sqrt(M/p) C* log p + M/p <= eps/2, increasing in M.
    const double lp = std::log2(p);
    auto ok = [&](u64 M) {
      const double r = static_cast<double>(M) / p;
      return 8 * dd * dd * std::sqrt(r) * constants::kModMConstant * lp + r <= eps / 2;
    };
    u64 lo = 0, hi = ctx->p();
    while (lo < hi) {
      u64 mid = lo + (hi - lo + 1) / 2;
      if (ok(mid)) lo = mid;
      else hi = mid - 1;
    }
    c.M_max = lo;
    if (c.M_max < 2)
      fail(ErrorCode::kParamsInfeasible, "no modulus M >= 2 satisfies the mod-M inequality at p = " +
                                             std::to_string(ctx->p()));
    // Reduce straight to the largest power of two below M_max.
    u64 M = 1;
    while (M * 2 <= c.M_max) M *= 2;
    c.modm = ModMExtractor::make(ctx->p(), ctx->m(), M);
    u64 r = M;
    for (int i = 1; i < ctx->m(); ++i) r *= ctx->p();
    c.range = r;
    c.analytic_error = eps / 2;
  } else {
    c.sb = build_strongly_biased_extractor(ctx->m(), ctx->p(), c.eps0, 1.0, eps / 2);
    u64 r = 1;
    for (int i = 0; i < c.sb->t; ++i) {
      if (r > (~u64{0}) / ctx->p()) fail(ErrorCode::kParamsInfeasible, "output range overflows");
      r *= ctx->p();
    }
    c.range = r;
    c.analytic_error = eps / 2;
  }
  c.fold = fold_to_bits(c.range, eps - c.analytic_error);
  c.m_out = c.fold.bits;
  c.declared_error = c.analytic_error + c.fold.loss.value();
  if (c.m_out < 1) fail(ErrorCode::kParamsInfeasible, "no output bits survive folding");
  if (c.declared_error > eps + 1e-12) fail(ErrorCode::kBoundViolation, "declared error exceeds eps");
  return c;
}

u64 Ext11Config::eval_value(u64 x) const {
  if (x >= ctx->q()) fail(ErrorCode::kOutOfRange, "input outside the field");
  auto coords = ctx->coeffs(x);
  u64 v;
  if (branch == Ext11Branch::kLargeChar) {
    auto y = modm->eval(coords);
    v = 0;
    for (std::size_t i = 0; i + 1 < y.size(); ++i) v = v * ctx->p() + y[i];
    v = v * modm->M + y.back();
  } else {
    v = pack_radix(sb->eval(coords), ctx->p());
  }
  return v & low_mask(m_out);
}

Bits Ext11Config::eval(u64 x) const {
  Bits b;
  b.append_value(eval_value(x), m_out);
  return b;
}

Bits extract11(const Ext11Config& cfg, u64 x) { return cfg.eval(x); }

nlohmann::json Ext11Config::to_json() const {
  nlohmann::json j{{"kind", "ext11"}, {"field", ctx->token()}, {"d", d}, {"eps", eps},
                   {"branch", branch_name(branch)}, {"m_out", m_out}, {"declared_error", declared_error}};
  if (modm) j["M"] = modm->M;
  if (sb) j["t"] = sb->t;
  return j;
}

Ext11Config Ext11Config::from_json(const nlohmann::json& j) {
  return json_guard("ext11", [&] {
    auto c = build_ext11(field_of(j), j.at("d").get<u64>(), j.at("eps").get<double>());
    if (j.at("branch").get<std::string>() != branch_name(c.branch) || j.at("m_out").get<int>() != c.m_out ||
        (c.modm && j.at("M").get<u64>() != c.modm->M) || (c.sb && j.at("t").get<int>() != c.sb->t))
      fail(ErrorCode::kConfigError, "stored Ext11 parameters differ from their rebuild");
    return c;
  });
}

// ------------------------------------------------------------------- ExtN1

ExtN1Config build_extN1(Field ctx, int n, u64 d, double eps) {
  if (n < 1) fail(ErrorCode::kInvalidArgument, "n must be positive");
  auto degs = choose_degrees(n, d, DegreeStrategy::kPrimePowers);
  const u64 d_prime = 2 * nth_prime(static_cast<std::size_t>(n)) * d * d;
  // The image curve of a degree-d source under F has degree <= max d_i * d.
  const u64 top = *std::max_element(degs.degrees.begin(), degs.degrees.end());
  if (top * d > d_prime) fail(ErrorCode::kBoundViolation, "degree cap 2 p_n d^2 below deg F * d");
  auto F = dkl_map(degs, build_regular_matrix(1, n, 1, ctx, MatrixTag::kAllOnes));
  auto inner = build_ext11(ctx, d_prime, eps / 2);
  return ExtN1Config{ctx, n, d, eps, std::move(F), d_prime, std::move(inner)};
}

u64 ExtN1Config::eval_value(const std::vector<u64>& x) const { return inner.eval_value(F.eval(x).at(0)); }

Bits ExtN1Config::eval(const std::vector<u64>& x) const { return inner.eval(F.eval(x).at(0)); }

nlohmann::json ExtN1Config::to_json() const {
  return {{"kind", "extN1"}, {"field", ctx->token()}, {"n", n}, {"d", d}, {"eps", eps},
          {"d_prime", d_prime}, {"F", F.to_json()}, {"inner", inner.to_json()}};
}

ExtN1Config ExtN1Config::from_json(const nlohmann::json& j) {
  return json_guard("extN1", [&] {
    auto c = build_extN1(field_of(j), j.at("n").get<int>(), j.at("d").get<u64>(), j.at("eps").get<double>());
    if (j.at("d_prime").get<u64>() != c.d_prime) fail(ErrorCode::kConfigError, "stored degree cap differs");
    auto f = DklExtractor::from_json(j.at("F"));
    if (f.degrees.degrees != c.F.degrees.degrees || f.matrix.entries != c.F.matrix.entries)
      fail(ErrorCode::kConfigError, "stored DKL map differs from its rebuild");
    Ext11Config::from_json(j.at("inner"));
    return c;
  });
}

// ------------------------------------------------------------------ seeded

SeededExtractorConfig build_seeded_extractor(int n_b, int delta, double eps) {
  if (n_b < 1 || n_b > 63) fail(ErrorCode::kParamsInfeasible, "input length must be in [1, 63] bits");
  if (delta < 0) fail(ErrorCode::kInvalidArgument, "negative entropy deficiency");
  if (!(eps > 0 && eps <= 1)) fail(ErrorCode::kInvalidArgument, "eps must lie in (0, 1]");
  SeededExtractorConfig c;
  c.n_b = n_b;
  c.delta = delta;
  c.eps = eps;
  c.seed_len = 2 * n_b;
  c.out_len = std::max<int>(0, n_b - delta - 2 * static_cast<int>(ceil_log2_real(1 / eps)));
  c.gf = make_field(2, n_b);
  return c;
}

u64 seeded_extract_value(const SeededExtractorConfig& cfg, u64 x, u64 a, u64 b) {
  const u64 mask = low_mask(cfg.n_b);
  if ((x & ~mask) || (a & ~mask) || (b & ~mask)) fail(ErrorCode::kOutOfRange, "value wider than n_b bits");
  const u64 y = cfg.gf->add(cfg.gf->mul(a == 0 ? 1 : a, x), b);
  return y & low_mask(cfg.out_len);
}

Bits seeded_extract(const SeededExtractorConfig& cfg, const Bits& x, const Bits& seed) {
  if (x.size() != static_cast<std::size_t>(cfg.n_b)) fail(ErrorCode::kLengthMismatch, "input length differs from n_b");
  if (seed.size() != static_cast<std::size_t>(cfg.seed_len))
    fail(ErrorCode::kSeedLengthMismatch, "seed must have " + std::to_string(cfg.seed_len) + " bits");
  const u64 a = seed.slice(0, cfg.n_b).to_u64(), b = seed.slice(cfg.n_b, cfg.seed_len).to_u64();
  Bits out;
  out.append_value(seeded_extract_value(cfg, x.to_u64(), a, b), cfg.out_len);
  return out;
}

nlohmann::json SeededExtractorConfig::to_json() const {
  return {{"kind", "seeded"}, {"family", "multiply_shift_gf2n"}, {"n_b", n_b}, {"delta", delta}, {"eps", eps},
          {"seed_len", seed_len}, {"out_len", out_len}, {"modulus", gf->token()}};
}

SeededExtractorConfig SeededExtractorConfig::from_json(const nlohmann::json& j) {
  return json_guard("seeded", [&] {
    if (j.value("family", "") != "multiply_shift_gf2n") fail(ErrorCode::kConfigError, "unknown seeded family");
    auto c = build_seeded_extractor(j.at("n_b").get<int>(), j.at("delta").get<int>(), j.at("eps").get<double>());
    if (j.at("seed_len").get<int>() != c.seed_len || j.at("out_len").get<int>() != c.out_len ||
        j.at("modulus").get<std::string>() != c.gf->token())
      fail(ErrorCode::kConfigError, "stored seeded extractor differs from its rebuild");
    return c;
  });
}

// --------------------------------------------------------------- full rank

FullRankExtractor assemble_full_rank(Field ctx, int k, u64 d, double eps, Ext11Config ext2,
                                     std::optional<SeededExtractorConfig> ext1) {
  if (k < 1) fail(ErrorCode::kInvalidArgument, "k must be positive");
  if ((k > 1) != ext1.has_value()) fail(ErrorCode::kShapeMismatch, "seeded stage present iff k > 1");
  FullRankExtractor f;
  f.ctx = ctx;
  f.k = k;
  f.d = d;
  f.eps = eps;
  f.ext2 = std::move(ext2);
  f.ext1 = std::move(ext1);
  if (f.ext1) {
    f.ell = f.ext1->seed_len;
    if (f.ext2.m_out < f.ell)
      fail(ErrorCode::kParamsInfeasible, "Ext2 yields " + std::to_string(f.ext2.m_out) + " bits but the seed needs " +
                                             std::to_string(f.ell));
    u64 cap = 1;
    for (int i = 0; i + 1 < k; ++i) {
      if (cap > (~u64{0}) / ctx->q()) fail(ErrorCode::kParamsInfeasible, "F_q^{k-1} does not fit 64 bits");
      cap *= ctx->q();
    }
    if (f.ext1->n_b < 64 && cap - 1 > low_mask(f.ext1->n_b))
      fail(ErrorCode::kShapeMismatch, "seeded input narrower than F_q^{k-1}");
    // 5 eps' twice.
    f.declared_error = eps;
  } else {
    f.declared_error = f.ext2.declared_error;
  }
  return f;
}

FullRankExtractor build_full_rank_ext(Field ctx, int k, u64 d, double eps) {
  if (k < 1) fail(ErrorCode::kInvalidArgument, "k must be positive");
  const double floor = constants::kFieldFloorMultiplier * std::pow(static_cast<double>(k) * d, 5) / (eps * eps);
  if (static_cast<double>(ctx->q()) < floor)
    fail(ErrorCode::kFieldTooSmall, "q below c0 (k d)^5 / eps^2 = " + std::to_string(floor));
  if (k == 1) return assemble_full_rank(ctx, 1, d, eps, build_ext11(ctx, d, eps), std::nullopt);
  const double eps_p = eps / 10;
  auto ext2 = build_ext11(ctx, d, eps_p);
  const int n_b = static_cast<int>(std::ceil((k - 1) * std::log2(static_cast<double>(ctx->q())) - 1e-12));
  const int delta = static_cast<int>(ceil_log2_real(static_cast<double>(d))) + 3;
  return assemble_full_rank(ctx, k, d, eps, std::move(ext2), build_seeded_extractor(n_b, delta, eps_p));
}

int FullRankExtractor::m_out() const { return ext1 ? ext1->out_len + ext2.m_out - ell : ext2.m_out; }

Bits FullRankExtractor::eval(const std::vector<u64>& x) const {
  if (x.size() != static_cast<std::size_t>(k)) fail(ErrorCode::kLengthMismatch, "input length differs from k");
  Bits y = ext2.eval(x.back());
  if (!ext1) return y;
  std::vector<u64> x1(x.begin(), x.end() - 1);
  for (u64 v : x1)
    if (v >= ctx->q()) fail(ErrorCode::kOutOfRange, "coordinate outside the field");
  Bits xb;
  xb.append_value(pack_radix(x1, ctx->q()), ext1->n_b);
  Bits out = seeded_extract(*ext1, xb, y.slice(0, ell));
  out.append(y.slice(ell, y.size()));
  return out;
}

nlohmann::json FullRankExtractor::to_json() const {
  return {{"kind", "full_rank"}, {"field", ctx->token()}, {"k", k}, {"d", d}, {"eps", eps},
          {"ext2", ext2.to_json()}, {"ext1", ext1 ? ext1->to_json() : nlohmann::json(nullptr)}};
}

FullRankExtractor FullRankExtractor::from_json(const nlohmann::json& j) {
  return json_guard("full rank", [&] {
    std::optional<SeededExtractorConfig> e1;
    if (!j.at("ext1").is_null()) e1 = SeededExtractorConfig::from_json(j.at("ext1"));
    return assemble_full_rank(field_of(j), j.at("k").get<int>(), j.at("d").get<u64>(), j.at("eps").get<double>(),
                              Ext11Config::from_json(j.at("ext2")), std::move(e1));
  });
}

// ------------------------------------------------------------- composition

CompositionConfig build_composition(Field ctx, int n, int k, u64 d, double eps) {
  if (n < 1) fail(ErrorCode::kInvalidArgument, "n must be positive");
  if (k > n) fail(ErrorCode::kKTooLarge, "k exceeds n");
  if (!(eps > 0 && eps < 1)) fail(ErrorCode::kInvalidArgument, "eps must lie in (0, 1)");
  CompositionConfig c;
  c.ctx = ctx;
  c.n = n;
  c.k = k;
  c.d = d;
  c.eps = eps;
  if (k == 0) {
    c.empty = true;
    return c;
  }
  if (k == 1) fail(ErrorCode::kInvalidArgument, "k = 1 sources use build_extN1");
  c.ell = static_cast<int>(ceil_log2_real(2.0 * n * n / eps));
  if (c.ell > 62) fail(ErrorCode::kParamsInfeasible, "seed index too wide");
  const u64 two_ell = u64{1} << c.ell;
  if (ctx->q() - 1 < std::max<u64>(static_cast<u64>(n), two_ell))
    fail(ErrorCode::kFieldTooSmall, "need q - 1 >= max(n, 2^ell) = " + std::to_string(std::max<u64>(n, two_ell)));
  c.eps1 = (eps / 2) / (6.0 * static_cast<double>(two_ell) + 4);
  c.eps0 = static_cast<double>(k - 1) * (n - k + 1) / static_cast<double>(two_ell);
  c.budget = 6 * c.eps1 * static_cast<double>(two_ell) + 4 * c.eps1 + c.eps0;
  if (c.budget > eps * (1 + 1e-12)) fail(ErrorCode::kBoundViolation, "error budget exceeds eps");
  c.family = build_seeded_family(n, k - 1, ctx, two_ell);
  c.ext1 = build_extN1(ctx, n, d, c.eps1);
  if (c.ext1->m_out() < c.ell) fail(ErrorCode::kParamsInfeasible, "Ext1 output shorter than ell");
  c.ext2 = build_full_rank_ext(ctx, k - 1, d, c.eps1);
  return c;
}

int CompositionConfig::m_out() const { return empty ? 0 : ext1->m_out() + ext2->m_out(); }

Bits CompositionConfig::eval(const std::vector<u64>& x) const {
  if (x.size() != static_cast<std::size_t>(n)) fail(ErrorCode::kLengthMismatch, "input length differs from n");
  if (empty) return {};
  Bits out = ext1->eval(x);
  const u64 y = out.slice(0, ell).to_u64();
  out.append(ext2->eval(family->apply(y, x)));
  return out;
}

nlohmann::json CompositionConfig::to_json() const {
  nlohmann::json j{{"kind", "composition"}, {"field", ctx->token()}, {"n", n}, {"k", k}, {"d", d}, {"eps", eps},
                   {"ell", ell}, {"budget", budget}};
  if (!empty) {
    j["ext1"] = ext1->to_json();
    j["family"] = family->to_json();
    j["ext2"] = ext2->to_json();
  }
  return j;
}

CompositionConfig CompositionConfig::from_json(const nlohmann::json& j) {
  return json_guard("composition", [&] {
    auto c = build_composition(field_of(j), j.at("n").get<int>(), j.at("k").get<int>(), j.at("d").get<u64>(),
                               j.at("eps").get<double>());
    if (j.at("ell").get<int>() != c.ell) fail(ErrorCode::kConfigError, "stored ell differs from its rebuild");
    return c;
  });
}

// ------------------------------------------------------------- measurement

Measurement measure_extractor(const std::function<u64(u64)>& f, int m_out, const FiniteDistribution& source,
                              MeasureMode mode, u64 samples, u64 rng_seed, int shards, u64 budget) {
  if (m_out < 0 || m_out > 62) fail(ErrorCode::kInvalidArgument, "output length must be in [0, 62]");
  Measurement out;
  out.mode = mode;
  out.source_min_entropy = min_entropy(source).bits;
  const Carrier target = Carrier::residue_power(u64{1} << m_out, 1);
  if (mode == MeasureMode::kExact) {
    if (source.support_size() > budget) fail(ErrorCode::kBudgetExceeded, "source support exceeds the budget");
    const auto& counts = source.counts();
    const int parts = std::max(1, shards);
    std::vector<CountBuilder> local(static_cast<std::size_t>(parts), CountBuilder(target));
    parallel_for(static_cast<std::size_t>(parts), parts, [&](std::size_t b, std::size_t e) {
      for (std::size_t s = b; s < e; ++s) {
        const std::size_t lo = counts.size() * s / parts, hi = counts.size() * (s + 1) / parts;
        for (std::size_t i = lo; i < hi; ++i) local[s].add(f(counts[i].first), counts[i].second);
      }
    });
    for (int s = 1; s < parts; ++s) local[0].merge(local[static_cast<std::size_t>(s)]);
    auto img = local[0].build();
    out.exact = distance_to_uniform(img);
    out.distance = out.exact->value();
    out.samples = source.total();
    return out;
  }
  if (samples == 0) fail(ErrorCode::kInvalidArgument, "Monte-Carlo mode needs samples");
  std::mt19937_64 rng(rng_seed);
  auto drawn = FiniteDistribution::sample(source, samples, rng);
  CountBuilder cb(target);
  for (auto& [idx, cnt] : drawn.counts()) cb.add(f(idx), cnt);
  auto est = estimate_distance_to_uniform(cb.build(FiniteDistribution::Mode::kSampled));
  out.distance = est.value;
  out.floor = est.floor;
  out.samples = samples;
  return out;
}

}  // namespace algext
