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

#include "algext/group_fourier.hpp"

#include <algorithm>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <unordered_set>

namespace algext {

// ---------------------------------------------------------------- Carrier

Carrier Carrier::field_power(Field ctx, int n) {
  if (!ctx) fail(ErrorCode::kInvalidArgument, "null field");
  if (n < 0) fail(ErrorCode::kInvalidArgument, "negative dimension");
  Carrier c;
  c.kind_ = Kind::kFieldPower;
  c.base_ = ctx->q();
  c.field_ = std::move(ctx);
  c.dim_ = n;
  u128 card = 1;
  for (int i = 0; i < n; ++i) {
    card *= c.base_;
    if (card > std::numeric_limits<u64>::max())
      fail(ErrorCode::kCardinalityOverflow, "carrier larger than 2^64");
  }
  c.card_ = static_cast<u64>(card);
  return c;
}

Carrier Carrier::residue_power(u64 modulus, int t) {
  if (modulus < 1) fail(ErrorCode::kInvalidArgument, "modulus must be positive");
  if (t < 0) fail(ErrorCode::kInvalidArgument, "negative dimension");
  Carrier c;
  c.kind_ = Kind::kResiduePower;
  c.base_ = modulus;
  c.dim_ = t;
  u128 card = 1;
  for (int i = 0; i < t; ++i) {
    card *= modulus;
    if (card > std::numeric_limits<u64>::max())
      fail(ErrorCode::kCardinalityOverflow, "carrier larger than 2^64");
  }
  c.card_ = static_cast<u64>(card);
  return c;
}

u64 Carrier::phase_modulus() const {
  return kind_ == Kind::kFieldPower ? field_->p() : base_;
}

std::vector<u64> Carrier::decode(u64 index) const {
  std::vector<u64> out(dim_);
  for (int i = dim_ - 1; i >= 0; --i) {
    out[i] = index % base_;
    index /= base_;
  }
  return out;
}

u64 Carrier::encode(const std::vector<u64>& coords) const {
  if (static_cast<int>(coords.size()) != dim_) fail(ErrorCode::kLengthMismatch, "coordinate count");
  u64 v = 0;
  for (u64 c : coords) {
    if (c >= base_) fail(ErrorCode::kOutOfRange, "coordinate out of range");
    v = v * base_ + c;
  }
  return v;
}

u64 Carrier::add(u64 a, u64 b) const {
  auto x = decode(a), y = decode(b);
  for (int i = 0; i < dim_; ++i) {
    x[i] = kind_ == Kind::kFieldPower ? field_->add(x[i], y[i])
                                      : static_cast<u64>((static_cast<u128>(x[i]) + y[i]) % base_);
  }
  return encode(x);
}

u64 Carrier::neg(u64 a) const {
  auto x = decode(a);
  for (int i = 0; i < dim_; ++i)
    x[i] = kind_ == Kind::kFieldPower ? field_->neg(x[i]) : (x[i] == 0 ? 0 : base_ - x[i]);
  return encode(x);
}

u64 Carrier::phase(u64 alpha, u64 x) const {
  auto a = decode(alpha), v = decode(x);
  const u64 pm = phase_modulus();
  u128 acc = 0;
  for (int i = 0; i < dim_; ++i) {
    if (kind_ == Kind::kFieldPower) {
      acc += field_->trace(field_->mul(a[i], v[i]));
    } else {
      acc += static_cast<u128>(a[i]) * v[i] % pm;
    }
    acc %= pm;
  }
  return static_cast<u64>(acc);
}

std::complex<double> Carrier::root(u64 k) const {
  if (kind_ == Kind::kFieldPower) return field_->root(k);
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  long double ang = two_pi * static_cast<long double>(k % base_) / static_cast<long double>(base_);
  return {static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang))};
}

std::complex<double> Carrier::character(u64 alpha, u64 x) const { return root(phase(alpha, x)); }

bool Carrier::operator==(const Carrier& o) const {
  if (kind_ != o.kind_ || dim_ != o.dim_ || base_ != o.base_) return false;
  if (kind_ == Kind::kFieldPower)
    return field_->p() == o.field_->p() && field_->modulus() == o.field_->modulus();
  return true;
}

std::string Carrier::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::kFieldPower)
    os << "F[" << field_->token() << "]^" << dim_;
  else
    os << "Z_" << base_ << "^" << dim_;
  return os.str();
}

nlohmann::json Carrier::to_json() const {
  nlohmann::json j;
  if (kind_ == Kind::kFieldPower) {
    j["kind"] = "field_power";
    j["field"] = field_->token();
    j["n"] = dim_;
  } else {
    j["kind"] = "residue_power";
    j["N"] = base_;
    j["t"] = dim_;
  }
  return j;
}

Carrier Carrier::from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "field_power")
      return field_power(parse_field_token(j.at("field").get<std::string>()), j.at("n").get<int>());
    if (kind == "residue_power") return residue_power(j.at("N").get<u64>(), j.at("t").get<int>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("carrier json: ") + e.what());
  }
  fail(ErrorCode::kConfigError, "unknown carrier kind");
}

// ------------------------------------------------------ FiniteDistribution

FiniteDistribution::FiniteDistribution(Carrier carrier, std::vector<std::pair<u64, u64>> counts,
                                       Mode mode)
    : carrier_(std::move(carrier)), counts_(std::move(counts)), mode_(mode) {
  std::sort(counts_.begin(), counts_.end());
  std::vector<std::pair<u64, u64>> merged;
  merged.reserve(counts_.size());
  for (auto& [x, c] : counts_) {
    if (x >= carrier_.cardinality()) fail(ErrorCode::kOutOfRange, "support outside carrier");
    if (c == 0) continue;
    if (!merged.empty() && merged.back().first == x)
      merged.back().second += c;
    else
      merged.emplace_back(x, c);
  }
  counts_ = std::move(merged);
  u128 t = 0;
  for (auto& pc : counts_) t += pc.second;
  if (t > std::numeric_limits<u64>::max()) fail(ErrorCode::kOutOfRange, "total count overflow");
  total_ = static_cast<u64>(t);
  if (total_ == 0) fail(ErrorCode::kEmptySupport, "distribution has no mass");
}

FiniteDistribution FiniteDistribution::uniform(const Carrier& c) {
  if (c.cardinality() > constants::kEnumerationBudget)
    fail(ErrorCode::kBudgetExceeded, "uniform over " + c.describe());
  std::vector<std::pair<u64, u64>> v(c.cardinality());
  for (u64 i = 0; i < c.cardinality(); ++i) v[i] = {i, 1};
  return FiniteDistribution(c, std::move(v));
}

FiniteDistribution FiniteDistribution::point_mass(const Carrier& c, u64 index) {
  return FiniteDistribution(c, {{index, 1}});
}

FiniteDistribution FiniteDistribution::uniform_over(const Carrier& c,
                                                    const std::vector<u64>& support) {
  std::vector<std::pair<u64, u64>> v;
  v.reserve(support.size());
  for (u64 x : support) v.emplace_back(x, 1);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return FiniteDistribution(c, std::move(v));
}

FiniteDistribution FiniteDistribution::sample(const FiniteDistribution& d, u64 n,
                                              std::mt19937_64& rng) {
  if (n == 0) fail(ErrorCode::kInvalidArgument, "zero samples");
  std::vector<u64> cum(d.counts_.size());
  u64 run = 0;
  for (std::size_t i = 0; i < d.counts_.size(); ++i) {
    run += d.counts_[i].second;
    cum[i] = run;
  }
  std::vector<u64> tally(d.counts_.size(), 0);
  for (u64 s = 0; s < n; ++s) {
    u64 r = uniform_below(rng, d.total_);
    std::size_t i = std::upper_bound(cum.begin(), cum.end(), r) - cum.begin();
    ++tally[i];
  }
  std::vector<std::pair<u64, u64>> v;
  for (std::size_t i = 0; i < tally.size(); ++i)
    if (tally[i]) v.emplace_back(d.counts_[i].first, tally[i]);
  return FiniteDistribution(d.carrier_, std::move(v), Mode::kSampled);
}

u64 FiniteDistribution::count(u64 index) const {
  auto it = std::lower_bound(counts_.begin(), counts_.end(), std::make_pair(index, u64{0}));
  return (it != counts_.end() && it->first == index) ? it->second : 0;
}

double FiniteDistribution::weight(u64 index) const {
  return static_cast<double>(count(index)) / static_cast<double>(total_);
}

u64 FiniteDistribution::max_count() const {
  u64 m = 0;
  for (auto& pc : counts_) m = std::max(m, pc.second);
  return m;
}

FiniteDistribution FiniteDistribution::push_forward(const Carrier& target,
                                                    const std::function<u64(u64)>& f) const {
  CountBuilder b(target);
  for (auto& [x, c] : counts_) b.add(f(x), c);
  return b.build(mode_);
}

nlohmann::json FiniteDistribution::to_json() const {
  nlohmann::json j;
  j["carrier"] = carrier_.to_json();
  nlohmann::json rows = nlohmann::json::array();
  for (auto& [x, c] : counts_) rows.push_back({{"x", carrier_.decode(x)}, {"c", c}});
  if (mode_ == Mode::kExact) {
    j["counts"] = rows;
  } else {
    j["samples"] = rows;
    j["n_samples"] = total_;
  }
  return j;
}

FiniteDistribution FiniteDistribution::from_json(const nlohmann::json& j) {
  try {
    Carrier c = Carrier::from_json(j.at("carrier"));
    const bool sampled = j.contains("samples");
    const auto& rows = sampled ? j.at("samples") : j.at("counts");
    std::vector<std::pair<u64, u64>> v;
    for (const auto& r : rows)
      v.emplace_back(c.encode(r.at("x").get<std::vector<u64>>()), r.at("c").get<u64>());
    FiniteDistribution d(c, std::move(v), sampled ? Mode::kSampled : Mode::kExact);
    if (sampled && j.at("n_samples").get<u64>() != d.total())
      fail(ErrorCode::kConfigError, "n_samples does not match tallies");
    return d;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("distribution json: ") + e.what());
  }
}

void CountBuilder::add(u64 index, u64 c) {
  if (c) raw_.emplace_back(index, c);
  if (raw_.size() >= (1U << 22)) {
    // Compact periodically so long streams stay bounded by the support.
    std::sort(raw_.begin(), raw_.end());
    std::vector<std::pair<u64, u64>> m;
    for (auto& pc : raw_) {
      if (!m.empty() && m.back().first == pc.first)
        m.back().second += pc.second;
      else
        m.push_back(pc);
    }
    raw_ = std::move(m);
    if (raw_.size() >= (1U << 21)) raw_.reserve(raw_.size() * 2);
  }
}

void CountBuilder::merge(const CountBuilder& o) {
  raw_.insert(raw_.end(), o.raw_.begin(), o.raw_.end());
}

FiniteDistribution CountBuilder::build(FiniteDistribution::Mode mode) const {
  return FiniteDistribution(carrier_, raw_, mode);
}

// ------------------------------------------------------------- distances

namespace {

constexpr u64 kTotalCap = u64{1} << 62;

void check_totals(u128 a, u128 b) {
  if (a >= kTotalCap || b >= kTotalCap) fail(ErrorCode::kOutOfRange, "totals too large for exact distance");
}

}  // namespace

Ratio statistical_distance(const FiniteDistribution& a, const FiniteDistribution& b) {
  if (a.carrier() != b.carrier()) fail(ErrorCode::kCarrierMismatch, a.carrier().describe() + " vs " + b.carrier().describe());
  const u128 ta = a.total(), tb = b.total();
  check_totals(ta, tb);
  u128 num = 0;
  const auto& ca = a.counts();
  const auto& cb = b.counts();
  std::size_t i = 0, j = 0;
  while (i < ca.size() || j < cb.size()) {
    u128 x = 0, y = 0;
    if (j == cb.size() || (i < ca.size() && ca[i].first < cb[j].first)) {
      x = ca[i++].second * tb;
    } else if (i == ca.size() || cb[j].first < ca[i].first) {
      y = cb[j++].second * ta;
    } else {
      x = ca[i++].second * tb;
      y = cb[j++].second * ta;
    }
    num += x > y ? x - y : y - x;
  }
  return ratio_reduce({num, 2 * ta * tb});
}

Ratio distance_to_uniform(const FiniteDistribution& d) {
  const u128 t = d.total(), n = d.carrier().cardinality();
  check_totals(t, n);
  u128 num = 0;
  for (auto& pc : d.counts()) {
    u128 x = static_cast<u128>(pc.second) * n;
    num += x > t ? x - t : t - x;
  }
  num += (n - d.support_size()) * t;
  return ratio_reduce({num, 2 * t * n});
}

DistanceEstimate estimate_distance_to_uniform(const FiniteDistribution& d) {
  DistanceEstimate e;
  const double plug = distance_to_uniform(d).value();
  if (d.mode() == FiniteDistribution::Mode::kExact) {
    e.value = plug;
    return e;
  }
  const double n = static_cast<double>(d.total());
  const double a = static_cast<double>(d.carrier().cardinality());
  e.exact = false;
  e.value = plug - (static_cast<double>(d.support_size()) - 1.0) / (2.0 * n);
  e.floor = 0.5 * std::sqrt(a / n);
  return e;
}

MinEntropy min_entropy(const FiniteDistribution& d) {
  if (d.support_size() == 0) fail(ErrorCode::kEmptySupport, "min-entropy of empty distribution");
  MinEntropy h;
  h.max_weight = ratio_reduce({d.max_count(), d.total()});
  h.bits = -std::log2(static_cast<long double>(d.max_count()) / static_cast<long double>(d.total()));
  if (h.bits == 0.0) h.bits = 0.0;  // normalize -0
  return h;
}

// -------------------------------------------------------------- spectrum

double BiasSpectrum::max_nontrivial() const {
  double m = 0;
  for (std::size_t i = 1; i < entries.size(); ++i) m = std::max(m, std::abs(entries[i]));
  return m;
}

std::string BiasSpectrum::to_csv() const {
  std::string out = "character_index,real,imag,abs\n";
  char buf[160];
  for (std::size_t i = 0; i < entries.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", i, entries[i].real(),
                  entries[i].imag(), std::abs(entries[i]));
    out += buf;
  }
  return out;
}

BiasSpectrum bias_spectrum(const FiniteDistribution& d, const FourierOptions& opt) {
  const Carrier& c = d.carrier();
  const u64 card = c.cardinality();
  const u128 work = static_cast<u128>(card) * d.support_size();
  if (work > opt.budget)
    fail(ErrorCode::kBudgetExceeded, "spectrum of " + c.describe() + " needs " +
                                         u128_to_string(work) + " character-support pairs");
  BiasSpectrum s{c, std::vector<std::complex<double>>(card), d.mode() == FiniteDistribution::Mode::kSampled,
                 d.mode() == FiniteDistribution::Mode::kSampled ? d.total() : 0};

  const int dim = c.dim();
  const u64 pm = c.phase_modulus();
  const bool field = c.kind() == Carrier::Kind::kFieldPower;
  const FieldCtx* f = field ? c.field().get() : nullptr;
  const auto& counts = d.counts();
  std::vector<std::vector<u64>> pts(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) pts[i] = c.decode(counts[i].first);
  const bool use_hist = pm <= 4096;
  std::vector<std::complex<double>> roots;
  if (use_hist) {
    roots.resize(pm);
    for (u64 k = 0; k < pm; ++k) roots[k] = c.root(k);
  }
  const double total = static_cast<double>(d.total());

  parallel_for(card, opt.shards, [&](std::size_t begin, std::size_t end) {
    std::vector<u64> hist(use_hist ? pm : 0);
    for (std::size_t alpha = begin; alpha < end; ++alpha) {
      auto a = c.decode(alpha);
      std::complex<double> acc = 0;
      if (use_hist) std::fill(hist.begin(), hist.end(), 0);
      for (std::size_t i = 0; i < counts.size(); ++i) {
        u128 ph = 0;
        for (int k = 0; k < dim; ++k) {
          if (a[k] == 0) continue;
          ph += field ? f->trace(f->mul(a[k], pts[i][k])) : static_cast<u128>(a[k]) * pts[i][k] % pm;
        }
        u64 phase = static_cast<u64>(ph % pm);
        if (use_hist)
          hist[phase] += counts[i].second;
        else
          acc += static_cast<double>(counts[i].second) * c.root(phase);
      }
      if (use_hist)
        for (u64 k = 0; k < pm; ++k)
          if (hist[k]) acc += static_cast<double>(hist[k]) * roots[k];
      s.entries[alpha] = acc / total;
    }
  });
  return s;
}

BiasClass classify_bias(const BiasSpectrum& s, double epsilon) {
  BiasClass out;
  for (std::size_t i = 1; i < s.entries.size(); ++i)
    if (std::abs(s.entries[i]) > epsilon + constants::kBiasTolerance) out.violators.push_back(i);
  out.e_count = out.violators.size();

  // Subgroup of the dual generated by the violators, one coset sweep per
  // generator not yet inside.
  const Carrier& c = s.carrier;
  std::vector<u64> group{0};
  std::unordered_set<u64> members{0};
  for (u64 g : out.violators) {
    if (members.count(g)) continue;
    std::vector<u64> next = group;
    u64 shift = g;
    while (!members.count(shift)) {
      for (u64 h : group) {
        next.push_back(c.add(h, shift));
        if (next.size() > constants::kClosureCap) {
          out.inconclusive = true;
          break;
        }
      }
      if (out.inconclusive) break;
      shift = c.add(shift, g);
    }
    if (out.inconclusive) break;
    group = std::move(next);
    members.insert(group.begin(), group.end());
  }
  out.witness_subgroup_size = out.inconclusive ? constants::kClosureCap : group.size();
  out.strongly = !out.inconclusive && out.witness_subgroup_size == out.e_count + 1;
  return out;
}

XorCheck xor_distance_check(const FiniteDistribution& d, const FourierOptions& opt) {
  XorCheck x;
  auto s = bias_spectrum(d, opt);
  x.max_bias = s.max_nontrivial();
  x.measured_distance = distance_to_uniform(d).value();
  x.bound = x.max_bias * std::sqrt(static_cast<double>(d.carrier().cardinality()));
  x.holds = x.measured_distance <= x.bound + constants::kBiasTolerance;
  return x;
}

double trimmed_mass(const FiniteDistribution& d, double k) {
  if (k <= 0) return 0.0;
  const long double t = static_cast<long double>(d.total());
  const long double cap = t * std::exp2(-static_cast<long double>(k));
  long double excess = 0;
  for (auto& pc : d.counts()) {
    long double c = static_cast<long double>(pc.second);
    if (c > cap) excess += c - cap;
  }
  return static_cast<double>(excess / t);
}

EntropyBoundCheck entropy_bound_check(const FiniteDistribution& d, double epsilon, double e,
                                      double eps_prime) {
  EntropyBoundCheck r;
  const double a = static_cast<double>(d.carrier().cardinality());
  const double from_bias = 2.0 * log2_sat(1.0 / epsilon);
  const double from_count = std::log2(a) - log2_sat(e);
  r.k = std::min(from_bias, from_count) - log2_sat(2.0 / eps_prime);
  r.trimmed = trimmed_mass(d, r.k);
  r.close = r.trimmed <= eps_prime;
  return r;
}

}  // namespace algext
