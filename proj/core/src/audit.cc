// Copyright 2026 The latpir Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "latpir/audit.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <utility>

#include <boost/math/distributions/chi_squared.hpp>

#include "json.hpp"
#include "latpir/lattice.h"
#include "latpir/parallel.h"
#include "latpir/pir.h"
#include "latpir/spir.h"

namespace latpir {

const char* SchemeName(Scheme scheme) {
  switch (scheme) {
    case Scheme::kPir:
      return "pir";
    case Scheme::kSpirCr:
      return "spir-cr";
    case Scheme::kSpirNoKey:
      return "spir-nokey";
  }
  return "?";
}

Scheme ParseScheme(const std::string& name) {
  if (name == "pir") return Scheme::kPir;
  if (name == "spir-cr") return Scheme::kSpirCr;
  if (name == "spir-nokey") return Scheme::kSpirNoKey;
  throw Error(ErrorCode::kInvalidInput, "unknown scheme '" + name + "'");
}

const char* BreakModeName(BreakMode mode) {
  switch (mode) {
    case BreakMode::kNone:
      return "none";
    case BreakMode::kDither:
      return "dither";
    case BreakMode::kCommonRandomness:
      return "cr";
    case BreakMode::kQueries:
      return "queries";
  }
  return "?";
}

BreakMode ParseBreakMode(const std::string& name) {
  if (name == "none") return BreakMode::kNone;
  if (name == "dither") return BreakMode::kDither;
  if (name == "cr") return BreakMode::kCommonRandomness;
  if (name == "queries") return BreakMode::kQueries;
  throw Error(ErrorCode::kInvalidInput, "unknown break mode '" + name + "'");
}

std::string AuditVerdict::ToRecord() const {
  nlohmann::json j = {{"name", name},           {"scheme", scheme},
                      {"statistic", statistic}, {"value", value},
                      {"threshold", threshold}, {"pass", pass},
                      {"samples", samples},     {"exact", exact},
                      {"mandatory", mandatory}};
  return j.dump();
}

namespace {

using Key = std::vector<int64_t>;

// Joint counts of (secret, view) over equally likely enumerated outcomes.
class JointCounts {
 public:
  void Add(const Key& secret, const Key& view) {
    ++joint_[view][secret];
    ++secret_[secret];
    ++total_;
  }

  int64_t total() const { return total_; }

  // True when P(secret, view) = P(secret) P(view) for every cell, checked
  // in integer arithmetic.
  bool Independent() const {
    for (const auto& [view, row] : joint_) {
      int64_t view_count = 0;
      for (const auto& [s, c] : row) view_count += c;
      for (const auto& [s, sc] : secret_) {
        auto it = row.find(s);
        const int64_t c = it == row.end() ? 0 : it->second;
        if (static_cast<__int128>(c) * total_ !=
            static_cast<__int128>(sc) * view_count) {
          return false;
        }
      }
    }
    return true;
  }

  // Exactly zero when Independent().
  double MutualInformationBits() const {
    if (Independent()) return 0.0;
    const double t = static_cast<double>(total_);
    double mi = 0.0;
    for (const auto& [view, row] : joint_) {
      int64_t view_count = 0;
      for (const auto& [s, c] : row) view_count += c;
      for (const auto& [s, c] : row) {
        const double pj = c / t;
        const double ps = secret_.at(s) / t;
        const double pv = view_count / t;
        mi += pj * std::log2(pj / (ps * pv));
      }
    }
    return mi;
  }

 private:
  std::map<Key, std::map<Key, int64_t>> joint_;
  std::map<Key, int64_t> secret_;
  int64_t total_ = 0;
};

uint64_t CheckedPower(uint64_t base, size_t exponent, uint64_t budget) {
  uint64_t out = 1;
  for (size_t k = 0; k < exponent; ++k) {
    if (out > budget / base) {
      throw Error(ErrorCode::kBudgetExceeded,
                  "enumeration exceeds the budget of " +
                      std::to_string(budget));
    }
    out *= base;
  }
  return out;
}

void CheckBudget(uint64_t a, uint64_t b, uint64_t c = 1) {
  const uint64_t budget = kEnumerationBudget;
  if (a > budget || b > budget / a || c > budget / (a * b)) {
    throw Error(ErrorCode::kBudgetExceeded,
                "enumeration exceeds the budget of " + std::to_string(budget));
  }
}

// Mask number `code` as a {0,1} or {-1,1} vector.
std::vector<int> MaskFromCode(uint64_t code, size_t m, Scheme scheme) {
  std::vector<int> mask(m);
  for (size_t k = 0; k < m; ++k) {
    const int bit = static_cast<int>((code >> k) & 1u);
    mask[k] = scheme == Scheme::kSpirNoKey ? 2 * bit - 1 : bit;
  }
  return mask;
}

std::vector<int> FixedMask(size_t m) { return std::vector<int>(m, 1); }

QueryPair BuildQueries(Scheme scheme, size_t index, std::span<const int> mask) {
  return scheme == Scheme::kSpirNoKey ? BuildNoKeyQueries(index, mask)
                                      : BuildPirQueries(index, mask);
}

// Digits of `code` in base p, least significant first.
std::vector<int64_t> Digits(uint64_t code, size_t count, int64_t p) {
  std::vector<int64_t> d(count);
  for (size_t k = 0; k < count; ++k) {
    d[k] = static_cast<int64_t>(code % static_cast<uint64_t>(p));
    code /= static_cast<uint64_t>(p);
  }
  return d;
}

// Sphere codebook with exactly p one-dimensional points, unit 1.
SphereCodebook SmallSphere(int64_t prime, size_t num_messages) {
  const double half = static_cast<double>((prime - 1) / 2);
  return SphereCodebook(static_cast<double>(num_messages) * half * half,
                        num_messages, 1, 1.0);
}

Key ToKey(std::span<const int> v) { return Key(v.begin(), v.end()); }

void Append(Key& key, std::span<const int64_t> v) {
  key.insert(key.end(), v.begin(), v.end());
}

int64_t UnitsOf(double x) { return static_cast<int64_t>(std::llround(x)); }

AuditVerdict ExactVerdict(std::string name, Scheme scheme, std::string stat,
                          double value, uint64_t samples) {
  AuditVerdict v;
  v.name = std::move(name);
  v.scheme = SchemeName(scheme);
  v.statistic = std::move(stat);
  v.value = value;
  v.threshold = 0.0;
  v.pass = value == 0.0;
  v.samples = samples;
  v.exact = true;
  return v;
}

}  // namespace

AuditVerdict QueryInvarianceExact(Scheme scheme, size_t num_messages,
                                  bool fixed_mask) {
  if (num_messages < 1 || num_messages > kMaxExhaustiveMessages) {
    throw Error(ErrorCode::kBudgetExceeded,
                "exhaustive query audit supports 1 <= M <= " +
                    std::to_string(kMaxExhaustiveMessages));
  }
  const uint64_t masks = uint64_t{1} << num_messages;
  // counts[group][i] maps a query vector to its number of masks.
  std::vector<std::vector<std::map<Key, int64_t>>> counts(
      2, std::vector<std::map<Key, int64_t>>(num_messages));
  for (size_t i = 0; i < num_messages; ++i) {
    for (uint64_t code = 0; code < masks; ++code) {
      const std::vector<int> mask = fixed_mask
                                        ? FixedMask(num_messages)
                                        : MaskFromCode(code, num_messages,
                                                       scheme);
      const QueryPair q = BuildQueries(scheme, i, mask);
      ++counts[0][i][ToKey(q.first.coeffs)];
      ++counts[1][i][ToKey(q.second.coeffs)];
    }
  }
  int64_t worst = 0;
  for (int g = 0; g < 2; ++g) {
    for (size_t a = 0; a < num_messages; ++a) {
      for (size_t b = a + 1; b < num_messages; ++b) {
        std::map<Key, std::pair<int64_t, int64_t>> both;
        for (const auto& [k, c] : counts[g][a]) both[k].first = c;
        for (const auto& [k, c] : counts[g][b]) both[k].second = c;
        int64_t diff = 0;
        for (const auto& [k, c] : both) diff += std::llabs(c.first - c.second);
        worst = std::max(worst, diff);
      }
    }
  }
  const double tv =
      static_cast<double>(worst) / (2.0 * static_cast<double>(masks));
  return ExactVerdict("query_invariance_exact", scheme, "tv", tv,
                      masks * num_messages);
}

AuditVerdict QueryInvarianceSampled(Scheme scheme, size_t num_messages,
                                    size_t total_draws, uint64_t seed,
                                    bool fixed_mask, int threads) {
  if (num_messages < 1) {
    throw Error(ErrorCode::kInvalidInput, "need at least one message");
  }
  const size_t per_index = std::max<size_t>(1, total_draws / num_messages);
  // hits[i][g * M + m]: draws where coordinate m of query g took its upper
  // value.
  std::vector<std::vector<int64_t>> hits(
      num_messages, std::vector<int64_t>(2 * num_messages, 0));
  ParallelFor(num_messages, threads, [&](size_t i) {
    Rng rng = Rng::ForStream(seed, i);
    for (size_t d = 0; d < per_index; ++d) {
      QueryPair q;
      if (fixed_mask) {
        q = BuildQueries(scheme, i, FixedMask(num_messages));
      } else if (scheme == Scheme::kSpirNoKey) {
        q = GenerateNoKeyQueries(i, num_messages, rng);
      } else {
        q = GeneratePirQueries(i, num_messages, rng);
      }
      for (size_t m = 0; m < num_messages; ++m) {
        // Upper values: Q1 in {0,1} or {-1,1} -> 1; Q2 in {-1,0} -> 0,
        // Q2 in {-1,1} -> 1.
        const int upper2 = scheme == Scheme::kSpirNoKey ? 1 : 0;
        if (q.first.coeffs[m] == 1) ++hits[i][m];
        if (q.second.coeffs[m] == upper2) ++hits[i][num_messages + m];
      }
    }
  });
  double chi2 = 0.0;
  const double d = static_cast<double>(per_index);
  for (const std::vector<int64_t>& row : hits) {
    for (int64_t h : row) {
      const double dev = static_cast<double>(h) - d / 2.0;
      chi2 += 4.0 * dev * dev / d;
    }
  }
  const double dof = static_cast<double>(2 * num_messages * num_messages);
  const boost::math::chi_squared dist(dof);
  AuditVerdict v;
  v.name = "query_invariance_sampled";
  v.scheme = SchemeName(scheme);
  v.statistic = "p_value";
  v.value = boost::math::cdf(boost::math::complement(dist, chi2));
  v.threshold = kChiSquareThreshold;
  v.pass = v.value > kChiSquareThreshold;
  v.samples = per_index * num_messages;
  v.exact = false;
  return v;
}

AuditVerdict DbViewIndependence(Scheme scheme, int64_t prime,
                                size_t num_messages, bool fixed_mask) {
  if (!IsPrime(prime) || num_messages < 1 || num_messages > 63) {
    throw Error(ErrorCode::kInvalidInput, "need a prime p and 1 <= M");
  }
  const uint64_t message_sets =
      CheckedPower(static_cast<uint64_t>(prime), num_messages,
                   kEnumerationBudget);
  const uint64_t masks = uint64_t{1} << num_messages;
  const uint64_t commons =
      scheme == Scheme::kSpirCr ? static_cast<uint64_t>(prime) : 1;
  CheckBudget(message_sets, masks * num_messages, commons);

  const NestedLatticePair lattice(1, prime, 1.0);
  const std::vector<LatticePoint> book = lattice.EnumerateCodebook();
  std::optional<SphereCodebook> sphere;
  if (scheme == Scheme::kSpirNoKey) sphere = SmallSphere(prime, num_messages);

  JointCounts views[2];
  for (size_t i = 0; i < num_messages; ++i) {
    const Key secret = {static_cast<int64_t>(i)};
    for (uint64_t code = 0; code < masks; ++code) {
      const std::vector<int> mask =
          fixed_mask ? FixedMask(num_messages)
                     : MaskFromCode(code, num_messages, scheme);
      const QueryPair q = BuildQueries(scheme, i, mask);
      for (uint64_t w = 0; w < message_sets; ++w) {
        const std::vector<int64_t> symbols =
            Digits(w, num_messages, prime);
        for (uint64_t s = 0; s < commons; ++s) {
          Key v1 = {1};
          Key v2 = {2};
          Append(v1, std::vector<int64_t>(q.first.coeffs.begin(),
                                          q.first.coeffs.end()));
          Append(v2, std::vector<int64_t>(q.second.coeffs.begin(),
                                          q.second.coeffs.end()));
          Append(v1, symbols);
          Append(v2, symbols);
          if (scheme == Scheme::kSpirNoKey) {
            std::vector<size_t> chunk(symbols.begin(), symbols.end());
            const NoKeyTransmit tx = NoKeyAnswers(q, chunk, *sphere);
            v1.push_back(UnitsOf(tx.x1[0]));
            v2.push_back(UnitsOf(tx.x2[0]));
          } else {
            std::vector<FieldVector> msgs(num_messages);
            for (size_t m = 0; m < num_messages; ++m) {
              msgs[m].symbols = {symbols[m]};
            }
            const AnswerState a1 = FormAnswer(q.first, msgs, lattice);
            const AnswerState a2 = FormAnswer(q.second, msgs, lattice);
            Append(v1, lattice.ToUnits(a1.codeword.coords));
            Append(v2, lattice.ToUnits(a2.codeword.coords));
            if (scheme == Scheme::kSpirCr) {
              v1.push_back(lattice.ToUnits(book[s].coords)[0]);
              v2.push_back(lattice.ToUnits(book[s].coords)[0]);
            }
          }
          views[0].Add(secret, v1);
          views[1].Add(secret, v2);
        }
      }
    }
  }
  const double mi = std::max(views[0].MutualInformationBits(),
                             views[1].MutualInformationBits());
  return ExactVerdict("db_view_independence", scheme, "mi_bits", mi,
                      static_cast<uint64_t>(views[0].total()));
}

AuditVerdict UserSideLeakage(Scheme scheme, int64_t prime,
                             size_t num_messages, bool zero_common) {
  if (!IsPrime(prime) || num_messages < 2 || num_messages > 63) {
    throw Error(ErrorCode::kInvalidInput, "need a prime p and M >= 2");
  }
  const uint64_t message_sets =
      CheckedPower(static_cast<uint64_t>(prime), num_messages,
                   kEnumerationBudget);
  const uint64_t masks = uint64_t{1} << num_messages;
  const uint64_t commons =
      scheme == Scheme::kSpirCr && !zero_common ? static_cast<uint64_t>(prime)
                                                : 1;
  CheckBudget(message_sets, masks, commons);

  const NestedLatticePair lattice(1, prime, 1.0);
  const std::vector<LatticePoint> book = lattice.EnumerateCodebook();
  const LatticePoint zero_point{RealVector(1, 0.0)};
  std::optional<SphereCodebook> sphere;
  if (scheme == Scheme::kSpirNoKey) sphere = SmallSphere(prime, num_messages);
  const RealVector zero_dither(1, 0.0);
  Rng unused(0);

  JointCounts counts;
  for (uint64_t code = 0; code < masks; ++code) {
    const std::vector<int> mask = MaskFromCode(code, num_messages, scheme);
    const QueryPair q = BuildQueries(scheme, 0, mask);
    for (uint64_t w = 0; w < message_sets; ++w) {
      const std::vector<int64_t> symbols = Digits(w, num_messages, prime);
      const Key secret(symbols.begin() + 1, symbols.end());
      for (uint64_t s = 0; s < commons; ++s) {
        RealVector x1;
        RealVector x2;
        if (scheme == Scheme::kSpirNoKey) {
          std::vector<size_t> chunk(symbols.begin(), symbols.end());
          NoKeyTransmit tx = NoKeyAnswers(q, chunk, *sphere);
          x1 = std::move(tx.x1);
          x2 = std::move(tx.x2);
        } else {
          std::vector<FieldVector> msgs(num_messages);
          for (size_t m = 0; m < num_messages; ++m) {
            msgs[m].symbols = {symbols[m]};
          }
          const AnswerState a1 = FormAnswer(q.first, msgs, lattice);
          const AnswerState a2 = FormAnswer(q.second, msgs, lattice);
          if (scheme == Scheme::kSpirCr) {
            const LatticePoint& common = zero_common ? zero_point : book[s];
            x1 = SpirTransmit(a1, zero_dither, common, 1.0, lattice).samples;
            x2 = SpirTransmit(a2, zero_dither, common, 1.0, lattice).samples;
          } else {
            x1 = MakeTransmit(a1.codeword, zero_dither, 1.0, lattice).samples;
            x2 = MakeTransmit(a2.codeword, zero_dither, 1.0, lattice).samples;
          }
        }
        const std::vector<Transmission> signals = {{1.0, x1}, {1.0, x2}};
        const MacOutput mac = TransmitMac(signals, NoiseMode::kOff, unused);
        Key view = ToKey(mask);
        view.push_back(UnitsOf(mac.received[0]));
        counts.Add(secret, view);
      }
    }
  }
  AuditVerdict v =
      ExactVerdict("user_side_leakage", scheme, "mi_bits",
                   counts.MutualInformationBits(),
                   static_cast<uint64_t>(counts.total()));
  if (zero_common) v.name = "user_side_leakage_zero_common";
  return v;
}

AuditVerdict TransmitIndependence(int64_t prime, size_t samples, int bins,
                                  uint64_t seed, bool dither) {
  constexpr size_t kBatch = 10000;
  const NestedLatticePair lattice(1, prime, 1.0);
  const double half = lattice.coarse_step() / 2.0;
  std::vector<int> symbol(samples);
  std::vector<double> sent(samples);
  const size_t batches = (samples + kBatch - 1) / kBatch;
  ParallelFor(batches, 0, [&](size_t b) {
    Rng rng = Rng::ForStream(seed, b);
    const size_t end = std::min(samples, (b + 1) * kBatch);
    for (size_t s = b * kBatch; s < end; ++s) {
      const FieldVector m = lattice.SampleMessage(rng);
      const RealVector d = dither ? lattice.SampleDither(rng) : RealVector(1);
      const TransmitBlock x = MakeTransmit(lattice.Encode(m), d, 1.0, lattice);
      symbol[s] = static_cast<int>(m.symbols[0]);
      sent[s] = x.samples[0];
    }
  });
  const std::vector<int> binned = EqualWidthBins(sent, -half, half, bins);
  const MiEstimate mi = PlugInMi(symbol, binned);
  AuditVerdict v;
  v.name = dither ? "transmit_independence" : "transmit_independence_no_dither";
  v.scheme = "pir";
  v.statistic = "mi_bits";
  v.value = mi.bits;
  v.threshold = kSampledMiThreshold;
  v.pass = mi.bits < kSampledMiThreshold;
  v.samples = samples;
  v.exact = false;
  return v;
}

MiEstimate PlugInMi(std::span<const int> x, std::span<const int> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kInvalidInput, "paired samples differ in length");
  }
  if (x.size() < kMinMiSamples) {
    throw Error(ErrorCode::kInsufficientData,
                "need at least " + std::to_string(kMinMiSamples) +
                    " samples, got " + std::to_string(x.size()));
  }
  std::map<int, int64_t> cx;
  std::map<int, int64_t> cy;
  std::map<std::pair<int, int>, int64_t> cxy;
  for (size_t k = 0; k < x.size(); ++k) {
    if (x[k] < 0 || y[k] < 0) {
      throw Error(ErrorCode::kInvalidInput, "labels must be non-negative");
    }
    ++cx[x[k]];
    ++cy[y[k]];
    ++cxy[{x[k], y[k]}];
  }
  // Entropies in nats from counts, with `drop` removing one observation of
  // the given cell (used by the jackknife).
  auto estimate = [&](int dx, int dy, bool drop) {
    const double n = static_cast<double>(x.size()) - (drop ? 1.0 : 0.0);
    auto h = [n](double c) { return c > 0 ? -(c / n) * std::log(c / n) : 0.0; };
    double hx = 0.0;
    double hy = 0.0;
    double hxy = 0.0;
    int64_t kx = 0;
    int64_t ky = 0;
    int64_t kxy = 0;
    for (const auto& [a, c] : cx) {
      const double cc = static_cast<double>(c - (drop && a == dx ? 1 : 0));
      hx += h(cc);
      kx += cc > 0;
    }
    for (const auto& [b, c] : cy) {
      const double cc = static_cast<double>(c - (drop && b == dy ? 1 : 0));
      hy += h(cc);
      ky += cc > 0;
    }
    for (const auto& [ab, c] : cxy) {
      const bool hit = drop && ab.first == dx && ab.second == dy;
      const double cc = static_cast<double>(c - (hit ? 1 : 0));
      hxy += h(cc);
      kxy += cc > 0;
    }
    const double plug = hx + hy - hxy;
    const double correction =
        static_cast<double>((kx - 1) + (ky - 1) - (kxy - 1)) / (2.0 * n);
    return std::pair<double, double>(plug / std::log(2.0),
                                     (plug + correction) / std::log(2.0));
  };
  MiEstimate out;
  out.samples = x.size();
  const auto [plug, corrected] = estimate(0, 0, false);
  out.plug_in_bits = plug;
  out.bits = corrected;
  // Leave-one-out values only depend on the cell of the removed sample.
  const double n = static_cast<double>(x.size());
  std::vector<std::pair<double, int64_t>> loo;
  double mean = 0.0;
  for (const auto& [ab, c] : cxy) {
    const double value = estimate(ab.first, ab.second, true).second;
    loo.emplace_back(value, c);
    mean += value * static_cast<double>(c);
  }
  mean /= n;
  double ss = 0.0;
  for (const auto& [value, c] : loo) {
    ss += static_cast<double>(c) * (value - mean) * (value - mean);
  }
  out.std_error = std::sqrt((n - 1.0) / n * ss);
  return out;
}

std::vector<int> EqualWidthBins(std::span<const double> values, double lo,
                                double hi, int bins) {
  if (bins < 1 || !(hi > lo)) {
    throw Error(ErrorCode::kInvalidInput, "invalid binning");
  }
  std::vector<int> out;
  out.reserve(values.size());
  const double width = (hi - lo) / bins;
  for (double v : values) {
    int b = static_cast<int>(std::floor((v - lo) / width));
    out.push_back(std::clamp(b, 0, bins - 1));
  }
  return out;
}

std::vector<AuditVerdict> RunAuditSuite(Scheme scheme,
                                        const AuditOptions& options) {
  const bool break_queries = options.broken == BreakMode::kQueries;
  const bool break_dither = options.broken == BreakMode::kDither;
  const bool break_cr = options.broken == BreakMode::kCommonRandomness;
  const size_t exhaustive_m =
      std::min(options.num_messages, kMaxExhaustiveMessages);

  std::vector<AuditVerdict> out;
  out.push_back(QueryInvarianceExact(scheme, exhaustive_m, break_queries));
  out.push_back(QueryInvarianceSampled(scheme, options.num_messages,
                                       options.samples, options.seed,
                                       break_queries, options.threads));
  out.push_back(DbViewIndependence(scheme, options.prime, 2, break_queries));
  if (scheme != Scheme::kSpirNoKey) {
    AuditVerdict t =
        TransmitIndependence(options.prime, options.samples, options.bins,
                             MixSeed(options.seed, 1), !break_dither);
    t.scheme = SchemeName(scheme);
    out.push_back(std::move(t));
  }
  AuditVerdict user = UserSideLeakage(scheme, options.prime, 2,
                                      scheme == Scheme::kSpirCr && break_cr);
  if (scheme == Scheme::kPir) {
    // Plain PIR is not symmetric; a positive value shows the audit has
    // the power to detect the leak.
    user.name = "user_side_leakage_detected";
    user.pass = user.value > 0.0;
    user.mandatory = false;
  }
  out.push_back(std::move(user));
  return out;
}

bool SuitePassed(std::span<const AuditVerdict> verdicts) {
  for (const AuditVerdict& v : verdicts) {
    if (v.mandatory && !v.pass) return false;
  }
  return true;
}

}  // namespace latpir
