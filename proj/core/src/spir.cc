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

#include "latpir/spir.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "json.hpp"

namespace latpir {

CommonRandomnessSource CommonRandomnessSource::Uniform(uint64_t seed) {
  return CommonRandomnessSource(seed, false);
}

CommonRandomnessSource CommonRandomnessSource::Zero() {
  return CommonRandomnessSource(0, true);
}

LatticePoint CommonRandomnessSource::Draw(
    size_t iteration, const NestedLatticePair& lattice) const {
  if (zero_) {
    return LatticePoint{RealVector(lattice.dimension(), 0.0)};
  }
  Rng rng = Rng::ForStream(seed_, iteration);
  return lattice.SampleCodeword(rng);
}

double CommonRandomnessSource::RandomnessRatio(
    const NestedLatticePair& lattice) {
  const double chunk_bits = lattice.dimension() * lattice.RateBits();
  // S is uniform on the p^n codewords.
  const double common_bits = lattice.dimension() * lattice.RateBits();
  return common_bits / chunk_bits;
}

namespace {

void CheckCodeword(const LatticePoint& s, const NestedLatticePair& lattice) {
  if (s.size() != static_cast<size_t>(lattice.dimension())) {
    throw Error(ErrorCode::kInvalidInput, "common randomness has wrong length");
  }
  try {
    lattice.Decode(s);
  } catch (const Error&) {
    throw Error(ErrorCode::kInvalidInput,
                "common randomness is not a codeword");
  }
}

}  // namespace

TransmitBlock SpirTransmit(const AnswerState& answer,
                           std::span<const double> dither,
                           const LatticePoint& common, double scale,
                           const NestedLatticePair& lattice) {
  CheckCodeword(common, lattice);
  if (answer.group != 1 && answer.group != 2) {
    throw Error(ErrorCode::kInvalidInput, "group must be 1 or 2");
  }
  const double sign = answer.group == 1 ? 1.0 : -1.0;
  RealVector shifted(common.size());
  for (size_t j = 0; j < shifted.size(); ++j) {
    shifted[j] = answer.codeword.coords[j] + sign * common.coords[j];
  }
  // Adding a codeword keeps the sum on the fine lattice; reduce it back into
  // the codebook before the usual dithered transmit.
  LatticePoint moved{lattice.Reduce(shifted)};
  return MakeTransmit(moved, dither, scale, lattice);
}

CryptoLemmaReport CryptoLemmaCheck(const NestedLatticePair& lattice,
                                   std::span<const double> lambda_weights,
                                   std::span<const double> common_weights,
                                   uint64_t budget) {
  const uint64_t size = lattice.CodebookSize();
  if (size > budget || size > budget / size) {
    throw Error(ErrorCode::kBudgetExceeded,
                "crypto-lemma enumeration needs " + std::to_string(size) +
                    "^2 evaluations");
  }
  const std::vector<LatticePoint> book = lattice.EnumerateCodebook(budget);
  auto normalized = [&](std::span<const double> w) {
    std::vector<double> out(size, 1.0 / static_cast<double>(size));
    if (w.empty()) return out;
    if (w.size() != size) {
      throw Error(ErrorCode::kInvalidInput, "weight vector length mismatch");
    }
    double total = 0.0;
    for (double x : w) {
      if (!(x >= 0.0)) {
        throw Error(ErrorCode::kInvalidInput, "weights must be non-negative");
      }
      total += x;
    }
    if (!(total > 0.0)) {
      throw Error(ErrorCode::kInvalidInput, "weights sum to zero");
    }
    for (size_t k = 0; k < size; ++k) out[k] = w[k] / total;
    return out;
  };
  const std::vector<double> pv = normalized(lambda_weights);
  const std::vector<double> ps = normalized(common_weights);
  const double uniform = 1.0 / static_cast<double>(size);

  // Rows of P(Y | v) for every v in the support of lambda.
  std::vector<std::vector<double>> rows;
  RealVector sum(lattice.dimension());
  for (uint64_t v = 0; v < size; ++v) {
    if (pv[v] == 0.0) continue;
    std::vector<double> row(size, 0.0);
    for (uint64_t s = 0; s < size; ++s) {
      if (ps[s] == 0.0) continue;
      for (size_t j = 0; j < sum.size(); ++j) {
        sum[j] = book[v].coords[j] + book[s].coords[j];
      }
      const uint64_t y = lattice.CodewordIndex(LatticePoint{lattice.Reduce(sum)});
      row[y] += ps[s];
    }
    rows.push_back(std::move(row));
  }

  CryptoLemmaReport report;
  report.codebook_size = size;
  for (size_t a = 0; a < rows.size(); ++a) {
    double tv = 0.0;
    for (double x : rows[a]) tv += std::abs(x - uniform);
    report.max_tv = std::max(report.max_tv, tv / 2.0);
    for (size_t b = a + 1; b < rows.size(); ++b) {
      double d = 0.0;
      for (uint64_t y = 0; y < size; ++y) d += std::abs(rows[a][y] - rows[b][y]);
      report.max_dependence = std::max(report.max_dependence, d / 2.0);
    }
  }
  return report;
}

namespace {

constexpr int64_t kDemoPrime = 5;

struct DemoRun {
  double y = 0.0;
  int64_t decoded = 0;
  int64_t a1 = 0;
  int64_t a2 = 0;
};

// Two databases with unit gains, zero dithers, no noise. common is nullptr
// for plain PIR.
DemoRun RunDemoOnce(const std::vector<FieldVector>& messages,
                    const QueryPair& q, const LatticePoint* common,
                    const NestedLatticePair& lattice) {
  const AnswerState a1 = FormAnswer(q.first, messages, lattice);
  const AnswerState a2 = FormAnswer(q.second, messages, lattice);
  const RealVector zero(1, 0.0);
  const TransmitBlock x1 = common ? SpirTransmit(a1, zero, *common, 1.0, lattice)
                                  : MakeTransmit(a1.codeword, zero, 1.0, lattice);
  const TransmitBlock x2 = common ? SpirTransmit(a2, zero, *common, 1.0, lattice)
                                  : MakeTransmit(a2.codeword, zero, 1.0, lattice);
  Rng unused(0);
  const std::vector<Transmission> signals = {{1.0, x1.samples},
                                             {1.0, x2.samples}};
  const MacOutput mac = TransmitMac(signals, NoiseMode::kOff, unused);
  const MlanDecode dec =
      DecodeMlan(mac.received, 1.0, 1.0, zero, zero, q.sign_bit, lattice);
  DemoRun run;
  run.y = mac.received[0];
  run.decoded = lattice.ToUnits(dec.estimate.coords)[0];
  run.a1 = lattice.ToUnits(a1.codeword.coords)[0];
  run.a2 = lattice.ToUnits(a2.codeword.coords)[0];
  return run;
}

FieldVector Symbol(int64_t s) { return FieldVector{{s}}; }

std::vector<double> Posterior(const std::vector<int64_t>& counts) {
  int64_t total = 0;
  for (int64_t c : counts) total += c;
  std::vector<double> out(counts.size(), 0.0);
  if (total == 0) return out;
  for (size_t k = 0; k < counts.size(); ++k) {
    out[k] = static_cast<double>(counts[k]) / static_cast<double>(total);
  }
  return out;
}

}  // namespace

LeakageDemo RunLeakageDemo() {
  const NestedLatticePair lattice(1, kDemoPrime, 1.0);
  LeakageDemo demo;
  demo.prime = kDemoPrime;
  demo.codewords = {1, 2};
  demo.mask = {1, 1};
  const QueryPair q = BuildPirQueries(0, demo.mask);
  demo.query1 = q.first.coeffs;
  demo.query2 = q.second.coeffs;

  const std::vector<FieldVector> actual = {Symbol(1), Symbol(2)};
  const DemoRun plain = RunDemoOnce(actual, q, nullptr, lattice);
  demo.answer1 = plain.a1;
  demo.answer2 = plain.a2;
  demo.observed = plain.y;
  demo.decoded_plain = plain.decoded;

  // The symmetric run uses the S that reproduces the same observation.
  const std::vector<LatticePoint> book = lattice.EnumerateCodebook();
  bool found = false;
  for (const LatticePoint& s : book) {
    const DemoRun run = RunDemoOnce(actual, q, &s, lattice);
    if (run.y == demo.observed) {
      demo.common_value = lattice.ToUnits(s.coords)[0];
      demo.decoded_symmetric = run.decoded;
      found = true;
      break;
    }
  }
  if (!found) {
    throw Error(ErrorCode::kInvalidInput,
                "no common randomness reproduces the observation");
  }

  std::vector<int64_t> plain_counts(kDemoPrime, 0);
  std::vector<int64_t> symmetric_counts(kDemoPrime, 0);
  for (int64_t w0 = 0; w0 < kDemoPrime; ++w0) {
    for (int64_t w1 = 0; w1 < kDemoPrime; ++w1) {
      const std::vector<FieldVector> msgs = {Symbol(w0), Symbol(w1)};
      if (RunDemoOnce(msgs, q, nullptr, lattice).y == demo.observed) {
        ++plain_counts[w1];
      }
      for (const LatticePoint& s : book) {
        if (RunDemoOnce(msgs, q, &s, lattice).y == demo.observed) {
          ++symmetric_counts[w1];
        }
      }
    }
  }
  demo.posterior_plain = Posterior(plain_counts);
  demo.posterior_symmetric = Posterior(symmetric_counts);
  return demo;
}

std::string LeakageDemo::ToJson() const {
  nlohmann::json j = {{"prime", prime},
                      {"codewords", codewords},
                      {"mask", mask},
                      {"query1", query1},
                      {"query2", query2},
                      {"answer1", answer1},
                      {"answer2", answer2},
                      {"observed", observed},
                      {"decoded_plain", decoded_plain},
                      {"decoded_symmetric", decoded_symmetric},
                      {"common_value", common_value},
                      {"posterior_plain", posterior_plain},
                      {"posterior_symmetric", posterior_symmetric}};
  return j.dump(2);
}

QueryPair BuildNoKeyQueries(size_t index, std::span<const int> signs) {
  if (index >= signs.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "message index " + std::to_string(index) + " out of range");
  }
  QueryPair q;
  q.mask.assign(signs.begin(), signs.end());
  q.first.group = 1;
  q.second.group = 2;
  q.first.coeffs.resize(signs.size());
  q.second.coeffs.resize(signs.size());
  for (size_t m = 0; m < signs.size(); ++m) {
    if (signs[m] != 1 && signs[m] != -1) {
      throw Error(ErrorCode::kInvalidInput, "signs must be +1 or -1");
    }
    q.first.coeffs[m] = signs[m];
    q.second.coeffs[m] = -signs[m];
  }
  q.sign_bit = signs[index];
  q.second.coeffs[index] += 2 * q.sign_bit;
  return q;
}

QueryPair GenerateNoKeyQueries(size_t index, size_t num_messages, Rng& rng) {
  if (index >= num_messages) {
    throw Error(ErrorCode::kInvalidInput,
                "message index " + std::to_string(index) + " out of range");
  }
  std::vector<int> signs(num_messages);
  for (int& b : signs) b = rng.Bit() ? 1 : -1;
  return BuildNoKeyQueries(index, signs);
}

SphereCodebook::SphereCodebook(double power, size_t num_messages,
                               int dimension, double unit, uint64_t budget)
    : power_(power),
      num_messages_(num_messages),
      dimension_(dimension),
      unit_(unit) {
  if (!(power > 0.0) || num_messages < 1 || dimension < 1) {
    throw Error(ErrorCode::kInvalidInput,
                "sphere codebook needs P > 0, M >= 1, n >= 1");
  }
  int exponent = 0;
  if (!(unit > 0.0) || std::frexp(unit, &exponent) != 0.5) {
    throw Error(ErrorCode::kInvalidInput, "unit must be a power of two");
  }
  // ||beta u||^2 <= n P  <=>  ||u||^2 <= n P / (unit^2 M).
  const double limit = dimension * power / (unit * unit * num_messages);
  const int64_t r = static_cast<int64_t>(std::floor(std::sqrt(limit)));
  // Ball volume as a cheap early estimate of the point count.
  const double log_volume = 0.5 * dimension * std::log(std::numbers::pi * limit) -
                            std::lgamma(0.5 * dimension + 1.0);
  if (log_volume > std::log(2.0 * static_cast<double>(budget))) {
    throw Error(ErrorCode::kBudgetExceeded,
                "sphere codebook exceeds the enumeration budget");
  }
  std::vector<int64_t> current(dimension, 0);
  std::function<void(int, int64_t)> walk = [&](int j, int64_t used) {
    if (j == dimension) {
      if (points_.size() >= budget) {
        throw Error(ErrorCode::kBudgetExceeded,
                    "sphere codebook exceeds the enumeration budget");
      }
      index_.emplace(current, points_.size());
      points_.push_back(current);
      return;
    }
    for (int64_t u = -r; u <= r; ++u) {
      const int64_t next = used + u * u;
      if (static_cast<double>(next) > limit) continue;
      current[j] = u;
      walk(j + 1, next);
    }
    current[j] = 0;
  };
  walk(0, 0);
  if (MeanEnergy() > power_) {
    throw Error(ErrorCode::kPowerViolation,
                "sphere codebook mean energy exceeds P");
  }
}

double SphereCodebook::step() const {
  return unit_ * std::sqrt(static_cast<double>(num_messages_));
}

double SphereCodebook::power_radius() const {
  return std::sqrt(dimension_ * power_);
}

double SphereCodebook::noise_radius() const {
  return std::sqrt(static_cast<double>(num_messages_) * dimension_) / 2.0;
}

const std::vector<int64_t>& SphereCodebook::Units(size_t index) const {
  if (index >= points_.size()) {
    throw Error(ErrorCode::kInvalidInput, "codebook index out of range");
  }
  return points_[index];
}

LatticePoint SphereCodebook::Point(size_t index) const {
  const std::vector<int64_t>& u = Units(index);
  LatticePoint p;
  p.coords.reserve(u.size());
  for (int64_t k : u) p.coords.push_back(static_cast<double>(k) * step());
  return p;
}

std::optional<size_t> SphereCodebook::IndexOf(
    std::span<const int64_t> units) const {
  auto it = index_.find(std::vector<int64_t>(units.begin(), units.end()));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double SphereCodebook::NominalRate() const {
  return std::max(0.0, 0.5 * std::log2(4.0 * power_ / num_messages_));
}

double SphereCodebook::VolumeRate() const {
  const double ratio =
      2.0 * std::sqrt(power_) / std::sqrt(static_cast<double>(num_messages_));
  return std::log2(std::pow(ratio, dimension_)) / dimension_;
}

double SphereCodebook::EmpiricalRate() const {
  return std::log2(static_cast<double>(points_.size())) / dimension_;
}

double SphereCodebook::MeanEnergy() const {
  const double s2 = step() * step();
  double total = 0.0;
  for (const std::vector<int64_t>& u : points_) {
    int64_t e = 0;
    for (int64_t k : u) e += k * k;
    total += static_cast<double>(e) * s2;
  }
  return total / (static_cast<double>(points_.size()) * dimension_);
}

NoKeyTransmit NoKeyAnswers(const QueryPair& queries,
                           std::span<const size_t> chunk,
                           const SphereCodebook& codebook) {
  const size_t num_messages = chunk.size();
  if (queries.first.coeffs.size() != num_messages ||
      queries.second.coeffs.size() != num_messages) {
    throw Error(ErrorCode::kInvalidInput,
                "query length does not match the number of messages");
  }
  const size_t n = static_cast<size_t>(codebook.dimension());
  // A_k / sqrt(M) = unit * sum_m Q_{k,m} u_m, exact in floating point.
  std::vector<int64_t> a1(n, 0);
  std::vector<int64_t> a2(n, 0);
  for (size_t m = 0; m < num_messages; ++m) {
    const std::vector<int64_t>& u = codebook.Units(chunk[m]);
    for (size_t j = 0; j < n; ++j) {
      a1[j] += queries.first.coeffs[m] * u[j];
      a2[j] += queries.second.coeffs[m] * u[j];
    }
  }
  NoKeyTransmit tx;
  tx.x1.resize(n);
  tx.x2.resize(n);
  for (size_t j = 0; j < n; ++j) {
    tx.x1[j] = codebook.unit() * static_cast<double>(a1[j]);
    tx.x2[j] = codebook.unit() * static_cast<double>(a2[j]);
  }
  return tx;
}

NoKeyResult NoKeyRoundTrip(std::span<const CodewordMessage> messages,
                           size_t index, const SphereCodebook& codebook,
                           NoiseMode noise, Rng& rng) {
  const size_t num_messages = messages.size();
  if (num_messages != codebook.num_messages()) {
    throw Error(ErrorCode::kInvalidInput,
                "codebook was built for a different number of messages");
  }
  if (codebook.MeanEnergy() > codebook.power()) {
    throw Error(ErrorCode::kPowerViolation, "codebook mean energy exceeds P");
  }
  const size_t chunks = messages.front().size();
  for (const CodewordMessage& m : messages) {
    if (m.size() != chunks || chunks == 0) {
      throw Error(ErrorCode::kInvalidInput,
                  "messages must have the same positive length");
    }
    for (size_t c : m) {
      if (c >= codebook.size()) {
        throw Error(ErrorCode::kInvalidInput, "codeword index out of range");
      }
    }
  }

  NoKeyResult result;
  result.queries = GenerateNoKeyQueries(index, num_messages, rng);
  const QueryPair& q = result.queries;
  const size_t n = static_cast<size_t>(codebook.dimension());
  const double unit = codebook.unit();
  const double half_root_m = std::sqrt(static_cast<double>(num_messages)) / 2.0;

  for (size_t t = 0; t < chunks; ++t) {
    std::vector<size_t> chunk(num_messages);
    for (size_t m = 0; m < num_messages; ++m) chunk[m] = messages[m][t];
    const NoKeyTransmit tx = NoKeyAnswers(q, chunk, codebook);
    const RealVector& x1 = tx.x1;
    const RealVector& x2 = tx.x2;
    result.power1 += SquaredNorm(x1) / static_cast<double>(n);
    result.power2 += SquaredNorm(x2) / static_cast<double>(n);

    const std::vector<Transmission> signals = {{1.0, x1}, {1.0, x2}};
    const MacOutput mac = TransmitMac(signals, noise, rng);

    // y_hat = (sqrt(M)/2) y; its nearest point of beta Z^n is
    // round(b_i y / (2 unit)).
    std::vector<int64_t> units(n);
    for (size_t j = 0; j < n; ++j) {
      units[j] = static_cast<int64_t>(
          std::nearbyint(q.sign_bit * mac.received[j] / (2.0 * unit)));
    }
    const std::optional<size_t> got = codebook.IndexOf(units);
    result.decoded.push_back(got);
    if (!got || *got != messages[index][t]) ++result.errors;

    const std::vector<int64_t>& truth = codebook.Units(messages[index][t]);
    RealVector residual(n);
    RealVector scaled(n);
    for (size_t j = 0; j < n; ++j) {
      const double clean = 2.0 * unit * q.sign_bit * static_cast<double>(truth[j]);
      residual[j] = half_root_m * (mac.received[j] - clean);
      scaled[j] = half_root_m * mac.noise[j];
    }
    result.residuals.push_back(std::move(residual));
    result.scaled_noise.push_back(std::move(scaled));
  }
  result.power1 /= static_cast<double>(chunks);
  result.power2 /= static_cast<double>(chunks);
  return result;
}

double NoKeyRate(double power, size_t num_messages,
                 std::optional<int> num_databases) {
  if (!(power > 0.0) || num_messages < 1) {
    throw Error(ErrorCode::kInvalidInput, "need P > 0 and M >= 1");
  }
  const int n_dbs = num_databases.value_or(2);
  if (n_dbs < 2) {
    throw Error(ErrorCode::kInvalidInput, "need at least two databases");
  }
  const double arg = static_cast<double>(n_dbs) * n_dbs * power /
                     static_cast<double>(num_messages);
  return std::max(0.0, 0.5 * std::log2(arg));
}

}  // namespace latpir
