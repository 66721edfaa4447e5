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

#include "latpir/pir.h"

#include <cmath>
#include <sstream>
#include <string>

#include "json.hpp"
#include "latpir/spir.h"

namespace latpir {

QueryPair BuildPirQueries(size_t index, std::span<const int> mask) {
  if (index >= mask.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "message index " + std::to_string(index) + " out of range");
  }
  QueryPair q;
  q.mask.assign(mask.begin(), mask.end());
  q.first.group = 1;
  q.second.group = 2;
  q.first.coeffs.resize(mask.size());
  q.second.coeffs.resize(mask.size());
  for (size_t m = 0; m < mask.size(); ++m) {
    if (mask[m] != 0 && mask[m] != 1) {
      throw Error(ErrorCode::kInvalidInput, "mask entries must be 0 or 1");
    }
    q.first.coeffs[m] = mask[m];
    q.second.coeffs[m] = -mask[m];
  }
  q.sign_bit = mask[index];
  q.second.coeffs[index] += q.sign_bit == 1 ? 1 : -1;
  return q;
}

QueryPair GeneratePirQueries(size_t index, size_t num_messages, Rng& rng) {
  if (index >= num_messages) {
    throw Error(ErrorCode::kInvalidInput,
                "message index " + std::to_string(index) + " out of range");
  }
  std::vector<int> mask(num_messages);
  for (int& b : mask) b = rng.Bit() ? 1 : 0;
  return BuildPirQueries(index, mask);
}

AnswerState FormAnswer(const Query& query,
                       std::span<const FieldVector> messages,
                       const NestedLatticePair& lattice) {
  if (query.coeffs.size() != messages.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "query length does not match the number of messages");
  }
  const int64_t p = lattice.prime();
  const size_t n = static_cast<size_t>(lattice.dimension());
  AnswerState answer;
  answer.group = query.group;
  answer.combination.symbols.assign(n, 0);
  for (size_t m = 0; m < messages.size(); ++m) {
    if (messages[m].size() != n) {
      throw Error(ErrorCode::kInvalidInput, "message chunk length must be n");
    }
    const int64_t c = ((query.coeffs[m] % p) + p) % p;
    if (c == 0) continue;
    for (size_t j = 0; j < n; ++j) {
      const int64_t s = messages[m].symbols[j];
      if (s < 0 || s >= p) {
        throw Error(ErrorCode::kInvalidInput, "message symbol outside F_p");
      }
      answer.combination.symbols[j] =
          (answer.combination.symbols[j] + c * s) % p;
    }
  }
  answer.codeword = lattice.Encode(answer.combination);
  return answer;
}

TransmitBlock MakeTransmit(const LatticePoint& codeword,
                           std::span<const double> dither, double scale,
                           const NestedLatticePair& lattice) {
  if (!(scale > 0.0 && scale <= 1.0)) {
    throw Error(ErrorCode::kInvalidInput, "transmit scale must be in (0, 1]");
  }
  if (dither.size() != codeword.size()) {
    throw Error(ErrorCode::kInvalidInput, "dither length mismatch");
  }
  RealVector shifted(codeword.size());
  for (size_t j = 0; j < shifted.size(); ++j) {
    shifted[j] = codeword.coords[j] - dither[j];
  }
  TransmitBlock block;
  block.scale = scale;
  block.samples = lattice.Reduce(shifted);
  for (double& x : block.samples) x *= scale;
  block.power = CheckPower(block.samples, 1.0).measured;
  return block;
}

AlphaChoice OptimalAlpha(double power, double gain1) {
  if (!(power > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "power must be positive");
  }
  if (!(gain1 > 0.0)) {
    throw Error(ErrorCode::kDegenerateChannel,
                "effective gain of the weaker group is zero");
  }
  const double inv = 1.0 / (gain1 * gain1);
  AlphaChoice choice;
  choice.alpha = 2.0 * power / (2.0 * power + inv);
  choice.noise_variance = 2.0 * power * inv / (2.0 * power + inv);
  return choice;
}

double EquivalentNoiseVariance(double power, double gain1, double alpha) {
  const double a = 1.0 - alpha;
  return 2.0 * power * a * a + alpha * alpha / (gain1 * gain1);
}

MlanDecode DecodeMlan(std::span<const double> received, double gain1,
                      double alpha, std::span<const double> dither1,
                      std::span<const double> dither2, int sign_bit,
                      const NestedLatticePair& lattice) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidInput, "alpha must be in (0, 1]");
  }
  if (!(gain1 > 0.0)) {
    throw Error(ErrorCode::kDegenerateChannel, "gain1 must be positive");
  }
  const size_t n = received.size();
  if (dither1.size() != n || dither2.size() != n) {
    throw Error(ErrorCode::kInvalidInput, "dither length mismatch");
  }
  RealVector t(n);
  for (size_t j = 0; j < n; ++j) {
    t[j] = alpha * received[j] / gain1 + dither1[j] + dither2[j];
  }
  MlanDecode out;
  out.modulo_output = lattice.Reduce(t);
  if (sign_bit == 0) {
    for (double& x : out.modulo_output) x = -x;
    out.modulo_output = lattice.Reduce(out.modulo_output);
  }
  out.estimate.coords = lattice.Reduce(
      lattice.Quantize(out.modulo_output, LatticeLevel::kFine).coords);
  RealVector diff(n);
  for (size_t j = 0; j < n; ++j) {
    diff[j] = out.modulo_output[j] - out.estimate.coords[j];
  }
  out.residual = lattice.Reduce(diff);
  return out;
}

ChannelSource FixedChannel(ChannelState state) {
  state.Validate();
  return [state](size_t) { return state; };
}

ChannelSource BlockFadingChannel(int num_databases, double power,
                                 PartitionMethod method, uint64_t seed) {
  if (method == PartitionMethod::kExact &&
      num_databases > kMaxExactDatabases) {
    throw Error(ErrorCode::kBudgetExceeded,
                "exact partitioning supports at most " +
                    std::to_string(kMaxExactDatabases) +
                    " databases; use diff");
  }
  return [=](size_t iteration) {
    Rng rng = Rng::ForStream(seed, iteration);
    RealVector h = DrawFading(num_databases, rng);
    const RealVector w = AbsoluteWeights(h);
    const PartitionResult part = Partition(w, method, rng);
    return MakeChannelState(std::move(h), power, part);
  };
}

namespace {

std::vector<FieldVector> ChunkOf(std::span<const FieldVector> messages,
                                 size_t chunk, size_t n) {
  std::vector<FieldVector> out(messages.size());
  for (size_t m = 0; m < messages.size(); ++m) {
    out[m].symbols.assign(messages[m].symbols.begin() + chunk * n,
                          messages[m].symbols.begin() + (chunk + 1) * n);
  }
  return out;
}

}  // namespace

RetrievalResult RunRetrieval(std::span<const FieldVector> messages,
                             size_t index, const ChannelSource& channels,
                             const NestedLatticePair& lattice,
                             const RetrievalOptions& options, Rng& rng) {
  if (messages.empty()) {
    throw Error(ErrorCode::kInvalidInput, "no messages");
  }
  const size_t n = static_cast<size_t>(lattice.dimension());
  const size_t length = messages.front().size();
  if (length == 0 || length % n != 0) {
    throw Error(ErrorCode::kInvalidInput,
                "message length must be a positive multiple of n");
  }
  for (const FieldVector& m : messages) {
    if (m.size() != length) {
      throw Error(ErrorCode::kInvalidInput, "messages differ in length");
    }
  }
  const size_t chunks = length / n;

  RetrievalResult result;
  result.trace.seed = options.dither_seed;
  result.trace.index = index;
  result.trace.queries = GeneratePirQueries(index, messages.size(), rng);
  const QueryPair& q = result.trace.queries;
  result.decoded.symbols.reserve(length);

  for (size_t t = 0; t < chunks; ++t) {
    const ChannelState channel = channels(t);
    if (!(channel.gain1 > 0.0)) {
      throw Error(ErrorCode::kDegenerateChannel,
                  "effective gain of the weaker group is zero");
    }
    const std::vector<FieldVector> chunk = ChunkOf(messages, t, n);
    const AnswerState a1 = FormAnswer(q.first, chunk, lattice);
    const AnswerState a2 = FormAnswer(q.second, chunk, lattice);

    RealVector d1(n, 0.0);
    RealVector d2(n, 0.0);
    if (options.dither_enabled) {
      Rng public_stream = Rng::ForStream(options.dither_seed, t);
      d1 = lattice.SampleDither(public_stream);
      d2 = lattice.SampleDither(public_stream);
    }
    const double scale2 = channel.gain1 / channel.gain2;
    TransmitBlock x1;
    TransmitBlock x2;
    if (options.common_randomness != nullptr) {
      const LatticePoint s = options.common_randomness->Draw(t, lattice);
      x1 = SpirTransmit(a1, d1, s, 1.0, lattice);
      x2 = SpirTransmit(a2, d2, s, scale2, lattice);
    } else {
      x1 = MakeTransmit(a1.codeword, d1, 1.0, lattice);
      x2 = MakeTransmit(a2.codeword, d2, scale2, lattice);
    }

    std::vector<Transmission> signals;
    for (int k : channel.group1) {
      signals.push_back({std::abs(channel.fading[k]), x1.samples});
    }
    for (int k : channel.group2) {
      signals.push_back({std::abs(channel.fading[k]), x2.samples});
    }
    const MacOutput mac = TransmitMac(signals, options.noise, rng);

    // Without channel noise the MMSE choice degenerates to alpha = 1.
    const bool noiseless = options.noise == NoiseMode::kOff;
    double alpha = options.alpha;
    if (alpha <= 0.0) {
      alpha = noiseless ? 1.0
                        : OptimalAlpha(channel.power, channel.gain1).alpha;
    }
    const MlanDecode dec = DecodeMlan(mac.received, channel.gain1, alpha, d1,
                                      d2, q.sign_bit, lattice);

    const FieldVector& wanted = chunk[index];
    const LatticePoint v = lattice.Encode(wanted);
    RealVector zdiff(n);
    for (size_t j = 0; j < n; ++j) {
      zdiff[j] = dec.modulo_output[j] - v.coords[j];
    }
    const RealVector z_eq = lattice.Reduce(zdiff);

    const FieldVector got = lattice.Decode(dec.estimate);
    IterationRecord rec;
    rec.iteration = t;
    rec.fading = channel.fading;
    rec.group1 = channel.group1;
    rec.group2 = channel.group2;
    rec.gain1 = channel.gain1;
    rec.gain2 = channel.gain2;
    rec.alpha = alpha;
    rec.noise_variance = SquaredNorm(z_eq) / static_cast<double>(n);
    rec.predicted_variance =
        noiseless ? 2.0 * channel.power * (1.0 - alpha) * (1.0 - alpha)
                  : EquivalentNoiseVariance(channel.power, channel.gain1, alpha);
    rec.power1 = x1.power;
    rec.power2 = x2.power;
    for (size_t j = 0; j < n; ++j) {
      if (got.symbols[j] != wanted.symbols[j]) ++rec.symbol_errors;
      result.decoded.symbols.push_back(got.symbols[j]);
    }
    result.symbol_errors += rec.symbol_errors;
    result.symbols += n;
    result.trace.iterations.push_back(std::move(rec));
  }
  return result;
}

std::string SerializeTrace(const RetrievalTrace& trace) {
  using nlohmann::json;
  std::ostringstream out;
  json header = {{"type", "queries"},
                 {"seed", trace.seed},
                 {"index", trace.index},
                 {"sign_bit", trace.queries.sign_bit},
                 {"mask", trace.queries.mask},
                 {"query1", trace.queries.first.coeffs},
                 {"query2", trace.queries.second.coeffs}};
  out << header.dump() << '\n';
  for (const IterationRecord& r : trace.iterations) {
    json rec = {{"type", "iteration"},
                {"seed", trace.seed},
                {"iteration", r.iteration},
                {"fading", r.fading},
                {"group1", r.group1},
                {"group2", r.group2},
                {"gain1", r.gain1},
                {"gain2", r.gain2},
                {"alpha", r.alpha},
                {"noise_variance", r.noise_variance},
                {"predicted_variance", r.predicted_variance},
                {"power1", r.power1},
                {"power2", r.power2},
                {"symbol_errors", r.symbol_errors},
                {"decoded", r.symbol_errors == 0 ? "ok" : "error"}};
    out << rec.dump() << '\n';
  }
  return out.str();
}

}  // namespace latpir
