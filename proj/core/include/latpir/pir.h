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

#ifndef LATPIR_PIR_H_
#define LATPIR_PIR_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "latpir/channel.h"
#include "latpir/common.h"
#include "latpir/lattice.h"
#include "latpir/partition.h"

namespace latpir {

// Integer coefficient vector sent to every database of one group.
// PIR queries: group 1 in {0,1}^M, group 2 in {-1,0}^M.
struct Query {
  std::vector<int> coeffs;
  int group = 1;
};

// The two queries of one retrieval plus the user's private state.
// Message indices are 0-based throughout the library.
struct QueryPair {
  Query first;
  Query second;
  // The random vector b the queries were built from.
  std::vector<int> mask;
  // b_i. Q1 + Q2 = +e_i when sign_bit is 1 and -e_i when it is 0.
  int sign_bit = 1;
};

// Q1 = b, Q2 = -b - e_i if b_i = 0 and -b + e_i if b_i = 1. mask in {0,1}^M.
QueryPair BuildPirQueries(size_t index, std::span<const int> mask);
QueryPair GeneratePirQueries(size_t index, size_t num_messages, Rng& rng);

// Answer of one database for one chunk: A = sum_m Q_m W_m over F_p, and
// its codeword phi(A).
struct AnswerState {
  FieldVector combination;
  LatticePoint codeword;
  int group = 1;
};

// messages[m] is the current chunk (length n) of message m.
AnswerState FormAnswer(const Query& query,
                       std::span<const FieldVector> messages,
                       const NestedLatticePair& lattice);

struct TransmitBlock {
  RealVector samples;
  double scale = 1.0;
  // ||samples||^2 / n.
  double power = 0.0;
};

// scale * [codeword - dither] mod coarse, scale in (0, 1].
TransmitBlock MakeTransmit(const LatticePoint& codeword,
                           std::span<const double> dither, double scale,
                           const NestedLatticePair& lattice);

struct AlphaChoice {
  double alpha = 1.0;
  double noise_variance = 0.0;
};

// MMSE scaling of the modulo receiver: alpha = 2P / (2P + 1/g^2) and the
// resulting equivalent-noise variance 2P (1/g^2) / (2P + 1/g^2).
AlphaChoice OptimalAlpha(double power, double gain1);

// Second moment of the equivalent noise for any alpha:
// 2P (1 - alpha)^2 + alpha^2 / g^2.
double EquivalentNoiseVariance(double power, double gain1, double alpha);

struct MlanDecode {
  // Fine-lattice quantization of the (sign-corrected) modulo output.
  LatticePoint estimate;
  // [alpha y / g + d1 + d2] mod coarse, negated when sign_bit is 0.
  RealVector modulo_output;
  // [modulo_output - estimate] mod coarse.
  RealVector residual;
};

MlanDecode DecodeMlan(std::span<const double> received, double gain1,
                      double alpha, std::span<const double> dither1,
                      std::span<const double> dither2, int sign_bit,
                      const NestedLatticePair& lattice);

// Supplies the channel used for a given iteration (chunk).
using ChannelSource = std::function<ChannelState(size_t iteration)>;

// Same channel for every chunk.
ChannelSource FixedChannel(ChannelState state);

// Fresh fading per chunk from stream (seed, iteration), partitioned with
// `method`. Exact partitioning needs num_databases <= kMaxExactDatabases.
ChannelSource BlockFadingChannel(int num_databases, double power,
                                 PartitionMethod method, uint64_t seed);

class CommonRandomnessSource;

struct RetrievalOptions {
  // Noise on the MAC.
  NoiseMode noise = NoiseMode::kGaussian;
  // Public stream the user and the databases derive dithers from.
  uint64_t dither_seed = 0;
  bool dither_enabled = true;
  // alpha <= 0 selects OptimalAlpha, or 1 when the channel is noiseless.
  double alpha = 0.0;
  // Set for the common-randomness symmetric scheme.
  const CommonRandomnessSource* common_randomness = nullptr;
};

struct IterationRecord {
  size_t iteration = 0;
  RealVector fading;
  std::vector<int> group1;
  std::vector<int> group2;
  double gain1 = 0.0;
  double gain2 = 0.0;
  double alpha = 0.0;
  // ||z_eq||^2 / n where z_eq = [modulo_output - v] mod coarse.
  double noise_variance = 0.0;
  // Closed form for the same alpha.
  double predicted_variance = 0.0;
  double power1 = 0.0;
  double power2 = 0.0;
  size_t symbol_errors = 0;
};

struct RetrievalTrace {
  uint64_t seed = 0;
  size_t index = 0;
  QueryPair queries;
  std::vector<IterationRecord> iterations;
};

struct RetrievalResult {
  FieldVector decoded;
  size_t symbol_errors = 0;
  size_t symbols = 0;
  RetrievalTrace trace;

  double symbol_error_rate() const {
    return symbols == 0 ? 0.0
                        : static_cast<double>(symbol_errors) /
                              static_cast<double>(symbols);
  }
};

// Runs one private retrieval of messages[index]. Every message has length
// k * n; chunk t is sent over channels(t). Queries are drawn once from
// `rng`, which also supplies the channel noise.
RetrievalResult RunRetrieval(std::span<const FieldVector> messages,
                             size_t index, const ChannelSource& channels,
                             const NestedLatticePair& lattice,
                             const RetrievalOptions& options, Rng& rng);

// One JSON object per line: the queries header, then one record per chunk.
std::string SerializeTrace(const RetrievalTrace& trace);

}  // namespace latpir

#endif  // LATPIR_PIR_H_
