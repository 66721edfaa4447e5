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

#ifndef LATPIR_SPIR_H_
#define LATPIR_SPIR_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latpir/channel.h"
#include "latpir/common.h"
#include "latpir/lattice.h"
#include "latpir/pir.h"

namespace latpir {

// Codeword S shared by all databases and hidden from the user. A fresh S is
// drawn for every chunk from stream (seed, iteration), a seed the databases
// agree on out of band.
class CommonRandomnessSource {
 public:
  static CommonRandomnessSource Uniform(uint64_t seed);
  // S = 0 for every chunk. Reduces the symmetric scheme to plain PIR.
  static CommonRandomnessSource Zero();

  LatticePoint Draw(size_t iteration, const NestedLatticePair& lattice) const;
  bool is_zero() const { return zero_; }

  // Bits of S consumed per chunk over bits per message chunk. S is uniform
  // on the codebook, so this is n log2 p / (n log2 p) = 1.
  static double RandomnessRatio(const NestedLatticePair& lattice);

 private:
  CommonRandomnessSource(uint64_t seed, bool zero) : seed_(seed), zero_(zero) {}

  uint64_t seed_;
  bool zero_;
};

// scale * [codeword - dither + S] mod coarse for group 1 and
// scale * [codeword - dither - S] mod coarse for group 2. S must be a
// codeword.
TransmitBlock SpirTransmit(const AnswerState& answer,
                           std::span<const double> dither,
                           const LatticePoint& common, double scale,
                           const NestedLatticePair& lattice);

struct CryptoLemmaReport {
  // max over v of TV(P(Y | lambda = v), uniform), Y = [v + S] mod coarse.
  double max_tv = 0.0;
  // max over (v, v') of TV(P(Y | v), P(Y | v')). Zero iff Y is independent
  // of lambda.
  double max_dependence = 0.0;
  uint64_t codebook_size = 0;
};

// Exact enumeration over the codebook. Weights are indexed in
// EnumerateCodebook order and need not be normalized; an empty span means
// uniform.
CryptoLemmaReport CryptoLemmaCheck(const NestedLatticePair& lattice,
                                   std::span<const double> lambda_weights = {},
                                   std::span<const double> common_weights = {},
                                   uint64_t budget = kEnumerationBudget);

// Two databases, two messages, p = 5, n = 1, no dither, no fading, unit
// lattice scale. The user asks for message 0 (phi = 1) while message 1 has
// phi = 2, with b = (1, 1).
struct LeakageDemo {
  int64_t prime = 5;
  std::vector<int64_t> codewords;
  std::vector<int> mask;
  std::vector<int> query1;
  std::vector<int> query2;
  int64_t answer1 = 0;
  int64_t answer2 = 0;
  double observed = 0.0;
  // Decoded phi(W_0) in the plain and symmetric schemes.
  int64_t decoded_plain = 0;
  int64_t decoded_symmetric = 0;
  // P(W_1 = s | y, queries) for s = 0..p-1, by exact enumeration over both
  // messages (and S for the symmetric scheme).
  std::vector<double> posterior_plain;
  std::vector<double> posterior_symmetric;
  // Value of S that produces the same observation in the symmetric scheme.
  int64_t common_value = 0;

  std::string ToJson() const;
};

LeakageDemo RunLeakageDemo();

// b uniform on {-1, 1}^M, Q1 = b, Q2 = -b + 2 b_i e_i. The returned mask
// holds b and sign_bit holds b_i in {-1, 1}.
QueryPair BuildNoKeyQueries(size_t index, std::span<const int> signs);
QueryPair GenerateNoKeyQueries(size_t index, size_t num_messages, Rng& rng);

// Points of beta * Z^n inside the ball of radius sqrt(n P), with
// beta = unit * sqrt(M). The unit is a power of two so that every transmit
// sample x_k = A_k / sqrt(M) = unit * (integer) is exact.
class SphereCodebook {
 public:
  SphereCodebook(double power, size_t num_messages, int dimension,
                 double unit = 1.0, uint64_t budget = kEnumerationBudget);

  double power() const { return power_; }
  size_t num_messages() const { return num_messages_; }
  int dimension() const { return dimension_; }
  double unit() const { return unit_; }
  double step() const;
  double power_radius() const;
  double noise_radius() const;

  size_t size() const { return points_.size(); }
  const std::vector<int64_t>& Units(size_t index) const;
  LatticePoint Point(size_t index) const;
  std::optional<size_t> IndexOf(std::span<const int64_t> units) const;

  // max(0, 1/2 log2(4P/M)).
  double NominalRate() const;
  // (1/n) log2 of the volume ratio (2 sqrt(P) / sqrt(M))^n.
  double VolumeRate() const;
  // (1/n) log2 |C| of the enumerated codebook.
  double EmpiricalRate() const;
  // Mean of ||lambda||^2 / n over the codebook.
  double MeanEnergy() const;

 private:
  double power_;
  size_t num_messages_;
  int dimension_;
  double unit_;
  std::vector<std::vector<int64_t>> points_;
  std::map<std::vector<int64_t>, size_t> index_;
};

// One message is a sequence of codebook indices, one per chunk.
using CodewordMessage = std::vector<size_t>;

// Transmitted blocks x_k = A_k / sqrt(M) for one chunk, where chunk[m] is
// the codebook index of message m. No modulo is applied.
struct NoKeyTransmit {
  RealVector x1;
  RealVector x2;
};

NoKeyTransmit NoKeyAnswers(const QueryPair& queries,
                           std::span<const size_t> chunk,
                           const SphereCodebook& codebook);

struct NoKeyResult {
  QueryPair queries;
  // Decoded codebook index per chunk; nullopt when the rounded point falls
  // outside the sphere.
  std::vector<std::optional<size_t>> decoded;
  size_t errors = 0;
  // Per chunk: (sqrt(M)/2) (y - x1 - x2) with x1 + x2 = 2 b_i phi(W_i) /
  // sqrt(M), i.e. y_hat - b_i phi(W_i) evaluated in the received domain.
  std::vector<RealVector> residuals;
  // Per chunk: (sqrt(M)/2) z for the injected noise z.
  std::vector<RealVector> scaled_noise;
  // Mean over chunks of ||x_k||^2 / n.
  double power1 = 0.0;
  double power2 = 0.0;
};

// Two databases, unit gains, no dither and no modulo. Throws
// kPowerViolation when the codebook's mean energy exceeds P.
NoKeyResult NoKeyRoundTrip(std::span<const CodewordMessage> messages,
                           size_t index, const SphereCodebook& codebook,
                           NoiseMode noise, Rng& rng);

// max(0, 1/2 log2(N^2 P / M)); N defaults to 2.
double NoKeyRate(double power, size_t num_messages,
                 std::optional<int> num_databases = std::nullopt);

}  // namespace latpir

#endif  // LATPIR_SPIR_H_
