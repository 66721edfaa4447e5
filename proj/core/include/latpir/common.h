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

#ifndef LATPIR_COMMON_H_
#define LATPIR_COMMON_H_

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace latpir {

using RealVector = std::vector<double>;

enum class ErrorCode {
  kInvalidInput,
  kDecodeDomain,
  kBudgetExceeded,
  kDegenerateChannel,
  kInsufficientData,
  kPowerViolation,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Seeded random stream. Streams are cheap to create and are never shared
// between workers: each trial derives its own stream from
// (master seed, stream id) through a splitmix64 mixing step, so a single
// trial can be replayed in isolation.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  static Rng ForStream(uint64_t master_seed, uint64_t stream_id);
  static Rng ForStream(uint64_t master_seed, uint64_t stream_id,
                       uint64_t substream);

  // Uniform on [0, 1) with 53 random bits.
  double Uniform01();
  // Uniform integer on [0, bound).
  uint64_t UniformInt(uint64_t bound);
  bool Bit() { return (engine_() >> 63) != 0; }
  double Normal();

  uint64_t NextU64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

uint64_t MixSeed(uint64_t a, uint64_t b);

bool IsPrime(int64_t value);

double SquaredNorm(std::span<const double> v);

}  // namespace latpir

#endif  // LATPIR_COMMON_H_
