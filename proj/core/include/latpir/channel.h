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

#ifndef LATPIR_CHANNEL_H_
#define LATPIR_CHANNEL_H_

#include <span>
#include <vector>

#include "latpir/common.h"

namespace latpir {

// Relative slack allowed by CheckPower.
inline constexpr double kPowerSlack = 1e-6;

// Grid used by NoiseMode::kDyadicGaussian. Noise drawn on this grid adds
// exactly to dyadic signals, so a receiver can strip a known noiseless
// superposition and recover the noise sample bit for bit.
inline constexpr double kNoiseQuantum = 0x1.0p-32;

// Real block-fading MAC state for one codeword. Databases in group1 send
// the unscaled answer and databases in group2 the answer scaled by
// gain1 / gain2. Gains are sums of |h_k| over each group, which models the
// sign side information: each database flips its sign so that all
// contributions add constructively.
struct ChannelState {
  RealVector fading;
  double power = 0.0;
  std::vector<int> group1;
  std::vector<int> group2;
  double gain1 = 0.0;
  double gain2 = 0.0;

  // Computes the gains and checks every invariant. Requires gain1 <= gain2.
  static ChannelState Create(RealVector fading, double power,
                             std::vector<int> group1,
                             std::vector<int> group2);

  // Throws kInvalidInput if any invariant is broken.
  void Validate() const;

  int num_databases() const { return static_cast<int>(fading.size()); }
};

// i.i.d. N(0, 1) fading coefficients; count >= 2.
RealVector DrawFading(int count, Rng& rng);

struct Transmission {
  double gain = 1.0;
  std::span<const double> block;
};

enum class NoiseMode { kOff, kGaussian, kDyadicGaussian };

struct MacOutput {
  RealVector received;
  // The noise sample that was added (all zeros when noise is off).
  RealVector noise;
};

// y = sum_k gain_k * block_k + z, accumulated in the order given.
MacOutput TransmitMac(std::span<const Transmission> signals, NoiseMode noise,
                      Rng& rng);

struct PowerCheck {
  bool within = true;
  double measured = 0.0;
};

// ||block||^2 / n against power * (1 + kPowerSlack).
PowerCheck CheckPower(std::span<const double> block, double power);

}  // namespace latpir

#endif  // LATPIR_CHANNEL_H_
