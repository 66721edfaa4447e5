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

#include "latpir/channel.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace latpir {

namespace {

double GroupGain(const RealVector& fading, const std::vector<int>& group) {
  double sum = 0.0;
  for (int k : group) sum += std::abs(fading[k]);
  return sum;
}

}  // namespace

ChannelState ChannelState::Create(RealVector fading, double power,
                                  std::vector<int> group1,
                                  std::vector<int> group2) {
  ChannelState state;
  state.fading = std::move(fading);
  state.power = power;
  state.group1 = std::move(group1);
  state.group2 = std::move(group2);
  for (const auto* g : {&state.group1, &state.group2}) {
    for (int k : *g) {
      if (k < 0 || k >= state.num_databases()) {
        throw Error(ErrorCode::kInvalidInput,
                    "database index " + std::to_string(k) + " out of range");
      }
    }
  }
  state.gain1 = GroupGain(state.fading, state.group1);
  state.gain2 = GroupGain(state.fading, state.group2);
  state.Validate();
  return state;
}

void ChannelState::Validate() const {
  if (!(power > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "power must be positive");
  }
  if (group1.empty() || group2.empty()) {
    throw Error(ErrorCode::kInvalidInput, "both groups must be non-empty");
  }
  std::vector<char> seen(fading.size(), 0);
  for (const auto* g : {&group1, &group2}) {
    for (int k : *g) {
      if (k < 0 || k >= num_databases()) {
        throw Error(ErrorCode::kInvalidInput, "database index out of range");
      }
      if (seen[k]) {
        throw Error(ErrorCode::kInvalidInput,
                    "database " + std::to_string(k) + " in both groups");
      }
      seen[k] = 1;
    }
  }
  if (std::abs(GroupGain(fading, group1) - gain1) > 1e-12 ||
      std::abs(GroupGain(fading, group2) - gain2) > 1e-12) {
    throw Error(ErrorCode::kInvalidInput, "stale effective gains");
  }
  if (gain1 > gain2) {
    throw Error(ErrorCode::kInvalidInput, "gain1 must not exceed gain2");
  }
}

RealVector DrawFading(int count, Rng& rng) {
  if (count < 2) {
    throw Error(ErrorCode::kInvalidInput, "need at least two databases");
  }
  RealVector h(count);
  for (double& x : h) x = rng.Normal();
  return h;
}

MacOutput TransmitMac(std::span<const Transmission> signals, NoiseMode noise,
                      Rng& rng) {
  if (signals.empty()) {
    throw Error(ErrorCode::kInvalidInput, "no transmitted blocks");
  }
  const size_t n = signals.front().block.size();
  MacOutput out;
  out.received.assign(n, 0.0);
  out.noise.assign(n, 0.0);
  for (const Transmission& s : signals) {
    if (s.block.size() != n) {
      throw Error(ErrorCode::kInvalidInput, "block length mismatch");
    }
    for (size_t j = 0; j < n; ++j) out.received[j] += s.gain * s.block[j];
  }
  if (noise == NoiseMode::kOff) return out;
  for (size_t j = 0; j < n; ++j) {
    double z = rng.Normal();
    if (noise == NoiseMode::kDyadicGaussian) {
      z = std::nearbyint(z / kNoiseQuantum) * kNoiseQuantum;
    }
    out.noise[j] = z;
    out.received[j] += z;
  }
  return out;
}

PowerCheck CheckPower(std::span<const double> block, double power) {
  PowerCheck check;
  if (block.empty()) return check;
  check.measured = SquaredNorm(block) / static_cast<double>(block.size());
  check.within = check.measured <= power * (1.0 + kPowerSlack);
  return check;
}

}  // namespace latpir
