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

#ifndef LATPIR_PARTITION_H_
#define LATPIR_PARTITION_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latpir/channel.h"
#include "latpir/common.h"

namespace latpir {

// Largest database count the exhaustive solver accepts.
inline constexpr int kMaxExactDatabases = 24;

enum class PartitionMethod { kExact, kDifferencing, kRandomHalf };

const char* PartitionMethodName(PartitionMethod method);
// Accepts "exact", "diff" and "random".
PartitionMethod ParsePartitionMethod(const std::string& name);

// Two disjoint groups of databases, indices 0-based and ascending.
// group1 always has the smaller gain; the objective is gain1.
struct PartitionResult {
  std::vector<int> group1;
  std::vector<int> group2;
  double gain1 = 0.0;
  double gain2 = 0.0;
  PartitionMethod method = PartitionMethod::kExact;
  // Random-half only: true when group1 is the complement of the drawn half.
  bool swapped = false;
  // Random-half only, odd N: the database left over after pairing, which
  // is put with the complement of the drawn half.
  std::optional<int> leftover;

  double objective() const { return gain1; }
};

// Maximizes min(sum_S1, sum_S2) over all covers of {0..N-1} by two
// non-empty groups. Among optimal covers, picks the group1 whose indicator
// vector is lexicographically smallest. 2 <= N <= kMaxExactDatabases.
PartitionResult PartitionExact(std::span<const double> weights);

// Largest differencing (Karmarkar-Karp).
PartitionResult PartitionDifferencing(std::span<const double> weights);

// Draws floor(N/2) databases uniformly without replacement; the rest form
// the other group. Labels are then oriented so gain1 <= gain2.
PartitionResult PartitionRandomHalf(std::span<const double> weights,
                                    Rng& rng);

PartitionResult Partition(std::span<const double> weights,
                          PartitionMethod method, Rng& rng);

// Weights are |h_k|.
RealVector AbsoluteWeights(std::span<const double> fading);

ChannelState MakeChannelState(RealVector fading, double power,
                              const PartitionResult& partition);

}  // namespace latpir

#endif  // LATPIR_PARTITION_H_
