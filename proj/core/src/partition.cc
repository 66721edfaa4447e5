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

#include "latpir/partition.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <queue>

namespace latpir {

namespace {

void CheckWeights(std::span<const double> weights) {
  if (weights.size() < 2) {
    throw Error(ErrorCode::kInvalidInput, "need at least two databases");
  }
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidInput,
                  "partition weights must be finite and non-negative");
    }
  }
}

double SumOf(std::span<const double> weights, const std::vector<int>& group) {
  double s = 0.0;
  for (int k : group) s += weights[k];
  return s;
}

// True if the indicator vector of `a` precedes that of `b`. Both ascending.
bool IndicatorLess(const std::vector<int>& a, const std::vector<int>& b) {
  size_t i = 0;
  while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
  if (i == a.size() && i == b.size()) return false;
  // First index present in exactly one set: the set lacking it is smaller.
  const int next_a = i < a.size() ? a[i] : INT32_MAX;
  const int next_b = i < b.size() ? b[i] : INT32_MAX;
  return next_a > next_b;
}

PartitionResult Orient(std::span<const double> weights, std::vector<int> a,
                       std::vector<int> b, PartitionMethod method) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double sa = SumOf(weights, a);
  const double sb = SumOf(weights, b);
  PartitionResult r;
  r.method = method;
  bool a_first = sa < sb || (sa == sb && !IndicatorLess(b, a));
  if (a_first) {
    r.group1 = std::move(a);
    r.group2 = std::move(b);
    r.gain1 = sa;
    r.gain2 = sb;
  } else {
    r.group1 = std::move(b);
    r.group2 = std::move(a);
    r.gain1 = sb;
    r.gain2 = sa;
  }
  return r;
}

std::vector<int> MaskToGroup(uint32_t mask, int n) {
  std::vector<int> g;
  for (int k = 0; k < n; ++k) {
    if (mask & (1u << k)) g.push_back(k);
  }
  return g;
}

}  // namespace

const char* PartitionMethodName(PartitionMethod method) {
  switch (method) {
    case PartitionMethod::kExact:
      return "exact";
    case PartitionMethod::kDifferencing:
      return "diff";
    case PartitionMethod::kRandomHalf:
      return "random";
  }
  return "unknown";
}

PartitionMethod ParsePartitionMethod(const std::string& name) {
  if (name == "exact") return PartitionMethod::kExact;
  if (name == "diff" || name == "differencing") {
    return PartitionMethod::kDifferencing;
  }
  if (name == "random" || name == "random-half") {
    return PartitionMethod::kRandomHalf;
  }
  throw Error(ErrorCode::kInvalidInput, "unknown partition method " + name);
}

RealVector AbsoluteWeights(std::span<const double> fading) {
  RealVector w(fading.size());
  for (size_t k = 0; k < fading.size(); ++k) w[k] = std::abs(fading[k]);
  return w;
}

PartitionResult PartitionExact(std::span<const double> weights) {
  CheckWeights(weights);
  const int n = static_cast<int>(weights.size());
  if (n > kMaxExactDatabases) {
    throw Error(ErrorCode::kBudgetExceeded,
                "exact partitioning supports at most " +
                    std::to_string(kMaxExactDatabases) +
                    " databases; use the differencing heuristic (diff)");
  }
  // Database n-1 is pinned to the complement, so each unordered cover is
  // visited once. Subset sums come from two half tables.
  const int free_bits = n - 1;
  const int low_bits = free_bits / 2;
  const int high_bits = free_bits - low_bits;
  std::vector<double> low(size_t{1} << low_bits, 0.0);
  std::vector<double> high(size_t{1} << high_bits, 0.0);
  for (size_t m = 1; m < low.size(); ++m) {
    const int bit = std::countr_zero(m);
    low[m] = low[m & (m - 1)] + weights[bit];
  }
  for (size_t m = 1; m < high.size(); ++m) {
    const int bit = std::countr_zero(m);
    high[m] = high[m & (m - 1)] + weights[low_bits + bit];
  }
  double total = 0.0;
  for (double w : weights) total += w;

  const uint32_t count = 1u << free_bits;
  const uint32_t low_mask = (1u << low_bits) - 1;
  double best = -1.0;
  for (uint32_t m = 1; m < count; ++m) {
    const double s = low[m & low_mask] + high[m >> low_bits];
    best = std::max(best, std::min(s, total - s));
  }
  // Table sums and index-order sums can differ in the last bits, so every
  // near-optimal cover is re-scored exactly.
  const double tol = 1e-12 * std::max(total, 1.0);
  std::optional<PartitionResult> chosen;
  for (uint32_t m = 1; m < count; ++m) {
    const double s = low[m & low_mask] + high[m >> low_bits];
    if (std::min(s, total - s) < best - tol) continue;
    const uint32_t complement = ((1u << n) - 1) & ~m;
    PartitionResult cand =
        Orient(weights, MaskToGroup(m, n), MaskToGroup(complement, n),
               PartitionMethod::kExact);
    if (!chosen || cand.gain1 > chosen->gain1 ||
        (cand.gain1 == chosen->gain1 &&
         IndicatorLess(cand.group1, chosen->group1))) {
      chosen = std::move(cand);
    }
  }
  return *chosen;
}

PartitionResult PartitionDifferencing(std::span<const double> weights) {
  CheckWeights(weights);
  struct Node {
    double diff;
    int id;
    std::vector<int> big;
    std::vector<int> small;
  };
  auto cmp = [](const Node& a, const Node& b) {
    if (a.diff != b.diff) return a.diff < b.diff;
    return a.id > b.id;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> heap(cmp);
  int next_id = 0;
  for (size_t k = 0; k < weights.size(); ++k) {
    heap.push(Node{weights[k], next_id++, {static_cast<int>(k)}, {}});
  }
  while (heap.size() > 1) {
    Node a = heap.top();
    heap.pop();
    Node b = heap.top();
    heap.pop();
    Node merged{a.diff - b.diff, next_id++, std::move(a.big),
                std::move(a.small)};
    merged.big.insert(merged.big.end(), b.small.begin(), b.small.end());
    merged.small.insert(merged.small.end(), b.big.begin(), b.big.end());
    heap.push(std::move(merged));
  }
  Node last = heap.top();
  return Orient(weights, std::move(last.small), std::move(last.big),
                PartitionMethod::kDifferencing);
}

PartitionResult PartitionRandomHalf(std::span<const double> weights,
                                    Rng& rng) {
  CheckWeights(weights);
  const int n = static_cast<int>(weights.size());
  std::vector<int> order(n);
  for (int k = 0; k < n; ++k) order[k] = k;
  for (int k = 0; k < n - 1; ++k) {
    const int j = k + static_cast<int>(rng.UniformInt(n - k));
    std::swap(order[k], order[j]);
  }
  const int half = n / 2;
  std::vector<int> drawn(order.begin(), order.begin() + half);
  std::vector<int> rest(order.begin() + half, order.end());
  std::sort(drawn.begin(), drawn.end());
  std::sort(rest.begin(), rest.end());
  const double s_drawn = SumOf(weights, drawn);
  const double s_rest = SumOf(weights, rest);

  PartitionResult r;
  r.method = PartitionMethod::kRandomHalf;
  if (n % 2 == 1) r.leftover = order.back();
  r.swapped = s_drawn > s_rest;
  if (r.swapped) {
    r.group1 = std::move(rest);
    r.group2 = std::move(drawn);
    r.gain1 = s_rest;
    r.gain2 = s_drawn;
  } else {
    r.group1 = std::move(drawn);
    r.group2 = std::move(rest);
    r.gain1 = s_drawn;
    r.gain2 = s_rest;
  }
  return r;
}

PartitionResult Partition(std::span<const double> weights,
                          PartitionMethod method, Rng& rng) {
  switch (method) {
    case PartitionMethod::kExact:
      return PartitionExact(weights);
    case PartitionMethod::kDifferencing:
      return PartitionDifferencing(weights);
    case PartitionMethod::kRandomHalf:
      return PartitionRandomHalf(weights, rng);
  }
  throw Error(ErrorCode::kInvalidInput, "unknown partition method");
}

ChannelState MakeChannelState(RealVector fading, double power,
                              const PartitionResult& partition) {
  return ChannelState::Create(std::move(fading), power, partition.group1,
                              partition.group2);
}

}  // namespace latpir
