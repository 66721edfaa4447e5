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

#include "latpir/rates.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "latpir/parallel.h"

namespace latpir {

namespace {

double HalfLog2Plus(double x) { return x > 1.0 ? 0.5 * std::log2(x) : 0.0; }

void CheckPower(double power) {
  if (!(power > 0.0) || !std::isfinite(power)) {
    throw Error(ErrorCode::kInvalidInput, "power must be positive");
  }
}

double CfArgument(int a1, int a2, double g1, double g2, double power) {
  const double cross = a1 * g2 - a2 * g1;
  const double num = 1.0 + power * (g1 * g1 + g2 * g2);
  const double den = static_cast<double>(a1 * a1 + a2 * a2) +
                     power * cross * cross;
  return num / den;
}

// Linear interpolation between order statistics.
double Quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double SumCapacity(std::span<const double> fading, double power) {
  CheckPower(power);
  double total = 0.0;
  for (double h : fading) total += std::abs(h);
  return 0.5 * std::log2(1.0 + power * total * total);
}

double EquivalentRate(double gain1, double power) {
  CheckPower(power);
  if (!(gain1 >= 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "gain must be non-negative");
  }
  return HalfLog2Plus(0.5 + gain1 * gain1 * power);
}

double CfRate(int a1, int a2, double gain1, double gain2, double power) {
  CheckPower(power);
  if (a1 == 0 && a2 == 0) {
    throw Error(ErrorCode::kInvalidInput, "coefficient vector is zero");
  }
  return HalfLog2Plus(CfArgument(a1, a2, gain1, gain2, power));
}

CfChoice BestCf(double gain1, double gain2, double power, int a_max) {
  CheckPower(power);
  if (a_max < 1) {
    throw Error(ErrorCode::kInvalidInput, "a_max must be at least 1");
  }
  CfChoice best;
  double best_arg = -1.0;
  int best_norm = 0;
  for (int a1 = 1; a1 <= a_max; ++a1) {
    for (int a2 = -a_max; a2 <= a_max; ++a2) {
      if (a2 == 0) continue;
      const double arg = CfArgument(a1, a2, gain1, gain2, power);
      const int norm = a1 * a1 + a2 * a2;
      const bool better =
          arg > best_arg ||
          (arg == best_arg &&
           (norm < best_norm ||
            (norm == best_norm &&
             (a1 < best.a1 || (a1 == best.a1 && a2 < best.a2)))));
      if (better) {
        best_arg = arg;
        best_norm = norm;
        best.a1 = a1;
        best.a2 = a2;
      }
    }
  }
  best.rate = HalfLog2Plus(best_arg);
  return best;
}

double LowerBoundConstant() {
  const double d = std::sqrt(2.0 / std::numbers::pi) - 0.5;
  return d * d;
}

double LowerBoundRate(int num_databases, double power) {
  CheckPower(power);
  if (num_databases < 2) {
    throw Error(ErrorCode::kInvalidInput, "need at least two databases");
  }
  const double n = num_databases;
  return HalfLog2Plus((2.0 + n * n * power * LowerBoundConstant()) / 4.0);
}

RateSample RatesForGains(std::span<const double> fading, double power,
                         double gain1, double gain2) {
  RateSample s;
  s.gain1 = gain1;
  s.gain2 = gain2;
  s.sum_capacity = SumCapacity(fading, power);
  s.r_eq = EquivalentRate(gain1, power);
  s.gap = s.sum_capacity - s.r_eq;
  return s;
}

RateSample SampleRates(std::span<const double> fading, double power,
                       PartitionMethod method, Rng& rng) {
  const RealVector w = AbsoluteWeights(fading);
  const PartitionResult part = Partition(w, method, rng);
  return RatesForGains(fading, power, part.gain1, part.gain2);
}

Summary Summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(s.count);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = s.count > 1 ? std::sqrt(ss / static_cast<double>(s.count - 1))
                         : 0.0;
  s.std_error = s.stddev / std::sqrt(static_cast<double>(s.count));
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.q05 = Quantile(sorted, 0.05);
  s.median = Quantile(sorted, 0.5);
  s.q95 = Quantile(sorted, 0.95);
  return s;
}

GapStudy GapStatistics(int num_databases, double power, size_t trials,
                       PartitionMethod method, uint64_t seed, int threads) {
  CheckPower(power);
  if (trials < 1) {
    throw Error(ErrorCode::kInvalidInput, "need at least one trial");
  }
  if (method == PartitionMethod::kExact &&
      num_databases > kMaxExactDatabases) {
    throw Error(ErrorCode::kBudgetExceeded,
                "exact partitioning supports at most " +
                    std::to_string(kMaxExactDatabases) +
                    " databases; use diff");
  }
  GapStudy study;
  study.num_databases = num_databases;
  study.power = power;
  study.method = method;
  study.samples.resize(trials);
  ParallelFor(trials, threads, [&](size_t t) {
    Rng rng = Rng::ForStream(seed, t);
    const RealVector h = DrawFading(num_databases, rng);
    study.samples[t] = SampleRates(h, power, method, rng);
  });
  std::vector<double> gap(trials);
  std::vector<double> req(trials);
  std::vector<double> csr(trials);
  for (size_t t = 0; t < trials; ++t) {
    gap[t] = study.samples[t].gap;
    req[t] = study.samples[t].r_eq;
    csr[t] = study.samples[t].sum_capacity;
    if (req[t] > csr[t]) ++study.dominance_violations;
  }
  study.gap = Summarize(gap);
  study.r_eq = Summarize(req);
  study.sum_capacity = Summarize(csr);
  return study;
}

RateReport MakeRateReport(std::span<const double> fading, double power,
                          const PartitionResult& partition, int a_max) {
  RateReport r;
  r.num_databases = static_cast<int>(fading.size());
  r.power = power;
  r.gain1 = partition.gain1;
  r.gain2 = partition.gain2;
  r.sum_capacity = SumCapacity(fading, power);
  r.r_eq = EquivalentRate(partition.gain1, power);
  r.cf = BestCf(partition.gain1, partition.gain2, power, a_max);
  r.lower_bound = LowerBoundRate(std::max(2, r.num_databases), power);
  r.constant = LowerBoundConstant();
  r.gap = r.sum_capacity - r.r_eq;
  return r;
}

}  // namespace latpir
