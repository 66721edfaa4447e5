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

#ifndef LATPIR_RATES_H_
#define LATPIR_RATES_H_

#include <cstdint>
#include <span>
#include <vector>

#include "latpir/common.h"
#include "latpir/partition.h"

namespace latpir {

// All rates are in bits per channel use.

// 1/2 log2(1 + P (sum_k |h_k|)^2).
double SumCapacity(std::span<const double> fading, double power);

// 1/2 log2+(1/2 + gain1^2 P).
double EquivalentRate(double gain1, double power);

// Compute-and-forward rate for coefficient pair a:
// 1/2 log2+((1 + P (g1^2 + g2^2)) / (|a|^2 + P (a1 g2 - a2 g1)^2)).
double CfRate(int a1, int a2, double gain1, double gain2, double power);

struct CfChoice {
  int a1 = 1;
  int a2 = 1;
  double rate = 0.0;
};

// Exhaustive search over a in [-a_max, a_max]^2 with both entries nonzero.
// a and -a give the same rate, so only a1 > 0 is visited. The unclipped
// rate is maximized; ties go to the smaller |a|^2, then to the
// lexicographically smaller (a1, a2).
CfChoice BestCf(double gain1, double gain2, double power, int a_max);

// (sqrt(2/pi) - 1/2)^2.
double LowerBoundConstant();

// 1/2 log2+((2 + N^2 P c) / 4). The vanishing correction term of the
// asymptotic bound is taken as zero, so the value is only meaningful for
// moderately large N.
double LowerBoundRate(int num_databases, double power);

struct RateSample {
  double sum_capacity = 0.0;
  double r_eq = 0.0;
  double gap = 0.0;
  double gain1 = 0.0;
  double gain2 = 0.0;
};

// Rates of one channel realization with the given effective gains.
RateSample RatesForGains(std::span<const double> fading, double power,
                         double gain1, double gain2);

// Partitions |h| with `method` and evaluates the rates.
RateSample SampleRates(std::span<const double> fading, double power,
                       PartitionMethod method, Rng& rng);

struct Summary {
  size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
  // Standard error of the mean.
  double std_error = 0.0;
  double min = 0.0;
  double q05 = 0.0;
  double median = 0.0;
  double q95 = 0.0;
  double max = 0.0;
};

Summary Summarize(std::span<const double> values);

struct GapStudy {
  int num_databases = 0;
  double power = 0.0;
  PartitionMethod method = PartitionMethod::kExact;
  std::vector<RateSample> samples;
  Summary gap;
  Summary r_eq;
  Summary sum_capacity;
  // Trials where r_eq exceeded the sum capacity. Always zero.
  size_t dominance_violations = 0;
};

// Trial t draws fading from stream (seed, t), partitions it and records
// both rates. Results do not depend on the thread count.
GapStudy GapStatistics(int num_databases, double power, size_t trials,
                       PartitionMethod method, uint64_t seed,
                       int threads = 0);

struct RateReport {
  int num_databases = 0;
  double power = 0.0;
  double gain1 = 0.0;
  double gain2 = 0.0;
  double sum_capacity = 0.0;
  double r_eq = 0.0;
  CfChoice cf;
  double lower_bound = 0.0;
  double constant = 0.0;
  double gap = 0.0;
};

RateReport MakeRateReport(std::span<const double> fading, double power,
                          const PartitionResult& partition, int a_max);

}  // namespace latpir

#endif  // LATPIR_RATES_H_
