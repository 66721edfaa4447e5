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

#ifndef LATPIR_AUDIT_H_
#define LATPIR_AUDIT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "latpir/common.h"

namespace latpir {

enum class Scheme { kPir, kSpirCr, kSpirNoKey };

// "pir", "spir-cr", "spir-nokey".
const char* SchemeName(Scheme scheme);
Scheme ParseScheme(const std::string& name);

struct AuditVerdict {
  std::string name;
  std::string scheme;
  // "tv", "mi_bits" or "p_value".
  std::string statistic;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  uint64_t samples = 0;
  // Computed by enumeration, without sampling error.
  bool exact = false;
  // Whether a failure of this verdict fails the suite.
  bool mandatory = true;

  // One JSON object.
  std::string ToRecord() const;
};

// Largest M accepted by the exhaustive query audit.
inline constexpr size_t kMaxExhaustiveMessages = 12;

inline constexpr double kSampledMiThreshold = 0.01;
inline constexpr double kChiSquareThreshold = 0.01;

// Exact: the distribution of each database's query for every requested
// index, compared pairwise; value is the max TV distance. `fixed_mask`
// replaces the random vector b by a constant one (a broken scheme).
AuditVerdict QueryInvarianceExact(Scheme scheme, size_t num_messages,
                                  bool fixed_mask = false);

// Sampled: for every index i, `draws_per_index` queries are drawn and each
// coordinate of each query is tested against a fair coin; the chi-square
// statistic is pooled over all (i, coordinate, query) cells.
AuditVerdict QueryInvarianceSampled(Scheme scheme, size_t num_messages,
                                    size_t total_draws, uint64_t seed,
                                    bool fixed_mask = false, int threads = 0);

// Exact MI between the requested index and one database's view (group,
// query, messages, answer codeword, and S for the symmetric scheme), for
// n = 1. Every (index, b, messages, S) tuple is equally likely. The larger
// of the two groups' values is reported.
AuditVerdict DbViewIndependence(Scheme scheme, int64_t prime,
                                size_t num_messages, bool fixed_mask = false);

// Exact MI between the unrequested messages and the user's view (b and the
// noiseless MAC output), for n = 1, no dither, unit gains and index 0.
// `zero_common` forces S = 0 in the symmetric scheme.
AuditVerdict UserSideLeakage(Scheme scheme, int64_t prime,
                             size_t num_messages, bool zero_common = false);

// Sampled MI between a uniform answer codeword and the transmitted sample,
// discretized to `bins` equal-width bins over the coarse cell. n = 1.
AuditVerdict TransmitIndependence(int64_t prime, size_t samples, int bins,
                                  uint64_t seed, bool dither = true);

struct MiEstimate {
  // Plug-in estimate with the Miller-Madow correction, in bits.
  double bits = 0.0;
  double plug_in_bits = 0.0;
  // Jackknife standard error.
  double std_error = 0.0;
  size_t samples = 0;
};

inline constexpr size_t kMinMiSamples = 1000;

// x and y are paired non-negative category labels.
MiEstimate PlugInMi(std::span<const int> x, std::span<const int> y);

// Maps values to [0, bins) by equal-width binning of [lo, hi); values
// outside are clamped to the end bins.
std::vector<int> EqualWidthBins(std::span<const double> values, double lo,
                                double hi, int bins);

// Which ingredient to disable to demonstrate that the audits can fail.
enum class BreakMode { kNone, kDither, kCommonRandomness, kQueries };

const char* BreakModeName(BreakMode mode);
BreakMode ParseBreakMode(const std::string& name);

struct AuditOptions {
  size_t num_messages = 3;
  int64_t prime = 5;
  size_t samples = 100000;
  int bins = 8;
  uint64_t seed = 1;
  BreakMode broken = BreakMode::kNone;
  int threads = 0;
};

// The standard audit set for one scheme.
std::vector<AuditVerdict> RunAuditSuite(Scheme scheme,
                                        const AuditOptions& options);

// True when every mandatory verdict passed.
bool SuitePassed(std::span<const AuditVerdict> verdicts);

}  // namespace latpir

#endif  // LATPIR_AUDIT_H_
