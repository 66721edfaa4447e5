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

#include "latpir/lattice.h"

#include <cmath>
#include <string>

namespace latpir {

namespace {

int64_t PositiveMod(int64_t value, int64_t modulus) {
  int64_t r = value % modulus;
  return r < 0 ? r + modulus : r;
}

}  // namespace

NestedLatticePair::NestedLatticePair(int dimension, int64_t prime,
                                     double scale)
    : dimension_(dimension), prime_(prime), scale_(scale) {
  if (dimension < 1) {
    throw Error(ErrorCode::kInvalidInput, "dimension must be positive");
  }
  if (!IsPrime(prime)) {
    throw Error(ErrorCode::kInvalidInput,
                std::to_string(prime) + " is not prime");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::kInvalidInput, "scale must be positive");
  }
}

NestedLatticePair NestedLatticePair::ForPower(double power, int64_t prime,
                                              int dimension) {
  if (!(power > 0.0) || !std::isfinite(power)) {
    throw Error(ErrorCode::kInvalidInput, "power must be positive");
  }
  if (!IsPrime(prime)) {
    throw Error(ErrorCode::kInvalidInput,
                std::to_string(prime) + " is not prime");
  }
  return NestedLatticePair(dimension, prime,
                           std::sqrt(12.0 * power) /
                               static_cast<double>(prime));
}

double NestedLatticePair::SecondMoment() const {
  const double step = coarse_step();
  return step * step / 12.0;
}

double NestedLatticePair::RateBits() const {
  return std::log2(static_cast<double>(prime_));
}

uint64_t NestedLatticePair::CodebookSize() const {
  uint64_t size = 1;
  for (int i = 0; i < dimension_; ++i) {
    if (size > UINT64_MAX / static_cast<uint64_t>(prime_)) {
      throw Error(ErrorCode::kBudgetExceeded, "codebook size overflows");
    }
    size *= static_cast<uint64_t>(prime_);
  }
  return size;
}

void NestedLatticePair::CheckDimension(std::span<const double> point) const {
  if (point.size() != static_cast<size_t>(dimension_)) {
    throw Error(ErrorCode::kInvalidInput,
                "expected a point of dimension " + std::to_string(dimension_) +
                    ", got " + std::to_string(point.size()));
  }
  for (double x : point) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kInvalidInput, "non-finite coordinate");
    }
  }
}

LatticePoint NestedLatticePair::Quantize(std::span<const double> point,
                                         LatticeLevel level) const {
  CheckDimension(point);
  const double step = level == LatticeLevel::kFine ? scale_ : coarse_step();
  LatticePoint out;
  out.coords.reserve(point.size());
  for (double x : point) {
    out.coords.push_back(std::floor(x / step + 0.5) * step);
  }
  return out;
}

double NestedLatticePair::ReduceCoordinate(double x) const {
  const double step = coarse_step();
  double r = x - std::floor(x / step + 0.5) * step;
  const double units = r / scale_;
  const double nearest = std::nearbyint(units);
  if (std::abs(units - nearest) <= kSnapTolerance) {
    int64_t k = static_cast<int64_t>(nearest);
    const int64_t hi = (prime_ + 1) / 2 - 1;
    if (k > hi) k -= prime_;
    if (k < hi + 1 - prime_) k += prime_;
    return static_cast<double>(k) * scale_;
  }
  if (r >= step / 2) r -= step;
  if (r < -step / 2) r += step;
  return r;
}

RealVector NestedLatticePair::Reduce(std::span<const double> point) const {
  CheckDimension(point);
  RealVector out;
  out.reserve(point.size());
  for (double x : point) out.push_back(ReduceCoordinate(x));
  return out;
}

int64_t NestedLatticePair::Centered(int64_t symbol) const {
  const int64_t r = PositiveMod(symbol, prime_);
  const int64_t hi = (prime_ + 1) / 2 - 1;
  return r > hi ? r - prime_ : r;
}

LatticePoint NestedLatticePair::Encode(const FieldVector& message) const {
  if (message.size() != static_cast<size_t>(dimension_)) {
    throw Error(ErrorCode::kInvalidInput, "message length must equal n");
  }
  LatticePoint out;
  out.coords.reserve(message.size());
  for (int64_t s : message.symbols) {
    if (s < 0 || s >= prime_) {
      throw Error(ErrorCode::kInvalidInput,
                  "symbol " + std::to_string(s) + " outside F_" +
                      std::to_string(prime_));
    }
    out.coords.push_back(static_cast<double>(Centered(s)) * scale_);
  }
  return out;
}

std::vector<int64_t> NestedLatticePair::ToUnits(
    std::span<const double> point) const {
  CheckDimension(point);
  std::vector<int64_t> units;
  units.reserve(point.size());
  for (double x : point) {
    const double u = x / scale_;
    const double nearest = std::nearbyint(u);
    if (std::abs(u - nearest) > kSnapTolerance) {
      throw Error(ErrorCode::kDecodeDomain, "point is not on the fine lattice");
    }
    units.push_back(static_cast<int64_t>(nearest));
  }
  return units;
}

FieldVector NestedLatticePair::Decode(const LatticePoint& point) const {
  const std::vector<int64_t> units = ToUnits(point.coords);
  const int64_t hi = (prime_ + 1) / 2 - 1;
  FieldVector out;
  out.symbols.reserve(units.size());
  for (int64_t k : units) {
    if (k > hi || k < hi + 1 - prime_) {
      throw Error(ErrorCode::kDecodeDomain, "point lies outside the codebook");
    }
    out.symbols.push_back(PositiveMod(k, prime_));
  }
  return out;
}

RealVector NestedLatticePair::SampleDither(Rng& rng) const {
  const double step = coarse_step();
  RealVector d(dimension_);
  for (double& x : d) x = (rng.Uniform01() - 0.5) * step;
  return d;
}

FieldVector NestedLatticePair::SampleMessage(Rng& rng) const {
  FieldVector m;
  m.symbols.resize(dimension_);
  for (int64_t& s : m.symbols) {
    s = static_cast<int64_t>(rng.UniformInt(static_cast<uint64_t>(prime_)));
  }
  return m;
}

LatticePoint NestedLatticePair::SampleCodeword(Rng& rng) const {
  return Encode(SampleMessage(rng));
}

std::vector<LatticePoint> NestedLatticePair::EnumerateCodebook(
    uint64_t budget) const {
  const uint64_t size = CodebookSize();
  if (size > budget) {
    throw Error(ErrorCode::kBudgetExceeded,
                "codebook has " + std::to_string(size) +
                    " points, budget is " + std::to_string(budget));
  }
  std::vector<LatticePoint> out;
  out.reserve(size);
  FieldVector m;
  m.symbols.assign(dimension_, 0);
  for (uint64_t idx = 0; idx < size; ++idx) {
    uint64_t rest = idx;
    for (int j = dimension_ - 1; j >= 0; --j) {
      m.symbols[j] = static_cast<int64_t>(rest % prime_);
      rest /= prime_;
    }
    out.push_back(Encode(m));
  }
  return out;
}

uint64_t NestedLatticePair::CodewordIndex(const LatticePoint& point) const {
  const FieldVector m = Decode(point);
  uint64_t idx = 0;
  for (int64_t s : m.symbols) idx = idx * static_cast<uint64_t>(prime_) + s;
  return idx;
}

NestedLatticePair NestedLatticePair::Scaled(double beta) const {
  if (!(beta > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "scaling factor must be positive");
  }
  return NestedLatticePair(dimension_, prime_, scale_ * beta);
}

FieldVector AddMod(const FieldVector& a, const FieldVector& b,
                   int64_t prime) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kInvalidInput, "field vector length mismatch");
  }
  FieldVector out;
  out.symbols.resize(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    out.symbols[i] = PositiveMod(a.symbols[i] + b.symbols[i], prime);
  }
  return out;
}

}  // namespace latpir
