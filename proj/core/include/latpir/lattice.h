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

#ifndef LATPIR_LATTICE_H_
#define LATPIR_LATTICE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "latpir/common.h"

namespace latpir {

// Coordinates whose distance to a fine-lattice step is at most this many
// steps are treated as lying on the lattice.
inline constexpr double kSnapTolerance = 1e-9;

inline constexpr uint64_t kEnumerationBudget = 1'000'000;

enum class LatticeLevel { kFine, kCoarse };

// Vector over F_p, one symbol per lattice dimension. Entries in [0, p).
struct FieldVector {
  std::vector<int64_t> symbols;

  size_t size() const { return symbols.size(); }
  bool operator==(const FieldVector&) const = default;
};

// A point of the fine lattice. Coordinates are integer multiples of the
// lattice scale.
struct LatticePoint {
  RealVector coords;

  size_t size() const { return coords.size(); }
  bool operator==(const LatticePoint&) const = default;
};

// Nested pair of product lattices: fine = scale * Z^n, coarse =
// scale * p * Z^n. The codebook is the set of fine points inside the coarse
// Voronoi cell [-scale*p/2, scale*p/2)^n, which holds exactly p^n points.
//
// Quantization rounds half-way coordinates up (floor(x + 1/2)), so the
// Voronoi cell is half-open on the positive side. Every modulo result is
// snapped onto the fine lattice when it lies within kSnapTolerance steps of
// it; this keeps codeword arithmetic exact in floating point.
class NestedLatticePair {
 public:
  NestedLatticePair(int dimension, int64_t prime, double scale);

  // Chooses the scale so that the coarse second moment equals `power`:
  // scale = sqrt(12 * power) / prime.
  static NestedLatticePair ForPower(double power, int64_t prime,
                                    int dimension);

  int dimension() const { return dimension_; }
  int64_t prime() const { return prime_; }
  double scale() const { return scale_; }
  double coarse_step() const { return scale_ * static_cast<double>(prime_); }

  // Per-dimension second moment of the coarse lattice, scale^2 p^2 / 12.
  double SecondMoment() const;
  // Code rate in bits per dimension, (1/n) log2 p^n.
  double RateBits() const;
  // p^n; throws kBudgetExceeded if it does not fit in 64 bits.
  uint64_t CodebookSize() const;

  LatticePoint Quantize(std::span<const double> point,
                        LatticeLevel level) const;
  // point - Quantize(point, kCoarse), snapped. Lies in the coarse cell.
  RealVector Reduce(std::span<const double> point) const;

  // phi: symbol s maps to scale * centered(s).
  LatticePoint Encode(const FieldVector& message) const;
  FieldVector Decode(const LatticePoint& point) const;

  // Integer coordinates (in units of scale) of a fine-lattice point.
  std::vector<int64_t> ToUnits(std::span<const double> point) const;
  // Representative of `symbol` in {-floor(p/2), ..., ceil(p/2) - 1}.
  int64_t Centered(int64_t symbol) const;

  RealVector SampleDither(Rng& rng) const;
  LatticePoint SampleCodeword(Rng& rng) const;
  FieldVector SampleMessage(Rng& rng) const;

  // Position of a codeword in EnumerateCodebook order.
  uint64_t CodewordIndex(const LatticePoint& point) const;

  // All p^n codewords in lexicographic order of their symbol vectors.
  std::vector<LatticePoint> EnumerateCodebook(
      uint64_t budget = kEnumerationBudget) const;

  // The same pair with every lattice multiplied by beta > 0.
  NestedLatticePair Scaled(double beta) const;

 private:
  void CheckDimension(std::span<const double> point) const;
  double ReduceCoordinate(double x) const;

  int dimension_;
  int64_t prime_;
  double scale_;
};

FieldVector AddMod(const FieldVector& a, const FieldVector& b, int64_t prime);

}  // namespace latpir

#endif  // LATPIR_LATTICE_H_
