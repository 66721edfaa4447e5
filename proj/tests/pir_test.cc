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

#include "latpir/pir.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"
#include "latpir/audit.h"
#include "latpir/rates.h"

namespace latpir {
namespace {

std::vector<FieldVector> RandomMessages(size_t count, size_t length,
                                        int64_t p, Rng& rng) {
  std::vector<FieldVector> out(count);
  for (FieldVector& m : out) {
    m.symbols.resize(length);
    for (int64_t& s : m.symbols) {
      s = static_cast<int64_t>(rng.UniformInt(static_cast<uint64_t>(p)));
    }
  }
  return out;
}

TEST(PirQueryTest, TwoMessageExamples) {
  const std::vector<int> b = {1, 1};
  const QueryPair second = BuildPirQueries(1, b);
  EXPECT_EQ(second.first.coeffs, (std::vector<int>{1, 1}));
  EXPECT_EQ(second.second.coeffs, (std::vector<int>{-1, 0}));
  const QueryPair first = BuildPirQueries(0, b);
  EXPECT_EQ(first.first.coeffs, (std::vector<int>{1, 1}));
  EXPECT_EQ(first.second.coeffs, (std::vector<int>{0, -1}));
  EXPECT_EQ(first.sign_bit, 1);
}

TEST(PirQueryTest, SumIsSignedUnitVector) {
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const size_t m = 1 + rng.UniformInt(12);
    const size_t i = rng.UniformInt(m);
    const QueryPair q = GeneratePirQueries(i, m, rng);
    for (size_t k = 0; k < m; ++k) {
      const int sum = q.first.coeffs[k] + q.second.coeffs[k];
      const int expected = k != i ? 0 : (q.sign_bit == 1 ? 1 : -1);
      EXPECT_EQ(sum, expected);
      EXPECT_TRUE(q.first.coeffs[k] == 0 || q.first.coeffs[k] == 1);
      EXPECT_TRUE(q.second.coeffs[k] == 0 || q.second.coeffs[k] == -1);
    }
    EXPECT_EQ(q.sign_bit, q.mask[i]);
  }
}

TEST(PirQueryTest, IndexOutOfRange) {
  Rng rng(1);
  try {
    GeneratePirQueries(3, 3, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidInput);
  }
}

TEST(PirAnswerTest, Examples) {
  const NestedLatticePair l(1, 5, 1.0);
  const std::vector<FieldVector> w = {FieldVector{{1}}, FieldVector{{2}}};
  const AnswerState a1 = FormAnswer(Query{{1, 1}, 1}, w, l);
  EXPECT_EQ(a1.combination.symbols[0], 3);
  EXPECT_EQ(a1.codeword.coords[0], -2.0);
  const AnswerState zero = FormAnswer(Query{{0, 0}, 1}, w, l);
  EXPECT_EQ(zero.codeword.coords[0], 0.0);
  const AnswerState a2 = FormAnswer(Query{{0, -1}, 2}, w, l);
  EXPECT_EQ(a2.combination.symbols[0], 3);
  EXPECT_EQ(a2.codeword.coords[0], -2.0);
  EXPECT_EQ(a2.codeword, l.Encode(a2.combination));
}

TEST(PirAnswerTest, DimensionMismatch) {
  const NestedLatticePair l(2, 5, 1.0);
  const std::vector<FieldVector> w = {FieldVector{{1}}};
  EXPECT_THROW(FormAnswer(Query{{1}, 1}, w, l), Error);
  EXPECT_THROW(FormAnswer(Query{{1, 1}, 1}, w, l), Error);
}

TEST(PirAnswerTest, AnswersCancelToRequestedMessage) {
  const int64_t p = 5;
  const NestedLatticePair l(1, p, 1.0);
  for (size_t m = 1; m <= 3; ++m) {
    uint64_t sets = 1;
    for (size_t k = 0; k < m; ++k) sets *= p;
    for (size_t i = 0; i < m; ++i) {
      for (uint64_t code = 0; code < (uint64_t{1} << m); ++code) {
        std::vector<int> b(m);
        for (size_t k = 0; k < m; ++k) b[k] = (code >> k) & 1;
        const QueryPair q = BuildPirQueries(i, b);
        for (uint64_t w = 0; w < sets; ++w) {
          std::vector<FieldVector> msgs(m);
          uint64_t rest = w;
          for (size_t k = 0; k < m; ++k) {
            msgs[k].symbols = {static_cast<int64_t>(rest % p)};
            rest /= p;
          }
          const int64_t a1 = FormAnswer(q.first, msgs, l).combination.symbols[0];
          const int64_t a2 = FormAnswer(q.second, msgs, l).combination.symbols[0];
          const int64_t wi = msgs[i].symbols[0];
          const int64_t expected = q.sign_bit == 1 ? wi : (p - wi) % p;
          EXPECT_EQ((a1 + a2) % p, expected);
        }
      }
    }
  }
}

TEST(PirTransmitTest, ZeroDitherKeepsCodeword) {
  const NestedLatticePair l = NestedLatticePair::ForPower(4.0, 7, 3);
  Rng rng(2);
  const LatticePoint c = l.SampleCodeword(rng);
  const TransmitBlock x = MakeTransmit(c, RealVector(3, 0.0), 1.0, l);
  EXPECT_EQ(x.samples, c.coords);
}

TEST(PirTransmitTest, ScaleMustBeInUnitInterval) {
  const NestedLatticePair l(1, 5, 1.0);
  const LatticePoint c{{1.0}};
  for (double s : {0.0, -0.5, 1.5}) {
    try {
      MakeTransmit(c, RealVector{0.0}, s, l);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidInput);
    }
  }
}

TEST(PirTransmitTest, DitheredBlockIsUniformOnCell) {
  const NestedLatticePair l = NestedLatticePair::ForPower(2.0, 5, 1);
  Rng rng(3);
  const int draws = 10000;
  std::vector<double> u(draws);
  const double half = l.coarse_step() / 2.0;
  for (int k = 0; k < draws; ++k) {
    const TransmitBlock x =
        MakeTransmit(l.SampleCodeword(rng), l.SampleDither(rng), 1.0, l);
    EXPECT_TRUE(CheckPower(x.samples, 3.0 * 2.0).within);
    u[k] = (x.samples[0] + half) / l.coarse_step();
  }
  std::sort(u.begin(), u.end());
  double ks = 0.0;
  for (int k = 0; k < draws; ++k) {
    ks = std::max(ks, std::max(std::abs((k + 1.0) / draws - u[k]),
                               std::abs(u[k] - static_cast<double>(k) / draws)));
  }
  // 1% critical value of the Kolmogorov-Smirnov statistic.
  EXPECT_LT(ks, 1.63 / std::sqrt(static_cast<double>(draws)));
}

TEST(PirTransmitTest, BlockCarriesNoInformationAboutCodeword) {
  const AuditVerdict v = TransmitIndependence(5, 100000, 8, 4, true);
  EXPECT_TRUE(v.pass) << v.value;
  EXPECT_LT(v.value, 0.01);
}

TEST(PirAlphaTest, ClosedForms) {
  const AlphaChoice a = OptimalAlpha(1.0, 1.0);
  EXPECT_NEAR(a.alpha, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(a.noise_variance, 2.0 / 3.0, 1e-15);
  EXPECT_GT(OptimalAlpha(1e9, 1.0).alpha, 1.0 - 1e-9);
  for (double p : {0.1, 1.0, 10.0, 1000.0}) {
    for (double g : {0.1, 0.7, 1.0, 3.0}) {
      const AlphaChoice c = OptimalAlpha(p, g);
      EXPECT_GT(c.alpha, 0.0);
      EXPECT_LT(c.alpha, 1.0);
      EXPECT_LT(c.noise_variance, std::min(2.0 * p, 1.0 / (g * g)));
      EXPECT_NEAR(EquivalentNoiseVariance(p, g, c.alpha), c.noise_variance,
                  1e-12 * c.noise_variance + 1e-15);
      // Same rate through either closed form.
      EXPECT_NEAR(EquivalentRate(g, p),
                  std::max(0.0, 0.5 * std::log2(p / c.noise_variance)), 1e-12);
    }
  }
}

TEST(PirAlphaTest, ZeroGainIsDegenerate) {
  try {
    OptimalAlpha(1.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateChannel);
  }
}

TEST(PirDecodeTest, LeakExampleDecodesRequestedMessage) {
  const NestedLatticePair l(1, 5, 1.0);
  const RealVector zero = {0.0};
  const MlanDecode d =
      DecodeMlan(RealVector{-4.0}, 1.0, 1.0, zero, zero, 1, l);
  EXPECT_EQ(d.estimate.coords[0], 1.0);
  EXPECT_EQ(d.residual[0], 0.0);
}

TEST(PirDecodeTest, NoiselessUnitAlphaRecoversCodeword) {
  const NestedLatticePair l = NestedLatticePair::ForPower(10.0, 11, 16);
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const LatticePoint l1 = l.SampleCodeword(rng);
    const LatticePoint l2 = l.SampleCodeword(rng);
    const RealVector d1 = l.SampleDither(rng);
    const RealVector d2 = l.SampleDither(rng);
    const double g1 = 0.2 + rng.Uniform01();
    const double g2 = g1 + rng.Uniform01();
    const TransmitBlock x1 = MakeTransmit(l1, d1, 1.0, l);
    const TransmitBlock x2 = MakeTransmit(l2, d2, g1 / g2, l);
    const std::vector<Transmission> s = {{g1, x1.samples}, {g2, x2.samples}};
    const MacOutput y = TransmitMac(s, NoiseMode::kOff, rng);
    RealVector sum(16);
    for (int j = 0; j < 16; ++j) sum[j] = l1.coords[j] + l2.coords[j];
    const RealVector v = l.Reduce(sum);
    const int sign = static_cast<int>(rng.Bit());
    const MlanDecode d = DecodeMlan(y.received, g1, 1.0, d1, d2, sign, l);
    RealVector expected = v;
    if (sign == 0) {
      for (double& e : expected) e = -e;
      expected = l.Reduce(expected);
    }
    EXPECT_EQ(d.estimate.coords, expected);
  }
}

TEST(PirDecodeTest, NoiselessSubunitAlphaInsidePackingRadius) {
  const NestedLatticePair l = NestedLatticePair::ForPower(10.0, 31, 1);
  Rng rng(6);
  int checked = 0;
  for (double alpha : {0.5, 0.9, 1.0}) {
    for (int trial = 0; trial < 3000; ++trial) {
      const LatticePoint l1 = l.SampleCodeword(rng);
      const LatticePoint l2 = l.SampleCodeword(rng);
      const RealVector d1 = l.SampleDither(rng);
      const RealVector d2 = l.SampleDither(rng);
      const TransmitBlock x1 = MakeTransmit(l1, d1, 1.0, l);
      const TransmitBlock x2 = MakeTransmit(l2, d2, 1.0, l);
      const double zeq = -(1.0 - alpha) * (x1.samples[0] + x2.samples[0]);
      if (std::abs(zeq) >= l.scale() / 2.0) continue;
      ++checked;
      const std::vector<Transmission> s = {{1.0, x1.samples},
                                           {1.0, x2.samples}};
      const MacOutput y = TransmitMac(s, NoiseMode::kOff, rng);
      const MlanDecode d = DecodeMlan(y.received, 1.0, alpha, d1, d2, 1, l);
      const RealVector v =
          l.Reduce(RealVector{l1.coords[0] + l2.coords[0]});
      EXPECT_EQ(d.estimate.coords, v);
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(PirRetrievalTest, NoiselessIsExactUnderFading) {
  for (int n_dbs : {2, 3, 5, 8}) {
    for (int64_t p : {2, 5, 13}) {
      const NestedLatticePair l = NestedLatticePair::ForPower(3.0, p, 8);
      Rng rng(static_cast<uint64_t>(n_dbs * 100 + p));
      const std::vector<FieldVector> w = RandomMessages(4, 8 * 6, p, rng);
      RetrievalOptions opt;
      opt.noise = NoiseMode::kOff;
      opt.dither_seed = 99;
      for (size_t i = 0; i < w.size(); ++i) {
        const RetrievalResult r = RunRetrieval(
            w, i,
            BlockFadingChannel(n_dbs, 3.0, PartitionMethod::kDifferencing, 7),
            l, opt, rng);
        EXPECT_EQ(r.decoded, w[i]);
        EXPECT_EQ(r.symbol_errors, 0u);
        EXPECT_EQ(r.symbols, 48u);
      }
    }
  }
}

TEST(PirRetrievalTest, LowErrorRateWellBelowRate) {
  const NestedLatticePair l = NestedLatticePair::ForPower(100.0, 11, 1);
  Rng rng(8);
  const std::vector<FieldVector> w = RandomMessages(3, 10000, 11, rng);
  RetrievalOptions opt;
  opt.dither_seed = 123;
  const RetrievalResult r = RunRetrieval(
      w, 1, BlockFadingChannel(8, 100.0, PartitionMethod::kExact, 77), l, opt,
      rng);
  EXPECT_EQ(r.symbols, 10000u);
  EXPECT_LT(r.symbol_error_rate(), 1e-2);
}

TEST(PirRetrievalTest, TraceVarianceMatchesClosedForm) {
  const double power = 10.0;
  const NestedLatticePair l = NestedLatticePair::ForPower(power, 3, 1024);
  Rng rng(9);
  const std::vector<FieldVector> w = RandomMessages(2, 1024 * 20, 3, rng);
  const ChannelState ch = ChannelState::Create({1.0, -1.5}, power, {0}, {1});
  RetrievalOptions opt;
  opt.dither_seed = 5;
  const RetrievalResult r = RunRetrieval(w, 0, FixedChannel(ch), l, opt, rng);
  double mean = 0.0;
  for (const IterationRecord& it : r.trace.iterations) {
    mean += it.noise_variance;
    EXPECT_LE(it.power1, power * (1 + 0.1));
    EXPECT_LE(it.power2, power * (1 + 0.1));
  }
  mean /= static_cast<double>(r.trace.iterations.size());
  const double expected = OptimalAlpha(power, 1.0).noise_variance;
  EXPECT_NEAR(mean, expected, 0.05 * expected);
}

TEST(PirRetrievalTest, DeterministicPerSeed) {
  const NestedLatticePair l = NestedLatticePair::ForPower(5.0, 7, 16);
  auto run = [&] {
    Rng rng(10);
    const std::vector<FieldVector> w = RandomMessages(3, 64, 7, rng);
    RetrievalOptions opt;
    opt.dither_seed = 4;
    return RunRetrieval(
        w, 2, BlockFadingChannel(4, 5.0, PartitionMethod::kExact, 3), l, opt,
        rng);
  };
  const RetrievalResult a = run();
  const RetrievalResult b = run();
  EXPECT_EQ(a.decoded, b.decoded);
  EXPECT_EQ(SerializeTrace(a.trace), SerializeTrace(b.trace));
}

TEST(PirRetrievalTest, TraceIsLineDelimitedJson) {
  const NestedLatticePair l = NestedLatticePair::ForPower(5.0, 7, 4);
  Rng rng(11);
  const std::vector<FieldVector> w = RandomMessages(2, 12, 7, rng);
  RetrievalOptions opt;
  const RetrievalResult r = RunRetrieval(
      w, 0, BlockFadingChannel(3, 5.0, PartitionMethod::kExact, 1), l, opt,
      rng);
  std::istringstream in(SerializeTrace(r.trace));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    const nlohmann::json j = nlohmann::json::parse(line);
    if (lines == 0) {
      EXPECT_EQ(j["type"], "queries");
    } else {
      EXPECT_EQ(j["type"], "iteration");
      EXPECT_EQ(j["fading"].size(), 3u);
      EXPECT_TRUE(j.contains("alpha"));
      EXPECT_TRUE(j.contains("noise_variance"));
    }
    ++lines;
  }
  EXPECT_EQ(lines, 4);
}

TEST(PirRetrievalTest, RejectsBadInput) {
  const NestedLatticePair l(4, 5, 1.0);
  Rng rng(1);
  RetrievalOptions opt;
  const ChannelSource ch = FixedChannel(
      ChannelState::Create({1.0, 1.0}, 1.0, {0}, {1}));
  std::vector<FieldVector> w = RandomMessages(2, 6, 5, rng);
  EXPECT_THROW(RunRetrieval(w, 0, ch, l, opt, rng), Error);
  w = RandomMessages(2, 8, 5, rng);
  EXPECT_THROW(RunRetrieval(w, 2, ch, l, opt, rng), Error);
  const ChannelSource dead = FixedChannel(
      ChannelState::Create({0.0, 1.0}, 1.0, {0}, {1}));
  try {
    RunRetrieval(w, 0, dead, l, opt, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateChannel);
  }
}

TEST(PirRetrievalTest, ExactPartitionLimit) {
  EXPECT_THROW(BlockFadingChannel(25, 1.0, PartitionMethod::kExact, 1), Error);
}

}  // namespace
}  // namespace latpir
