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

#include "harness.h"

#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace latpir::cli {
namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun Invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.code = RunCli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

void ExpectReproducible(const std::vector<std::string>& args) {
  const CliRun a = Invoke(args);
  const CliRun b = Invoke(args);
  EXPECT_EQ(a.code, kExitOk) << a.err;
  EXPECT_FALSE(a.out.empty());
  EXPECT_EQ(a.out, b.out);
}

TEST(CliTest, RatesReproducible) {
  ExpectReproducible({"rates", "--seed", "5", "--n-dbs", "4,8", "--power",
                      "1,10", "--trials", "200", "--threads", "3"});
}

TEST(CliTest, RatesIndependentOfThreads) {
  const CliRun a = Invoke({"rates", "--seed", "5", "--n-dbs", "6", "--trials",
                        "300", "--threads", "1"});
  const CliRun b = Invoke({"rates", "--seed", "5", "--n-dbs", "6", "--trials",
                        "300", "--threads", "4"});
  ASSERT_EQ(a.code, kExitOk);
  // The echo records the thread count, so compare from the CSV header on.
  EXPECT_EQ(a.out.substr(a.out.find("N,P,")), b.out.substr(b.out.find("N,P,")));
}

TEST(CliTest, HeatmapReproducible) {
  ExpectReproducible({"heatmap", "--seed", "1", "--grid", "5"});
}

TEST(CliTest, SimulateReproducible) {
  ExpectReproducible({"simulate", "--seed", "2", "--n-dbs", "4", "--power",
                      "100", "--prime", "7", "--dim", "8", "--iterations",
                      "4", "--trials", "3"});
  ExpectReproducible({"simulate", "--seed", "2", "--scheme", "spir-cr",
                      "--dim", "4", "--iterations", "3", "--trials", "2",
                      "--noiseless"});
  ExpectReproducible({"simulate", "--seed", "2", "--scheme", "spir-nokey",
                      "--dim", "2", "--power", "8", "--n-msgs", "2",
                      "--trials", "2"});
}

TEST(CliTest, NoiselessSimulationHasNoErrors) {
  const CliRun r = Invoke({"simulate", "--seed", "9", "--n-dbs", "3", "--dim",
                        "8", "--iterations", "4", "--trials", "2",
                        "--noiseless"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("# total errors = 0"), std::string::npos) << r.out;
}

TEST(CliTest, AuditExitCodes) {
  const CliRun ok = Invoke({"audit", "--seed", "1", "--samples", "20000"});
  EXPECT_EQ(ok.code, kExitOk) << ok.out;
  EXPECT_NE(ok.out.find("# suite = pass"), std::string::npos);
  for (const char* mode : {"dither", "queries"}) {
    const CliRun bad = Invoke({"audit", "--seed", "1", "--samples", "20000",
                            "--scheme", "pir", "--break", mode});
    EXPECT_EQ(bad.code, kExitAuditFailed) << mode;
    EXPECT_NE(bad.out.find("# suite = fail"), std::string::npos);
  }
  const CliRun cr = Invoke({"audit", "--seed", "1", "--samples", "20000",
                         "--scheme", "spir-cr", "--break", "cr"});
  EXPECT_EQ(cr.code, kExitAuditFailed);
}

TEST(CliTest, LeakDemo) {
  const CliRun r = Invoke({"leak-demo", "--seed", "1"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("symbol,posterior_plain,posterior_symmetric"),
            std::string::npos);
}

TEST(CliTest, ConfigEcho) {
  const CliRun r = Invoke({"rates", "--seed", "77", "--n-dbs", "4", "--trials",
                        "10"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out.rfind("# ", 0), 0u);
  EXPECT_NE(r.out.find("# seed = 77"), std::string::npos);
  EXPECT_NE(r.out.find("# command = rates"), std::string::npos);
  ExperimentConfig c;
  c.command = "rates";
  c.seed = 3;
  EXPECT_NE(ConfigEcho(c).find("# seed = 3\n"), std::string::npos);
}

TEST(CliTest, UsageErrors) {
  EXPECT_EQ(Invoke({"rates"}).code, kExitError);
  EXPECT_EQ(Invoke({"rates", "--seed", "1", "--partition", "bogus"}).code,
            kExitError);
  EXPECT_EQ(Invoke({"rates", "--seed", "1", "--n-dbs", "1"}).code,
            kExitError);
  EXPECT_EQ(Invoke({"simulate", "--seed", "1", "--prime", "6"}).code,
            kExitError);
  EXPECT_EQ(Invoke({"bogus", "--seed", "1"}).code, kExitError);
  const CliRun r = Invoke({"rates", "--seed", "1", "--partition", "exact",
                        "--n-dbs", "40", "--trials", "2"});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("budget-exceeded"), std::string::npos);
}

}  // namespace
}  // namespace latpir::cli
