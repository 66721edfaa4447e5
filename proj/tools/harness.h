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

#ifndef LATPIR_TOOLS_HARNESS_H_
#define LATPIR_TOOLS_HARNESS_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace latpir::cli {

struct ExperimentConfig {
  std::string command;
  uint64_t seed = 0;
  size_t trials = 1000;
  std::vector<int> n_dbs = {2};
  size_t n_msgs = 4;
  std::vector<double> power = {10.0};
  int64_t prime = 5;
  int dim = 64;
  std::string partition = "diff";
  // "auto" means pir for simulate and every scheme for audit.
  std::string scheme = "auto";
  int a_max = 8;
  std::string out = "-";
  size_t iterations = 16;
  size_t index = 0;
  bool noiseless = false;
  bool zero_cr = false;
  double h_min = 0.5;
  double h_max = 3.0;
  int grid = 26;
  std::string broken = "none";
  std::string trace;
  size_t samples = 100000;
  int bins = 8;
  int threads = 0;
};

// Exit codes: 0 success, 1 a mandatory audit failed, 2 usage or runtime
// error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAuditFailed = 1;
inline constexpr int kExitError = 2;

// args excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

// Comment header with every resolved setting, one "# key = value" per line.
std::string ConfigEcho(const ExperimentConfig& config);

int RunRates(const ExperimentConfig& config, std::ostream& out);
int RunHeatmap(const ExperimentConfig& config, std::ostream& out);
int RunSimulate(const ExperimentConfig& config, std::ostream& out);
int RunAudit(const ExperimentConfig& config, std::ostream& out);
int RunLeakDemo(const ExperimentConfig& config, std::ostream& out);

}  // namespace latpir::cli

#endif  // LATPIR_TOOLS_HARNESS_H_
