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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "latpir/audit.h"
#include "latpir/channel.h"
#include "latpir/common.h"
#include "latpir/lattice.h"
#include "latpir/parallel.h"
#include "latpir/partition.h"
#include "latpir/pir.h"
#include "latpir/rates.h"
#include "latpir/spir.h"

namespace latpir::cli {

namespace {

std::string Num(double x) {
  std::ostringstream s;
  s << std::setprecision(12) << x;
  return s.str();
}

template <typename T>
std::string Join(const std::vector<T>& values) {
  std::ostringstream s;
  for (size_t k = 0; k < values.size(); ++k) {
    if (k) s << ',';
    if constexpr (std::is_floating_point_v<T>) {
      s << Num(values[k]);
    } else {
      s << values[k];
    }
  }
  return s.str();
}

std::vector<std::string> SplitCommas(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) parts.push_back(item);
  }
  if (parts.empty()) {
    throw Error(ErrorCode::kInvalidInput, "empty grid '" + text + "'");
  }
  return parts;
}

std::vector<double> ParseRealGrid(const std::string& text) {
  std::vector<double> out;
  for (const std::string& p : SplitCommas(text)) {
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(p, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != p.size() || !(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidInput,
                  "grid value '" + p + "' is not a positive number");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<int> ParseIntGrid(const std::string& text, int minimum) {
  std::vector<int> out;
  for (const std::string& p : SplitCommas(text)) {
    size_t used = 0;
    long v = 0;
    try {
      v = std::stol(p, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != p.size() || v < minimum || v > 1'000'000) {
      throw Error(ErrorCode::kInvalidInput,
                  "grid value '" + p + "' must be an integer >= " +
                      std::to_string(minimum));
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

void Require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::kInvalidInput, message);
}

void Validate(const ExperimentConfig& c) {
  Require(c.trials >= 1, "--trials must be positive");
  Require(c.n_msgs >= 1, "--n-msgs must be positive");
  Require(c.dim >= 1, "--dim must be positive");
  Require(c.a_max >= 1, "--a-max must be positive");
  Require(c.iterations >= 1, "--iterations must be positive");
  Require(c.index < c.n_msgs, "--index must be below --n-msgs");
  Require(c.h_min > 0.0 && c.h_max >= c.h_min, "need 0 < --h-min <= --h-max");
  Require(c.grid >= 1, "--grid must be positive");
  Require(c.samples >= 1, "--samples must be positive");
  Require(c.bins >= 1, "--bins must be positive");
  Require(IsPrime(c.prime), "--prime must be prime");
  ParsePartitionMethod(c.partition);
  ParseBreakMode(c.broken);
  if (c.scheme != "auto" && c.scheme != "all") ParseScheme(c.scheme);
}

// Seed of grid point (N, P-index) for a command.
uint64_t PointSeed(uint64_t seed, int n_dbs, size_t power_index) {
  return MixSeed(MixSeed(seed, static_cast<uint64_t>(n_dbs)), power_index);
}

}  // namespace

std::string ConfigEcho(const ExperimentConfig& c) {
  std::ostringstream s;
  s << "# command = " << c.command << '\n'
    << "# seed = " << c.seed << '\n'
    << "# trials = " << c.trials << '\n'
    << "# n-dbs = " << Join(c.n_dbs) << '\n'
    << "# n-msgs = " << c.n_msgs << '\n'
    << "# power = " << Join(c.power) << '\n'
    << "# prime = " << c.prime << '\n'
    << "# dim = " << c.dim << '\n'
    << "# partition = " << c.partition << '\n'
    << "# scheme = " << c.scheme << '\n'
    << "# a-max = " << c.a_max << '\n'
    << "# iterations = " << c.iterations << '\n'
    << "# index = " << c.index << '\n'
    << "# noiseless = " << (c.noiseless ? "true" : "false") << '\n'
    << "# zero-cr = " << (c.zero_cr ? "true" : "false") << '\n'
    << "# h-min = " << Num(c.h_min) << '\n'
    << "# h-max = " << Num(c.h_max) << '\n'
    << "# grid = " << c.grid << '\n'
    << "# break = " << c.broken << '\n'
    << "# samples = " << c.samples << '\n'
    << "# bins = " << c.bins << '\n';
  return s.str();
}

int RunRates(const ExperimentConfig& c, std::ostream& out) {
  const PartitionMethod method = ParsePartitionMethod(c.partition);
  out << ConfigEcho(c)
      << "# columns: mean over trials of each rate (bits per channel use)\n"
      << "N,P,seed,C_SR,R_eq_max,R_CF_best,gap,gap_se,lower_bound,method\n";
  for (int n : c.n_dbs) {
    for (size_t pi = 0; pi < c.power.size(); ++pi) {
      const double p = c.power[pi];
      const GapStudy study = GapStatistics(n, p, c.trials, method,
                                           PointSeed(c.seed, n, pi),
                                           c.threads);
      std::vector<double> cf(c.trials);
      ParallelFor(c.trials, c.threads, [&](size_t t) {
        const RateSample& s = study.samples[t];
        cf[t] = BestCf(s.gain1, s.gain2, p, c.a_max).rate;
      });
      const Summary cf_summary = Summarize(cf);
      out << n << ',' << Num(p) << ',' << c.seed << ','
          << Num(study.sum_capacity.mean) << ',' << Num(study.r_eq.mean)
          << ',' << Num(cf_summary.mean) << ',' << Num(study.gap.mean) << ','
          << Num(study.gap.std_error) << ',' << Num(LowerBoundRate(n, p))
          << ',' << PartitionMethodName(method) << '\n';
    }
  }
  return kExitOk;
}

int RunHeatmap(const ExperimentConfig& c, std::ostream& out) {
  out << ConfigEcho(c)
      << "# cells with h1 <= h2 only\n"
      << "P,h1,h2,ratio,R_eq,R_CF_best,a1,a2,diff\n";
  std::vector<double> axis(c.grid);
  for (int k = 0; k < c.grid; ++k) {
    axis[k] = c.grid == 1 ? c.h_min
                          : c.h_min + (c.h_max - c.h_min) * k / (c.grid - 1);
  }
  for (double p : c.power) {
    for (int i = 0; i < c.grid; ++i) {
      for (int j = i; j < c.grid; ++j) {
        const double h1 = axis[i];
        const double h2 = axis[j];
        const double req = EquivalentRate(h1, p);
        const CfChoice cf = BestCf(h1, h2, p, c.a_max);
        out << Num(p) << ',' << Num(h1) << ',' << Num(h2) << ','
            << Num(h1 / h2) << ',' << Num(req) << ',' << Num(cf.rate) << ','
            << cf.a1 << ',' << cf.a2 << ',' << Num(req - cf.rate) << '\n';
      }
    }
  }
  return kExitOk;
}

namespace {

struct SimRow {
  size_t symbols = 0;
  size_t errors = 0;
  double sigma2 = 0.0;
  double sigma2_pred = 0.0;
  double power1 = 0.0;
  double power2 = 0.0;
  size_t residual_mismatch = 0;
  std::string trace;
};

SimRow SimulateLattice(const ExperimentConfig& c, Scheme scheme, int n_dbs,
                       double power, uint64_t point_seed, size_t trial) {
  const NestedLatticePair lattice =
      NestedLatticePair::ForPower(power, c.prime, c.dim);
  Rng rng = Rng::ForStream(point_seed, trial, 0);
  std::vector<FieldVector> messages(c.n_msgs);
  for (FieldVector& m : messages) {
    m.symbols.resize(c.iterations * c.dim);
    for (int64_t& s : m.symbols) {
      s = static_cast<int64_t>(rng.UniformInt(static_cast<uint64_t>(c.prime)));
    }
  }
  const ChannelSource channels =
      BlockFadingChannel(n_dbs, power, ParsePartitionMethod(c.partition),
                         MixSeed(point_seed, 2 * trial + 1));
  const CommonRandomnessSource common =
      c.zero_cr ? CommonRandomnessSource::Zero()
                : CommonRandomnessSource::Uniform(
                      MixSeed(point_seed, 2 * trial + 2));
  RetrievalOptions options;
  options.noise = c.noiseless ? NoiseMode::kOff : NoiseMode::kGaussian;
  options.dither_seed = MixSeed(MixSeed(point_seed, trial), 3);
  options.common_randomness = scheme == Scheme::kSpirCr ? &common : nullptr;
  const RetrievalResult r =
      RunRetrieval(messages, c.index, channels, lattice, options, rng);
  SimRow row;
  row.symbols = r.symbols;
  row.errors = r.symbol_errors;
  for (const IterationRecord& it : r.trace.iterations) {
    row.sigma2 += it.noise_variance;
    row.sigma2_pred += it.predicted_variance;
    row.power1 += it.power1;
    row.power2 += it.power2;
  }
  const double k = static_cast<double>(r.trace.iterations.size());
  row.sigma2 /= k;
  row.sigma2_pred /= k;
  row.power1 /= k;
  row.power2 /= k;
  if (!c.trace.empty()) row.trace = SerializeTrace(r.trace);
  return row;
}

SimRow SimulateNoKey(const ExperimentConfig& c, const SphereCodebook& book,
                     uint64_t point_seed, size_t trial) {
  Rng rng = Rng::ForStream(point_seed, trial, 0);
  std::vector<CodewordMessage> messages(c.n_msgs);
  for (CodewordMessage& m : messages) {
    m.resize(c.iterations);
    for (size_t& idx : m) idx = rng.UniformInt(book.size());
  }
  const NoKeyResult r = NoKeyRoundTrip(
      messages, c.index, book,
      c.noiseless ? NoiseMode::kOff : NoiseMode::kDyadicGaussian, rng);
  SimRow row;
  row.symbols = c.iterations;
  row.errors = r.errors;
  row.power1 = r.power1;
  row.power2 = r.power2;
  for (size_t t = 0; t < r.residuals.size(); ++t) {
    for (size_t j = 0; j < r.residuals[t].size(); ++j) {
      if (r.residuals[t][j] != r.scaled_noise[t][j]) ++row.residual_mismatch;
      row.sigma2 += r.residuals[t][j] * r.residuals[t][j];
    }
  }
  row.sigma2 /= static_cast<double>(r.residuals.size() * book.dimension());
  row.sigma2_pred = c.noiseless ? 0.0 : c.n_msgs / 4.0;
  return row;
}

}  // namespace

int RunSimulate(const ExperimentConfig& c, std::ostream& out) {
  const Scheme scheme =
      c.scheme == "auto" ? Scheme::kPir : ParseScheme(c.scheme);
  Require(c.scheme != "all", "simulate takes a single scheme");
  std::ofstream trace_file;
  if (!c.trace.empty()) {
    trace_file.open(c.trace, std::ios::binary);
    if (!trace_file) {
      throw Error(ErrorCode::kIo, "cannot write trace file " + c.trace);
    }
  }
  out << ConfigEcho(c)
      << "# sigma2 is the measured equivalent-noise second moment per "
         "dimension\n"
      << "N,P,trial,scheme,symbols,errors,ser,sigma2,sigma2_pred,power1,"
         "power2,residual_mismatch\n";
  size_t total_symbols = 0;
  size_t total_errors = 0;
  const std::vector<int> dbs =
      scheme == Scheme::kSpirNoKey ? std::vector<int>{2} : c.n_dbs;
  for (int n : dbs) {
    for (size_t pi = 0; pi < c.power.size(); ++pi) {
      const double p = c.power[pi];
      const uint64_t point_seed = PointSeed(c.seed, n, pi);
      std::vector<SimRow> rows(c.trials);
      if (scheme == Scheme::kSpirNoKey) {
        const SphereCodebook book(p, c.n_msgs, c.dim);
        ParallelFor(c.trials, c.threads, [&](size_t t) {
          rows[t] = SimulateNoKey(c, book, point_seed, t);
        });
      } else {
        ParallelFor(c.trials, c.threads, [&](size_t t) {
          rows[t] = SimulateLattice(c, scheme, n, p, point_seed, t);
        });
      }
      for (size_t t = 0; t < rows.size(); ++t) {
        const SimRow& r = rows[t];
        total_symbols += r.symbols;
        total_errors += r.errors;
        out << n << ',' << Num(p) << ',' << t << ',' << SchemeName(scheme)
            << ',' << r.symbols << ',' << r.errors << ','
            << Num(static_cast<double>(r.errors) / r.symbols) << ','
            << Num(r.sigma2) << ',' << Num(r.sigma2_pred) << ','
            << Num(r.power1) << ',' << Num(r.power2) << ','
            << r.residual_mismatch << '\n';
        if (trace_file.is_open()) trace_file << r.trace;
      }
    }
  }
  out << "# total symbols = " << total_symbols << '\n'
      << "# total errors = " << total_errors << '\n'
      << "# ser = "
      << Num(static_cast<double>(total_errors) /
             static_cast<double>(std::max<size_t>(total_symbols, 1)))
      << '\n';
  if (trace_file.is_open() && !trace_file) {
    throw Error(ErrorCode::kIo, "failed writing trace file " + c.trace);
  }
  return kExitOk;
}

int RunAudit(const ExperimentConfig& c, std::ostream& out) {
  std::vector<Scheme> schemes;
  if (c.scheme == "auto" || c.scheme == "all") {
    schemes = {Scheme::kPir, Scheme::kSpirCr, Scheme::kSpirNoKey};
  } else {
    schemes = {ParseScheme(c.scheme)};
  }
  AuditOptions options;
  options.num_messages = c.n_msgs;
  options.prime = c.prime;
  options.samples = c.samples;
  options.bins = c.bins;
  options.seed = c.seed;
  options.broken = ParseBreakMode(c.broken);
  options.threads = c.threads;
  out << ConfigEcho(c)
      << "name,scheme,statistic,value,threshold,pass,samples,exact,"
         "mandatory\n";
  bool passed = true;
  for (Scheme s : schemes) {
    const std::vector<AuditVerdict> verdicts = RunAuditSuite(s, options);
    passed = passed && SuitePassed(verdicts);
    for (const AuditVerdict& v : verdicts) {
      out << v.name << ',' << v.scheme << ',' << v.statistic << ','
          << Num(v.value) << ',' << Num(v.threshold) << ','
          << (v.pass ? "pass" : "fail") << ',' << v.samples << ','
          << (v.exact ? "exact" : "sampled") << ','
          << (v.mandatory ? "mandatory" : "informational") << '\n';
    }
  }
  out << "# suite = " << (passed ? "pass" : "fail") << '\n';
  return passed ? kExitOk : kExitAuditFailed;
}

int RunLeakDemo(const ExperimentConfig& c, std::ostream& out) {
  const LeakageDemo demo = RunLeakageDemo();
  std::string record = demo.ToJson();
  record.erase(std::remove(record.begin(), record.end(), '\n'), record.end());
  out << ConfigEcho(c) << "# record = " << record << '\n'
      << "symbol,posterior_plain,posterior_symmetric\n";
  for (size_t s = 0; s < demo.posterior_plain.size(); ++s) {
    out << s << ',' << Num(demo.posterior_plain[s]) << ','
        << Num(demo.posterior_symmetric[s]) << '\n';
  }
  return kExitOk;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  ExperimentConfig c;
  std::string n_dbs = "2";
  std::string power = "10";

  CLI::App app{"Lattice-coded private retrieval over fading multiple access "
               "channels"};
  app.name("latpir");
  app.set_config("--config", "", "Key-value configuration file");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", c.seed, "Master seed")->required();
  app.add_option("--trials", c.trials, "Monte-Carlo trials per grid point");
  app.add_option("--n-dbs", n_dbs, "Number of databases (comma grid)");
  app.add_option("--n-msgs", c.n_msgs, "Number of messages M");
  app.add_option("--power", power, "Power constraint P (comma grid)");
  app.add_option("--prime", c.prime, "Field size p");
  app.add_option("--dim", c.dim, "Lattice dimension n");
  app.add_option("--partition", c.partition, "exact, diff or random")
      ->check(CLI::IsMember({"exact", "diff", "random"}));
  app.add_option("--scheme", c.scheme, "pir, spir-cr, spir-nokey or all")
      ->check(CLI::IsMember({"auto", "all", "pir", "spir-cr", "spir-nokey"}));
  app.add_option("--a-max", c.a_max, "Search bound for C&F coefficients");
  app.add_option("--out", c.out, "Output path, - for stdout");
  app.add_option("--iterations", c.iterations, "Chunks per message");
  app.add_option("--index", c.index, "Requested message (0-based)");
  app.add_flag("--noiseless", c.noiseless, "Disable channel noise");
  app.add_flag("--zero-cr", c.zero_cr, "Use S = 0 for the symmetric scheme");
  app.add_option("--h-min", c.h_min, "Smallest heatmap gain");
  app.add_option("--h-max", c.h_max, "Largest heatmap gain");
  app.add_option("--grid", c.grid, "Heatmap points per axis");
  app.add_option("--break", c.broken, "none, dither, cr or queries")
      ->check(CLI::IsMember({"none", "dither", "cr", "queries"}));
  app.add_option("--trace", c.trace, "JSONL trace path for simulate");
  app.add_option("--samples", c.samples, "Samples for sampled audits");
  app.add_option("--bins", c.bins, "Bins for sampled MI estimates");
  app.add_option("--threads", c.threads, "Worker threads, 0 for all cores");

  app.add_subcommand("rates", "Average rates versus N and P");
  app.add_subcommand("heatmap", "R_eq against the best C&F rate");
  app.add_subcommand("simulate", "End-to-end retrieval");
  app.add_subcommand("audit", "Privacy audits");
  app.add_subcommand("leak-demo", "Leak of plain PIR and its fix");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "latpir: " << e.what() << '\n';
    return kExitError;
  }

  try {
    c.command = app.get_subcommands().front()->get_name();
    c.n_dbs = ParseIntGrid(n_dbs, 2);
    c.power = ParseRealGrid(power);
    Validate(c);

    std::ostringstream buffer;
    int code = kExitOk;
    if (c.command == "rates") {
      code = RunRates(c, buffer);
    } else if (c.command == "heatmap") {
      code = RunHeatmap(c, buffer);
    } else if (c.command == "simulate") {
      code = RunSimulate(c, buffer);
    } else if (c.command == "audit") {
      code = RunAudit(c, buffer);
    } else {
      code = RunLeakDemo(c, buffer);
    }
    if (c.out == "-") {
      out << buffer.str();
    } else {
      std::ofstream file(c.out, std::ios::binary);
      file << buffer.str();
      file.close();
      if (!file) throw Error(ErrorCode::kIo, "cannot write " + c.out);
    }
    return code;
  } catch (const Error& e) {
    err << "latpir: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "latpir: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace latpir::cli
