// Copyright 2026 The Fabrics Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: run, metrics and validate.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "fabrics/errors.h"
#include "fabrics/harness.h"
#include "fabrics/scenario.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRolloutFailure = 1;
constexpr int kExitConfigError = 2;

struct RunArgs {
  std::string scenario;
  std::string out;
  std::optional<double> dt;
  std::optional<double> duration;
  std::optional<std::string> integrator;
  std::string variant;
  std::optional<long long> seed;
  int threads = 0;
};

void PrintSummary(const fabrics::MetricsReport& report) {
  for (const auto& m : report.rollouts) {
    fmt::print("{:<28} state {:>2}  {:<17} converged={:d} reached={:d} final_dist={:.3e}\n",
               m.variant, m.state, m.termination, m.converged, m.reached, m.final_distance);
  }
  for (const auto& s : report.styles) {
    fmt::print("{}: {}/{} converged, {}/{} reached, {} failures, mean final distance {:.3e}",
               s.style, s.converged, s.rollouts, s.reached, s.rollouts, s.failures,
               s.mean_final_distance);
    if (s.pair_count > 0) fmt::print(", mean cross-speed L {:.4f}", s.mean_cross_speed_l);
    fmt::print("\n");
  }
}

int Run(const RunArgs& args) {
  fabrics::ScenarioConfig config = fabrics::LoadScenario(args.scenario);
  if (args.dt) config.integrator.dt = *args.dt;
  if (args.duration) config.integrator.duration = *args.duration;
  if (args.integrator) {
    config.integrator.method =
        *args.integrator == "euler" ? fabrics::Integrator::kEuler : fabrics::Integrator::kRk4;
  }
  if (args.seed) {
    if (*args.seed < 0) throw fabrics::ConfigError("", 0, "--seed must be >= 0");
    if (config.random_states) config.random_states->seed = static_cast<std::uint64_t>(*args.seed);
  }
  if (!args.variant.empty()) {
    const fabrics::VariantConfig* v = config.FindVariant(args.variant);
    if (v == nullptr) {
      throw fabrics::ConfigError(args.scenario, 0, fmt::format("unknown variant '{}'", args.variant));
    }
    config.variants = {*v};
  }
  fabrics::ValidateScenario(config, args.scenario);

  fabrics::RunOptions options;
  options.threads = args.threads;
  const fabrics::RunResult run = fabrics::RunScenario(config, options);
  const fabrics::MetricsReport report = fabrics::ComputeMetrics(config, run);
  const std::string out = args.out.empty() ? "runs/" + config.name : args.out;
  fabrics::WriteRunDirectory(out, config, run, report);
  PrintSummary(report);
  fmt::print("wrote {}\n", out);
  return run.any_failure() ? kExitRolloutFailure : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric fabrics experiment harness"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "run every rollout of a scenario");
  run->add_option("scenario", run_args.scenario, "scenario file")->required();
  run->add_option("--out", run_args.out, "output directory (default runs/<name>)");
  run->add_option("--dt", run_args.dt, "integration step [s]")->check(CLI::PositiveNumber);
  run->add_option("--duration", run_args.duration, "rollout duration [s]")
      ->check(CLI::PositiveNumber);
  run->add_option("--integrator", run_args.integrator, "euler | rk4")
      ->check(CLI::IsMember({"euler", "rk4"}));
  run->add_option("--variant", run_args.variant, "run only this variant");
  run->add_option("--seed", run_args.seed, "seed for random initial states");
  run->add_option("--threads", run_args.threads, "worker threads (0: all cores)");

  std::string run_dir;
  CLI::App* metrics = app.add_subcommand("metrics", "recompute metrics from a run directory");
  metrics->add_option("run_dir", run_dir, "directory written by 'run'")->required();

  std::string validate_path;
  bool echo = false;
  CLI::App* validate = app.add_subcommand("validate", "schema-check a scenario file");
  validate->add_option("scenario", validate_path, "scenario file")->required();
  validate->add_flag("--echo", echo, "print the resolved configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*run) return Run(run_args);
    if (*metrics) {
      std::cout << fabrics::MetricsJson(fabrics::RecomputeMetrics(run_dir));
      return kExitOk;
    }
    if (*validate) {
      const fabrics::ScenarioConfig config = fabrics::LoadScenario(validate_path);
      if (echo) {
        std::cout << fabrics::EchoScenario(config);
      } else {
        fmt::print("{}: ok ({} variants, {} initial states)\n", validate_path,
                   config.variants.size(), config.AllInitialStates().size());
      }
      return kExitOk;
    }
  } catch (const fabrics::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitRolloutFailure;
  }
  return kExitOk;
}
