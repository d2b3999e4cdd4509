// Copyright 2026 The ssfl Authors
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


// Command-line front end: simulate, schedule, bandwidth, bound, sweep.
//
// Exit codes: 0 ok, 2 configuration error, 3 invariant flag raised.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ssfl/config.hpp"
#include "ssfl/error.hpp"
#include "ssfl/experiment.hpp"
#include "ssfl/io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kInvariantFlag = 3;

struct Options {
  std::string config;
  std::optional<std::string> mode;
  std::optional<std::string> objective;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool parallel = false;
};

ssfl::ExperimentConfig load(const Options& opt) {
  ssfl::ExperimentConfig c = ssfl::load_config(opt.config);
  if (opt.seed && *opt.seed != c.seed) {
    // Generated populations depend on the seed, so re-resolve them.
    nlohmann::json j = nlohmann::json::parse(ssfl::read_file(opt.config));
    j["seed"] = *opt.seed;
    c = ssfl::config_from_json(j);
  }
  if (opt.mode) {
    try {
      c.protocol.modes = {ssfl::parse_mode(*opt.mode)};
    } catch (const ssfl::DomainError& e) {
      throw ssfl::ConfigError("--mode", e.what());
    }
  }
  if (opt.objective) {
    try {
      c.protocol.objective = ssfl::parse_objective(*opt.objective);
    } catch (const ssfl::DomainError& e) {
      throw ssfl::ConfigError("--objective", e.what());
    }
  }
  if (opt.out) c.output_dir = *opt.out;
  return c;
}

void print_summary(const ssfl::ExperimentResult& result) {
  for (const auto& r : result.runs) {
    std::printf("%-24s rounds=%s total_time_s=%s final_loss=%s max_staleness=%zu flags=%zu\n",
                r.tag.c_str(), r.summary["rounds"].dump().c_str(),
                ssfl::format_number(r.summary["total_time_s"].get<double>()).c_str(),
                ssfl::format_number(r.summary["final_loss"].get<double>()).c_str(),
                r.trace.max_staleness(), r.trace.flags.size());
    for (const auto& f : r.trace.flags) std::printf("  flag: %s\n", f.c_str());
  }
}

int simulate(const Options& opt) {
  const auto config = load(opt);
  const auto result = ssfl::run_experiment(config);
  print_summary(result);
  return result.flagged() ? kInvariantFlag : kOk;
}

int sweep(const Options& opt) {
  const auto config = load(opt);
  const auto result = ssfl::run_sweep(config, opt.parallel);
  print_summary(result);
  return result.flagged() ? kInvariantFlag : kOk;
}

std::vector<double> etas(const ssfl::ExperimentConfig& c) {
  std::vector<double> out;
  for (const auto& p : c.population.profiles) out.push_back(p.eta);
  return out;
}

int schedule(const Options& opt) {
  const auto c = load(opt);
  const auto path = std::filesystem::path(c.output_dir) / "schedule.csv";
  const auto m = ssfl::emit_schedule(etas(c), ssfl::resolve_A(c), ssfl::resolve_K(c), c.protocol.S, path);
  std::printf("%s\n", path.string().c_str());
  return ssfl::check_staleness(m, c.protocol.S).empty() ? kOk : kInvariantFlag;
}

int bandwidth(const Options& opt) {
  const auto c = load(opt);
  const auto m = ssfl::greedy_schedule(etas(c), ssfl::resolve_A(c), ssfl::resolve_K(c), c.protocol.S);
  const auto path = std::filesystem::path(c.output_dir) / "plan.csv";
  const auto channel = c.channel.params();
  const auto plan = ssfl::emit_bandwidth(m, c.population.profiles, channel, c.seed,
                                         c.protocol.policy, c.protocol.theta, path);
  std::printf("%s\n", path.string().c_str());
  return ssfl::verify_plan(plan, {}, m, channel).valid() ? kOk : kInvariantFlag;
}

int bound(const Options& opt) {
  const auto c = load(opt);
  if (!c.analysis) throw ssfl::ConfigError("analysis", "the bound subcommand needs an analysis block");
  double eta_min = 1.0;
  for (const auto& p : c.population.profiles) eta_min = std::min(eta_min, p.eta);
  std::printf("%s\n", ssfl::emit_bound(*c.analysis, c.protocol.epsilon, eta_min).dump(2).c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-synchronous personalized federated learning simulator"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "experiment config (JSON)")->required();
    sub->add_option("--mode", opt.mode, "semi|sync|async");
    sub->add_option("--objective", opt.objective, "pfl|fl");
    sub->add_option("--seed", opt.seed, "master seed");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_flag("--parallel", opt.parallel, "run sweep points concurrently");
  };
  auto* sim = app.add_subcommand("simulate", "run the configured modes");
  auto* sch = app.add_subcommand("schedule", "emit the greedy scheduling matrix");
  auto* bw = app.add_subcommand("bandwidth", "emit the per-round bandwidth plan");
  auto* bd = app.add_subcommand("bound", "print the convergence bound and K*/A*");
  auto* sw = app.add_subcommand("sweep", "run the configured parameter sweep");
  for (auto* sub : {sim, sch, bw, bd, sw}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*sim) return simulate(opt);
    if (*sch) return schedule(opt);
    if (*bw) return bandwidth(opt);
    if (*bd) return bound(opt);
    if (*sw) return sweep(opt);
  } catch (const ssfl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ssfl::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
