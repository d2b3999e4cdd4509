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


#include "ssfl/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <thread>

#include "ssfl/error.hpp"
#include "ssfl/io.hpp"

namespace ssfl {

namespace {

namespace fs = std::filesystem;

std::string value_tag(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::size_t as_count(double v, const char* field) {
  if (!(v >= 0.0) || v != std::floor(v)) throw ConfigError(field, "sweep value must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

ExperimentConfig apply_sweep(ExperimentConfig c, const std::string& parameter, double value) {
  if (parameter == "A") {
    c.protocol.A = as_count(value, "sweep.values");
    if (*c.protocol.A < 1 || *c.protocol.A > c.population.n) throw ConfigError("sweep.values", "A must lie in [1, n]");
  } else if (parameter == "S") {
    c.protocol.S = as_count(value, "sweep.values");
    if (c.protocol.S < 1) throw ConfigError("sweep.values", "S must be >= 1");
  } else if (parameter == "K") {
    c.protocol.K = as_count(value, "sweep.values");
    if (*c.protocol.K < 1) throw ConfigError("sweep.values", "K must be >= 1");
  } else if (parameter == "level") {
    c.learning.classification.level = as_count(value, "sweep.values");
    if (c.learning.classification.level < 1 ||
        c.learning.classification.level > c.learning.classification.classes) {
      throw ConfigError("sweep.values", "level must lie in [1, classes]");
    }
  } else if (parameter == "beta") {
    if (!(value > 0.0)) throw ConfigError("sweep.values", "beta must be positive");
    c.learning.beta = value;
  } else if (parameter == "theta") {
    if (!(value >= 0.0 && value <= 1.0)) throw ConfigError("sweep.values", "theta must lie in [0, 1]");
    c.protocol.theta = value;
  } else {
    throw ConfigError("sweep.parameter", "unknown sweep parameter");
  }
  return c;
}

std::vector<RunOutcome> run_modes(const ExperimentConfig& config, const std::string& suffix) {
  const auto task = make_task(config);
  const Vec w0 = initial_model(config, *task);
  const ChannelParams channel = config.channel.params();
  const fs::path out(config.output_dir);
  std::vector<RunOutcome> runs;
  for (Mode mode : config.protocol.modes) {
    RunConfig rc = make_run_config(config, mode);
    if (mode == Mode::kSemiSync) {
      std::vector<double> eta;
      for (const auto& p : config.population.profiles) eta.push_back(p.eta);
      rc.schedule = greedy_schedule(eta, rc.A, rc.K, rc.S);
      write_file_atomic(out / ("schedule" + suffix + ".csv"), schedule_to_csv(*rc.schedule));
    }
    RunOutcome o;
    o.tag = std::string(to_string(mode)) + suffix;
    o.trace = run(rc, *task, config.population.profiles, channel, w0);
    o.summary = trace_summary(o.trace, config.protocol.epsilon);
    o.summary["tag"] = o.tag;
    write_file_atomic(out / ("trace_" + o.tag + ".csv"), trace_to_csv(o.trace));
    write_file_atomic(out / ("plan_" + o.tag + ".csv"), plan_to_csv(o.trace.plan));
    write_file_atomic(out / ("summary_" + o.tag + ".json"), o.summary.dump(2) + "\n");
    runs.push_back(std::move(o));
  }
  return runs;
}

nlohmann::json compare(const std::vector<RunOutcome>& runs) {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& r : runs) {
    table.push_back({{"tag", r.tag},
                     {"mode", r.summary["mode"]},
                     {"A", r.summary["A"]},
                     {"rounds", r.summary["rounds"]},
                     {"total_time_s", r.summary["total_time_s"]},
                     {"final_loss", r.summary["final_loss"]},
                     {"avg_grad_norm_sq", r.summary["avg_grad_norm_sq"]},
                     {"final_accuracy", r.summary["final_accuracy"]},
                     {"max_staleness", r.summary["max_staleness"]},
                     {"flagged", !r.trace.flags.empty()}});
  }
  return table;
}

void write_common(const ExperimentConfig& config, const Task& task) {
  const fs::path out(config.output_dir);
  write_file_atomic(out / "config.json", to_json(config).dump(2) + "\n");
  write_file_atomic(out / "task.json", task.snapshot().dump() + "\n");
}

}  // namespace

bool ExperimentResult::flagged() const {
  for (const auto& r : runs) {
    if (!r.trace.flags.empty()) return true;
  }
  return false;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  write_common(config, *make_task(config));
  ExperimentResult result;
  result.runs = run_modes(config, "");
  result.comparison = compare(result.runs);
  if (result.runs.size() > 1) {
    write_file_atomic(fs::path(config.output_dir) / "comparison.json", result.comparison.dump(2) + "\n");
  }
  return result;
}

ExperimentResult run_sweep(const ExperimentConfig& config, bool parallel) {
  if (!config.sweep) throw ConfigError("sweep", "missing sweep block");
  write_common(config, *make_task(config));
  const auto& sweep = *config.sweep;
  std::vector<ExperimentConfig> points;
  for (double v : sweep.values) points.push_back(apply_sweep(config, sweep.parameter, v));
  std::vector<std::vector<RunOutcome>> per_point(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  auto body = [&](std::size_t j) {
    try {
      per_point[j] = run_modes(points[j], "_" + sweep.parameter + "-" + value_tag(sweep.values[j]));
    } catch (...) {
      errors[j] = std::current_exception();
    }
  };
  if (parallel) {
    std::vector<std::jthread> threads;
    for (std::size_t j = 0; j < points.size(); ++j) threads.emplace_back(body, j);
  } else {
    for (std::size_t j = 0; j < points.size(); ++j) body(j);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  ExperimentResult result;
  for (auto& runs : per_point) {
    for (auto& r : runs) result.runs.push_back(std::move(r));
  }
  result.comparison = compare(result.runs);
  write_file_atomic(fs::path(config.output_dir) / "comparison.json", result.comparison.dump(2) + "\n");
  return result;
}

SchedulingMatrix emit_schedule(std::span<const double> eta, std::size_t participants,
                               std::size_t rounds, std::size_t staleness_bound,
                               const std::filesystem::path& path) {
  SchedulingMatrix m = greedy_schedule(eta, participants, rounds, staleness_bound);
  write_file_atomic(path, schedule_to_csv(m));
  return m;
}

BandwidthPlan emit_bandwidth(const SchedulingMatrix& schedule, std::span<const UEProfile> profiles,
                             const ChannelParams& channel, std::uint64_t seed,
                             BandwidthPolicy policy, double theta,
                             const std::filesystem::path& path) {
  BandwidthPlan plan = build_plan(schedule, profiles, channel, CounterRng(seed), policy, theta);
  write_file_atomic(path, plan_to_csv(plan));
  return plan;
}

nlohmann::json emit_bound(const ConvergenceConstants& c, double epsilon, double eta_min) {
  nlohmann::json j;
  j["L_F"] = smoothness_LF(c);
  j["sigma_F_sq"] = sigma_F_sq(c);
  j["gamma_F_sq"] = gamma_F_sq(c);
  const bool ok = step_condition(c);
  j["step_ok"] = ok;
  j["bound"] = nullptr;
  if (ok && c.beta > 0.0 && c.K > 0.0) j["bound"] = theorem1_bound(c);
  j["K_star"] = nullptr;
  j["A_star"] = nullptr;
  try {
    const auto est = estimate_K_A(c, epsilon, eta_min, c.S);
    j["K_star"] = est.K;
    j["A_star"] = est.A;
  } catch (const DegenerateError&) {
    // Left null: the estimator is undefined for this configuration.
  }
  return j;
}

}  // namespace ssfl
