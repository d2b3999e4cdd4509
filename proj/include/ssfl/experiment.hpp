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


// Experiment orchestration: runs the requested modes (and sweep points) and
// writes traces, plans, summaries and comparison tables.

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ssfl/config.hpp"
#include "ssfl/engine.hpp"

namespace ssfl {

struct RunOutcome {
  std::string tag;  // file-name tag, e.g. "semi" or "semi_A-5"
  SimTrace trace;
  nlohmann::json summary;
};

struct ExperimentResult {
  std::vector<RunOutcome> runs;
  nlohmann::json comparison;
  bool flagged() const;
};

// Runs every mode of `config.protocol.modes` and writes, under output_dir:
// config.json, task.json, schedule.csv (semi-sync), trace_<tag>.csv,
// plan_<tag>.csv, summary_<tag>.json and comparison.json.
ExperimentResult run_experiment(const ExperimentConfig& config);

// One run per (sweep value, mode); sweep points run concurrently when
// `parallel` is set. Files are tagged with the parameter value.
ExperimentResult run_sweep(const ExperimentConfig& config, bool parallel);

SchedulingMatrix emit_schedule(std::span<const double> eta, std::size_t participants,
                               std::size_t rounds, std::size_t staleness_bound,
                               const std::filesystem::path& path);
BandwidthPlan emit_bandwidth(const SchedulingMatrix& schedule, std::span<const UEProfile> profiles,
                             const ChannelParams& channel, std::uint64_t seed,
                             BandwidthPolicy policy, double theta,
                             const std::filesystem::path& path);
// {L_F, sigma_F_sq, gamma_F_sq, step_ok, bound, K_star, A_star}; bound is null
// when the step condition fails and K_star/A_star are null when degenerate.
nlohmann::json emit_bound(const ConvergenceConstants& constants, double epsilon, double eta_min);

}  // namespace ssfl
