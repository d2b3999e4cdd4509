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


// Experiment configuration: JSON schema, validation and the derived run
// inputs (profiles, task, initial model, per-mode run settings).

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ssfl/analysis.hpp"
#include "ssfl/bandwidth.hpp"
#include "ssfl/engine.hpp"
#include "ssfl/learning.hpp"
#include "ssfl/wireless.hpp"

namespace ssfl {

struct ChannelConfig {
  double bandwidth_hz = 1e6;
  double path_loss_exp = 3.8;
  double noise_dbm_per_hz = -174.0;
  double rayleigh_scale = 40.0;
  Fading fading = Fading::kRayleigh;

  ChannelParams params() const;
  bool operator==(const ChannelConfig&) const = default;
};

enum class EtaMode { kEqual, kDistance };

struct PopulationGenerator {
  double transmit_power_w = 0.01;
  double distance_max_m = 200.0;  // distances uniform on (0, max]
  double cycles_per_sample = 2e4;
  double cpu_hz_min = 1e9;        // CPU speeds uniform on [min, max]
  double cpu_hz_max = 1e9;
  std::size_t sample_count = 100;

  bool operator==(const PopulationGenerator&) const = default;
};

struct PopulationConfig {
  std::size_t n = 0;
  EtaMode eta_mode = EtaMode::kEqual;
  PopulationGenerator generator;
  std::vector<UEProfile> profiles;  // resolved; explicit in emitted configs

  bool operator==(const PopulationConfig&) const = default;
};

struct LearningConfig {
  TaskKind task = TaskKind::kQuadratic;
  QuadraticTask::Params quadratic;
  ClassificationTask::Params classification;
  double alpha = 0.03;
  double beta = 0.07;
  BatchSizes batches;
  double payload = 1e5;
  double w0_scale = 0.0;  // w0 ~ N(0, w0_scale^2 I)

  bool operator==(const LearningConfig&) const = default;
};

struct ProtocolConfig {
  std::vector<Mode> modes{Mode::kSemiSync};
  Objective objective = Objective::kPfl;
  std::optional<std::size_t> A;  // empty: "auto"
  std::size_t S = 1;
  std::optional<std::size_t> K;  // empty: "auto"
  double epsilon = 1e-3;
  BandwidthPolicy policy = BandwidthPolicy::kActiveExtreme;
  double theta = 0.5;
  Redistribution redistribution = Redistribution::kAbandon;
  std::optional<bool> enforce_staleness;

  bool operator==(const ProtocolConfig&) const = default;
};

struct SweepConfig {
  std::string parameter;  // A, S, K, level, beta, theta
  std::vector<double> values;

  bool operator==(const SweepConfig&) const = default;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  ChannelConfig channel;
  PopulationConfig population;
  LearningConfig learning;
  ProtocolConfig protocol;
  std::optional<ConvergenceConstants> analysis;
  std::optional<SweepConfig> sweep;
  std::string output_dir = "out";
  std::size_t workers = 1;

  bool operator==(const ExperimentConfig&) const = default;
};

// Throws ConfigError naming the offending field.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

// Distances uniform on (0, max], CPU speeds uniform on [min, max], eta equal
// or proportional to the expected rate at bandwidth B/n.
std::vector<UEProfile> generate_profiles(std::size_t n, EtaMode mode,
                                         const PopulationGenerator& generator,
                                         const ChannelParams& channel, const CounterRng& rng);

// E[r(B/n)] over the fading distribution, by midpoint quadrature on the
// inverse CDF.
double expected_rate(const UEProfile& ue, double bandwidth_hz, const ChannelParams& channel);

std::unique_ptr<Task> make_task(const ExperimentConfig& config);
Vec initial_model(const ExperimentConfig& config, const Task& task);

std::size_t resolve_K(const ExperimentConfig& config);
std::size_t resolve_A(const ExperimentConfig& config);
RunConfig make_run_config(const ExperimentConfig& config, Mode mode);

}  // namespace ssfl
