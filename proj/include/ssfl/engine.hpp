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


// Discrete-event execution of semi-synchronous, synchronous and asynchronous
// federated training over the wireless model.
//
// Within a round the channel draw and bandwidth shares are fixed, so every
// transmitting UE drains its payload at a constant rate until the round
// closes. Round k closes as soon as the server holds A received gradients;
// gradients beyond the A-th stay buffered for the next round, so several
// rounds may close at the same instant.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ssfl/bandwidth.hpp"
#include "ssfl/learning.hpp"
#include "ssfl/scheduling.hpp"
#include "ssfl/wireless.hpp"

namespace ssfl {

enum class Mode { kSemiSync, kSync, kAsync };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

// What a UE does with in-flight work when a fresh model is pushed to it
// because its held model became too stale.
enum class Redistribution {
  kAbandon,  // drop the local iteration and restart from the fresh model
  kFinish,   // finish the upload, let the server discard it, then restart
};

struct RunConfig {
  Mode mode = Mode::kSemiSync;
  Objective objective = Objective::kPfl;
  std::size_t A = 1;
  std::size_t S = 1;
  std::size_t K = 1;
  double alpha = 0.0;
  double beta = 0.1;
  BandwidthPolicy policy = BandwidthPolicy::kActiveExtreme;
  double theta = 0.5;
  std::uint64_t seed = 0;
  BatchSizes batches;
  double payload = 0.0;  // Z, information units per upload
  Redistribution redistribution = Redistribution::kAbandon;
  // Push the fresh model to UEs whose held model is more than S rounds old.
  // Off by default in async mode.
  std::optional<bool> enforce_staleness;
  std::size_t workers = 1;
  // Keep every aggregated model w_1 .. w_K in the trace.
  bool keep_models = false;
  // Semi-sync only; built greedily from the profiles' eta when absent.
  std::optional<SchedulingMatrix> schedule;

  // Mode-dependent defaults: sync forces A = n, async forces A = 1; both use
  // all-share bandwidth unless fixed-equal was requested.
  RunConfig normalized(std::size_t n) const;
  // Throws ConfigError on an inconsistent configuration.
  void validate(std::size_t n) const;
};

struct RoundRecord {
  std::size_t round = 0;
  double close_time_s = 0.0;
  std::vector<std::size_t> participants;  // ascending UE index
  std::vector<std::size_t> staleness;     // aligned with participants
  // Metrics of the model produced by this round (w_{k+1}).
  double loss = 0.0;
  double grad_norm_sq = 0.0;
  std::optional<double> accuracy;

  std::size_t max_staleness() const;
  bool operator==(const RoundRecord&) const = default;
};

struct SimTrace {
  Mode mode = Mode::kSemiSync;
  Objective objective = Objective::kPfl;
  std::size_t A = 1;
  std::size_t S = 1;
  // Metrics of w_0.
  double initial_loss = 0.0;
  double initial_grad_norm_sq = 0.0;
  std::optional<double> initial_accuracy;
  std::vector<RoundRecord> rounds;
  BandwidthPlan plan;
  PayloadLedger ledger;
  std::vector<double> busy_time_s;  // computing or transmitting at a positive rate
  std::size_t redistributions = 0;
  std::size_t abandoned_uploads = 0;
  // Invariant flags (staleness above S, schedule or plan violations).
  std::vector<std::string> flags;
  Vec final_model;
  std::vector<Vec> models;  // w_1 .. w_K, only with keep_models

  std::size_t max_staleness() const;
};

// Last close time; 0 for an empty trace.
double total_time(const SimTrace& trace);

// (1/K) sum_{k<K} ||grad F(w_k)||^2 over the models w_0 .. w_{K-1}.
double average_grad_norm_sq(const SimTrace& trace);

// Executes config.K rounds. Throws ConfigError for an invalid configuration
// (including a scheduled UE without bandwidth) and InfeasibleError if no UE
// can make progress.
SimTrace run(const RunConfig& config, const Task& task, std::span<const UEProfile> profiles,
             const ChannelParams& channel, const Vec& w0);

SimTrace run_sync(RunConfig config, const Task& task, std::span<const UEProfile> profiles,
                  const ChannelParams& channel, const Vec& w0);
SimTrace run_async(RunConfig config, const Task& task, std::span<const UEProfile> profiles,
                   const ChannelParams& channel, const Vec& w0);

}  // namespace ssfl
