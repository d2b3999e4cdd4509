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


// CSV and JSON emission for schedules, bandwidth plans and traces. Numbers
// are printed with 17 significant digits so files round-trip exactly.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ssfl/bandwidth.hpp"
#include "ssfl/engine.hpp"
#include "ssfl/scheduling.hpp"

namespace ssfl {

std::string format_number(double value);

// Writes through a temporary file in the same directory and renames it over
// `path`. Creates missing parent directories.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// Header `ue_0,...,ue_{n-1}`, one 0/1 row per round.
std::string schedule_to_csv(const SchedulingMatrix& matrix);
// A is taken from the first row; S defaults to the number of rounds.
SchedulingMatrix schedule_from_csv(std::string_view text, std::size_t staleness_bound = 0);

// Header `round,ue,share_hz`, round-major.
std::string plan_to_csv(const BandwidthPlan& plan);
BandwidthPlan plan_from_csv(std::string_view text, BandwidthPolicy policy);

// Header `round,close_time_s,participants,max_staleness,loss,grad_norm_sq,accuracy,staleness`.
// Participant and staleness lists are ';'-separated; accuracy is empty when
// the task has none.
std::string trace_to_csv(const SimTrace& trace);
std::vector<RoundRecord> trace_from_csv(std::string_view text);

// {mode, objective, A, S, rounds, total_time_s, final_loss, final_grad_norm_sq,
//  final_accuracy, avg_grad_norm_sq, epsilon, fosp, max_staleness, ...}
nlohmann::json trace_summary(const SimTrace& trace, double epsilon);

}  // namespace ssfl
