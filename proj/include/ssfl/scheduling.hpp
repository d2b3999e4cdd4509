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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ssfl {

// K x n binary participation plan. Entry (k, i) is set when UE i's gradient
// is aggregated in round k. Every row holds exactly A ones.
class SchedulingMatrix {
 public:
  // `cells` is row-major K x n. Throws DomainError on a non-binary entry, a
  // row sum different from A, A > n, A == 0 or S == 0.
  SchedulingMatrix(std::size_t rounds, std::size_t ues, std::size_t participants,
                   std::size_t staleness_bound, std::vector<std::uint8_t> cells);

  std::size_t rounds() const noexcept { return rounds_; }
  std::size_t ues() const noexcept { return ues_; }
  std::size_t participants_per_round() const noexcept { return participants_; }
  std::size_t staleness_bound() const noexcept { return staleness_; }

  bool at(std::size_t round, std::size_t ue) const { return cells_[round * ues_ + ue] != 0; }
  std::span<const std::uint8_t> row(std::size_t round) const {
    return {cells_.data() + round * ues_, ues_};
  }
  std::vector<std::size_t> scheduled(std::size_t round) const;

  bool operator==(const SchedulingMatrix&) const = default;

 private:
  std::size_t rounds_;
  std::size_t ues_;
  std::size_t participants_;
  std::size_t staleness_;
  std::vector<std::uint8_t> cells_;
};

struct ParticipationStats {
  std::vector<std::size_t> counts;  // sum_k pi_k^i; sums to A*K exactly
  std::vector<double> achieved_eta;
  std::vector<double> target_eta;
};

ParticipationStats relative_frequency(const SchedulingMatrix& matrix,
                                      std::span<const double> target_eta = {});

// Greedy round-by-round scheduler. Within a round, UEs are visited in order of
// increasing count_i - eta_i * A * k (lowest index on ties; for equal targets
// this is increasing achieved frequency) and admitted while their achieved
// frequency does not exceed the target; any shortfall is then filled with the
// lowest-indexed unscheduled UEs. Throws DomainError if
// A > n, A == 0, K == 0 or the targets do not sum to one.
SchedulingMatrix greedy_schedule(std::span<const double> target_eta,
                                 std::size_t participants, std::size_t rounds,
                                 std::optional<std::size_t> staleness_bound = std::nullopt);

struct StalenessViolation {
  std::size_t ue = 0;
  std::size_t window_start = 0;
  bool operator==(const StalenessViolation&) const = default;
};

// Every full window of S + 1 consecutive rounds must contain at least one
// participation per UE (a UE may sit out at most S rounds in a row). Lists the
// start of each window that does not.
std::vector<StalenessViolation> check_staleness(const SchedulingMatrix& matrix,
                                                std::size_t staleness_bound);

// eta_i >= S / K for each UE.
std::vector<bool> eta_lower_bound_check(std::span<const double> target_eta,
                                        std::size_t staleness_bound,
                                        std::size_t rounds);

// Smallest p such that row(k) == row(k + p) for every k >= start. nullopt when
// no period fits at least twice in the remaining horizon.
std::optional<std::size_t> detect_period(const SchedulingMatrix& matrix,
                                         std::size_t start = 0);

}  // namespace ssfl
