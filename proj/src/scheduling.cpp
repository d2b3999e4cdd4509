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

#include "ssfl/scheduling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ssfl/error.hpp"

namespace ssfl {

SchedulingMatrix::SchedulingMatrix(std::size_t rounds, std::size_t ues,
                                   std::size_t participants,
                                   std::size_t staleness_bound,
                                   std::vector<std::uint8_t> cells)
    : rounds_(rounds),
      ues_(ues),
      participants_(participants),
      staleness_(staleness_bound),
      cells_(std::move(cells)) {
  if (ues_ == 0) throw DomainError("scheduling matrix needs at least one UE");
  if (participants_ == 0 || participants_ > ues_) {
    throw DomainError("participants per round must lie in [1, n]");
  }
  if (staleness_ == 0) throw DomainError("staleness bound must be >= 1");
  if (cells_.size() != rounds_ * ues_) throw DomainError("cell count must equal K*n");
  for (std::size_t k = 0; k < rounds_; ++k) {
    std::size_t sum = 0;
    for (std::size_t i = 0; i < ues_; ++i) {
      const auto v = cells_[k * ues_ + i];
      if (v > 1) throw DomainError("scheduling entries must be 0 or 1");
      sum += v;
    }
    if (sum != participants_) {
      throw DomainError("row " + std::to_string(k) + " sums to " + std::to_string(sum) +
                        ", expected " + std::to_string(participants_));
    }
  }
}

std::vector<std::size_t> SchedulingMatrix::scheduled(std::size_t round) const {
  std::vector<std::size_t> out;
  out.reserve(participants_);
  for (std::size_t i = 0; i < ues_; ++i) {
    if (at(round, i)) out.push_back(i);
  }
  return out;
}

ParticipationStats relative_frequency(const SchedulingMatrix& matrix,
                                      std::span<const double> target_eta) {
  ParticipationStats stats;
  stats.counts.assign(matrix.ues(), 0);
  for (std::size_t k = 0; k < matrix.rounds(); ++k) {
    for (std::size_t i = 0; i < matrix.ues(); ++i) stats.counts[i] += matrix.at(k, i);
  }
  const double slots =
      static_cast<double>(matrix.participants_per_round() * matrix.rounds());
  stats.achieved_eta.resize(matrix.ues(), 0.0);
  if (slots > 0) {
    for (std::size_t i = 0; i < matrix.ues(); ++i) {
      stats.achieved_eta[i] = static_cast<double>(stats.counts[i]) / slots;
    }
  }
  stats.target_eta.assign(target_eta.begin(), target_eta.end());
  return stats;
}

SchedulingMatrix greedy_schedule(std::span<const double> target_eta,
                                 std::size_t participants, std::size_t rounds,
                                 std::optional<std::size_t> staleness_bound) {
  const std::size_t n = target_eta.size();
  if (n == 0) throw DomainError("greedy_schedule: empty population");
  if (participants == 0 || participants > n) {
    throw DomainError("greedy_schedule: A must lie in [1, n]");
  }
  if (rounds == 0) throw DomainError("greedy_schedule: K must be >= 1");
  const double total_eta = std::accumulate(target_eta.begin(), target_eta.end(), 0.0);
  if (std::abs(total_eta - 1.0) > 1e-9) {
    throw DomainError("greedy_schedule: targets must sum to 1");
  }

  std::vector<std::uint8_t> cells(rounds * n, 0);
  std::vector<std::size_t> counts(n, 0);
  std::vector<std::size_t> order(n);
  std::vector<double> deficit(n);

  for (std::size_t k = 0; k < rounds; ++k) {
    // All previous rounds are full, so sum(Pi) == A*k and every achieved
    // frequency shares that denominator. Visit the UEs furthest below their
    // target first; with equal targets this is increasing eta-hat.
    const double total = static_cast<double>(participants * k);
    for (std::size_t i = 0; i < n; ++i) {
      deficit[i] = static_cast<double>(counts[i]) - target_eta[i] * total;
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return deficit[a] < deficit[b]; });

    std::uint8_t* row = cells.data() + k * n;
    std::size_t admitted = 0;
    for (std::size_t i : order) {
      if (admitted == participants) break;
      // eta-hat is 0 before the first update, so everyone qualifies.
      const bool below_target =
          k == 0 || static_cast<double>(counts[i]) <= target_eta[i] * total + 1e-9;
      if (below_target) {
        row[i] = 1;
        ++admitted;
      }
    }
    for (std::size_t i = 0; i < n && admitted < participants; ++i) {
      if (row[i] == 0) {
        row[i] = 1;
        ++admitted;
      }
    }
    for (std::size_t i = 0; i < n; ++i) counts[i] += row[i];
  }
  return SchedulingMatrix(rounds, n, participants, staleness_bound.value_or(rounds),
                          std::move(cells));
}

std::vector<StalenessViolation> check_staleness(const SchedulingMatrix& matrix,
                                                std::size_t staleness_bound) {
  std::vector<StalenessViolation> out;
  const std::size_t window = staleness_bound + 1;
  if (window > matrix.rounds()) return out;
  for (std::size_t i = 0; i < matrix.ues(); ++i) {
    for (std::size_t start = 0; start + window <= matrix.rounds(); ++start) {
      bool seen = false;
      for (std::size_t k = start; k < start + window && !seen; ++k) seen = matrix.at(k, i);
      if (!seen) out.push_back({i, start});
    }
  }
  return out;
}

std::vector<bool> eta_lower_bound_check(std::span<const double> target_eta,
                                        std::size_t staleness_bound,
                                        std::size_t rounds) {
  const double bound = static_cast<double>(staleness_bound) / static_cast<double>(rounds);
  std::vector<bool> out;
  out.reserve(target_eta.size());
  for (double eta : target_eta) out.push_back(eta >= bound);
  return out;
}

std::optional<std::size_t> detect_period(const SchedulingMatrix& matrix,
                                         std::size_t start) {
  const std::size_t rounds = matrix.rounds();
  if (start >= rounds) return std::nullopt;
  const std::size_t span = rounds - start;
  for (std::size_t p = 1; 2 * p <= span; ++p) {
    bool ok = true;
    for (std::size_t k = start; k + p < rounds && ok; ++k) {
      ok = std::ranges::equal(matrix.row(k), matrix.row(k + p));
    }
    if (ok) return p;
  }
  return std::nullopt;
}

}  // namespace ssfl
