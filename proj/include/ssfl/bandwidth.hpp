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

// Bandwidth allocation for semi-synchronous rounds.
//
// Every allocation here equalizes the eta-weighted rate r_i / eta_i among the
// UEs that receive bandwidth, using the channel draw of the round. The two
// extremes of the optimal family are "active only" (the A scheduled UEs split
// B) and "all share" (all n UEs split B); "interpolated" blends them.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ssfl/rng.hpp"
#include "ssfl/scheduling.hpp"
#include "ssfl/wireless.hpp"

namespace ssfl {

enum class BandwidthPolicy {
  kActiveExtreme,
  kAllShareExtreme,
  kInterpolated,
  // B/n to every UE in every round. Not part of the optimal family; used for
  // deterministic baselines.
  kFixedEqual,
};

std::string_view to_string(BandwidthPolicy policy);
BandwidthPolicy parse_bandwidth_policy(std::string_view text);

struct BandwidthPlan {
  Eigen::MatrixXd shares_hz;  // K x n, b_k^i
  BandwidthPolicy policy = BandwidthPolicy::kActiveExtreme;
};

struct UploadRecord {
  std::size_t ue = 0;
  std::size_t round = 0;   // round in which the upload finished (or was dropped)
  double time_s = 0.0;
  bool completed = true;   // false: abandoned after a stale-model redistribution
  double carried = 0.0;    // payload sent by this upload across all its rounds
};

// Payload actually sent per round (Z_k^i), plus one record per upload so the
// per-iteration budget can be audited.
struct PayloadLedger {
  Eigen::MatrixXd payload;  // K x n
  double total_payload = 0.0;
  std::vector<UploadRecord> uploads;
};

// Gamma_i = N0 Z / ((T - Tcmp) p h d^-kappa). Throws InfeasibleError if
// T <= Tcmp and DomainError if Z <= 0.
double lambert_gamma(const UEProfile& ue, double h, const ChannelParams& channel,
                     double total_time_s, double payload);

// |W(-Gamma e^-Gamma) + Gamma| on the non-trivial root: the lower branch for
// Gamma < 1, the principal branch for Gamma > 1. Throws DegenerateError when
// the factor is within 1e-12 of zero (Gamma == 1).
double lambert_denominator(double gamma);

// B n eta_i Z / ((T - Tcmp) * |W + Gamma|).
double min_share_bound(const UEProfile& ue, double h, const ChannelParams& channel,
                       std::size_t n, double total_time_s, double payload);

// Throws InfeasibleError unless bound <= B / A.
void require_share_feasible(double bound, const ChannelParams& channel,
                            std::size_t participants);

// Smallest bandwidth whose uplink rate reaches `rate` (inverse of the rate
// formula, via the lower Lambert branch). Throws InfeasibleError when the
// rate is at or above the infinite-bandwidth limit P / N0.
double bandwidth_for_rate(double rate, double received_power_w,
                          double noise_psd_w_per_hz);

// Splits `total_bandwidth_hz` so that r_i / weight_i is identical across the
// entries. The multiplier is found by bisection; the returned shares sum to
// the budget.
std::vector<double> equalize_weighted_rates(std::span<const double> received_power_w,
                                            std::span<const double> weights,
                                            double noise_psd_w_per_hz,
                                            double total_bandwidth_hz);

// Shares for one round; `h` holds the round's draw for every UE.
std::vector<double> allocate_extreme_active(std::span<const std::uint8_t> schedule_row,
                                            std::span<const UEProfile> profiles,
                                            std::span<const double> h,
                                            const ChannelParams& channel);
std::vector<double> allocate_extreme_all(std::span<const UEProfile> profiles,
                                         std::span<const double> h,
                                         const ChannelParams& channel);
// theta = 1 is active-only, theta = 0 is all-share.
std::vector<double> allocate_interpolated(std::span<const std::uint8_t> schedule_row,
                                          std::span<const UEProfile> profiles,
                                          std::span<const double> h,
                                          const ChannelParams& channel, double theta);
std::vector<double> allocate_round(BandwidthPolicy policy,
                                   std::span<const std::uint8_t> schedule_row,
                                   std::span<const UEProfile> profiles,
                                   std::span<const double> h,
                                   const ChannelParams& channel, double theta);

// Channel draws for round k, one per UE.
std::vector<double> draw_round(const CounterRng& rng, std::size_t round,
                               std::span<const UEProfile> profiles,
                               const ChannelParams& channel);

BandwidthPlan build_plan(const SchedulingMatrix& schedule,
                         std::span<const UEProfile> profiles,
                         const ChannelParams& channel, const CounterRng& rng,
                         BandwidthPolicy policy, double theta = 0.5);

enum class PlanViolationKind {
  kNegativeShare,
  kBudgetExceeded,       // sum_i b_k^i > B
  kScheduledWithoutShare,
  kPayloadOverflow,      // payload within one upload exceeds Z
  kPayloadIncomplete,    // a completed upload did not carry exactly Z
  kUnequalFinish,        // scheduled UEs of a round finished at different times
};

std::string_view to_string(PlanViolationKind kind);

struct PlanViolation {
  PlanViolationKind kind;
  std::size_t round = 0;
  std::size_t ue = 0;
  double value = 0.0;
};

struct ValidityReport {
  std::vector<PlanViolation> violations;
  bool valid() const noexcept { return violations.empty(); }
  bool has(PlanViolationKind kind) const;
};

// Audits a plan and (optionally empty) ledger against the schedule. Shapes
// must agree (DomainError otherwise). Equal finishing is only checked for
// rounds whose scheduled uploads all appear in the ledger.
ValidityReport verify_plan(const BandwidthPlan& plan, const PayloadLedger& ledger,
                           const SchedulingMatrix& schedule,
                           const ChannelParams& channel);

}  // namespace ssfl
