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

#include "ssfl/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "ssfl/error.hpp"
#include "ssfl/lambert_w.hpp"

namespace ssfl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DomainError(std::string("size mismatch: ") + what);
}

// Inverse of b -> b ln(1 + a / b) at rate `rate`, with Gamma = rate / a.
// Returns +inf when the rate is out of reach.
double inverse_rate(double rate, double snr_per_hz) {
  if (rate <= 0.0) return 0.0;
  const double gamma = rate / snr_per_hz;
  if (!(gamma < 1.0)) return kInf;
  const double x = -gamma * std::exp(-gamma);
  if (x == 0.0) {
    // -Gamma e^-Gamma underflowed; W_-1(x) ~ ln(-x) - ln(-ln(-x)).
    const double l1 = std::log(gamma) - gamma;
    const double w = l1 - std::log(-l1);
    return rate / (-(w + gamma));
  }
  if (gamma > 1.0 - 1e-15) return kInf;
  const double w = lambert_w(x, LambertBranch::kLower);
  const double denom = -(w + gamma);
  if (!(denom > 0.0)) return kInf;
  return rate / denom;
}

}  // namespace

std::string_view to_string(BandwidthPolicy policy) {
  switch (policy) {
    case BandwidthPolicy::kActiveExtreme: return "active-only-extreme";
    case BandwidthPolicy::kAllShareExtreme: return "all-share-extreme";
    case BandwidthPolicy::kInterpolated: return "interpolated";
    case BandwidthPolicy::kFixedEqual: return "fixed-equal";
  }
  return "unknown";
}

BandwidthPolicy parse_bandwidth_policy(std::string_view text) {
  if (text == "active-only-extreme" || text == "active") return BandwidthPolicy::kActiveExtreme;
  if (text == "all-share-extreme" || text == "all") return BandwidthPolicy::kAllShareExtreme;
  if (text == "interpolated") return BandwidthPolicy::kInterpolated;
  if (text == "fixed-equal") return BandwidthPolicy::kFixedEqual;
  throw DomainError("unknown bandwidth policy: " + std::string(text));
}

double lambert_gamma(const UEProfile& ue, double h, const ChannelParams& channel,
                     double total_time_s, double payload) {
  if (!(payload > 0.0)) throw DomainError("payload must be positive");
  const double budget = total_time_s - compute_delay(ue);
  if (!(budget > 0.0)) {
    throw InfeasibleError("time budget does not exceed the computation delay");
  }
  return channel.noise_psd_w_per_hz() * payload /
         (budget * received_power_w(ue, h, channel));
}

double lambert_denominator(double gamma) {
  const double x = -gamma * std::exp(-gamma);
  // The principal root of this argument is the trivial w = -Gamma when
  // Gamma <= 1; the other branch carries the information.
  const LambertBranch branch = gamma < 1.0 ? LambertBranch::kLower : LambertBranch::kPrincipal;
  const double w = lambert_w(x, branch);
  const double factor = std::abs(w + gamma);
  if (factor <= 1e-12) {
    throw DegenerateError("Lambert denominator vanishes at the branch point (Gamma = 1)");
  }
  return factor;
}

double min_share_bound(const UEProfile& ue, double h, const ChannelParams& channel,
                       std::size_t n, double total_time_s, double payload) {
  const double gamma = lambert_gamma(ue, h, channel, total_time_s, payload);
  const double budget = total_time_s - compute_delay(ue);
  return channel.total_bandwidth_hz() * static_cast<double>(n) * ue.eta * payload /
         (budget * lambert_denominator(gamma));
}

void require_share_feasible(double bound, const ChannelParams& channel,
                            std::size_t participants) {
  if (participants == 0) throw DomainError("participants must be >= 1");
  if (bound > channel.total_bandwidth_hz() / static_cast<double>(participants)) {
    throw InfeasibleError("minimum share exceeds B / A");
  }
}

double bandwidth_for_rate(double rate, double received_power_w,
                          double noise_psd_w_per_hz) {
  if (rate < 0.0) throw DomainError("rate must be non-negative");
  const double b = inverse_rate(rate, received_power_w / noise_psd_w_per_hz);
  if (std::isinf(b)) throw InfeasibleError("rate exceeds the infinite-bandwidth limit");
  return b;
}

std::vector<double> equalize_weighted_rates(std::span<const double> received_power_w,
                                            std::span<const double> weights,
                                            double noise_psd_w_per_hz,
                                            double total_bandwidth_hz) {
  require_sizes(received_power_w.size(), weights.size(), "powers vs weights");
  const std::size_t m = weights.size();
  if (m == 0) throw DomainError("no UE to allocate bandwidth to");
  if (m == 1) return {total_bandwidth_hz};

  std::vector<double> snr(m);
  double lambda_hi = kInf;
  for (std::size_t j = 0; j < m; ++j) {
    if (!(weights[j] > 0.0)) throw DomainError("weights must be positive");
    if (!(received_power_w[j] > 0.0)) throw DomainError("received power must be positive");
    snr[j] = received_power_w[j] / noise_psd_w_per_hz;
    lambda_hi = std::min(lambda_hi, snr[j] / weights[j]);
  }

  std::vector<double> shares(m);
  auto fill = [&](double lambda) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      shares[j] = inverse_rate(lambda * weights[j], snr[j]);
      sum += shares[j];
    }
    return sum;
  };

  double lo = 0.0;
  double hi = lambda_hi;
  double lambda = 0.5 * hi;
  for (int iter = 0; iter < 4096; ++iter) {
    lambda = 0.5 * (lo + hi);
    if (lambda <= lo || lambda >= hi) break;
    const double sum = fill(lambda);
    if (std::abs(sum - total_bandwidth_hz) <= 1e-13 * total_bandwidth_hz) break;
    (sum < total_bandwidth_hz ? lo : hi) = lambda;
  }
  const double sum = fill(lambda);
  const double scale = total_bandwidth_hz / sum;
  for (double& b : shares) b *= scale;
  return shares;
}

std::vector<double> allocate_extreme_active(std::span<const std::uint8_t> schedule_row,
                                            std::span<const UEProfile> profiles,
                                            std::span<const double> h,
                                            const ChannelParams& channel) {
  require_sizes(schedule_row.size(), profiles.size(), "schedule row vs profiles");
  require_sizes(h.size(), profiles.size(), "draws vs profiles");
  std::vector<std::size_t> active;
  std::vector<double> power;
  std::vector<double> weight;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (schedule_row[i] == 0) continue;
    active.push_back(i);
    power.push_back(received_power_w(profiles[i], h[i], channel));
    weight.push_back(profiles[i].eta);
  }
  if (active.empty()) throw DomainError("no scheduled UE in this round");
  const auto part = equalize_weighted_rates(power, weight, channel.noise_psd_w_per_hz(),
                                            channel.total_bandwidth_hz());
  std::vector<double> shares(profiles.size(), 0.0);
  for (std::size_t j = 0; j < active.size(); ++j) shares[active[j]] = part[j];
  return shares;
}

std::vector<double> allocate_extreme_all(std::span<const UEProfile> profiles,
                                         std::span<const double> h,
                                         const ChannelParams& channel) {
  require_sizes(h.size(), profiles.size(), "draws vs profiles");
  std::vector<double> power(profiles.size());
  std::vector<double> weight(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    power[i] = received_power_w(profiles[i], h[i], channel);
    weight[i] = profiles[i].eta;
  }
  return equalize_weighted_rates(power, weight, channel.noise_psd_w_per_hz(),
                                 channel.total_bandwidth_hz());
}

std::vector<double> allocate_interpolated(std::span<const std::uint8_t> schedule_row,
                                          std::span<const UEProfile> profiles,
                                          std::span<const double> h,
                                          const ChannelParams& channel, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("theta must lie in [0, 1]");
  const auto active = allocate_extreme_active(schedule_row, profiles, h, channel);
  const auto all = allocate_extreme_all(profiles, h, channel);
  std::vector<double> shares(profiles.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    shares[i] = theta * active[i] + (1.0 - theta) * all[i];
    sum += shares[i];
  }
  if (sum > channel.total_bandwidth_hz()) {
    const double scale = channel.total_bandwidth_hz() / sum;
    for (double& b : shares) b *= scale;
  }
  return shares;
}

std::vector<double> allocate_round(BandwidthPolicy policy,
                                   std::span<const std::uint8_t> schedule_row,
                                   std::span<const UEProfile> profiles,
                                   std::span<const double> h,
                                   const ChannelParams& channel, double theta) {
  switch (policy) {
    case BandwidthPolicy::kActiveExtreme:
      return allocate_extreme_active(schedule_row, profiles, h, channel);
    case BandwidthPolicy::kAllShareExtreme:
      return allocate_extreme_all(profiles, h, channel);
    case BandwidthPolicy::kInterpolated:
      return allocate_interpolated(schedule_row, profiles, h, channel, theta);
    case BandwidthPolicy::kFixedEqual:
      return std::vector<double>(profiles.size(),
                                 channel.total_bandwidth_hz() / static_cast<double>(profiles.size()));
  }
  throw DomainError("unknown bandwidth policy");
}

std::vector<double> draw_round(const CounterRng& rng, std::size_t round,
                               std::span<const UEProfile> profiles,
                               const ChannelParams& channel) {
  std::vector<double> h(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    h[i] = sample_channel(rng, round, profiles[i], channel).h;
  }
  return h;
}

BandwidthPlan build_plan(const SchedulingMatrix& schedule,
                         std::span<const UEProfile> profiles,
                         const ChannelParams& channel, const CounterRng& rng,
                         BandwidthPolicy policy, double theta) {
  require_sizes(schedule.ues(), profiles.size(), "schedule vs profiles");
  BandwidthPlan plan;
  plan.policy = policy;
  plan.shares_hz = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(schedule.rounds()),
                                         static_cast<Eigen::Index>(schedule.ues()));
  for (std::size_t k = 0; k < schedule.rounds(); ++k) {
    const auto h = draw_round(rng, k, profiles, channel);
    const auto shares = allocate_round(policy, schedule.row(k), profiles, h, channel, theta);
    for (std::size_t i = 0; i < shares.size(); ++i) {
      plan.shares_hz(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = shares[i];
    }
  }
  return plan;
}

std::string_view to_string(PlanViolationKind kind) {
  switch (kind) {
    case PlanViolationKind::kNegativeShare: return "negative-share";
    case PlanViolationKind::kBudgetExceeded: return "bandwidth-budget";
    case PlanViolationKind::kScheduledWithoutShare: return "scheduled-without-share";
    case PlanViolationKind::kPayloadOverflow: return "payload-overflow";
    case PlanViolationKind::kPayloadIncomplete: return "payload-incomplete";
    case PlanViolationKind::kUnequalFinish: return "unequal-finish";
  }
  return "unknown";
}

bool ValidityReport::has(PlanViolationKind kind) const {
  return std::ranges::any_of(violations, [kind](const PlanViolation& v) { return v.kind == kind; });
}

ValidityReport verify_plan(const BandwidthPlan& plan, const PayloadLedger& ledger,
                           const SchedulingMatrix& schedule,
                           const ChannelParams& channel) {
  const auto rounds = static_cast<Eigen::Index>(schedule.rounds());
  const auto ues = static_cast<Eigen::Index>(schedule.ues());
  if (plan.shares_hz.rows() != rounds || plan.shares_hz.cols() != ues) {
    throw DomainError("plan shape does not match the schedule");
  }
  if (ledger.payload.size() != 0 &&
      (ledger.payload.rows() != rounds || ledger.payload.cols() != ues)) {
    throw DomainError("ledger shape does not match the schedule");
  }

  ValidityReport report;
  const double budget = channel.total_bandwidth_hz();
  for (Eigen::Index k = 0; k < rounds; ++k) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < ues; ++i) {
      const double b = plan.shares_hz(k, i);
      sum += b;
      const auto ku = static_cast<std::size_t>(k);
      const auto iu = static_cast<std::size_t>(i);
      if (b < 0.0) report.violations.push_back({PlanViolationKind::kNegativeShare, ku, iu, b});
      if (schedule.at(ku, iu) && !(b > 0.0)) {
        report.violations.push_back({PlanViolationKind::kScheduledWithoutShare, ku, iu, b});
      }
    }
    if (sum > budget * (1.0 + 1e-12)) {
      report.violations.push_back(
          {PlanViolationKind::kBudgetExceeded, static_cast<std::size_t>(k), 0, sum});
    }
  }

  const double z = ledger.total_payload;
  const double tol = 1e-9 * std::max(z, 1e-300);
  // (round -> finish times of its scheduled completed uploads)
  std::map<std::size_t, std::vector<double>> finishes;
  for (const UploadRecord& up : ledger.uploads) {
    if (up.carried > z + tol) {
      report.violations.push_back({PlanViolationKind::kPayloadOverflow, up.round, up.ue, up.carried});
    }
    if (up.completed && std::abs(up.carried - z) > tol) {
      report.violations.push_back({PlanViolationKind::kPayloadIncomplete, up.round, up.ue, up.carried});
    }
    if (up.completed && up.round < schedule.rounds() && schedule.at(up.round, up.ue)) {
      finishes[up.round].push_back(up.time_s);
    }
  }
  for (const auto& [round, times] : finishes) {
    if (times.size() != schedule.participants_per_round()) continue;
    const auto [lo, hi] = std::ranges::minmax(times);
    if (hi - lo > 1e-9 * std::max(std::abs(hi), 1e-300)) {
      report.violations.push_back({PlanViolationKind::kUnequalFinish, round, 0, hi - lo});
    }
  }
  return report;
}

}  // namespace ssfl
