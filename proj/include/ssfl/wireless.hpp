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

// Physical-layer timing of an OFDMA uplink: Rayleigh small-scale fading,
// Shannon-type uplink rate in nats/s, transmission and computation delays.
//
// Note on symbols: a device's BS distance (distance_m) and its CPU cycles per
// data point (cycles_per_sample) are unrelated quantities that are commonly
// written with the same letter in the literature.

#pragma once

#include <cstddef>
#include <span>

#include "ssfl/rng.hpp"

namespace ssfl {

struct UEProfile {
  std::size_t id = 0;
  double transmit_power_w = 0.0;
  double distance_m = 0.0;
  double cycles_per_sample = 0.0;
  double cpu_hz = 0.0;
  std::size_t sample_count = 1;
  // Relative participation frequency target.
  double eta = 0.0;

  void validate() const;

  bool operator==(const UEProfile&) const = default;
};

// Checks every profile, id == index, and that the targets sum to one within
// 1e-12.
void validate_population(std::span<const UEProfile> profiles);

enum class Fading {
  kRayleigh,  // h redrawn per (round, UE)
  kFixed,     // h pinned to the Rayleigh mean scale*sqrt(pi/2)
};

double dbm_per_hz_to_w(double dbm_per_hz);

class ChannelParams {
 public:
  ChannelParams(double total_bandwidth_hz, double path_loss_exp,
                double noise_psd_w_per_hz, double rayleigh_scale,
                Fading fading = Fading::kRayleigh);

  static ChannelParams from_dbm(double total_bandwidth_hz,
                                double path_loss_exp,
                                double noise_dbm_per_hz,
                                double rayleigh_scale,
                                Fading fading = Fading::kRayleigh);

  double total_bandwidth_hz() const noexcept { return bandwidth_; }
  double path_loss_exp() const noexcept { return kappa_; }
  double noise_psd_w_per_hz() const noexcept { return n0_; }
  double rayleigh_scale() const noexcept { return scale_; }
  Fading fading() const noexcept { return fading_; }

  bool operator==(const ChannelParams&) const = default;

 private:
  double bandwidth_;
  double kappa_;
  double n0_;
  double scale_;
  Fading fading_;
};

struct ChannelDraw {
  std::size_t round = 0;
  std::size_t ue = 0;
  double h = 0.0;
};

// Small-scale coefficient for (round, ue). Pure in (seed, round, ue).
ChannelDraw sample_channel(const CounterRng& rng, std::size_t round,
                           const UEProfile& ue, const ChannelParams& channel);

// p * h * d^-kappa, the received power before noise.
double received_power_w(const UEProfile& ue, double h,
                        const ChannelParams& channel);

// b * ln(1 + P / (b * N0)) in nats/s. Throws DomainError for b <= 0.
double uplink_rate(double bandwidth_hz, double received_power_w,
                   double noise_psd_w_per_hz);
double uplink_rate(double bandwidth_hz, const UEProfile& ue, double h,
                   const ChannelParams& channel);

// Payload over rate. Throws DomainError for rate <= 0 or negative payload.
double comm_delay(double payload, double rate);

// cycles_per_sample * sample_count / cpu_hz
double compute_delay(const UEProfile& ue);

double round_time(bool starts_new_iteration, double comm_s, double cmp_s);

}  // namespace ssfl
