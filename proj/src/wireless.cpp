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

#include "ssfl/wireless.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ssfl/error.hpp"

namespace ssfl {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

void UEProfile::validate() const {
  require_positive(transmit_power_w, "transmit_power_w");
  require_positive(distance_m, "distance_m");
  require_positive(cpu_hz, "cpu_hz");
  if (!(cycles_per_sample >= 0.0) || !std::isfinite(cycles_per_sample)) {
    throw DomainError("cycles_per_sample must be non-negative");
  }
  if (sample_count < 1) throw DomainError("sample_count must be >= 1");
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("eta must lie in (0, 1]");
}

void validate_population(std::span<const UEProfile> profiles) {
  if (profiles.empty()) throw DomainError("population is empty");
  double total = 0.0;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    profiles[i].validate();
    if (profiles[i].id != i) throw DomainError("profile ids must equal their index");
    total += profiles[i].eta;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("participation targets must sum to 1 (got " +
                      std::to_string(total) + ")");
  }
}

double dbm_per_hz_to_w(double dbm_per_hz) {
  return std::pow(10.0, (dbm_per_hz - 30.0) / 10.0);
}

ChannelParams::ChannelParams(double total_bandwidth_hz, double path_loss_exp,
                             double noise_psd_w_per_hz, double rayleigh_scale,
                             Fading fading)
    : bandwidth_(total_bandwidth_hz),
      kappa_(path_loss_exp),
      n0_(noise_psd_w_per_hz),
      scale_(rayleigh_scale),
      fading_(fading) {
  require_positive(bandwidth_, "total_bandwidth_hz");
  require_positive(kappa_, "path_loss_exp");
  require_positive(n0_, "noise_psd_w_per_hz");
  require_positive(scale_, "rayleigh_scale");
}

ChannelParams ChannelParams::from_dbm(double total_bandwidth_hz,
                                      double path_loss_exp,
                                      double noise_dbm_per_hz,
                                      double rayleigh_scale, Fading fading) {
  return ChannelParams(total_bandwidth_hz, path_loss_exp,
                       dbm_per_hz_to_w(noise_dbm_per_hz), rayleigh_scale,
                       fading);
}

ChannelDraw sample_channel(const CounterRng& rng, std::size_t round,
                           const UEProfile& ue, const ChannelParams& channel) {
  const double scale = channel.rayleigh_scale();
  double h = scale * std::sqrt(std::numbers::pi / 2.0);
  if (channel.fading() == Fading::kRayleigh) {
    // Inverse CDF: F(h) = 1 - exp(-h^2 / (2 s^2)).
    const double u = rng.uniform_open0(Stream::kChannel, round, ue.id);
    h = scale * std::sqrt(-2.0 * std::log(u));
    // u == 1 maps to h == 0, which the channel model forbids.
    if (h <= 0.0) h = scale * 0x1.0p-26;
  }
  return ChannelDraw{round, ue.id, h};
}

double received_power_w(const UEProfile& ue, double h,
                        const ChannelParams& channel) {
  return ue.transmit_power_w * h *
         std::pow(ue.distance_m, -channel.path_loss_exp());
}

double uplink_rate(double bandwidth_hz, double received_power_w,
                   double noise_psd_w_per_hz) {
  if (!(bandwidth_hz > 0.0)) throw DomainError("bandwidth must be positive");
  return bandwidth_hz *
         std::log1p(received_power_w / (bandwidth_hz * noise_psd_w_per_hz));
}

double uplink_rate(double bandwidth_hz, const UEProfile& ue, double h,
                   const ChannelParams& channel) {
  return uplink_rate(bandwidth_hz, received_power_w(ue, h, channel),
                     channel.noise_psd_w_per_hz());
}

double comm_delay(double payload, double rate) {
  if (!(rate > 0.0)) throw DomainError("rate must be positive");
  if (payload < 0.0) throw DomainError("payload must be non-negative");
  return payload / rate;
}

double compute_delay(const UEProfile& ue) {
  return ue.cycles_per_sample * static_cast<double>(ue.sample_count) /
         ue.cpu_hz;
}

double round_time(bool starts_new_iteration, double comm_s, double cmp_s) {
  return starts_new_iteration ? comm_s + cmp_s : comm_s;
}

}  // namespace ssfl
