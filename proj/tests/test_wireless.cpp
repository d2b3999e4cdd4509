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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "ssfl/error.hpp"
#include "ssfl/wireless.hpp"

using namespace ssfl;

namespace {

UEProfile ue(double p = 0.01, double d = 100.0) {
  UEProfile u;
  u.transmit_power_w = p;
  u.distance_m = d;
  u.cycles_per_sample = 1e4;
  u.cpu_hz = 1e9;
  u.sample_count = 100;
  u.eta = 1.0;
  return u;
}

}  // namespace

TEST_CASE("channel draws are pure in (seed, round, ue)") {
  const ChannelParams ch(1e6, 3.8, 1e-20, 40.0);
  const CounterRng rng(7);
  const auto a = sample_channel(rng, 0, ue(), ch);
  const auto b = sample_channel(rng, 0, ue(), ch);
  CHECK(a.h == b.h);
  CHECK(a.h > 0.0);
  UEProfile other = ue();
  other.id = 1;
  CHECK(sample_channel(rng, 0, other, ch).h != a.h);
  CHECK(sample_channel(rng, 1, ue(), ch).h != a.h);
  CHECK(sample_channel(CounterRng(8), 0, ue(), ch).h != a.h);
}

TEST_CASE("channel parameters reject non-positive values") {
  CHECK_THROWS_AS(ChannelParams(1e6, 3.8, 1e-20, 0.0), DomainError);
  CHECK_THROWS_AS(ChannelParams(0.0, 3.8, 1e-20, 40.0), DomainError);
  CHECK_THROWS_AS(ChannelParams(1e6, -1.0, 1e-20, 40.0), DomainError);
  CHECK_THROWS_AS(ChannelParams(1e6, 3.8, 0.0, 40.0), DomainError);
}

TEST_CASE("Rayleigh sample mean matches scale*sqrt(pi/2)") {
  const ChannelParams ch(1e6, 3.8, 1e-20, 40.0);
  const CounterRng rng(11);
  double sum = 0.0;
  constexpr int kDraws = 100000;
  for (int k = 0; k < kDraws; ++k) sum += sample_channel(rng, static_cast<std::size_t>(k), ue(), ch).h;
  const double mean = sum / kDraws;
  CHECK(std::abs(mean / oracle::rayleigh_mean(40.0) - 1.0) < 0.02);
}

TEST_CASE("fixed fading pins h to the Rayleigh mean") {
  const ChannelParams ch(1e6, 3.8, 1e-20, 40.0, Fading::kFixed);
  CHECK(sample_channel(CounterRng(1), 3, ue(), ch).h == doctest::Approx(oracle::rayleigh_mean(40.0)));
}

TEST_CASE("noise conversion from dBm/Hz") {
  CHECK(dbm_per_hz_to_w(30.0) == doctest::Approx(1.0));
  CHECK(dbm_per_hz_to_w(-174.0) == doctest::Approx(std::pow(10.0, -20.4)).epsilon(1e-12));
}

TEST_CASE("uplink rate examples") {
  // P / N0 = e - 1 at b = 1 gives ln(e) = 1.
  CHECK(uplink_rate(1.0, std::numbers::e - 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(uplink_rate(5.0, 0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(uplink_rate(0.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(uplink_rate(-1.0, 1.0, 1.0), DomainError);
  // Through a profile: p h d^-kappa / N0 = e - 1.
  const ChannelParams ch(1.0, 1.0, 1.0, 1.0);
  UEProfile u = ue(std::numbers::e - 1.0, 1.0);
  CHECK(uplink_rate(1.0, u, 1.0, ch) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(comm_delay(7.5, uplink_rate(1.0, u, 1.0, ch)) == doctest::Approx(7.5).epsilon(1e-14));
}

TEST_CASE("uplink rate is increasing and concave in bandwidth") {
  const double snr = 1e8;
  std::vector<double> b;
  for (int j = 0; j <= 120; ++j) b.push_back(std::pow(10.0, -3.0 + 0.1 * j));
  for (std::size_t j = 1; j < b.size(); ++j) CHECK(uplink_rate(b[j], snr, 1.0) > uplink_rate(b[j - 1], snr, 1.0));
  for (std::size_t j = 1; j + 1 < b.size(); ++j) {
    // Slope over consecutive intervals is non-increasing.
    const double s1 = (uplink_rate(b[j], snr, 1.0) - uplink_rate(b[j - 1], snr, 1.0)) / (b[j] - b[j - 1]);
    const double s2 = (uplink_rate(b[j + 1], snr, 1.0) - uplink_rate(b[j], snr, 1.0)) / (b[j + 1] - b[j]);
    CHECK(s2 < s1);
  }
  const double B = 1e6;
  CHECK(uplink_rate(1e-9 * B, 1e-8, 4e-21) < 1e-3 * uplink_rate(B, 1e-8, 4e-21));
}

TEST_CASE("delays") {
  CHECK(comm_delay(0.0, 5.0) == 0.0);
  CHECK(comm_delay(1e6, 1e6) == 1.0);
  CHECK_THROWS_AS(comm_delay(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(comm_delay(1.0, -2.0), DomainError);
  CHECK_THROWS_AS(comm_delay(-1.0, 2.0), DomainError);
  UEProfile u = ue();
  CHECK(compute_delay(u) == doctest::Approx(1e-3));
  const double before = compute_delay(u);
  u.cpu_hz *= 2.0;
  CHECK(compute_delay(u) == doctest::Approx(before / 2.0));
  CHECK(round_time(true, 1.0, 0.5) == 1.5);
  CHECK(round_time(false, 1.0, 0.5) == 1.0);
  CHECK(round_time(true, 0.0, 0.0) == 0.0);
}

TEST_CASE("profile and population validation") {
  UEProfile u = ue();
  u.sample_count = 0;
  CHECK_THROWS_AS(u.validate(), DomainError);
  u = ue();
  u.eta = 0.0;
  CHECK_THROWS_AS(u.validate(), DomainError);
  u = ue();
  u.distance_m = 0.0;
  CHECK_THROWS_AS(u.validate(), DomainError);
  std::vector<UEProfile> pop{ue(), ue()};
  pop[1].id = 1;
  pop[0].eta = 0.5;
  pop[1].eta = 0.5;
  CHECK_NOTHROW(validate_population(pop));
  pop[1].eta = 0.5 + 1e-9;
  CHECK_THROWS_AS(validate_population(pop), DomainError);
  pop[1].eta = 0.5;
  pop[1].id = 3;
  CHECK_THROWS_AS(validate_population(pop), DomainError);
}

TEST_CASE("a full channel trace is reproducible") {
  const ChannelParams ch(1e6, 3.8, 1e-20, 40.0);
  auto trace = [&] {
    std::vector<double> out;
    for (std::size_t k = 0; k < 50; ++k) {
      for (std::size_t i = 0; i < 8; ++i) {
        UEProfile u = ue();
        u.id = i;
        out.push_back(sample_channel(CounterRng(99), k, u, ch).h);
      }
    }
    return out;
  };
  CHECK(trace() == trace());
}
