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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "ssfl/error.hpp"
#include "ssfl/scheduling.hpp"

using namespace ssfl;

namespace {

// Printed 5 x 4 example matrix with A = 2.
SchedulingMatrix printed_example() {
  return SchedulingMatrix(5, 4, 2, 2,
                          {1, 1, 0, 0,
                           0, 0, 1, 1,
                           1, 0, 1, 0,
                           0, 1, 0, 1,
                           1, 1, 0, 0});
}

std::vector<double> equal(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

}  // namespace

TEST_CASE("matrix construction invariants") {
  CHECK_THROWS_AS(SchedulingMatrix(1, 2, 1, 1, {1, 1}), DomainError);
  CHECK_THROWS_AS(SchedulingMatrix(1, 2, 1, 1, {2, 0}), DomainError);
  CHECK_THROWS_AS(SchedulingMatrix(1, 2, 3, 1, {1, 1}), DomainError);
  CHECK_THROWS_AS(SchedulingMatrix(1, 2, 1, 0, {1, 0}), DomainError);
  CHECK_THROWS_AS(SchedulingMatrix(2, 2, 1, 1, {1, 0}), DomainError);
}

TEST_CASE("relative frequency of the printed example") {
  const auto stats = relative_frequency(printed_example());
  CHECK(stats.counts == std::vector<std::size_t>{3, 3, 2, 2});
  CHECK(stats.achieved_eta[0] == doctest::Approx(0.3));
  CHECK(stats.achieved_eta[1] == doctest::Approx(0.3));
  CHECK(stats.achieved_eta[2] == doctest::Approx(0.2));
  CHECK(stats.achieved_eta[3] == doctest::Approx(0.2));
}

TEST_CASE("relative frequency edge cases") {
  const SchedulingMatrix column(3, 2, 1, 1, {1, 0, 1, 0, 1, 0});
  CHECK(relative_frequency(column).achieved_eta[0] == 1.0);
  const SchedulingMatrix rr(4, 4, 2, 1, {1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 1, 1});
  for (double e : relative_frequency(rr).achieved_eta) CHECK(e == 0.25);
}

TEST_CASE("greedy schedule reproduces the period-2 pattern") {
  const auto m = greedy_schedule(equal(4), 2, 4);
  const SchedulingMatrix expected(4, 4, 2, 4, {1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 1, 1});
  CHECK(m == expected);
  CHECK(detect_period(m) == std::size_t{2});
}

TEST_CASE("greedy schedule small cases") {
  const auto single = greedy_schedule(std::vector<double>{1.0}, 1, 5);
  for (std::size_t k = 0; k < 5; ++k) CHECK(single.at(k, 0));
  const auto skew = greedy_schedule(std::vector<double>{0.5, 0.25, 0.25}, 1, 4);
  CHECK(relative_frequency(skew).counts == std::vector<std::size_t>{2, 1, 1});
  CHECK_THROWS_AS(greedy_schedule(equal(2), 3, 4), DomainError);
  CHECK_THROWS_AS(greedy_schedule(std::vector<double>{0.3, 0.3}, 1, 4), DomainError);
}

TEST_CASE("staleness windows") {
  CHECK(check_staleness(printed_example(), 2).empty());
  // UE 1 never scheduled, S = 1: every window of two rounds misses it.
  const SchedulingMatrix never(4, 2, 1, 1, {1, 0, 1, 0, 1, 0, 1, 0});
  const auto v = check_staleness(never, 1);
  CHECK(v.size() == 3);
  for (const auto& x : v) CHECK(x.ue == 1);
  // S = K: the window covers the horizon.
  const SchedulingMatrix once(3, 3, 1, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  CHECK(check_staleness(once, 3).empty());
}

TEST_CASE("eta lower bound") {
  CHECK(eta_lower_bound_check(std::vector<double>{0.3}, 2, 10)[0]);
  CHECK_FALSE(eta_lower_bound_check(std::vector<double>{0.1}, 2, 10)[0]);
  CHECK(eta_lower_bound_check(std::vector<double>{0.2}, 2, 10)[0]);
}

TEST_CASE("randomized grid: row sums, drift and the sqrt(A) bound") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 32;
    const std::size_t K = 1 + rng() % 512;
    // Rational targets with a common denominator.
    std::vector<std::size_t> w(n);
    for (auto& x : w) x = 1 + rng() % 5;
    const std::size_t qi = std::accumulate(w.begin(), w.end(), std::size_t{0});
    const double q = static_cast<double>(qi);
    // A UE joins at most once per round, so targets above 1/A are unreachable.
    const std::size_t A = std::max<std::size_t>(
        1, std::min<std::size_t>(1 + rng() % n, qi / *std::max_element(w.begin(), w.end())));
    std::vector<double> eta(n);
    for (std::size_t i = 0; i < n; ++i) eta[i] = static_cast<double>(w[i]) / q;
    const auto m = greedy_schedule(eta, A, K);
    const auto stats = relative_frequency(m, eta);
    for (std::size_t k = 0; k < K; ++k) {
      std::size_t sum = 0;
      double eta_sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sum += m.at(k, i);
        if (m.at(k, i)) eta_sum += eta[i];
      }
      CHECK(sum == A);
      CHECK(eta_sum <= std::sqrt(static_cast<double>(A)) + 1e-12);
    }
    std::size_t total = 0;
    for (auto c : stats.counts) total += c;
    CHECK(total == A * K);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(stats.achieved_eta[i] - eta[i]) <= static_cast<double>(A) / static_cast<double>(K) + 1e-12);
    }
  }
}

TEST_CASE("periodicity for rational targets") {
  const auto m = greedy_schedule(std::vector<double>{0.5, 0.25, 0.25}, 1, 64);
  const auto p = detect_period(m);
  REQUIRE(p.has_value());
  CHECK(*p == 4);
  const auto m2 = greedy_schedule(equal(6), 2, 60);
  CHECK(detect_period(m2) == std::size_t{3});
}
