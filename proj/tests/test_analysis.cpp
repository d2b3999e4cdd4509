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
#include <limits>
#include <random>

#include "ssfl/analysis.hpp"
#include "ssfl/error.hpp"

using namespace ssfl;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ConvergenceConstants random_constants(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 2.0);
  ConvergenceConstants c;
  c.L = 0.5 + u(gen);
  c.C = u(gen);
  c.rho = u(gen);
  c.sigma_G = u(gen);
  c.sigma_H = u(gen);
  c.gamma_G = u(gen);
  c.gamma_H = u(gen);
  c.alpha = u(gen) / (2.0 * c.L);
  c.beta = 0.01 + u(gen) / 10.0;
  c.S = 1.0 + std::floor(4.0 * u(gen));
  c.A = 1.0 + std::floor(5.0 * u(gen));
  c.K = 100.0;
  c.D_in = 1.0 + std::floor(20.0 * u(gen));
  c.D_o = 1.0 + std::floor(20.0 * u(gen));
  c.D_h = 1.0 + std::floor(20.0 * u(gen));
  c.F0_minus_Fstar = u(gen);
  return c;
}

}  // namespace

TEST_CASE("smoothness constant") {
  ConvergenceConstants c;
  c.L = 1.0;
  c.rho = 2.0;
  c.C = 3.0;
  CHECK(smoothness_LF(c) == 4.0);
  c.alpha = 0.1;
  CHECK(smoothness_LF(c) == doctest::Approx(4.6));
  ConvergenceConstants z;
  z.alpha = 0.5;
  z.C = 5.0;
  CHECK(smoothness_LF(z) == 0.0);
}

TEST_CASE("sigma_F squared") {
  ConvergenceConstants c;
  c.C = 1.0;
  c.L = 1.0;
  c.alpha = 1.0;
  CHECK(sigma_F_sq(c) == 0.0);
  c.sigma_G = 1.0;
  CHECK(sigma_F_sq(c) == doctest::Approx(24.0));
  c.sigma_H = 1.0;
  c.D_in = c.D_o = c.D_h = kInf;
  CHECK(sigma_F_sq(c) == 0.0);
}

TEST_CASE("gamma_F squared") {
  ConvergenceConstants c;
  CHECK(gamma_F_sq(c) == 0.0);
  c.C = 1.0;
  c.alpha = 1.0;
  c.gamma_H = 1.0;
  CHECK(gamma_F_sq(c) == doctest::Approx(3.0));
  ConvergenceConstants g;
  g.gamma_G = 1.0;
  CHECK(gamma_F_sq(g) == doctest::Approx(192.0));
}

TEST_CASE("step-size condition") {
  ConvergenceConstants c;
  c.beta = 0.0;
  CHECK(step_condition(c));
  // L_F = 4L with alpha = 0.
  c.L = 0.25;
  c.S = 1.0;
  c.beta = 0.1;
  CHECK(step_condition(c));
  c.L = 2.5;
  c.S = 10.0;
  c.beta = 1.0;
  CHECK_FALSE(step_condition(c));
}

TEST_CASE("step condition is monotone in beta") {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 300; ++t) {
    auto c = random_constants(gen);
    for (double beta = 2.0; beta > 1e-4; beta *= 0.8) {
      c.beta = beta;
      if (step_condition(c)) {
        for (double smaller = beta * 0.9; smaller > 1e-5; smaller *= 0.7) {
          c.beta = smaller;
          CHECK(step_condition(c));
        }
        break;
      }
    }
  }
}

TEST_CASE("variance and diversity terms are non-negative and monotone") {
  std::mt19937_64 gen(2);
  for (int t = 0; t < 300; ++t) {
    const auto c = random_constants(gen);
    CHECK(sigma_F_sq(c) >= 0.0);
    CHECK(gamma_F_sq(c) >= 0.0);
    for (double ConvergenceConstants::*field :
         {&ConvergenceConstants::sigma_G, &ConvergenceConstants::sigma_H}) {
      auto d = c;
      d.*field *= 1.5;
      CHECK(sigma_F_sq(d) >= sigma_F_sq(c));
    }
    for (double ConvergenceConstants::*field :
         {&ConvergenceConstants::gamma_G, &ConvergenceConstants::gamma_H}) {
      auto d = c;
      d.*field *= 1.5;
      CHECK(gamma_F_sq(d) >= gamma_F_sq(c));
    }
  }
}

TEST_CASE("FOSP bound") {
  ConvergenceConstants c;
  c.F0_minus_Fstar = 1.0;
  c.beta = 0.1;
  c.K = 100.0;
  CHECK(theorem1_bound(c) == doctest::Approx(0.2));
  c.K = 1e12;
  CHECK(theorem1_bound(c) < 1e-10);

  ConvergenceConstants n;
  n.L = 1.0;
  n.beta = 0.05;
  n.K = 100.0;
  n.gamma_G = 0.1;
  n.A = 2.0;
  const double a2 = theorem1_bound(n);
  n.A = 4.0;
  CHECK(theorem1_bound(n) == doctest::Approx(a2 * std::sqrt(2.0)).epsilon(1e-12));

  n.beta = 1.0;
  n.S = 10.0;
  CHECK_THROWS_AS(theorem1_bound(n), PreconditionError);
}

TEST_CASE("K and A estimators") {
  ConvergenceConstants c;
  c.F0_minus_Fstar = 1.0;
  c.beta = 0.1;
  c.L = 0.1;
  c.gamma_G = 0.01;
  const auto est = estimate_K_A(c, 0.1, 0.05, 2.0);
  CHECK(est.K == 40);

  // Independent evaluation of the A formula.
  const double lf = 0.4;
  const double factor = lf * 0.1 + 2.0 * lf * lf * 0.01 * 4.0;
  const double spread = 192.0 * 1e-4;
  const double a_var = 0.01 / (16.0 * factor * factor * spread * spread);
  CHECK(est.A == static_cast<std::size_t>(std::round(std::min(a_var, 1.0 / (0.05 * 2.0)))));

  ConvergenceConstants flat = c;
  flat.gamma_G = 0.0;
  CHECK_THROWS_AS(estimate_K_A(flat, 0.1, 0.05, 2.0), DegenerateError);
  CHECK_THROWS_AS(estimate_K_A(c, 0.0, 0.05, 2.0), DomainError);
  CHECK_THROWS_AS(estimate_K_A(c, 0.1, 0.0, 2.0), DomainError);

  for (double eps = 1.0; eps > 1e-4; eps /= 2.0) {
    CHECK(estimate_K_A(c, eps / 2.0, 0.05, 2.0).K >= estimate_K_A(c, eps, 0.05, 2.0).K);
    CHECK(estimate_K_A(c, eps, 0.05, 2.0).A >= 1);
  }
}

TEST_CASE("FOSP check is a closed inequality") {
  CHECK(fosp_check(0.0, 1e-3));
  CHECK(fosp_check(0.5, 0.5));
  CHECK_FALSE(fosp_check(0.51, 0.5));
  CHECK_THROWS_AS(fosp_check(-1.0, 0.5), DomainError);
}

TEST_CASE("constant validation") {
  ConvergenceConstants c;
  c.L = 2.0;
  c.alpha = 0.5;
  CHECK_NOTHROW(c.validate());
  c.alpha = 0.6;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.alpha = 0.1;
  c.D_in = 0.5;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.D_in = kInf;
  CHECK_NOTHROW(c.validate());
  c.sigma_G = -1.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
}
