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


#include "ssfl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssfl/error.hpp"

namespace ssfl {

namespace {

double staleness_factor(const ConvergenceConstants& c) {
  const double lf = smoothness_LF(c);
  return lf * c.beta + 2.0 * lf * lf * c.beta * c.beta * c.S * c.S;
}

}  // namespace

void ConvergenceConstants::validate() const {
  for (double v : {L, C, rho, sigma_G, sigma_H, gamma_G, gamma_H, alpha, beta, S, A, K,
                   F0_minus_Fstar}) {
    if (!(v >= 0.0)) throw DomainError("convergence constants must be non-negative");
  }
  if (L > 0.0 && alpha > 1.0 / L) throw DomainError("alpha must not exceed 1/L");
  for (double d : {D_in, D_o, D_h}) {
    if (!(d >= 1.0)) throw DomainError("batch sizes must be >= 1");
  }
}

double smoothness_LF(const ConvergenceConstants& c) {
  return 4.0 * c.L + c.alpha * c.rho * c.C;
}

double sigma_F_sq(const ConvergenceConstants& c) {
  const double al = c.alpha * c.L;
  const double sg2 = c.sigma_G * c.sigma_G;
  const double inner = c.C * c.C + sg2 * (1.0 / c.D_o + al * al / c.D_in);
  const double hess = 1.0 + c.sigma_H * c.sigma_H * c.alpha * c.alpha / (4.0 * c.D_h);
  // Expanded so the zero-variance case is exactly zero.
  return 12.0 * (inner * hess - c.C * c.C);
}

double gamma_F_sq(const ConvergenceConstants& c) {
  return 3.0 * c.C * c.C * c.alpha * c.alpha * c.gamma_H * c.gamma_H +
         192.0 * c.gamma_G * c.gamma_G;
}

bool step_condition(const ConvergenceConstants& c) {
  const double lf = smoothness_LF(c);
  const double b = c.beta;
  return lf * b * b - b + 2.0 * lf * lf * b * b * c.S * c.S <= 1.0;
}

double theorem1_bound(const ConvergenceConstants& c) {
  if (!step_condition(c)) throw PreconditionError("step-size condition does not hold");
  if (!(c.beta > 0.0) || !(c.K > 0.0)) {
    throw PreconditionError("beta and K must be positive");
  }
  const double first = 2.0 * c.F0_minus_Fstar / (c.beta * c.K);
  const double second =
      4.0 * staleness_factor(c) * (sigma_F_sq(c) + gamma_F_sq(c)) * std::sqrt(c.A);
  return first + second;
}

RoundEstimate estimate_K_A(const ConvergenceConstants& c, double epsilon,
                           double eta_min, double staleness_bound) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (!(eta_min > 0.0)) throw DomainError("eta_min must be positive");
  if (!(staleness_bound > 0.0)) throw DegenerateError("staleness bound must be positive");
  if (!(c.beta > 0.0)) throw DegenerateError("beta must be positive");

  const double k_gap = 2.0 * c.F0_minus_Fstar / (c.beta * epsilon);
  const double k_stale = staleness_bound / eta_min;
  const double k = std::ceil(std::min(k_gap, k_stale));

  const double spread = sigma_F_sq(c) + gamma_F_sq(c);
  const double factor = staleness_factor(c);
  const double denom = 16.0 * factor * factor * spread * spread;
  if (!(denom > 0.0)) {
    throw DegenerateError("A* is undefined when (sigma_F^2 + gamma_F^2) or the step factor is zero");
  }
  const double a_var = epsilon * epsilon / denom;
  const double a_stale = 1.0 / (eta_min * staleness_bound);
  const double a = std::max(1.0, std::round(std::min(a_var, a_stale)));

  constexpr double kMax = static_cast<double>(std::numeric_limits<std::size_t>::max() / 2);
  return RoundEstimate{static_cast<std::size_t>(std::clamp(k, 1.0, kMax)),
                       static_cast<std::size_t>(std::min(a, kMax))};
}

bool fosp_check(double avg_sq_grad_norm, double epsilon) {
  if (avg_sq_grad_norm < 0.0 || epsilon < 0.0) {
    throw DomainError("fosp_check inputs must be non-negative");
  }
  return avg_sq_grad_norm <= epsilon;
}

}  // namespace ssfl
