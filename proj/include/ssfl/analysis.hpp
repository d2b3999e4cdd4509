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


// Convergence calculus for semi-synchronous meta-learning: smoothness and
// variance constants, the FOSP bound after K rounds, and the K/A estimators.

#pragma once

#include <cstddef>

namespace ssfl {

struct ConvergenceConstants {
  double L = 0.0;        // gradient Lipschitz constant
  double C = 0.0;        // gradient norm bound
  double rho = 0.0;      // Hessian Lipschitz constant
  double sigma_G = 0.0;  // per-sample gradient std
  double sigma_H = 0.0;  // per-sample Hessian std
  double gamma_G = 0.0;  // inter-UE gradient diversity
  double gamma_H = 0.0;  // inter-UE Hessian diversity
  double alpha = 0.0;    // local step
  double beta = 0.0;     // global step
  double S = 1.0;
  double A = 1.0;
  double K = 1.0;
  // Batch sizes may be +inf (full-batch limit).
  double D_in = 1.0;
  double D_o = 1.0;
  double D_h = 1.0;
  double F0_minus_Fstar = 0.0;

  // Throws DomainError on a negative field, alpha outside (0, 1/L] (alpha = 0
  // is accepted as the no-adaptation case) or a batch size below one.
  void validate() const;

  bool operator==(const ConvergenceConstants&) const = default;
};

// 4L + alpha rho C
double smoothness_LF(const ConvergenceConstants& c);

// 12 [C^2 + sigma_G^2 (1/D_o + (alpha L)^2 / D_in)] [1 + sigma_H^2 alpha^2 / (4 D_h)] - 12 C^2
double sigma_F_sq(const ConvergenceConstants& c);

// 3 C^2 alpha^2 gamma_H^2 + 192 gamma_G^2
double gamma_F_sq(const ConvergenceConstants& c);

// L_F beta^2 - beta + 2 L_F^2 beta^2 S^2 <= 1
bool step_condition(const ConvergenceConstants& c);

// 2 gap / (beta K) + 4 (L_F beta + 2 L_F^2 beta^2 S^2)(sigma_F^2 + gamma_F^2) sqrt(A).
// Throws PreconditionError when the step condition fails.
double theorem1_bound(const ConvergenceConstants& c);

struct RoundEstimate {
  std::size_t K = 0;
  std::size_t A = 0;  // not capped at n; the caller does that
};

// K* = ceil(min(2 gap / (beta eps), S / eta_min)),
// A* = round(min(eps^2 / (16 (L_F beta + 2 L_F^2 beta^2 S^2)^2 (sigma_F^2 + gamma_F^2)^2),
//                1 / (eta_min S))), at least 1.
// Throws DomainError for eps <= 0 or eta_min <= 0, DegenerateError when a
// denominator vanishes.
RoundEstimate estimate_K_A(const ConvergenceConstants& c, double epsilon,
                           double eta_min, double staleness_bound);

// avg_sq_grad_norm <= epsilon
bool fosp_check(double avg_sq_grad_norm, double epsilon);

}  // namespace ssfl
