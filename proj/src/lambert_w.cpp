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

#include "ssfl/lambert_w.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ssfl/error.hpp"

namespace ssfl {

namespace {

constexpr double kMinusInvE = -0.36787944117144232159552377016146;

// Series in p = sqrt(2 (e x + 1)) around the branch point; the sign of p
// selects the branch.
double branch_point_guess(double x, double sign) {
  const double p = sign * std::sqrt(std::max(0.0, 2.0 * (std::numbers::e * x + 1.0)));
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
}

double initial_guess(double x, LambertBranch branch) {
  const double near = std::numbers::e * x + 1.0;
  if (branch == LambertBranch::kPrincipal) {
    if (near < 0.3) return branch_point_guess(x, 1.0);
    if (x < 3.0) return std::log1p(x) * (1.0 - std::log1p(std::log1p(x)) / (2.0 + std::log1p(x)));
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    return l1 - l2 + l2 / l1;
  }
  if (near < 0.3) return branch_point_guess(x, -1.0);
  const double l1 = std::log(-x);
  const double l2 = std::log(-l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace

double lambert_w(double x, LambertBranch branch) {
  if (std::isnan(x)) throw DomainError("lambert_w: NaN argument");
  if (x < kMinusInvE) {
    if (x >= kMinusInvE * (1.0 + 8.0 * std::numeric_limits<double>::epsilon())) {
      return -1.0;
    }
    throw DomainError("lambert_w: argument below -1/e");
  }
  if (branch == LambertBranch::kLower && x >= 0.0) {
    throw DomainError("lambert_w: lower branch requires x < 0");
  }
  if (x == kMinusInvE) return -1.0;
  if (branch == LambertBranch::kPrincipal) {
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return x;
  }

  double w = initial_guess(x, branch);
  for (int iter = 0; iter < 64; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    // Halley step.
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    if (denom == 0.0 || !std::isfinite(denom)) break;
    const double step = f / denom;
    double next = w - step;
    // Keep iterates on the requested side of the branch point.
    if (branch == LambertBranch::kPrincipal && next < -1.0) next = 0.5 * (w - 1.0);
    if (branch == LambertBranch::kLower && next > -1.0) next = 0.5 * (w - 1.0);
    const bool done = std::abs(next - w) <=
                      4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(next));
    w = next;
    if (done) break;
  }
  return w;
}

}  // namespace ssfl
