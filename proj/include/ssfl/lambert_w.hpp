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

#pragma once

namespace ssfl {

enum class LambertBranch {
  kPrincipal,  // W_0:  x >= -1/e, returns w >= -1
  kLower,      // W_-1: -1/e <= x < 0, returns w <= -1
};

// Solves w * exp(w) = x on the requested real branch. Inputs a few ulps below
// -1/e are treated as the branch point. Throws DomainError outside the branch
// domain.
double lambert_w(double x, LambertBranch branch);

}  // namespace ssfl
