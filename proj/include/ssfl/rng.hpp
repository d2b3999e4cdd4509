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

#include <cstdint>
#include <random>

namespace ssfl {

// Independent randomness domains derived from one master seed.
enum class Stream : std::uint64_t {
  kChannel = 1,
  kGradient = 2,
  kPartition = 3,
  kTask = 4,
  kPlacement = 5,
};

// Stateless, counter-based random source. Every draw is a pure function of
// (seed, stream, counters), so draws can be requested in any order or from
// any thread and still reproduce bit-for-bit.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t bits(Stream stream, std::uint64_t a, std::uint64_t b = 0,
                     std::uint64_t c = 0) const noexcept {
    std::uint64_t h = mix(seed_ ^ 0x9e3779b97f4a7c15ULL);
    h = mix(h ^ static_cast<std::uint64_t>(stream));
    h = mix(h ^ a);
    h = mix(h ^ (b + 0x632be59bd9b4e019ULL));
    h = mix(h ^ (c + 0x85157af5a3b3ab6bULL));
    return h;
  }

  // Uniform on (0, 1]; never returns 0 so log() is always finite.
  double uniform_open0(Stream stream, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0) const noexcept {
    return (static_cast<double>(bits(stream, a, b, c) >> 11) + 1.0) *
           0x1.0p-53;
  }

  // A sequential engine keyed by the counters, for draws that need a stream
  // of variates (noise vectors, minibatch indices).
  std::mt19937_64 engine(Stream stream, std::uint64_t a, std::uint64_t b = 0,
                         std::uint64_t c = 0) const {
    return std::mt19937_64(bits(stream, a, b, c));
  }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

}  // namespace ssfl
