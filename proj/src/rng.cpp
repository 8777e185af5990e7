// Copyright 2026 The papir authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "papir/rng.hpp"

#include <cmath>

#include "papir/errors.hpp"

namespace papir {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
  std::uint64_t state = master;
  std::uint64_t s = splitmix64(state);
  state = s ^ (a * 0xD6E8FEB86659FD93ULL);
  s = splitmix64(state);
  state = s ^ (b * 0xCA5A826395121157ULL);
  s = splitmix64(state);
  state = s ^ (c * 0xA24BAED4963EE407ULL);
  return splitmix64(state);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw usage_error("Rng::below with zero bound");
  // Rejection sampling over the largest multiple of bound.
  std::uint64_t limit = bound * ((~0ULL) / bound);
  for (;;) {
    std::uint64_t x = next_u64();
    if (x < limit) return x % bound;
  }
}

double Rng::unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  double u1 = unit();
  double u2 = unit();
  while (u1 <= 0.0) u1 = unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace papir
