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

#pragma once

#include <vector>

#include "papir/analysis.hpp"
#include "papir/pmf.hpp"
#include "papir/profile.hpp"
#include "papir/rng.hpp"
#include "papir/schemes.hpp"

namespace papir::test {

inline Rational rat(long num, long den = 1) { return make_rational(num, den); }

// The running example: K=6, M=1, first message twice as popular.
inline PopularityProfile skewed_profile() {
  return PopularityProfile::from_weights({rat(2), rat(1), rat(1), rat(1), rat(1), rat(1)});
}

inline ProblemParams skewed_params() { return ProblemParams::make(6, 1, 7, 1); }

// Random positive rational weights, sorted by the profile itself.
inline PopularityProfile random_rational_profile(std::size_t k, Rng& rng, long max_num = 20,
                                                 long max_den = 8) {
  std::vector<Rational> weights;
  weights.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    long num = static_cast<long>(rng.below(static_cast<std::uint64_t>(max_num))) + 1;
    long den = static_cast<long>(rng.below(static_cast<std::uint64_t>(max_den))) + 1;
    weights.push_back(rat(num, den));
  }
  return PopularityProfile::from_weights(std::move(weights));
}

inline PopularityProfile random_nonuniform_profile(std::size_t k, Rng& rng) {
  for (;;) {
    PopularityProfile p = random_rational_profile(k, rng);
    if (!p.is_uniform()) return p;
  }
}

// Independent brute-force marginal: direct sum of joint_pmf over all side
// sets, no counting shortcuts. The oracle the fast paths are checked against.
inline Rational brute_force_pmf_w(const PopularityProfile& profile, std::uint32_t m,
                                  MessageIndex w) {
  IndexSet universe;
  for (MessageIndex i = 1; i <= profile.size(); ++i) {
    if (i != w) universe.push_back(i);
  }
  Rational total(0);
  for_each_subset(universe, m, [&](const IndexSet& s) { total += joint_pmf(profile, m, w, s); });
  return total;
}

}  // namespace papir::test
