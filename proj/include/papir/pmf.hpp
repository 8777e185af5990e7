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

#include <cstdint>
#include <functional>

#include "papir/profile.hpp"

namespace papir {

// Cap on exact combinatorial work (elementary terms) before an operation
// refuses and raises resource_error.
inline constexpr std::uint64_t kDefaultEnumerationLimit = 10'000'000;

// All index arguments below are *sorted positions* (1-based); the demand
// distribution is defined relative to the non-increasing weight order.

// Sum of weights outside T.
Rational lambda_bar(const PopularityProfile& profile, const IndexSet& t);

// P(S = s) = 1 / C(K, M): side-information sets are uniform.
Rational pmf_s(std::uint32_t k, std::uint32_t m);

// P(W = w | S = s) = lambda_w / lambda_bar(s), zero when w is in s.
Rational pmf_w_given_s(const PopularityProfile& profile, MessageIndex w, const IndexSet& s);

// P(W = w, S = s) = pmf_s * pmf_w_given_s.
Rational joint_pmf(const PopularityProfile& profile, std::uint32_t m, MessageIndex w,
                   const IndexSet& s);

// Marginal P(W = w), the exact sum of joint_pmf over all C(K-1, M) side
// sets. Uses a subset-sum counting fast path when the integer weights are
// small, otherwise direct enumeration; both are exact.
Rational pmf_w(const PopularityProfile& profile, std::uint32_t m, MessageIndex w,
               std::uint64_t enumeration_limit = kDefaultEnumerationLimit);

// P(W = w) for every w in one pass; much cheaper than K separate calls.
std::vector<Rational> pmf_w_all(const PopularityProfile& profile, std::uint32_t m,
                                std::uint64_t enumeration_limit = kDefaultEnumerationLimit);

// Marginals for selected sorted positions only, sharing one counting pass;
// result is aligned with `positions`.
std::vector<Rational> pmf_w_many(const PopularityProfile& profile, std::uint32_t m,
                                 const IndexSet& positions,
                                 std::uint64_t enumeration_limit = kDefaultEnumerationLimit);

// Visits every M-subset of `universe` in lexicographic order.
void for_each_subset(const IndexSet& universe, std::uint32_t m,
                     const std::function<void(const IndexSet&)>& visit);

}  // namespace papir
