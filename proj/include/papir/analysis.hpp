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

#include <string>
#include <vector>

#include "papir/schemes.hpp"

namespace papir {

// Exact rate figures for one (profile, params) instance. The bounds nest:
// r_mds <= r_lb <= r_ub, and r_lb * expected_download_units = 1.
struct RateReport {
  Rational r_ub;                       // (M+1)/K
  Rational r_lb;                       // randomized-selection achievable rate
  Rational r_mds;                      // 1/(K-M)
  Rational expected_download_units;    // expected combos per round
};

Rational rate_upper_bound(const ProblemParams& params);
Rational rate_mds(const ProblemParams& params);

// Closed form:
//   [ K-M - (K-M - K/(M+1)) * gamma_base * (joint({1},[2:M+1]) / pmf_w(1)) * C(K-1,M) ]^-1
Rational rate_lower_bound(const PopularityProfile& profile, const ProblemParams& params,
                          std::uint64_t enumeration_limit = kDefaultEnumerationLimit);

// Direct expectation over every (W, S): joint * [gamma*N + (1-gamma)*(K-M)].
// Kept as an explicit enumeration so it can cross-check the closed form.
Rational expected_download(const PopularityProfile& profile, const ProblemParams& params,
                           std::uint64_t enumeration_limit = kDefaultEnumerationLimit);

RateReport make_rate_report(const PopularityProfile& profile, const ProblemParams& params,
                            std::uint64_t enumeration_limit = kDefaultEnumerationLimit);

enum class SelectionPolicy { pc_only, mds_only, rcs };

std::string policy_name(SelectionPolicy policy);

struct PrivacyViolation {
  std::string query_repr;  // canonical partition in caller ids, or "mds"
  MessageIndex w = 0;      // caller id
  Rational posterior;
  Rational prior;
};

struct PrivacyVerdict {
  bool passed = true;
  std::vector<PrivacyViolation> violations;
};

// Exhaustive privacy audit. Enumerates every canonical partition with
// positive probability under the policy (plus the scheme-II query value),
// computes the exact posterior P(W = w | Q = q) by total probability, and
// compares it with the prior P(W = w). Equality must hold for every pair;
// the verdict lists every failure. A pc_only audit of a non-uniform
// profile is expected to fail — that is a correct verdict, not an error.
PrivacyVerdict privacy_oracle(const PopularityProfile& profile, const ProblemParams& params,
                              SelectionPolicy policy,
                              std::uint64_t enumeration_limit = kDefaultEnumerationLimit);

// Query probability and per-demand posteriors for one given partition
// under a policy; the inspection window used by the CLI demo and tests.
struct PosteriorReport {
  Rational query_prob;
  std::vector<Rational> posteriors;  // by caller id, 1-based at index-1
};

PosteriorReport partition_posteriors(const PopularityProfile& profile,
                                     const ProblemParams& params, SelectionPolicy policy,
                                     const PartitionQuery& query_caller_ids,
                                     std::uint64_t enumeration_limit = kDefaultEnumerationLimit);

// Brute-force argmin over i in [1 : K-M] of P(S = [K-M+1:K] | W = i)
// (sorted positions). For non-increasing weights the minimum sits at
// i = K-M; ties break toward the largest index so the claim stays
// checkable under ties.
MessageIndex argmin_conditional_tail(const PopularityProfile& profile, std::uint32_t m,
                                     std::uint64_t enumeration_limit = kDefaultEnumerationLimit);

// Unrestricted base-gamma search: min over ALL (W*, S*) of
//   min{ 1, joint(W*,S*) * pmf_w(1) / (joint({1},[2:M+1]) * pmf_w(W*)) }.
Rational gamma_base_exhaustive(const PopularityProfile& profile, const ProblemParams& params,
                               std::uint64_t enumeration_limit = kDefaultEnumerationLimit);

// True iff the exhaustive search equals rcs_gamma_base's restricted
// minimization exactly.
bool gamma_base_search_equivalent(const PopularityProfile& profile, const ProblemParams& params,
                                  std::uint64_t enumeration_limit = kDefaultEnumerationLimit);

}  // namespace papir
