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

#include "papir/analysis.hpp"

#include <algorithm>

#include "papir/errors.hpp"

namespace papir {

namespace {

IndexSet sorted_range(MessageIndex lo, MessageIndex hi) {
  IndexSet out;
  out.reserve(hi - lo + 1);
  for (MessageIndex i = lo; i <= hi; ++i) out.push_back(i);
  return out;
}

void check_profile_matches(const PopularityProfile& profile, const ProblemParams& params) {
  if (profile.size() != params.k) throw usage_error("profile size does not match K");
}

IndexSet universe_without(std::uint32_t k, MessageIndex skip) {
  IndexSet out;
  out.reserve(k - 1);
  for (MessageIndex i = 1; i <= k; ++i) {
    if (i != skip) out.push_back(i);
  }
  return out;
}

}  // namespace

Rational rate_upper_bound(const ProblemParams& params) {
  Rational r(static_cast<unsigned long>(params.m) + 1, static_cast<unsigned long>(params.k));
  r.canonicalize();
  return r;
}

Rational rate_mds(const ProblemParams& params) {
  Rational r(1, static_cast<unsigned long>(params.k - params.m));
  r.canonicalize();
  return r;
}

Rational rate_lower_bound(const PopularityProfile& profile, const ProblemParams& params,
                          std::uint64_t enumeration_limit) {
  params.require_rcs();
  check_profile_matches(profile, params);
  const std::uint32_t k = params.k;
  const std::uint32_t m = params.m;

  Rational gamma_base = rcs_gamma_base(profile, params, enumeration_limit);
  Rational joint_base = joint_pmf(profile, m, 1, sorted_range(2, m + 1));
  Rational pw1 = pmf_w_many(profile, m, {1}, enumeration_limit).front();

  Rational parts(static_cast<unsigned long>(params.parts()));
  Rational k_minus_m(static_cast<unsigned long>(k - m));
  Rational choose(binomial(k - 1, m));
  Rational denom = k_minus_m - (k_minus_m - parts) * gamma_base * (joint_base / pw1) * choose;
  return Rational(1) / denom;
}

Rational expected_download(const PopularityProfile& profile, const ProblemParams& params,
                           std::uint64_t enumeration_limit) {
  params.require_rcs();
  check_profile_matches(profile, params);
  const std::uint32_t k = params.k;
  const std::uint32_t m = params.m;

  BigInt work = binomial(k - 1, m) * k;
  if (work > enumeration_limit) {
    throw resource_error("expected_download: " + work.get_str() +
                         " (W,S) terms exceed the limit");
  }

  RcsPolicy policy = RcsPolicy::build(profile, params, enumeration_limit);
  Rational parts(static_cast<unsigned long>(params.parts()));
  Rational k_minus_m(static_cast<unsigned long>(k - m));

  BalancedRationalSum total;
  for (MessageIndex w = 1; w <= k; ++w) {
    for_each_subset(universe_without(k, w), m, [&](const IndexSet& s) {
      Rational joint = joint_pmf(profile, m, w, s);
      Rational gamma = policy.gamma_sorted(w, s);
      total.add(joint * (gamma * parts + (Rational(1) - gamma) * k_minus_m));
    });
  }
  return total.total();
}

RateReport make_rate_report(const PopularityProfile& profile, const ProblemParams& params,
                            std::uint64_t enumeration_limit) {
  RateReport report;
  report.r_ub = rate_upper_bound(params);
  report.r_mds = rate_mds(params);
  report.r_lb = rate_lower_bound(profile, params, enumeration_limit);
  report.expected_download_units = expected_download(profile, params, enumeration_limit);
  if (report.r_lb * report.expected_download_units != 1) {
    throw internal_error("rate reciprocity violated");
  }
  if (report.r_mds > report.r_lb || report.r_lb > report.r_ub) {
    throw internal_error("rate sandwich violated");
  }
  return report;
}

std::string policy_name(SelectionPolicy policy) {
  switch (policy) {
    case SelectionPolicy::pc_only:
      return "pc";
    case SelectionPolicy::mds_only:
      return "mds";
    case SelectionPolicy::rcs:
      return "rcs";
  }
  return "?";
}

namespace {

// Gamma evaluation shared by the oracle paths. pc_only pins 1, mds_only
// pins 0, rcs uses the calibrated table.
struct PolicyGamma {
  SelectionPolicy policy;
  const RcsPolicy* table = nullptr;

  Rational operator()(MessageIndex w_sorted, const IndexSet& s_sorted) const {
    switch (policy) {
      case SelectionPolicy::pc_only:
        return Rational(1);
      case SelectionPolicy::mds_only:
        return Rational(0);
      case SelectionPolicy::rcs:
        return table->gamma_sorted(w_sorted, s_sorted);
    }
    return Rational(0);
  }
};

}  // namespace

PrivacyVerdict privacy_oracle(const PopularityProfile& profile, const ProblemParams& params,
                              SelectionPolicy policy, std::uint64_t enumeration_limit) {
  params.require_rcs();
  check_profile_matches(profile, params);
  const std::uint32_t k = params.k;
  const std::uint32_t m = params.m;

  // Work estimate: one term per (partition, compatible demand) plus the
  // (W,S) sweep for the scheme-II posterior.
  BigInt n_partitions = partition_count(k, m);
  BigInt work = n_partitions * k + binomial(k - 1, m) * k;
  if (work > enumeration_limit) {
    throw resource_error("privacy oracle would evaluate " + work.get_str() +
                         " terms, over the limit of " + std::to_string(enumeration_limit));
  }

  std::vector<Rational> priors = pmf_w_all(profile, m, enumeration_limit);
  RcsPolicy table;
  if (policy == SelectionPolicy::rcs) table = RcsPolicy::build(profile, params, enumeration_limit);
  PolicyGamma gamma{policy, &table};

  PrivacyVerdict verdict;
  auto record = [&](const std::string& query_repr, MessageIndex w_sorted,
                    const Rational& posterior, const Rational& prior) {
    verdict.passed = false;
    verdict.violations.push_back(
        PrivacyViolation{query_repr, profile.to_caller(w_sorted), posterior, prior});
  };

  Rational one_over_l = Rational(1) / Rational(leftover_partition_count(k, m));

  // Partition-query values. For a given partition, demand w is compatible
  // only with the side set completing w's own part.
  for_each_equal_partition(
      k, m,
      [&](const std::vector<IndexSet>& parts) {
        std::vector<Rational> contribution(k);
        Rational query_prob(0);
        for (const auto& part : parts) {
          for (MessageIndex w : part) {
            IndexSet side;
            side.reserve(m);
            for (MessageIndex i : part) {
              if (i != w) side.push_back(i);
            }
            Rational c = joint_pmf(profile, m, w, side) * gamma(w, side) * one_over_l;
            contribution[w - 1] = c;
            query_prob += c;
          }
        }
        if (query_prob == 0) return;  // unreachable query value under this policy
        std::string repr;
        for (MessageIndex w = 1; w <= k; ++w) {
          Rational posterior = contribution[w - 1] / query_prob;
          if (posterior != priors[w - 1]) {
            if (repr.empty()) {
              std::vector<IndexSet> caller_parts;
              caller_parts.reserve(parts.size());
              for (const auto& part : parts) caller_parts.push_back(profile.to_caller(part));
              repr = PartitionQuery::canonical(std::move(caller_parts)).to_string();
            }
            record(repr, w, posterior, priors[w - 1]);
          }
        }
      },
      enumeration_limit);

  // The scheme-II query value, reached with probability 1 - sum joint*gamma.
  std::vector<Rational> mds_contribution(k, Rational(0));
  BalancedRationalSum mds_mass_sum;
  for (MessageIndex w = 1; w <= k; ++w) {
    BalancedRationalSum per_w;
    for_each_subset(universe_without(k, w), m, [&](const IndexSet& s) {
      per_w.add(joint_pmf(profile, m, w, s) * (Rational(1) - gamma(w, s)));
    });
    mds_contribution[w - 1] = per_w.total();
    mds_mass_sum.add(mds_contribution[w - 1]);
  }
  Rational mds_mass = mds_mass_sum.total();
  if (mds_mass != 0) {
    for (MessageIndex w = 1; w <= k; ++w) {
      Rational posterior = mds_contribution[w - 1] / mds_mass;
      if (posterior != priors[w - 1]) record("mds", w, posterior, priors[w - 1]);
    }
  }
  return verdict;
}

PosteriorReport partition_posteriors(const PopularityProfile& profile,
                                     const ProblemParams& params, SelectionPolicy policy,
                                     const PartitionQuery& query_caller_ids,
                                     std::uint64_t enumeration_limit) {
  params.require_rcs();
  check_profile_matches(profile, params);
  query_caller_ids.validate(params.k, params.m);
  const std::uint32_t k = params.k;
  const std::uint32_t m = params.m;

  RcsPolicy table;
  if (policy == SelectionPolicy::rcs) table = RcsPolicy::build(profile, params, enumeration_limit);
  PolicyGamma gamma{policy, &table};

  Rational one_over_l = Rational(1) / Rational(leftover_partition_count(k, m));

  std::vector<Rational> contribution(k, Rational(0));
  Rational query_prob(0);
  for (const auto& part : query_caller_ids.parts) {
    for (MessageIndex w : part) {
      IndexSet side;
      side.reserve(m);
      for (MessageIndex i : part) {
        if (i != w) side.push_back(i);
      }
      MessageIndex w_sorted = profile.to_sorted(w);
      IndexSet side_sorted = profile.to_sorted(side);
      Rational c =
          joint_pmf(profile, m, w_sorted, side_sorted) * gamma(w_sorted, side_sorted) * one_over_l;
      contribution[w - 1] = c;  // caller id slot
      query_prob += c;
    }
  }

  PosteriorReport report;
  report.query_prob = query_prob;
  report.posteriors.assign(k, Rational(0));
  if (query_prob != 0) {
    for (MessageIndex w = 1; w <= k; ++w) {
      report.posteriors[w - 1] = contribution[w - 1] / query_prob;
    }
  }
  return report;
}

MessageIndex argmin_conditional_tail(const PopularityProfile& profile, std::uint32_t m,
                                     std::uint64_t enumeration_limit) {
  const std::uint32_t k = static_cast<std::uint32_t>(profile.size());
  if (m < 1 || m > k - 1) throw usage_error("M out of range");
  IndexSet tail = sorted_range(k - m + 1, k);
  IndexSet candidates = sorted_range(1, k - m);
  std::vector<Rational> marginals = pmf_w_many(profile, m, candidates, enumeration_limit);

  MessageIndex best = 0;
  Rational best_value;
  for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
    MessageIndex i = candidates[idx];
    Rational objective = joint_pmf(profile, m, i, tail) / marginals[idx];
    if (best == 0 || objective <= best_value) {  // ties move toward larger index
      best = i;
      best_value = objective;
    }
  }
  return best;
}

Rational gamma_base_exhaustive(const PopularityProfile& profile, const ProblemParams& params,
                               std::uint64_t enumeration_limit) {
  params.require_rcs();
  check_profile_matches(profile, params);
  const std::uint32_t k = params.k;
  const std::uint32_t m = params.m;

  BigInt work = binomial(k - 1, m) * k;
  if (work > enumeration_limit) {
    throw resource_error("exhaustive gamma search exceeds the enumeration limit");
  }

  std::vector<Rational> marginals = pmf_w_all(profile, m, enumeration_limit);
  Rational joint_base = joint_pmf(profile, m, 1, sorted_range(2, m + 1));
  const Rational& pw1 = marginals.front();

  Rational best(1);
  for (MessageIndex w = 1; w <= k; ++w) {
    for_each_subset(universe_without(k, w), m, [&](const IndexSet& s) {
      Rational candidate = joint_pmf(profile, m, w, s) * pw1 / (joint_base * marginals[w - 1]);
      if (candidate < best) best = candidate;
    });
  }
  return best;
}

bool gamma_base_search_equivalent(const PopularityProfile& profile, const ProblemParams& params,
                                  std::uint64_t enumeration_limit) {
  return gamma_base_exhaustive(profile, params, enumeration_limit) ==
         rcs_gamma_base(profile, params, enumeration_limit);
}

}  // namespace papir
