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

#include "papir/pmf.hpp"

#include <map>

#include "papir/errors.hpp"

namespace papir {

Rational lambda_bar(const PopularityProfile& profile, const IndexSet& t) {
  for (MessageIndex i : t) {
    if (i < 1 || i > profile.size()) {
      throw usage_error("lambda_bar: index out of range: " + std::to_string(i));
    }
  }
  Rational sum = profile.total_weight();
  for (MessageIndex i : t) sum -= profile.lambda(i);
  return sum;
}

Rational pmf_s(std::uint32_t k, std::uint32_t m) {
  if (m < 1 || m > k - 1) throw usage_error("pmf_s: M out of range");
  Rational r(BigInt(1), binomial(k, m));
  r.canonicalize();
  return r;
}

Rational pmf_w_given_s(const PopularityProfile& profile, MessageIndex w, const IndexSet& s) {
  if (w < 1 || w > profile.size()) throw usage_error("demand index out of range");
  if (set_contains(s, w)) return Rational(0);
  return profile.lambda(w) / lambda_bar(profile, s);
}

Rational joint_pmf(const PopularityProfile& profile, std::uint32_t m, MessageIndex w,
                   const IndexSet& s) {
  if (s.size() != m) throw usage_error("joint_pmf: side set size does not match M");
  return pmf_s(static_cast<std::uint32_t>(profile.size()), m) * pmf_w_given_s(profile, w, s);
}

void for_each_subset(const IndexSet& universe, std::uint32_t m,
                     const std::function<void(const IndexSet&)>& visit) {
  const std::size_t n = universe.size();
  if (m > n) return;
  std::vector<std::size_t> pick(m);
  for (std::size_t i = 0; i < m; ++i) pick[i] = i;
  IndexSet current(m);
  for (;;) {
    for (std::size_t i = 0; i < m; ++i) current[i] = universe[pick[i]];
    visit(current);
    // Advance to the next lexicographic combination.
    std::size_t i = m;
    while (i > 0 && pick[i - 1] == n - m + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < m; ++j) pick[j] = pick[j - 1] + 1;
  }
}

namespace {

// Subset-sum counting fast path. Usable when the integer weights are small
// enough that a (size x sum) table is cheap; counts fit u64 comfortably for
// any instance the enumeration budget admits.
struct SubsetSumTable {
  std::uint32_t m;
  std::uint64_t max_sum;
  // counts[j][s] = number of j-subsets of all K weights with sum s.
  std::vector<std::vector<std::uint64_t>> counts;

  static constexpr std::uint64_t kMaxCells = 1u << 22;

  static bool applicable(const PopularityProfile& profile, std::uint32_t m) {
    BigInt max_w = 0;
    for (const auto& a : profile.integer_weights()) {
      if (a > max_w) max_w = a;
    }
    if (!max_w.fits_ulong_p()) return false;
    std::uint64_t cells = (std::uint64_t{m} + 1) * (max_w.get_ui() * m + 1);
    return cells <= kMaxCells;
  }

  SubsetSumTable(const PopularityProfile& profile, std::uint32_t m_in) : m(m_in) {
    std::uint64_t max_w = 0;
    for (const auto& a : profile.integer_weights()) {
      max_w = std::max<std::uint64_t>(max_w, a.get_ui());
    }
    max_sum = max_w * m;
    counts.assign(m + 1, std::vector<std::uint64_t>(max_sum + 1, 0));
    counts[0][0] = 1;
    for (const auto& a : profile.integer_weights()) {
      std::uint64_t w = a.get_ui();
      for (std::uint32_t j = m; j >= 1; --j) {
        for (std::uint64_t s = max_sum; s >= w; --s) {
          counts[j][s] += counts[j - 1][s - w];
          if (s == w) break;
        }
      }
    }
  }

  // Counts of m-subsets avoiding index `excluded` (sorted position), by sum.
  // Standard removal: subsets either avoid the index or contain it.
  std::vector<std::vector<std::uint64_t>> excluding(std::uint64_t weight) const {
    std::vector<std::vector<std::uint64_t>> excl(m + 1,
                                                 std::vector<std::uint64_t>(max_sum + 1, 0));
    excl[0][0] = 1;
    for (std::uint32_t j = 1; j <= m; ++j) {
      for (std::uint64_t s = 0; s <= max_sum; ++s) {
        std::uint64_t with = s >= weight ? excl[j - 1][s - weight] : 0;
        excl[j][s] = counts[j][s] - with;
      }
    }
    return excl;
  }
};

void check_enumeration_budget(const PopularityProfile& profile, std::uint32_t m,
                              std::uint64_t limit) {
  BigInt work = binomial(profile.size() - 1, m);
  if (work > limit) {
    throw resource_error("pmf_w enumeration of C(K-1,M) = " + work.get_str() +
                         " side sets exceeds the limit of " + std::to_string(limit));
  }
}

// Exact marginal through the counting table.
Rational pmf_w_via_table(const PopularityProfile& profile, const SubsetSumTable& table,
                         std::uint32_t m, MessageIndex w) {
  const BigInt& total = profile.integer_total();
  std::uint64_t weight = profile.integer_weights()[w - 1].get_ui();
  auto excl = table.excluding(weight);

  std::vector<std::pair<BigInt, BigInt>> terms;
  for (std::uint64_t s = 0; s <= table.max_sum; ++s) {
    std::uint64_t count = excl[m][s];
    if (count == 0) continue;
    // lambda_bar(T) scaled to integers is total - s.
    terms.emplace_back(BigInt(static_cast<unsigned long>(count)),
                       total - BigInt(static_cast<unsigned long>(s)));
  }
  Rational sum = sum_scaled_reciprocals(terms);
  Rational scaled = Rational(profile.integer_weights()[w - 1]) * sum;
  return scaled * pmf_s(static_cast<std::uint32_t>(profile.size()), m);
}

// Exact marginal by direct enumeration of side sets, grouping equal
// subset sums so the fraction merge stays small when weights repeat.
Rational pmf_w_via_enumeration(const PopularityProfile& profile, std::uint32_t m,
                               MessageIndex w) {
  const std::size_t k = profile.size();
  IndexSet universe;
  universe.reserve(k - 1);
  for (MessageIndex i = 1; i <= k; ++i) {
    if (i != w) universe.push_back(i);
  }

  const auto& weights = profile.integer_weights();
  std::map<BigInt, BigInt> count_by_sum;
  for_each_subset(universe, m, [&](const IndexSet& t) {
    BigInt s = 0;
    for (MessageIndex i : t) s += weights[i - 1];
    count_by_sum[s] += 1;
  });

  const BigInt& total = profile.integer_total();
  std::vector<std::pair<BigInt, BigInt>> terms;
  terms.reserve(count_by_sum.size());
  for (const auto& [s, count] : count_by_sum) {
    terms.emplace_back(count, total - s);
  }
  Rational sum = sum_scaled_reciprocals(terms);
  Rational scaled = Rational(weights[w - 1]) * sum;
  return scaled * pmf_s(static_cast<std::uint32_t>(k), m);
}

}  // namespace

Rational pmf_w(const PopularityProfile& profile, std::uint32_t m, MessageIndex w,
               std::uint64_t enumeration_limit) {
  if (w < 1 || w > profile.size()) throw usage_error("demand index out of range");
  if (m < 1 || m > profile.size() - 1) throw usage_error("pmf_w: M out of range");
  check_enumeration_budget(profile, m, enumeration_limit);
  if (SubsetSumTable::applicable(profile, m)) {
    SubsetSumTable table(profile, m);
    return pmf_w_via_table(profile, table, m, w);
  }
  return pmf_w_via_enumeration(profile, m, w);
}

std::vector<Rational> pmf_w_all(const PopularityProfile& profile, std::uint32_t m,
                                std::uint64_t enumeration_limit) {
  IndexSet all(profile.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<MessageIndex>(i + 1);
  return pmf_w_many(profile, m, all, enumeration_limit);
}

std::vector<Rational> pmf_w_many(const PopularityProfile& profile, std::uint32_t m,
                                 const IndexSet& positions, std::uint64_t enumeration_limit) {
  if (m < 1 || m > profile.size() - 1) throw usage_error("pmf_w_many: M out of range");
  for (MessageIndex w : positions) {
    if (w < 1 || w > profile.size()) throw usage_error("demand index out of range");
  }
  check_enumeration_budget(profile, m, enumeration_limit);
  std::vector<Rational> out;
  out.reserve(positions.size());
  if (SubsetSumTable::applicable(profile, m)) {
    SubsetSumTable table(profile, m);
    for (MessageIndex w : positions) out.push_back(pmf_w_via_table(profile, table, m, w));
  } else {
    for (MessageIndex w : positions) out.push_back(pmf_w_via_enumeration(profile, m, w));
  }
  return out;
}

}  // namespace papir
