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

#include <fstream>

#include "doctest.h"
#include "helpers.hpp"

using namespace papir;
using namespace papir::test;

TEST_CASE("rational parsing and rendering") {
  CHECK(parse_rational("2") == rat(2));
  CHECK(parse_rational("1/3") == rat(1, 3));
  CHECK(parse_rational("0.25") == rat(1, 4));
  CHECK(parse_rational(" 2.50 ") == rat(5, 2));
  CHECK(parse_rational("-3/6") == rat(-1, 2));
  CHECK_THROWS_AS(parse_rational("1/0"), usage_error);
  CHECK_THROWS_AS(parse_rational("abc"), usage_error);
  CHECK_THROWS_AS(parse_rational("0", true), usage_error);
  CHECK(fraction_string(rat(13, 90)) == "13/90");
  CHECK(fraction_string(rat(5)) == "5");
  CHECK(decimal_string(rat(13, 40)) == "0.325");
  CHECK(decimal_string(rat(40, 13)).substr(0, 9) == "3.0769230");
}

TEST_CASE("profile sorting keeps the caller permutation") {
  PopularityProfile p = PopularityProfile::from_weights({rat(1), rat(3), rat(2)});
  CHECK(p.lambda(1) == rat(3));
  CHECK(p.lambda(2) == rat(2));
  CHECK(p.lambda(3) == rat(1));
  CHECK(p.to_caller(1) == 2);
  CHECK(p.to_caller(2) == 3);
  CHECK(p.to_caller(3) == 1);
  CHECK(p.to_sorted(2) == 1);
  CHECK(p.to_sorted(3) == 2);
  CHECK(p.to_sorted(1) == 3);

  // Stable sort: ties keep caller order.
  PopularityProfile ties = PopularityProfile::from_weights({rat(1), rat(1), rat(2)});
  CHECK(ties.to_caller(1) == 3);
  CHECK(ties.to_caller(2) == 1);
  CHECK(ties.to_caller(3) == 2);

  CHECK_THROWS_AS(PopularityProfile::from_weights({rat(1), rat(0)}), usage_error);
  CHECK_THROWS_AS(PopularityProfile::from_weights({}), usage_error);
}

TEST_CASE("lambda_bar") {
  PopularityProfile uniform = PopularityProfile::uniform(6);
  CHECK(lambda_bar(uniform, {2}) == rat(5));
  CHECK(lambda_bar(uniform, {}) == rat(6));

  PopularityProfile skew = skewed_profile();
  CHECK(lambda_bar(skew, {1}) == rat(5));
  CHECK(lambda_bar(skew, {}) == rat(7));
  CHECK_THROWS_AS(lambda_bar(skew, {7}), usage_error);
}

TEST_CASE("pmf_s") {
  CHECK(pmf_s(6, 1) == rat(1, 6));
  CHECK(pmf_s(6, 2) == rat(1, 15));
  CHECK(pmf_s(4, 3) == rat(1, 4));
}

TEST_CASE("pmf_w_given_s") {
  PopularityProfile uniform = PopularityProfile::uniform(6);
  CHECK(pmf_w_given_s(uniform, 1, {2}) == rat(1, 5));
  PopularityProfile skew = skewed_profile();
  CHECK(pmf_w_given_s(skew, 1, {2}) == rat(1, 3));
  CHECK(pmf_w_given_s(skew, 2, {2}) == rat(0));
}

TEST_CASE("joint_pmf matches the worked example") {
  PopularityProfile skew = skewed_profile();
  CHECK(joint_pmf(skew, 1, 1, {2}) == rat(1, 18));
  CHECK(joint_pmf(skew, 1, 2, {1}) == rat(1, 30));
  CHECK(joint_pmf(skew, 1, 3, {5}) == rat(1, 36));
  CHECK(joint_pmf(skew, 1, 3, {3}) == rat(0));
}

TEST_CASE("pmf_w matches the worked example") {
  PopularityProfile skew = skewed_profile();
  CHECK(pmf_w(skew, 1, 1) == rat(5, 18));
  CHECK(pmf_w(skew, 1, 2) == rat(13, 90));
  CHECK(pmf_w(skew, 1, 6) == rat(13, 90));

  PopularityProfile uniform = PopularityProfile::uniform(6);
  for (MessageIndex w = 1; w <= 6; ++w) CHECK(pmf_w(uniform, 1, w) == rat(1, 6));
}

TEST_CASE("pmf_w counting fast path agrees with brute force") {
  Rng rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    std::size_t k = 5 + rng.below(3);
    std::uint32_t m = 1 + static_cast<std::uint32_t>(rng.below(2));
    // Small integer weights take the counting path.
    std::vector<Rational> weights;
    for (std::size_t i = 0; i < k; ++i) weights.push_back(rat(1 + rng.below(9)));
    PopularityProfile p = PopularityProfile::from_weights(std::move(weights));
    for (MessageIndex w = 1; w <= k; ++w) {
      CHECK(pmf_w(p, m, w) == brute_force_pmf_w(p, m, w));
    }
  }
}

TEST_CASE("pmf_w enumeration path agrees with brute force") {
  // Huge coprime denominators defeat the counting table.
  std::vector<Rational> weights = {rat(982451653, 2),      Rational(BigInt("72057594037927936")),
                                   rat(15485863, 7),       rat(32452843, 11),
                                   Rational(BigInt("9007199254740993")), rat(49979687, 13)};
  PopularityProfile p = PopularityProfile::from_weights(std::move(weights));
  for (std::uint32_t m : {1u, 2u}) {
    for (MessageIndex w = 1; w <= 6; ++w) {
      CHECK(pmf_w(p, m, w) == brute_force_pmf_w(p, m, w));
    }
  }
}

TEST_CASE("pmf invariants on random profiles") {
  Rng rng(7);
  for (int trial = 0; trial < 12; ++trial) {
    std::size_t k = 4 + rng.below(5);  // up to 8
    std::uint32_t m = 1 + static_cast<std::uint32_t>(rng.below(2));
    if (m > k - 1) m = 1;
    PopularityProfile p = random_rational_profile(k, rng);

    std::vector<Rational> marginals = pmf_w_all(p, m);
    Rational total(0);
    for (const auto& v : marginals) total += v;
    CHECK(total == rat(1));

    // Joint sums to one and factors through pmf_s * pmf_w_given_s.
    Rational joint_total(0);
    IndexSet universe;
    for (MessageIndex i = 1; i <= k; ++i) universe.push_back(i);
    for (MessageIndex w = 1; w <= k; ++w) {
      IndexSet others;
      for (MessageIndex i = 1; i <= k; ++i) {
        if (i != w) others.push_back(i);
      }
      for_each_subset(others, m, [&](const IndexSet& s) {
        Rational j = joint_pmf(p, m, w, s);
        CHECK(j == pmf_s(static_cast<std::uint32_t>(k), m) * pmf_w_given_s(p, w, s));
        joint_total += j;
      });
    }
    CHECK(joint_total == rat(1));

    // Monotone along the sorted order.
    for (MessageIndex w = 1; w + 1 <= k; ++w) {
      CHECK(marginals[w - 1] >= marginals[w]);
    }
  }
}

TEST_CASE("pmf_w enumeration guard") {
  PopularityProfile p = PopularityProfile::uniform(40);
  CHECK_THROWS_AS(pmf_w(p, 5, 1, /*enumeration_limit=*/1000), resource_error);
}

TEST_CASE("uniform and explicit profile sampling") {
  ProfileSpec uniform_spec;
  uniform_spec.kind = DistributionKind::uniform;
  PopularityProfile u = sample_profile(uniform_spec, 6, 1);
  for (MessageIndex i = 1; i <= 6; ++i) CHECK(u.lambda(i) == rat(1));

  PopularityProfile parsed = PopularityProfile::parse("2\n1/3\n0.25\n");
  CHECK(parsed.size() == 3);
  CHECK(parsed.lambda(1) == rat(2));
  CHECK(parsed.lambda(2) == rat(1, 3));
  CHECK(parsed.lambda(3) == rat(1, 4));
  CHECK(parsed.to_caller(1) == 1);
  CHECK(parsed.to_caller(3) == 3);
}

TEST_CASE("zipf samples are integer ranks in range, sorted") {
  ProfileSpec spec;
  spec.kind = DistributionKind::zipf;
  spec.zipf_n = 100;
  spec.zipf_s = 1.0;
  PopularityProfile p = sample_profile(spec, 4, 12345);
  CHECK(p.size() == 4);
  for (MessageIndex i = 1; i <= 4; ++i) {
    const Rational& v = p.lambda(i);
    CHECK(v.get_den() == 1);
    CHECK(v >= 1);
    CHECK(v <= 100);
    if (i > 1) CHECK(p.lambda(i - 1) >= v);
  }
  // Deterministic given the seed.
  PopularityProfile q = sample_profile(spec, 4, 12345);
  for (MessageIndex i = 1; i <= 4; ++i) CHECK(p.lambda(i) == q.lambda(i));
  PopularityProfile r = sample_profile(spec, 4, 54321);
  bool any_different = false;
  for (MessageIndex i = 1; i <= 4; ++i) any_different |= (p.lambda(i) != r.lambda(i));
  CHECK(any_different);

  // Inverse-cdf shape check: rank 1 must dominate rank 100 roughly n-fold.
  int ones = 0, hundreds = 0;
  PopularityProfile big = sample_profile(spec, 4000, 99);
  for (MessageIndex i = 1; i <= 4000; ++i) {
    if (big.lambda(i) == 1) ++ones;
    if (big.lambda(i) == 100) ++hundreds;
  }
  CHECK(ones > hundreds * 10);
}

TEST_CASE("gamma sampling hits the analytic mean") {
  ProfileSpec spec;
  spec.kind = DistributionKind::gamma;
  spec.shape = 0.62;
  spec.scale = 31.22;
  for (std::uint64_t seed : {1ULL, 2ULL}) {
    PopularityProfile p = sample_profile(spec, 10000, seed);
    double sum = 0;
    for (MessageIndex i = 1; i <= p.size(); ++i) sum += to_double(p.lambda(i));
    double mean = sum / 10000.0;
    CHECK(mean > 19.3564 * 0.9);
    CHECK(mean < 19.3564 * 1.1);
  }
}

TEST_CASE("weibull sampling is positive and deterministic") {
  ProfileSpec spec;
  spec.kind = DistributionKind::weibull;
  spec.shape = 0.79;
  spec.scale = 16.80;
  PopularityProfile p = sample_profile(spec, 500, 7);
  PopularityProfile q = sample_profile(spec, 500, 7);
  double sum = 0;
  for (MessageIndex i = 1; i <= 500; ++i) {
    CHECK(p.lambda(i) > 0);
    CHECK(p.lambda(i) == q.lambda(i));
    sum += to_double(p.lambda(i));
  }
  // Mean of weibull(0.79, 16.80) is about 19.2; loose band.
  CHECK(sum / 500 > 12.0);
  CHECK(sum / 500 < 28.0);
}

TEST_CASE("coarser quantization still yields positive rationals") {
  ProfileSpec spec;
  spec.kind = DistributionKind::gamma;
  spec.shape = 0.62;
  spec.scale = 31.22;
  spec.quant_bits = 8;
  PopularityProfile p = sample_profile(spec, 50, 3);
  BigInt max_den = 1;
  for (MessageIndex i = 1; i <= 50; ++i) {
    CHECK(p.lambda(i) > 0);
    if (p.lambda(i).get_den() > max_den) max_den = p.lambda(i).get_den();
  }
  CHECK(max_den <= 256);
  spec.quant_bits = 0;
  CHECK_THROWS_AS(sample_profile(spec, 4, 1), usage_error);
}

TEST_CASE("profile files") {
  const char* path = "pmf_profile_roundtrip.txt";
  {
    std::ofstream out(path);
    out << "# weights\n2\n1\n1\n\n1\n1\n1\n";
  }
  PopularityProfile p = PopularityProfile::from_file(path);
  CHECK(p.size() == 6);
  CHECK(p.lambda(1) == rat(2));
  std::remove(path);
  CHECK_THROWS_AS(PopularityProfile::from_file("does_not_exist.txt"), io_error);
}
