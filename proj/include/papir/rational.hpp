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

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace papir {

// All probability math in the library is exact. Rational is an
// arbitrary-precision fraction kept in canonical (reduced) form.
using Rational = mpq_class;
using BigInt = mpz_class;

Rational make_rational(long num, long den = 1);

// Accepts "p/q", plain integers, and decimal literals ("0.25" parses to
// exactly 1/4). Throws usage_error on malformed input or value <= 0 when
// require_positive is set.
Rational parse_rational(const std::string& text, bool require_positive = false);

// "p/q", or just "p" when the denominator is 1.
std::string fraction_string(const Rational& r);

// Decimal rendering with the given number of significant digits.
std::string decimal_string(const Rational& r, int significant_digits = 12);

// "p/q (~0.123456789012)" — the form used by reports and the CLI.
std::string pretty_string(const Rational& r);

double to_double(const Rational& r);

// Exact sum of num/den for a list of positive integer denominators with
// multiplicities, merged pairwise to keep intermediate operands balanced.
Rational sum_scaled_reciprocals(const std::vector<std::pair<BigInt, BigInt>>& count_over_value);

// Streaming exact sum with pairwise merging. Adding n terms costs about
// what a balanced merge tree costs, instead of n additions against an
// ever-growing common denominator.
class BalancedRationalSum {
 public:
  void add(const Rational& term);
  Rational total() const;

 private:
  // levels_[i], when present, holds a partial sum of 2^i terms.
  std::vector<std::optional<Rational>> levels_;
};

BigInt binomial(std::uint64_t n, std::uint64_t k);
BigInt factorial(std::uint64_t n);

}  // namespace papir
