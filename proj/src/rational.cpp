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

#include "papir/rational.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "papir/errors.hpp"

namespace papir {

Rational make_rational(long num, long den) {
  if (den == 0) throw usage_error("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

namespace {

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

}  // namespace

Rational parse_rational(const std::string& text, bool require_positive) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) throw usage_error("empty rational literal");

  bool negative = false;
  if (s[0] == '+' || s[0] == '-') {
    negative = s[0] == '-';
    s.erase(s.begin());
  }

  Rational value;
  auto slash = s.find('/');
  auto dot = s.find('.');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash);
    std::string den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
      throw usage_error("malformed rational literal: " + text);
    }
    BigInt n(num, 10), d(den, 10);
    if (d == 0) throw usage_error("rational with zero denominator: " + text);
    value = Rational(n, d);
    value.canonicalize();
  } else if (dot != std::string::npos) {
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    if (whole.empty()) whole = "0";
    if (!all_digits(whole) || (!frac.empty() && !all_digits(frac))) {
      throw usage_error("malformed decimal literal: " + text);
    }
    BigInt n(whole + frac, 10);
    BigInt d = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) d *= 10;
    value = Rational(n, d);
    value.canonicalize();
  } else {
    if (!all_digits(s)) throw usage_error("malformed integer literal: " + text);
    value = Rational(BigInt(s, 10));
  }

  if (negative) value = -value;
  if (require_positive && value <= 0) {
    throw usage_error("value must be positive: " + text);
  }
  return value;
}

std::string fraction_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string decimal_string(const Rational& r, int significant_digits) {
  if (r == 0) return "0";
  mpf_class f(r, static_cast<mp_bitcnt_t>(significant_digits * 4 + 64));
  mp_exp_t exp = 0;
  std::string digits = f.get_str(exp, 10, static_cast<std::size_t>(significant_digits));
  bool neg = !digits.empty() && digits[0] == '-';
  if (neg) digits.erase(digits.begin());
  if (digits.empty()) digits = "0";

  std::ostringstream out;
  if (neg) out << '-';
  // get_str returns mantissa digits with an implied decimal point before
  // them and the power-of-ten exponent in exp.
  if (exp <= 0) {
    out << "0.";
    for (mp_exp_t i = 0; i < -exp; ++i) out << '0';
    out << digits;
  } else if (static_cast<std::size_t>(exp) >= digits.size()) {
    out << digits;
    for (std::size_t i = digits.size(); i < static_cast<std::size_t>(exp); ++i) out << '0';
  } else {
    out << digits.substr(0, static_cast<std::size_t>(exp)) << "."
        << digits.substr(static_cast<std::size_t>(exp));
  }
  return out.str();
}

std::string pretty_string(const Rational& r) {
  if (r.get_den() == 1) return fraction_string(r);
  return fraction_string(r) + " (~" + decimal_string(r) + ")";
}

double to_double(const Rational& r) { return r.get_d(); }

namespace {

Rational merge_range(const std::vector<std::pair<BigInt, BigInt>>& terms, std::size_t lo,
                     std::size_t hi) {
  if (hi - lo == 1) {
    Rational r(terms[lo].first, terms[lo].second);
    r.canonicalize();
    return r;
  }
  std::size_t mid = lo + (hi - lo) / 2;
  return merge_range(terms, lo, mid) + merge_range(terms, mid, hi);
}

}  // namespace

Rational sum_scaled_reciprocals(const std::vector<std::pair<BigInt, BigInt>>& count_over_value) {
  if (count_over_value.empty()) return Rational(0);
  for (const auto& [count, value] : count_over_value) {
    if (value <= 0) throw usage_error("reciprocal of non-positive value");
    (void)count;
  }
  return merge_range(count_over_value, 0, count_over_value.size());
}

void BalancedRationalSum::add(const Rational& term) {
  Rational carry = term;
  for (std::size_t level = 0;; ++level) {
    if (level == levels_.size()) levels_.emplace_back();
    if (!levels_[level].has_value()) {
      levels_[level] = std::move(carry);
      return;
    }
    carry += *levels_[level];
    levels_[level].reset();
  }
}

Rational BalancedRationalSum::total() const {
  Rational sum(0);
  for (const auto& partial : levels_) {
    if (partial.has_value()) sum += *partial;
  }
  return sum;
}

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  BigInt result;
  mpz_bin_uiui(result.get_mpz_t(), n, k);
  return result;
}

BigInt factorial(std::uint64_t n) {
  BigInt result;
  mpz_fac_ui(result.get_mpz_t(), n);
  return result;
}

}  // namespace papir
