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

#include "papir/field.hpp"

#include <string>

#include "papir/rng.hpp"

namespace papir {

namespace {

using u128 = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((u128)a * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL,
                          31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  // Deterministic Miller-Rabin; this witness set covers all 64-bit inputs.
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL,
                          31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t smallest_prime_at_least(std::uint64_t n) {
  if (n <= 2) return 2;
  std::uint64_t c = n | 1;  // first odd >= n
  while (!is_prime_u64(c)) c += 2;
  return c;
}

PrimeField::PrimeField(std::uint64_t q) : q_(q) {
  if (!is_prime_u64(q)) {
    throw usage_error("field modulus " + std::to_string(q) + " is not prime");
  }
}

void PrimeField::check(FieldElement a) const {
  if (a.modulus != q_) {
    throw usage_error("field element from GF(" + std::to_string(a.modulus) +
                      ") used in GF(" + std::to_string(q_) + ")");
  }
  if (a.value >= q_) {
    throw usage_error("non-canonical field element " + std::to_string(a.value));
  }
}

FieldElement PrimeField::add(FieldElement a, FieldElement b) const {
  check(a);
  check(b);
  std::uint64_t s = a.value + b.value;  // q < 2^63 not assumed; guard wrap
  if (s < a.value || s >= q_) s -= q_;
  return {s, q_};
}

FieldElement PrimeField::sub(FieldElement a, FieldElement b) const {
  check(a);
  check(b);
  return {a.value >= b.value ? a.value - b.value : a.value + (q_ - b.value), q_};
}

FieldElement PrimeField::mul(FieldElement a, FieldElement b) const {
  check(a);
  check(b);
  return {mulmod(a.value, b.value, q_), q_};
}

FieldElement PrimeField::neg(FieldElement a) const {
  check(a);
  return {a.value == 0 ? 0 : q_ - a.value, q_};
}

FieldElement PrimeField::inv(FieldElement a) const {
  check(a);
  if (a.value == 0) throw usage_error("inverse of zero in GF(" + std::to_string(q_) + ")");
  return {powmod(a.value, q_ - 2, q_), q_};
}

FieldElement PrimeField::pow(FieldElement base, std::uint64_t exponent) const {
  check(base);
  return {powmod(base.value, exponent, q_), q_};
}

MessageVector::MessageVector(std::vector<std::uint64_t> coords, std::uint64_t q)
    : coords_(std::move(coords)), q_(q) {
  for (std::uint64_t v : coords_) {
    if (v >= q_) throw usage_error("message coordinate out of field range");
  }
}

MessageVector MessageVector::zero(std::size_t n, std::uint64_t q) {
  return MessageVector(std::vector<std::uint64_t>(n, 0), q);
}

MessageVector MessageVector::random(std::size_t n, const PrimeField& field, Rng& rng) {
  std::vector<std::uint64_t> coords(n);
  for (auto& c : coords) c = rng.below(field.modulus());
  return MessageVector(std::move(coords), field.modulus());
}

namespace {

void require_same_shape(const MessageVector& a, const MessageVector& b) {
  if (a.modulus() != b.modulus()) throw usage_error("message vectors over different fields");
  if (a.length() != b.length()) throw usage_error("message vectors of different lengths");
}

}  // namespace

MessageVector MessageVector::added(const MessageVector& other) const {
  require_same_shape(*this, other);
  PrimeField f(q_);
  std::vector<std::uint64_t> out(coords_.size());
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    out[i] = f.add(coord(i), other.coord(i)).value;
  }
  return MessageVector(std::move(out), q_);
}

MessageVector MessageVector::subtracted(const MessageVector& other) const {
  require_same_shape(*this, other);
  PrimeField f(q_);
  std::vector<std::uint64_t> out(coords_.size());
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    out[i] = f.sub(coord(i), other.coord(i)).value;
  }
  return MessageVector(std::move(out), q_);
}

MessageVector MessageVector::axpy(FieldElement c, const MessageVector& other) const {
  require_same_shape(*this, other);
  PrimeField f(q_);
  std::vector<std::uint64_t> out(coords_.size());
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    out[i] = f.add(coord(i), f.mul(c, other.coord(i))).value;
  }
  return MessageVector(std::move(out), q_);
}

std::vector<MessageVector> solve_square_system(const PrimeField& field,
                                               const std::vector<std::vector<FieldElement>>& a,
                                               const std::vector<MessageVector>& b) {
  const std::size_t m = a.size();
  if (m == 0) throw usage_error("empty linear system");
  if (b.size() != m) throw usage_error("right-hand side count does not match matrix size");
  const std::uint64_t q = field.modulus();
  std::size_t n = b[0].length();

  // Working copies: matrix entries and right-hand rows as raw residues.
  std::vector<std::vector<std::uint64_t>> mat(m, std::vector<std::uint64_t>(m));
  std::vector<std::vector<std::uint64_t>> rhs(m, std::vector<std::uint64_t>(n));
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i].size() != m) throw usage_error("matrix is not square");
    for (std::size_t j = 0; j < m; ++j) {
      FieldElement e = a[i][j];
      if (e.modulus != q || e.value >= q) throw usage_error("matrix entry not in field");
      mat[i][j] = e.value;
    }
    if (b[i].length() != n || b[i].modulus() != q) {
      throw usage_error("right-hand side vectors must share length and field");
    }
    rhs[i] = b[i].raw_coords();
  }

  auto f = [&](std::uint64_t x) { return FieldElement{x, q}; };

  for (std::size_t col = 0; col < m; ++col) {
    // First nonzero pivot in row order; deterministic.
    std::size_t pivot = col;
    while (pivot < m && mat[pivot][col] == 0) ++pivot;
    if (pivot == m) throw rank_error("singular system: no pivot in column " + std::to_string(col));
    std::swap(mat[pivot], mat[col]);
    std::swap(rhs[pivot], rhs[col]);

    std::uint64_t inv = field.inv(f(mat[col][col])).value;
    for (std::size_t j = col; j < m; ++j) {
      mat[col][j] = field.mul(f(mat[col][j]), f(inv)).value;
    }
    for (std::size_t j = 0; j < n; ++j) {
      rhs[col][j] = field.mul(f(rhs[col][j]), f(inv)).value;
    }

    for (std::size_t row = 0; row < m; ++row) {
      if (row == col || mat[row][col] == 0) continue;
      std::uint64_t factor = mat[row][col];
      for (std::size_t j = col; j < m; ++j) {
        mat[row][j] = field.sub(f(mat[row][j]), field.mul(f(factor), f(mat[col][j]))).value;
      }
      for (std::size_t j = 0; j < n; ++j) {
        rhs[row][j] = field.sub(f(rhs[row][j]), field.mul(f(factor), f(rhs[col][j]))).value;
      }
    }
  }

  std::vector<MessageVector> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.emplace_back(std::move(rhs[i]), q);
  return out;
}

}  // namespace papir
