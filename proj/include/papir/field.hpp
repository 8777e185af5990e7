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
#include <vector>

#include "papir/errors.hpp"

namespace papir {

// Canonical residue together with the modulus it lives under. Tagging each
// element lets mixed-field arithmetic fail loudly instead of silently
// wrapping with the wrong modulus.
struct FieldElement {
  std::uint64_t value = 0;
  std::uint64_t modulus = 2;

  friend bool operator==(const FieldElement&, const FieldElement&) = default;
};

bool is_prime_u64(std::uint64_t n);
std::uint64_t smallest_prime_at_least(std::uint64_t n);

// Prime-order field GF(q). Immutable; all operations are pure and safe to
// share across threads.
class PrimeField {
 public:
  // Throws usage_error unless q is prime (deterministic Miller-Rabin,
  // valid for the full 64-bit range).
  explicit PrimeField(std::uint64_t q);

  std::uint64_t modulus() const { return q_; }

  FieldElement element(std::uint64_t v) const { return {v % q_, q_}; }
  FieldElement zero() const { return {0, q_}; }
  FieldElement one() const { return {1 % q_, q_}; }

  FieldElement add(FieldElement a, FieldElement b) const;
  FieldElement sub(FieldElement a, FieldElement b) const;
  FieldElement mul(FieldElement a, FieldElement b) const;
  FieldElement neg(FieldElement a) const;

  // Multiplicative inverse via Fermat exponentiation; a must be nonzero.
  FieldElement inv(FieldElement a) const;
  FieldElement pow(FieldElement base, std::uint64_t exponent) const;

 private:
  // Checks the element is a canonical residue of this field.
  void check(FieldElement a) const;

  std::uint64_t q_;
};

// Fixed-length vector of field elements; one message of the dataset.
// Coordinates share a single modulus, enforced at construction.
class MessageVector {
 public:
  MessageVector() = default;
  MessageVector(std::vector<std::uint64_t> coords, std::uint64_t q);
  static MessageVector zero(std::size_t n, std::uint64_t q);
  static MessageVector random(std::size_t n, const PrimeField& field, class Rng& rng);

  std::size_t length() const { return coords_.size(); }
  std::uint64_t modulus() const { return q_; }
  std::uint64_t raw(std::size_t i) const { return coords_[i]; }
  FieldElement coord(std::size_t i) const { return {coords_[i], q_}; }
  const std::vector<std::uint64_t>& raw_coords() const { return coords_; }

  MessageVector added(const MessageVector& other) const;
  MessageVector subtracted(const MessageVector& other) const;
  // this + c * other, the workhorse of answer/side-information algebra.
  MessageVector axpy(FieldElement c, const MessageVector& other) const;

  friend bool operator==(const MessageVector&, const MessageVector&) = default;

 private:
  std::vector<std::uint64_t> coords_;
  std::uint64_t q_ = 2;
};

// Solves A x = b over GF(q) for a square matrix A and message-vector right
// hand sides, by Gaussian elimination. The pivot for each column is the
// first nonzero entry in row order, so elimination is deterministic.
// Throws rank_error when A is singular.
std::vector<MessageVector> solve_square_system(const PrimeField& field,
                                               const std::vector<std::vector<FieldElement>>& a,
                                               const std::vector<MessageVector>& b);

}  // namespace papir
