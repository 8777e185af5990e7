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
#include <optional>
#include <string>
#include <vector>

#include "papir/rational.hpp"

namespace papir {

// Message indices are 1-based everywhere in the public API and on the wire.
using MessageIndex = std::uint32_t;

// Small sorted ascending set of distinct message indices.
using IndexSet = std::vector<MessageIndex>;

IndexSet make_index_set(std::vector<MessageIndex> indices);
bool set_contains(const IndexSet& s, MessageIndex i);
std::string index_set_string(const IndexSet& s);

// Per-message positive popularity weights, held sorted non-increasing.
// Probability formulas index messages by *sorted position*; the retained
// permutation maps those positions back to the caller's message ids, which
// are the ids used by queries, datasets and the wire.
class PopularityProfile {
 public:
  // Weights in caller order (message id = position + 1). Sorting is stable,
  // so ties keep caller order. Throws usage_error on empty input or any
  // weight <= 0.
  static PopularityProfile from_weights(std::vector<Rational> weights);
  static PopularityProfile uniform(std::size_t k);
  // One weight per line: "p/q", integer, or decimal. Blank lines and lines
  // starting with '#' are skipped; message id = (kept) line number.
  static PopularityProfile from_file(const std::string& path);
  static PopularityProfile parse(const std::string& text);

  std::size_t size() const { return sorted_.size(); }
  bool is_uniform() const;

  // 1-based sorted position.
  const Rational& lambda(MessageIndex sorted_pos) const;
  const std::vector<Rational>& lambdas() const { return sorted_; }
  const Rational& total_weight() const { return total_; }

  MessageIndex to_caller(MessageIndex sorted_pos) const;
  MessageIndex to_sorted(MessageIndex caller_id) const;
  IndexSet to_sorted(const IndexSet& caller_ids) const;
  IndexSet to_caller(const IndexSet& sorted_positions) const;

  // Integer view: weights scaled by the common denominator. All probability
  // ratios are invariant under this scaling, so exact pipelines work on the
  // numerators alone.
  const std::vector<BigInt>& integer_weights() const { return int_weights_; }
  const BigInt& integer_total() const { return int_total_; }

 private:
  std::vector<Rational> sorted_;             // non-increasing
  std::vector<MessageIndex> sorted_to_caller_;
  std::vector<MessageIndex> caller_to_sorted_;
  Rational total_;
  std::vector<BigInt> int_weights_;          // sorted order
  BigInt int_total_;
};

// Problem dimensions: K messages, M side-information messages, field
// modulus q, message length n symbols.
struct ProblemParams {
  std::uint32_t k = 0;
  std::uint32_t m = 0;
  std::uint64_t q = 2;
  std::uint32_t n = 1;

  // Validates K >= 2, 1 <= M <= K-1, n >= 1, q prime. q >= K and the
  // randomized-selection divisibility constraints are checked by the
  // operations that need them, so that out-of-range configurations can be
  // constructed and rejected with a config_error at the right call site.
  static ProblemParams make(std::uint32_t k, std::uint32_t m, std::uint64_t q, std::uint32_t n);
  // q defaults to the smallest prime >= K.
  static ProblemParams with_default_field(std::uint32_t k, std::uint32_t m, std::uint32_t n = 1);

  std::uint32_t parts() const { return k / (m + 1); }  // N = K/(M+1)

  // (M+1) | K and (M+1)^2 < K.
  bool rcs_supported() const;
  void require_rcs() const;  // throws config_error when unsupported
  void require_field_fits() const;  // q >= K, throws config_error
};

// A demand index W together with a side-information set S, W not in S.
struct DemandRealization {
  MessageIndex w = 1;
  IndexSet s;

  static DemandRealization make(MessageIndex w, IndexSet s, const ProblemParams& params);
};

enum class DistributionKind { uniform, zipf, gamma, weibull, explicit_weights };

// Sampling recipe for random popularity profiles.
struct ProfileSpec {
  DistributionKind kind = DistributionKind::uniform;
  std::uint32_t zipf_n = 100;
  double zipf_s = 1.0;
  double shape = 1.0;  // gamma/weibull
  double scale = 1.0;
  std::uint32_t quant_bits = 32;  // continuous draws round to denominator 2^quant_bits
  std::vector<Rational> explicit_weights;

  std::string label() const;
};

// Draws K independent weights and sorts them. Zipf draws an integer rank
// v in {1..zipf_n} with weight v^(-s) and uses v itself as the popularity;
// gamma/weibull draws are rounded to rationals with denominator 2^32
// (zero-rounding draws are redrawn). Deterministic given the seed.
PopularityProfile sample_profile(const ProfileSpec& spec, std::size_t k, std::uint64_t seed);

}  // namespace papir
