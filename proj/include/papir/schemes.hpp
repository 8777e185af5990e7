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
#include <map>
#include <variant>
#include <vector>

#include "papir/field.hpp"
#include "papir/pmf.hpp"
#include "papir/profile.hpp"

namespace papir {

// Partition of [K] into N = K/(M+1) parts of size M+1, kept canonical:
// indices ascend within each part and parts are ordered by smallest
// element, so equal partitions compare equal.
struct PartitionQuery {
  std::vector<IndexSet> parts;

  static PartitionQuery canonical(std::vector<IndexSet> parts);
  void validate(std::uint32_t k, std::uint32_t m) const;
  std::string to_string() const;

  friend bool operator==(const PartitionQuery&, const PartitionQuery&) = default;
  friend auto operator<=>(const PartitionQuery&, const PartitionQuery&) = default;
};

// Vandermonde evaluation points; row j of the implied query matrix is
// [omega_1^(j-1), ..., omega_K^(j-1)] for j = 1..K-M.
struct MdsQuery {
  std::uint32_t k = 0;
  std::uint32_t m = 0;
  std::uint64_t q = 2;
  std::vector<std::uint64_t> omegas;  // K distinct elements of GF(q)

  void validate() const;

  friend bool operator==(const MdsQuery&, const MdsQuery&) = default;
};

using Query = std::variant<PartitionQuery, MdsQuery>;

// Coded message combinations returned by the server: N of them for a
// partition query, K-M for an MDS query.
struct Answer {
  std::vector<MessageVector> combos;

  friend bool operator==(const Answer&, const Answer&) = default;
};

// The server's K messages, all of length n over the same field.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<MessageVector> messages);
  static Dataset random(const ProblemParams& params, std::uint64_t seed);

  std::uint32_t k() const { return static_cast<std::uint32_t>(messages_.size()); }
  std::uint32_t n() const;
  std::uint64_t q() const;
  const MessageVector& message(MessageIndex id) const;  // 1-based
  const std::vector<MessageVector>& messages() const { return messages_; }

 private:
  std::vector<MessageVector> messages_;
};

using SideInfo = std::map<MessageIndex, MessageVector>;

SideInfo side_info_from_dataset(const Dataset& data, const IndexSet& s);

// ---- Scheme I: Partition-and-Code -----------------------------------------

struct PcQuery {
  PartitionQuery query;
  // Position (0-based) of the part equal to W ∪ S in the canonical order;
  // this is what the decoder needs.
  std::size_t demand_part = 0;
  // The uniformly drawn slot j* in [0, N) used during construction, before
  // canonicalization reorders the parts. Exposed so the draw's uniformity
  // is observable; it carries no information beyond the procedure itself.
  std::size_t drawn_slot = 0;
};

// Builds the query for demand w and side set s (caller ids): part j* is
// W ∪ S, the leftover indices are shuffled uniformly into the remaining
// parts, and the result is canonicalized. Each canonical partition
// containing the part W ∪ S is equally likely. Deterministic given seed.
PcQuery pc_build_query(const ProblemParams& params, MessageIndex w, const IndexSet& s,
                       std::uint64_t seed);

// Per-part sums over GF(q).
Answer pc_answer(const PartitionQuery& query, const Dataset& data);

// combos[demand_part] minus the side-information contribution.
MessageVector pc_decode(const Answer& answer, std::size_t demand_part, const IndexSet& s,
                        const SideInfo& side_info);

// ---- Scheme II: MDS code ---------------------------------------------------

// Deterministic default evaluation points omega_i = i-1; requires q >= K.
// The query does not depend on (W, S).
MdsQuery mds_build_query(const ProblemParams& params);

// combos[j] = sum_i omega_i^(j-1) X_i for j = 1..K-M.
Answer mds_answer(const MdsQuery& query, const Dataset& data);

// Removes the side-information contribution and solves the remaining
// (K-M)x(K-M) system for all unknowns, returning X_W.
MessageVector mds_decode(const Answer& answer, const MdsQuery& query, MessageIndex w,
                         const IndexSet& s, const SideInfo& side_info);

// ---- Randomized code selection ---------------------------------------------

// Base selection probability: the minimum over the M+1 least-popular
// demand candidates i of
//   min{ 1, P(W=i, S=tail∖i) · P(W=1) / (P(W=1, S=[2:M+1]) · P(W=i)) },
// where tail = [K-M : K]. All indices in sorted-profile order.
Rational rcs_gamma_base(const PopularityProfile& profile, const ProblemParams& params,
                        std::uint64_t enumeration_limit = kDefaultEnumerationLimit);

// Probability of choosing Partition-and-Code for a given realization
// (caller ids); scales the base value by the popularity ratios and is
// guaranteed to land in [0, 1].
Rational rcs_gamma(const PopularityProfile& profile, const ProblemParams& params, MessageIndex w,
                   const IndexSet& s, std::uint64_t enumeration_limit = kDefaultEnumerationLimit);

// Selection table: base value plus everything needed to evaluate any
// gamma(w, s) in O(M) exact operations. Indices are sorted positions.
class RcsPolicy {
 public:
  static RcsPolicy build(const PopularityProfile& profile, const ProblemParams& params,
                         std::uint64_t enumeration_limit = kDefaultEnumerationLimit);

  const Rational& base_gamma() const { return base_gamma_; }
  const Rational& marginal(MessageIndex w_sorted) const;
  // gamma for sorted-position (w, s); throws internal_error if the value
  // falls outside [0, 1], which the base minimization rules out.
  Rational gamma_sorted(MessageIndex w_sorted, const IndexSet& s_sorted) const;
  // gamma for caller ids.
  Rational gamma(const PopularityProfile& profile, MessageIndex w, const IndexSet& s) const;

 private:
  const PopularityProfile* profile_ = nullptr;
  std::uint32_t m_ = 0;
  Rational base_gamma_;
  Rational selection_constant_;  // base_gamma * joint({1},[2:M+1]) / pmf_w(1)
  std::vector<Rational> pmf_w_;  // by sorted position
};

enum class SchemeKind { partition_and_code, mds_code };

// True with probability p given a uniform 64-bit draw, by comparing the
// draw against floor(p * 2^64); bias below 2^-64.
bool exact_bernoulli(const Rational& p, std::uint64_t uniform_draw);

struct RoundResult {
  Query query;
  Answer answer;
  MessageVector decoded;
  SchemeKind scheme = SchemeKind::partition_and_code;
  std::uint64_t download_units = 0;  // combos downloaded (each worth n*log2(q) bits)
};

// One full retrieval round against an in-process dataset: draw the scheme
// with probability gamma(w, s), build the query, answer it, decode.
RoundResult rcs_round(const PopularityProfile& profile, const ProblemParams& params,
                      MessageIndex w, const IndexSet& s, const Dataset& data, std::uint64_t seed);

// Number of canonical partitions of [K] into K/(M+1) parts of size M+1.
BigInt partition_count(std::uint32_t k, std::uint32_t m);
// Ways to partition the K-(M+1) leftover indices into the other parts.
BigInt leftover_partition_count(std::uint32_t k, std::uint32_t m);

// Visits every canonical partition (parts discovered in order of their
// minima, each part ascending). Throws resource_error if the count
// exceeds the limit.
void for_each_equal_partition(std::uint32_t k, std::uint32_t m,
                              const std::function<void(const std::vector<IndexSet>&)>& visit,
                              std::uint64_t enumeration_limit = kDefaultEnumerationLimit);

}  // namespace papir
