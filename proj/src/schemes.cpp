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

#include "papir/schemes.hpp"

#include <algorithm>
#include <sstream>

#include "papir/rng.hpp"

namespace papir {

PartitionQuery PartitionQuery::canonical(std::vector<IndexSet> parts) {
  for (auto& part : parts) part = make_index_set(std::move(part));
  std::sort(parts.begin(), parts.end(),
            [](const IndexSet& a, const IndexSet& b) { return a.front() < b.front(); });
  return PartitionQuery{std::move(parts)};
}

void PartitionQuery::validate(std::uint32_t k, std::uint32_t m) const {
  const std::size_t part_size = std::size_t{m} + 1;
  if (k % part_size != 0 || parts.size() != k / part_size) {
    throw usage_error("partition has wrong number of parts");
  }
  std::vector<bool> seen(k, false);
  MessageIndex last_min = 0;
  for (const auto& part : parts) {
    if (part.size() != part_size) throw usage_error("partition part has wrong size");
    if (part.front() <= last_min && last_min != 0) {
      throw usage_error("partition parts not in canonical order");
    }
    last_min = part.front();
    for (MessageIndex i : part) {
      if (i < 1 || i > k) throw usage_error("partition index out of range");
      if (seen[i - 1]) throw usage_error("partition indices overlap");
      seen[i - 1] = true;
    }
  }
}

std::string PartitionQuery::to_string() const {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out << ',';
    out << index_set_string(parts[i]);
  }
  out << '}';
  return out.str();
}

void MdsQuery::validate() const {
  if (k < 2 || m < 1 || m > k - 1) throw usage_error("mds query has bad dimensions");
  if (omegas.size() != k) throw usage_error("mds query needs K evaluation points");
  std::vector<std::uint64_t> sorted = omegas;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw usage_error("mds evaluation points must be distinct");
  }
  for (std::uint64_t w : omegas) {
    if (w >= q) throw usage_error("mds evaluation point outside the field");
  }
}

Dataset::Dataset(std::vector<MessageVector> messages) : messages_(std::move(messages)) {
  if (messages_.empty()) throw usage_error("dataset must not be empty");
  for (const auto& msg : messages_) {
    if (msg.length() != messages_.front().length() || msg.modulus() != messages_.front().modulus()) {
      throw usage_error("dataset messages must share length and field");
    }
  }
}

Dataset Dataset::random(const ProblemParams& params, std::uint64_t seed) {
  PrimeField field(params.q);
  Rng rng(seed);
  std::vector<MessageVector> messages;
  messages.reserve(params.k);
  for (std::uint32_t i = 0; i < params.k; ++i) {
    messages.push_back(MessageVector::random(params.n, field, rng));
  }
  return Dataset(std::move(messages));
}

std::uint32_t Dataset::n() const {
  return static_cast<std::uint32_t>(messages_.front().length());
}

std::uint64_t Dataset::q() const { return messages_.front().modulus(); }

const MessageVector& Dataset::message(MessageIndex id) const {
  if (id < 1 || id > messages_.size()) {
    throw usage_error("message id out of range: " + std::to_string(id));
  }
  return messages_[id - 1];
}

SideInfo side_info_from_dataset(const Dataset& data, const IndexSet& s) {
  SideInfo side;
  for (MessageIndex i : s) side.emplace(i, data.message(i));
  return side;
}

PcQuery pc_build_query(const ProblemParams& params, MessageIndex w, const IndexSet& s,
                       std::uint64_t seed) {
  params.require_rcs();
  DemandRealization real = DemandRealization::make(w, s, params);
  const std::uint32_t parts_n = params.parts();
  const std::size_t part_size = std::size_t{params.m} + 1;

  IndexSet demand_part = real.s;
  demand_part.push_back(real.w);
  demand_part = make_index_set(std::move(demand_part));

  std::vector<MessageIndex> leftover;
  leftover.reserve(params.k - part_size);
  for (MessageIndex i = 1; i <= params.k; ++i) {
    if (i != real.w && !set_contains(real.s, i)) leftover.push_back(i);
  }

  Rng rng(seed);
  std::size_t drawn_slot = static_cast<std::size_t>(rng.below(parts_n));
  rng.shuffle(leftover);

  // Slot assignment, then chunking the shuffled leftover into the other
  // slots. Every canonical partition containing the demand part has the
  // same number of (slot, ordering) preimages, so the canonical result is
  // uniform over those partitions.
  std::vector<IndexSet> slots(parts_n);
  slots[drawn_slot] = demand_part;
  std::size_t cursor = 0;
  for (std::size_t j = 0; j < parts_n; ++j) {
    if (j == drawn_slot) continue;
    slots[j].assign(leftover.begin() + cursor, leftover.begin() + cursor + part_size);
    cursor += part_size;
  }

  PartitionQuery query = PartitionQuery::canonical(std::move(slots));
  std::size_t demand_pos = 0;
  while (demand_pos < query.parts.size() && !(query.parts[demand_pos] == demand_part)) {
    ++demand_pos;
  }
  return PcQuery{std::move(query), demand_pos, drawn_slot};
}

Answer pc_answer(const PartitionQuery& query, const Dataset& data) {
  const std::uint32_t k = data.k();
  if (query.parts.empty()) throw usage_error("empty partition query");
  const std::uint32_t m = static_cast<std::uint32_t>(query.parts.front().size()) - 1;
  query.validate(k, m);

  Answer answer;
  answer.combos.reserve(query.parts.size());
  for (const auto& part : query.parts) {
    MessageVector combo = MessageVector::zero(data.n(), data.q());
    for (MessageIndex i : part) combo = combo.added(data.message(i));
    answer.combos.push_back(std::move(combo));
  }
  return answer;
}

MessageVector pc_decode(const Answer& answer, std::size_t demand_part, const IndexSet& s,
                        const SideInfo& side_info) {
  if (demand_part >= answer.combos.size()) throw usage_error("demand part index out of range");
  MessageVector result = answer.combos[demand_part];
  for (MessageIndex i : s) {
    auto it = side_info.find(i);
    if (it == side_info.end()) {
      throw usage_error("missing side information for message " + std::to_string(i));
    }
    result = result.subtracted(it->second);
  }
  return result;
}

MdsQuery mds_build_query(const ProblemParams& params) {
  params.require_field_fits();
  MdsQuery query{params.k, params.m, params.q, {}};
  query.omegas.resize(params.k);
  for (std::uint32_t i = 0; i < params.k; ++i) query.omegas[i] = i;
  return query;
}

Answer mds_answer(const MdsQuery& query, const Dataset& data) {
  query.validate();
  if (query.k != data.k()) throw usage_error("mds query K does not match dataset");
  if (query.q != data.q()) throw usage_error("mds query field does not match dataset");
  PrimeField field(query.q);

  const std::uint32_t rows = query.k - query.m;
  Answer answer;
  answer.combos.assign(rows, MessageVector::zero(data.n(), data.q()));
  for (std::uint32_t i = 0; i < query.k; ++i) {
    FieldElement omega = field.element(query.omegas[i]);
    FieldElement power = field.one();
    const MessageVector& msg = data.message(i + 1);
    for (std::uint32_t j = 0; j < rows; ++j) {
      answer.combos[j] = answer.combos[j].axpy(power, msg);
      power = field.mul(power, omega);
    }
  }
  return answer;
}

MessageVector mds_decode(const Answer& answer, const MdsQuery& query, MessageIndex w,
                         const IndexSet& s, const SideInfo& side_info) {
  query.validate();
  const std::uint32_t rows = query.k - query.m;
  if (answer.combos.size() != rows) {
    throw usage_error("answer has wrong combo count for mds query");
  }
  if (s.size() != query.m) throw usage_error("side set size does not match query");
  if (set_contains(s, w)) throw usage_error("demand index inside side set");
  for (MessageIndex i : s) {
    if (side_info.find(i) == side_info.end()) {
      throw usage_error("missing side information for message " + std::to_string(i));
    }
  }

  PrimeField field(query.q);
  // Strip the known messages' contribution from every combo.
  std::vector<MessageVector> rhs = answer.combos;
  for (MessageIndex i : s) {
    FieldElement omega = field.element(query.omegas[i - 1]);
    FieldElement power = field.one();
    const MessageVector& known = side_info.at(i);
    for (std::uint32_t j = 0; j < rows; ++j) {
      rhs[j] = rhs[j].axpy(field.neg(power), known);
      power = field.mul(power, omega);
    }
  }

  // Unknowns: all indices outside S, in ascending order.
  IndexSet unknowns;
  unknowns.reserve(rows);
  for (MessageIndex i = 1; i <= query.k; ++i) {
    if (!set_contains(s, i)) unknowns.push_back(i);
  }

  std::vector<std::vector<FieldElement>> matrix(rows, std::vector<FieldElement>(rows));
  for (std::uint32_t j = 0; j < rows; ++j) {
    for (std::uint32_t c = 0; c < rows; ++c) {
      matrix[j][c] = field.pow(field.element(query.omegas[unknowns[c] - 1]), j);
    }
  }

  std::vector<MessageVector> solved;
  try {
    solved = solve_square_system(field, matrix, rhs);
  } catch (const rank_error& e) {
    // Distinct evaluation points make this system Vandermonde, hence
    // invertible; reaching here means the query or answer is corrupt.
    throw internal_error(std::string("mds decode hit a singular system: ") + e.what());
  }

  auto pos = std::lower_bound(unknowns.begin(), unknowns.end(), w);
  if (pos == unknowns.end() || *pos != w) throw usage_error("demand index out of range");
  return solved[static_cast<std::size_t>(pos - unknowns.begin())];
}

namespace {

IndexSet sorted_range(MessageIndex lo, MessageIndex hi) {
  IndexSet out;
  out.reserve(hi - lo + 1);
  for (MessageIndex i = lo; i <= hi; ++i) out.push_back(i);
  return out;
}

IndexSet erase_element(IndexSet s, MessageIndex drop) {
  s.erase(std::remove(s.begin(), s.end(), drop), s.end());
  return s;
}

void check_profile_matches(const PopularityProfile& profile, const ProblemParams& params) {
  if (profile.size() != params.k) {
    throw usage_error("profile size does not match K");
  }
}

}  // namespace

Rational rcs_gamma_base(const PopularityProfile& profile, const ProblemParams& params,
                        std::uint64_t enumeration_limit) {
  params.require_rcs();
  check_profile_matches(profile, params);
  const std::uint32_t k = params.k;
  const std::uint32_t m = params.m;

  IndexSet base_side = sorted_range(2, m + 1);
  IndexSet tail = sorted_range(k - m, k);

  IndexSet needed = tail;
  needed.push_back(1);
  needed = make_index_set(std::move(needed));
  std::vector<Rational> marginals = pmf_w_many(profile, m, needed, enumeration_limit);
  auto marginal_of = [&](MessageIndex w) -> const Rational& {
    auto it = std::lower_bound(needed.begin(), needed.end(), w);
    return marginals[static_cast<std::size_t>(it - needed.begin())];
  };

  Rational joint_base = joint_pmf(profile, m, 1, base_side);
  const Rational& pw1 = marginal_of(1);

  Rational best(1);
  for (MessageIndex i : tail) {
    IndexSet side = erase_element(tail, i);
    Rational ratio =
        joint_pmf(profile, m, i, side) * pw1 / (joint_base * marginal_of(i));
    if (ratio < best) best = ratio;
  }
  return best;
}

Rational rcs_gamma(const PopularityProfile& profile, const ProblemParams& params, MessageIndex w,
                   const IndexSet& s, std::uint64_t enumeration_limit) {
  params.require_rcs();
  check_profile_matches(profile, params);
  DemandRealization real = DemandRealization::make(w, s, params);
  const std::uint32_t m = params.m;

  MessageIndex w_sorted = profile.to_sorted(real.w);
  IndexSet s_sorted = profile.to_sorted(real.s);

  IndexSet needed = w_sorted == 1 ? IndexSet{1} : make_index_set({1, w_sorted});
  std::vector<Rational> marginals = pmf_w_many(profile, m, needed, enumeration_limit);
  const Rational& pw1 = marginals.front();
  const Rational& pww = marginals.back();

  Rational base = rcs_gamma_base(profile, params, enumeration_limit);
  Rational joint_base = joint_pmf(profile, m, 1, sorted_range(2, m + 1));
  Rational gamma = base * joint_base * pww / (joint_pmf(profile, m, w_sorted, s_sorted) * pw1);
  if (gamma < 0 || gamma > 1) {
    throw internal_error("selection probability " + fraction_string(gamma) + " outside [0,1]");
  }
  return gamma;
}

RcsPolicy RcsPolicy::build(const PopularityProfile& profile, const ProblemParams& params,
                           std::uint64_t enumeration_limit) {
  params.require_rcs();
  check_profile_matches(profile, params);
  RcsPolicy policy;
  policy.profile_ = &profile;
  policy.m_ = params.m;
  policy.base_gamma_ = rcs_gamma_base(profile, params, enumeration_limit);
  policy.pmf_w_ = pmf_w_all(profile, params.m, enumeration_limit);
  Rational joint_base = joint_pmf(profile, params.m, 1, sorted_range(2, params.m + 1));
  policy.selection_constant_ = policy.base_gamma_ * joint_base / policy.pmf_w_.front();
  return policy;
}

const Rational& RcsPolicy::marginal(MessageIndex w_sorted) const {
  if (w_sorted < 1 || w_sorted > pmf_w_.size()) throw usage_error("index out of range");
  return pmf_w_[w_sorted - 1];
}

Rational RcsPolicy::gamma_sorted(MessageIndex w_sorted, const IndexSet& s_sorted) const {
  Rational gamma = selection_constant_ * marginal(w_sorted) /
                   joint_pmf(*profile_, m_, w_sorted, s_sorted);
  if (gamma < 0 || gamma > 1) {
    throw internal_error("selection probability " + fraction_string(gamma) + " outside [0,1]");
  }
  return gamma;
}

Rational RcsPolicy::gamma(const PopularityProfile& profile, MessageIndex w,
                          const IndexSet& s) const {
  return gamma_sorted(profile.to_sorted(w), profile.to_sorted(s));
}

bool exact_bernoulli(const Rational& p, std::uint64_t uniform_draw) {
  if (p < 0 || p > 1) throw usage_error("probability outside [0,1]");
  BigInt threshold = (p.get_num() << 64) / p.get_den();
  return BigInt(uniform_draw) < threshold;
}

RoundResult rcs_round(const PopularityProfile& profile, const ProblemParams& params,
                      MessageIndex w, const IndexSet& s, const Dataset& data,
                      std::uint64_t seed) {
  params.require_rcs();
  check_profile_matches(profile, params);
  if (data.k() != params.k || data.q() != params.q || data.n() != params.n) {
    throw usage_error("dataset does not match the problem parameters");
  }
  DemandRealization real = DemandRealization::make(w, s, params);

  Rational gamma = rcs_gamma(profile, params, real.w, real.s);
  Rng rng(seed);
  bool pick_partition = exact_bernoulli(gamma, rng.next_u64());

  SideInfo side = side_info_from_dataset(data, real.s);
  RoundResult result;
  if (pick_partition) {
    PcQuery pc = pc_build_query(params, real.w, real.s, derive_seed(seed, 1));
    result.answer = pc_answer(pc.query, data);
    result.decoded = pc_decode(result.answer, pc.demand_part, real.s, side);
    result.download_units = pc.query.parts.size();
    result.scheme = SchemeKind::partition_and_code;
    result.query = std::move(pc.query);
  } else {
    MdsQuery query = mds_build_query(params);
    result.answer = mds_answer(query, data);
    result.decoded = mds_decode(result.answer, query, real.w, real.s, side);
    result.download_units = query.k - query.m;
    result.scheme = SchemeKind::mds_code;
    result.query = std::move(query);
  }
  return result;
}

BigInt partition_count(std::uint32_t k, std::uint32_t m) {
  const std::uint32_t part = m + 1;
  if (k % part != 0) throw usage_error("K must be a multiple of M+1");
  const std::uint32_t n = k / part;
  BigInt denom = 1;
  BigInt part_fact = factorial(part);
  for (std::uint32_t i = 0; i < n; ++i) denom *= part_fact;
  denom *= factorial(n);
  return factorial(k) / denom;
}

BigInt leftover_partition_count(std::uint32_t k, std::uint32_t m) {
  const std::uint32_t part = m + 1;
  if (k % part != 0 || k / part < 1) throw usage_error("K must be a multiple of M+1");
  return partition_count(k - part, m);
}

namespace {

void enumerate_partitions(std::vector<MessageIndex>& available, std::size_t part_size,
                          std::vector<IndexSet>& acc,
                          const std::function<void(const std::vector<IndexSet>&)>& visit) {
  if (available.empty()) {
    visit(acc);
    return;
  }
  // The smallest remaining index anchors the next part; choosing its
  // companions in lexicographic order yields each canonical partition once.
  MessageIndex anchor = available.front();
  std::vector<MessageIndex> rest(available.begin() + 1, available.end());
  IndexSet companions_universe(rest.begin(), rest.end());
  for_each_subset(companions_universe, static_cast<std::uint32_t>(part_size - 1),
                  [&](const IndexSet& companions) {
                    IndexSet part{anchor};
                    part.insert(part.end(), companions.begin(), companions.end());
                    std::vector<MessageIndex> remaining;
                    remaining.reserve(rest.size() - companions.size());
                    for (MessageIndex i : rest) {
                      if (!set_contains(companions, i)) remaining.push_back(i);
                    }
                    acc.push_back(std::move(part));
                    enumerate_partitions(remaining, part_size, acc, visit);
                    acc.pop_back();
                  });
}

}  // namespace

void for_each_equal_partition(std::uint32_t k, std::uint32_t m,
                              const std::function<void(const std::vector<IndexSet>&)>& visit,
                              std::uint64_t enumeration_limit) {
  BigInt count = partition_count(k, m);
  if (count > enumeration_limit) {
    throw resource_error("enumerating " + count.get_str() + " partitions exceeds the limit of " +
                         std::to_string(enumeration_limit));
  }
  std::vector<MessageIndex> all;
  all.reserve(k);
  for (MessageIndex i = 1; i <= k; ++i) all.push_back(i);
  std::vector<IndexSet> acc;
  enumerate_partitions(all, std::size_t{m} + 1, acc, visit);
}

}  // namespace papir
