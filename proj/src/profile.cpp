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

#include "papir/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "papir/errors.hpp"
#include "papir/field.hpp"
#include "papir/rng.hpp"

namespace papir {

IndexSet make_index_set(std::vector<MessageIndex> indices) {
  std::sort(indices.begin(), indices.end());
  auto dup = std::adjacent_find(indices.begin(), indices.end());
  if (dup != indices.end()) throw usage_error("index set contains duplicates");
  return indices;
}

bool set_contains(const IndexSet& s, MessageIndex i) {
  return std::binary_search(s.begin(), s.end(), i);
}

std::string index_set_string(const IndexSet& s) {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out << ',';
    out << s[i];
  }
  out << '}';
  return out.str();
}

PopularityProfile PopularityProfile::from_weights(std::vector<Rational> weights) {
  if (weights.empty()) throw usage_error("popularity profile must not be empty");
  for (const auto& w : weights) {
    if (w <= 0) throw usage_error("popularity weights must be positive");
  }

  PopularityProfile p;
  const std::size_t k = weights.size();
  std::vector<MessageIndex> order(k);
  std::iota(order.begin(), order.end(), MessageIndex{1});
  // Stable: ties keep caller order.
  std::stable_sort(order.begin(), order.end(), [&](MessageIndex a, MessageIndex b) {
    return weights[a - 1] > weights[b - 1];
  });

  p.sorted_.reserve(k);
  p.sorted_to_caller_ = order;
  p.caller_to_sorted_.assign(k, 0);
  p.total_ = 0;
  for (std::size_t pos = 0; pos < k; ++pos) {
    p.sorted_.push_back(weights[order[pos] - 1]);
    p.caller_to_sorted_[order[pos] - 1] = static_cast<MessageIndex>(pos + 1);
    p.total_ += p.sorted_.back();
  }

  // Common-denominator integer view of the sorted weights.
  BigInt common_den = 1;
  for (const auto& w : p.sorted_) {
    mpz_lcm(common_den.get_mpz_t(), common_den.get_mpz_t(), w.get_den().get_mpz_t());
  }
  p.int_weights_.reserve(k);
  p.int_total_ = 0;
  for (const auto& w : p.sorted_) {
    BigInt a = w.get_num() * (common_den / w.get_den());
    p.int_total_ += a;
    p.int_weights_.push_back(std::move(a));
  }
  return p;
}

PopularityProfile PopularityProfile::uniform(std::size_t k) {
  return from_weights(std::vector<Rational>(k, Rational(1)));
}

PopularityProfile PopularityProfile::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<Rational> weights;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string trimmed;
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c))) trimmed.push_back(c);
    }
    if (trimmed.empty() || trimmed[0] == '#') continue;
    try {
      weights.push_back(parse_rational(trimmed, /*require_positive=*/true));
    } catch (const usage_error& e) {
      throw usage_error("profile line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (weights.empty()) throw usage_error("profile contains no weights");
  return from_weights(std::move(weights));
}

PopularityProfile PopularityProfile::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open profile file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool PopularityProfile::is_uniform() const {
  return std::all_of(sorted_.begin(), sorted_.end(),
                     [&](const Rational& w) { return w == sorted_.front(); });
}

const Rational& PopularityProfile::lambda(MessageIndex sorted_pos) const {
  if (sorted_pos < 1 || sorted_pos > sorted_.size()) {
    throw usage_error("sorted position out of range: " + std::to_string(sorted_pos));
  }
  return sorted_[sorted_pos - 1];
}

MessageIndex PopularityProfile::to_caller(MessageIndex sorted_pos) const {
  if (sorted_pos < 1 || sorted_pos > sorted_.size()) {
    throw usage_error("sorted position out of range: " + std::to_string(sorted_pos));
  }
  return sorted_to_caller_[sorted_pos - 1];
}

MessageIndex PopularityProfile::to_sorted(MessageIndex caller_id) const {
  if (caller_id < 1 || caller_id > sorted_.size()) {
    throw usage_error("message id out of range: " + std::to_string(caller_id));
  }
  return caller_to_sorted_[caller_id - 1];
}

IndexSet PopularityProfile::to_sorted(const IndexSet& caller_ids) const {
  std::vector<MessageIndex> out;
  out.reserve(caller_ids.size());
  for (MessageIndex id : caller_ids) out.push_back(to_sorted(id));
  return make_index_set(std::move(out));
}

IndexSet PopularityProfile::to_caller(const IndexSet& sorted_positions) const {
  std::vector<MessageIndex> out;
  out.reserve(sorted_positions.size());
  for (MessageIndex pos : sorted_positions) out.push_back(to_caller(pos));
  return make_index_set(std::move(out));
}

ProblemParams ProblemParams::make(std::uint32_t k, std::uint32_t m, std::uint64_t q,
                                  std::uint32_t n) {
  if (k < 2) throw usage_error("need at least two messages");
  if (m < 1 || m > k - 1) throw usage_error("side information size must be in [1, K-1]");
  if (n < 1) throw usage_error("message length must be at least 1");
  if (!is_prime_u64(q)) throw usage_error("field modulus must be prime");
  return ProblemParams{k, m, q, n};
}

ProblemParams ProblemParams::with_default_field(std::uint32_t k, std::uint32_t m,
                                                std::uint32_t n) {
  return make(k, m, smallest_prime_at_least(k), n);
}

bool ProblemParams::rcs_supported() const {
  std::uint64_t p = std::uint64_t{m} + 1;
  return k % p == 0 && p * p < k;
}

void ProblemParams::require_rcs() const {
  std::uint64_t p = std::uint64_t{m} + 1;
  if (k % p != 0) {
    throw config_error("K=" + std::to_string(k) + " is not divisible by M+1=" + std::to_string(p));
  }
  if (p * p >= k) {
    throw config_error("(M+1)^2 = " + std::to_string(p * p) +
                       " must be strictly less than K = " + std::to_string(k));
  }
}

void ProblemParams::require_field_fits() const {
  if (q < k) {
    throw config_error("field of size " + std::to_string(q) + " cannot hold " +
                       std::to_string(k) + " distinct evaluation points");
  }
}

DemandRealization DemandRealization::make(MessageIndex w, IndexSet s,
                                          const ProblemParams& params) {
  s = make_index_set(std::move(s));
  if (w < 1 || w > params.k) throw usage_error("demand index out of range");
  if (s.size() != params.m) throw usage_error("side information set must have M indices");
  for (MessageIndex i : s) {
    if (i < 1 || i > params.k) throw usage_error("side information index out of range");
  }
  if (set_contains(s, w)) throw usage_error("demand index must not be in the side set");
  return DemandRealization{w, std::move(s)};
}

std::string ProfileSpec::label() const {
  // Comma-free so labels embed directly in csv fields.
  std::ostringstream out;
  switch (kind) {
    case DistributionKind::uniform:
      out << "uniform";
      break;
    case DistributionKind::zipf:
      out << "zipf-" << zipf_n << "-" << zipf_s;
      break;
    case DistributionKind::gamma:
      out << "gamma-" << shape << "-" << scale;
      break;
    case DistributionKind::weibull:
      out << "weibull-" << shape << "-" << scale;
      break;
    case DistributionKind::explicit_weights:
      out << "explicit";
      break;
  }
  return out.str();
}

namespace {

Rational quantize_positive(double x, std::uint32_t quant_bits) {
  double scaled = std::round(x * std::ldexp(1.0, static_cast<int>(quant_bits)));
  if (scaled < 1.0) return Rational(0);  // caller redraws
  BigInt num;
  // Exact conversion: scaled is an integer-valued double.
  mpz_set_d(num.get_mpz_t(), scaled);
  BigInt den = BigInt(1) << quant_bits;
  Rational r(num, den);
  r.canonicalize();
  return r;
}

double sample_gamma(Rng& rng, double shape, double scale) {
  // Marsaglia-Tsang squeeze; the shape<1 case boosts through shape+1.
  if (shape < 1.0) {
    double u = rng.unit();
    while (u <= 0.0) u = rng.unit();
    return sample_gamma(rng, shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = rng.normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = rng.unit();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v * scale;
    }
  }
}

double sample_weibull(Rng& rng, double shape, double scale) {
  double u = rng.unit();
  while (u >= 1.0) u = rng.unit();
  return scale * std::pow(-std::log1p(-u), 1.0 / shape);
}

std::uint32_t sample_zipf(Rng& rng, const std::vector<double>& cumulative) {
  double total = cumulative.back();
  double target = rng.unit() * total;
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
  if (idx >= cumulative.size()) idx = cumulative.size() - 1;
  return static_cast<std::uint32_t>(idx + 1);
}

}  // namespace

PopularityProfile sample_profile(const ProfileSpec& spec, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw usage_error("profile needs at least two messages");
  Rng rng(seed);
  std::vector<Rational> weights;
  weights.reserve(k);

  switch (spec.kind) {
    case DistributionKind::uniform:
      weights.assign(k, Rational(1));
      break;
    case DistributionKind::explicit_weights:
      if (spec.explicit_weights.size() != k) {
        throw usage_error("explicit profile has wrong length");
      }
      weights = spec.explicit_weights;
      break;
    case DistributionKind::zipf: {
      if (spec.zipf_n < 1 || spec.zipf_s <= 0) throw usage_error("bad zipf parameters");
      std::vector<double> cumulative(spec.zipf_n);
      double acc = 0.0;
      for (std::uint32_t v = 1; v <= spec.zipf_n; ++v) {
        acc += std::pow(static_cast<double>(v), -spec.zipf_s);
        cumulative[v - 1] = acc;
      }
      for (std::size_t i = 0; i < k; ++i) {
        weights.emplace_back(static_cast<unsigned long>(sample_zipf(rng, cumulative)));
      }
      break;
    }
    case DistributionKind::gamma:
    case DistributionKind::weibull: {
      if (spec.shape <= 0 || spec.scale <= 0) throw usage_error("bad distribution parameters");
      if (spec.quant_bits < 1 || spec.quant_bits > 62) {
        throw usage_error("quantization bits out of range");
      }
      for (std::size_t i = 0; i < k; ++i) {
        Rational w(0);
        while (w == 0) {
          double x = spec.kind == DistributionKind::gamma
                         ? sample_gamma(rng, spec.shape, spec.scale)
                         : sample_weibull(rng, spec.shape, spec.scale);
          w = quantize_positive(x, spec.quant_bits);
        }
        weights.push_back(std::move(w));
      }
      break;
    }
  }
  return PopularityProfile::from_weights(std::move(weights));
}

}  // namespace papir
