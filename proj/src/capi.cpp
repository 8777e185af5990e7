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

#include "papir.h"

#include <cctype>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "papir/analysis.hpp"
#include "papir/netproto.hpp"
#include "papir/simulation.hpp"

namespace {

thread_local std::string g_last_error;

int set_error(int code, const std::string& message) {
  g_last_error = message;
  return code;
}

// Maps the C++ taxonomy onto status codes.
int run(const std::function<int()>& body) {
  try {
    return body();
  } catch (const papir::usage_error& e) {
    return set_error(PAPIR_ERR_USAGE, e.what());
  } catch (const papir::config_error& e) {
    return set_error(PAPIR_ERR_CONFIG, e.what());
  } catch (const papir::resource_error& e) {
    return set_error(PAPIR_ERR_RESOURCE, e.what());
  } catch (const papir::io_error& e) {
    return set_error(PAPIR_ERR_IO, e.what());
  } catch (const papir::protocol_error& e) {
    return set_error(PAPIR_ERR_PROTOCOL, e.what());
  } catch (const papir::net_error& e) {
    return set_error(PAPIR_ERR_NET, e.what());
  } catch (const papir::decode_error& e) {
    return set_error(PAPIR_ERR_DECODE, e.what());
  } catch (const std::exception& e) {
    return set_error(PAPIR_ERR_INTERNAL, e.what());
  }
}

papir::ProblemParams to_params(const papir_params* params) {
  if (params == nullptr) throw papir::usage_error("params must not be null");
  return papir::ProblemParams::make(params->k, params->m, params->q, params->n);
}

papir::IndexSet to_index_set(const uint32_t* ids, size_t len) {
  std::vector<papir::MessageIndex> v(ids, ids + len);
  return papir::make_index_set(std::move(v));
}

int write_string(const std::string& value, char* buf, size_t buf_len) {
  if (buf == nullptr || buf_len == 0 || value.size() + 1 > buf_len) {
    throw papir::usage_error("output buffer too small (" + std::to_string(value.size() + 1) +
                             " bytes needed)");
  }
  std::memcpy(buf, value.c_str(), value.size() + 1);
  return PAPIR_OK;
}

}  // namespace

namespace {

papir::SelectionPolicy to_policy(papir_policy policy) {
  switch (policy) {
    case PAPIR_POLICY_PC:
      return papir::SelectionPolicy::pc_only;
    case PAPIR_POLICY_MDS:
      return papir::SelectionPolicy::mds_only;
    case PAPIR_POLICY_RCS:
      return papir::SelectionPolicy::rcs;
  }
  throw papir::usage_error("unknown policy");
}

papir::PartitionQuery parse_partition(const std::string& text) {
  std::vector<papir::IndexSet> parts;
  std::vector<papir::MessageIndex> current;
  std::string token;
  auto flush_token = [&] {
    if (token.empty()) return;
    current.push_back(static_cast<papir::MessageIndex>(std::stoul(token)));
    token.clear();
  };
  auto flush_part = [&] {
    flush_token();
    if (current.empty()) throw papir::usage_error("empty partition part");
    parts.push_back(papir::make_index_set(current));
    current.clear();
  };
  for (char c : text) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      token.push_back(c);
    } else if (c == ',') {
      flush_token();
    } else if (c == '|') {
      flush_part();
    } else if (c == '{' || c == '}' || c == ' ') {
      flush_token();
    } else {
      throw papir::usage_error(std::string("bad character in partition: ") + c);
    }
  }
  flush_part();
  return papir::PartitionQuery::canonical(std::move(parts));
}

}  // namespace

struct papir_profile {
  papir::PopularityProfile impl;
  std::vector<std::string> weight_cache;
};

struct papir_rate_report {
  std::string fractions[4];
  std::string decimals[4];
};

struct papir_verdict {
  bool passed = true;
  std::vector<std::string> lines;
};

struct papir_gamma_table {
  std::string base;
  std::vector<std::string> entries;
};

struct papir_posteriors {
  std::string query_prob;
  std::vector<std::string> values;
};

struct papir_server {
  papir::net::Server impl;
};

struct papir_fetch_result {
  papir::net::FetchResult impl;
};

extern "C" {

const char* papir_version(void) { return "0.1.0"; }

const char* papir_last_error(void) { return g_last_error.c_str(); }

uint64_t papir_default_field(uint32_t k) { return papir::smallest_prime_at_least(k); }

int papir_profile_from_file(const char* path, papir_profile** out) {
  return run([&] {
    if (path == nullptr || out == nullptr) throw papir::usage_error("null argument");
    *out = new papir_profile{papir::PopularityProfile::from_file(path), {}};
    return PAPIR_OK;
  });
}

int papir_profile_parse(const char* text, papir_profile** out) {
  return run([&] {
    if (text == nullptr || out == nullptr) throw papir::usage_error("null argument");
    *out = new papir_profile{papir::PopularityProfile::parse(text), {}};
    return PAPIR_OK;
  });
}

int papir_profile_uniform(uint32_t k, papir_profile** out) {
  return run([&] {
    if (out == nullptr) throw papir::usage_error("null argument");
    *out = new papir_profile{papir::PopularityProfile::uniform(k), {}};
    return PAPIR_OK;
  });
}

int papir_profile_sample(const char* distribution, double a, double b, uint32_t zipf_n,
                         uint32_t k, uint64_t seed, papir_profile** out) {
  return run([&] {
    if (distribution == nullptr || out == nullptr) throw papir::usage_error("null argument");
    papir::ProfileSpec spec;
    std::string name = distribution;
    if (name == "uniform") {
      spec.kind = papir::DistributionKind::uniform;
    } else if (name == "zipf") {
      spec.kind = papir::DistributionKind::zipf;
      spec.zipf_n = zipf_n;
      spec.zipf_s = a;
    } else if (name == "gamma") {
      spec.kind = papir::DistributionKind::gamma;
      spec.shape = a;
      spec.scale = b;
    } else if (name == "weibull") {
      spec.kind = papir::DistributionKind::weibull;
      spec.shape = a;
      spec.scale = b;
    } else {
      throw papir::usage_error("unknown distribution: " + name);
    }
    *out = new papir_profile{papir::sample_profile(spec, k, seed), {}};
    return PAPIR_OK;
  });
}

uint32_t papir_profile_size(const papir_profile* profile) {
  return profile ? static_cast<uint32_t>(profile->impl.size()) : 0;
}

const char* papir_profile_weight(papir_profile* profile, uint32_t message_id) {
  if (profile == nullptr) return nullptr;
  int rc = run([&] {
    if (profile->weight_cache.empty()) {
      profile->weight_cache.resize(profile->impl.size());
      for (papir::MessageIndex id = 1; id <= profile->impl.size(); ++id) {
        profile->weight_cache[id - 1] =
            papir::fraction_string(profile->impl.lambda(profile->impl.to_sorted(id)));
      }
    }
    if (message_id < 1 || message_id > profile->weight_cache.size()) {
      throw papir::usage_error("message id out of range");
    }
    return PAPIR_OK;
  });
  if (rc != PAPIR_OK) return nullptr;
  return profile->weight_cache[message_id - 1].c_str();
}

void papir_profile_free(papir_profile* profile) { delete profile; }

int papir_pmf_w(const papir_profile* profile, const papir_params* params, uint32_t w, char* buf,
                size_t buf_len) {
  return run([&] {
    if (profile == nullptr) throw papir::usage_error("null profile");
    auto p = to_params(params);
    if (profile->impl.size() != p.k) throw papir::usage_error("profile size does not match K");
    papir::Rational value =
        papir::pmf_w(profile->impl, p.m, profile->impl.to_sorted(w));
    return write_string(papir::fraction_string(value), buf, buf_len);
  });
}

int papir_joint_pmf(const papir_profile* profile, const papir_params* params, uint32_t w,
                    const uint32_t* s, size_t s_len, char* buf, size_t buf_len) {
  return run([&] {
    if (profile == nullptr || s == nullptr) throw papir::usage_error("null argument");
    auto p = to_params(params);
    if (profile->impl.size() != p.k) throw papir::usage_error("profile size does not match K");
    papir::Rational value =
        papir::joint_pmf(profile->impl, p.m, profile->impl.to_sorted(w),
                         profile->impl.to_sorted(to_index_set(s, s_len)));
    return write_string(papir::fraction_string(value), buf, buf_len);
  });
}

int papir_gamma(const papir_profile* profile, const papir_params* params, uint32_t w,
                const uint32_t* s, size_t s_len, char* buf, size_t buf_len) {
  return run([&] {
    if (profile == nullptr || s == nullptr) throw papir::usage_error("null argument");
    auto p = to_params(params);
    papir::Rational value =
        papir::rcs_gamma(profile->impl, p, w, to_index_set(s, s_len));
    return write_string(papir::fraction_string(value), buf, buf_len);
  });
}

int papir_rates(const papir_profile* profile, const papir_params* params,
                papir_rate_report** out) {
  return run([&] {
    if (profile == nullptr || out == nullptr) throw papir::usage_error("null argument");
    auto p = to_params(params);
    papir::RateReport report = papir::make_rate_report(profile->impl, p);
    auto r = std::make_unique<papir_rate_report>();
    const papir::Rational* values[4] = {&report.r_ub, &report.r_lb, &report.r_mds,
                                        &report.expected_download_units};
    for (int i = 0; i < 4; ++i) {
      r->fractions[i] = papir::fraction_string(*values[i]);
      r->decimals[i] = papir::decimal_string(*values[i]);
    }
    *out = r.release();
    return PAPIR_OK;
  });
}

const char* papir_rate_fraction(const papir_rate_report* report, papir_rate_field field) {
  if (report == nullptr || field < 0 || field > 3) return nullptr;
  return report->fractions[field].c_str();
}

const char* papir_rate_decimal(const papir_rate_report* report, papir_rate_field field) {
  if (report == nullptr || field < 0 || field > 3) return nullptr;
  return report->decimals[field].c_str();
}

void papir_rate_report_free(papir_rate_report* report) { delete report; }

int papir_verify_privacy(const papir_profile* profile, const papir_params* params,
                         papir_policy policy, papir_verdict** out) {
  return run([&] {
    if (profile == nullptr || out == nullptr) throw papir::usage_error("null argument");
    auto p = to_params(params);
    papir::PrivacyVerdict verdict =
        papir::privacy_oracle(profile->impl, p, to_policy(policy));
    auto v = std::make_unique<papir_verdict>();
    v->passed = verdict.passed;
    for (const auto& violation : verdict.violations) {
      v->lines.push_back("query=" + violation.query_repr + " w=" + std::to_string(violation.w) +
                         " posterior=" + papir::fraction_string(violation.posterior) +
                         " prior=" + papir::fraction_string(violation.prior));
    }
    *out = v.release();
    return PAPIR_OK;
  });
}

int papir_verdict_passed(const papir_verdict* verdict) {
  return verdict != nullptr && verdict->passed ? 1 : 0;
}

size_t papir_verdict_violation_count(const papir_verdict* verdict) {
  return verdict ? verdict->lines.size() : 0;
}

const char* papir_verdict_violation(const papir_verdict* verdict, size_t index) {
  if (verdict == nullptr || index >= verdict->lines.size()) return nullptr;
  return verdict->lines[index].c_str();
}

void papir_verdict_free(papir_verdict* verdict) { delete verdict; }

int papir_partition_posteriors(const papir_profile* profile, const papir_params* params,
                               papir_policy policy, const char* partition,
                               papir_posteriors** out) {
  return run([&] {
    if (profile == nullptr || partition == nullptr || out == nullptr) {
      throw papir::usage_error("null argument");
    }
    auto p = to_params(params);
    papir::PartitionQuery query = parse_partition(partition);
    papir::PosteriorReport report =
        papir::partition_posteriors(profile->impl, p, to_policy(policy), query);
    auto result = std::make_unique<papir_posteriors>();
    result->query_prob = papir::fraction_string(report.query_prob);
    for (const auto& value : report.posteriors) {
      result->values.push_back(papir::fraction_string(value));
    }
    *out = result.release();
    return PAPIR_OK;
  });
}

const char* papir_posteriors_query_prob(const papir_posteriors* post) {
  return post ? post->query_prob.c_str() : nullptr;
}

const char* papir_posteriors_value(const papir_posteriors* post, uint32_t message_id) {
  if (post == nullptr || message_id < 1 || message_id > post->values.size()) return nullptr;
  return post->values[message_id - 1].c_str();
}

void papir_posteriors_free(papir_posteriors* post) { delete post; }

int papir_gamma_table_build(const papir_profile* profile, const papir_params* params,
                      papir_gamma_table** out) {
  return run([&] {
    if (profile == nullptr || out == nullptr) throw papir::usage_error("null argument");
    auto p = to_params(params);
    papir::RcsPolicy policy = papir::RcsPolicy::build(profile->impl, p);

    papir::BigInt pair_count = papir::binomial(p.k - 1, p.m) * p.k;
    if (pair_count > papir::kDefaultEnumerationLimit) {
      throw papir::resource_error("gamma table with " + pair_count.get_str() +
                                  " entries is too large to materialize");
    }

    auto table = std::make_unique<papir_gamma_table>();
    table->base = papir::fraction_string(policy.base_gamma());
    for (papir::MessageIndex w = 1; w <= p.k; ++w) {
      papir::IndexSet universe;
      for (papir::MessageIndex i = 1; i <= p.k; ++i) {
        if (i != w) universe.push_back(i);
      }
      papir::for_each_subset(universe, p.m, [&](const papir::IndexSet& s) {
        papir::Rational gamma = policy.gamma(profile->impl, w, s);
        table->entries.push_back("w=" + std::to_string(w) + " s=" + papir::index_set_string(s) +
                                 " gamma=" + papir::fraction_string(gamma));
      });
    }
    *out = table.release();
    return PAPIR_OK;
  });
}

const char* papir_gamma_table_base(const papir_gamma_table* table) {
  return table ? table->base.c_str() : nullptr;
}

size_t papir_gamma_table_count(const papir_gamma_table* table) {
  return table ? table->entries.size() : 0;
}

const char* papir_gamma_table_entry(const papir_gamma_table* table, size_t index) {
  if (table == nullptr || index >= table->entries.size()) return nullptr;
  return table->entries[index].c_str();
}

void papir_gamma_table_free(papir_gamma_table* table) { delete table; }

int papir_simulate_file(const char* config_path, const char* csv_path) {
  return run([&] {
    if (config_path == nullptr || csv_path == nullptr) throw papir::usage_error("null argument");
    papir::ExperimentConfig config = papir::ExperimentConfig::from_file(config_path);
    papir::write_csv(papir::run_experiment(config), csv_path);
    return PAPIR_OK;
  });
}

int papir_dataset_generate(const char* path, uint32_t k, uint32_t n, uint64_t q, uint64_t seed) {
  return run([&] {
    if (path == nullptr) throw papir::usage_error("null path");
    auto params = papir::ProblemParams::make(k, 1, q, n);
    papir::net::write_dataset_file(path, papir::Dataset::random(params, seed));
    return PAPIR_OK;
  });
}

int papir_side_info_extract(const char* dataset_path, const uint32_t* ids, size_t id_count,
                            const char* out_path) {
  return run([&] {
    if (dataset_path == nullptr || ids == nullptr || out_path == nullptr) {
      throw papir::usage_error("null argument");
    }
    papir::Dataset data = papir::net::read_dataset_file(dataset_path);
    papir::IndexSet set = to_index_set(ids, id_count);
    papir::SideInfo side = papir::side_info_from_dataset(data, set);
    papir::net::write_side_info_file(out_path, side, data.n(), data.q());
    return PAPIR_OK;
  });
}

int papir_server_start(const char* dataset_path, const char* host, uint16_t port,
                       papir_server** out) {
  return run([&] {
    if (dataset_path == nullptr || out == nullptr) throw papir::usage_error("null argument");
    papir::Dataset data = papir::net::read_dataset_file(dataset_path);
    auto server = std::make_unique<papir_server>();
    server->impl.start(std::move(data), host ? host : "127.0.0.1", port);
    *out = server.release();
    return PAPIR_OK;
  });
}

uint16_t papir_server_port(const papir_server* server) {
  return server ? server->impl.port() : 0;
}

int papir_server_stop(papir_server* server) {
  return run([&] {
    if (server == nullptr) throw papir::usage_error("null server");
    server->impl.stop();
    return PAPIR_OK;
  });
}

void papir_server_free(papir_server* server) { delete server; }

int papir_fetch(const char* host, uint16_t port, const papir_params* params,
                const papir_profile* profile, uint32_t w, const uint32_t* s, size_t s_len,
                const char* side_info_path, uint64_t seed, papir_fetch_result** out) {
  return run([&] {
    if (host == nullptr || profile == nullptr || s == nullptr || side_info_path == nullptr ||
        out == nullptr) {
      throw papir::usage_error("null argument");
    }
    auto p = to_params(params);
    papir::SideInfo side = papir::net::read_side_info_file(side_info_path);
    papir::net::FetchResult result = papir::net::fetch(
        profile->impl, p, w, to_index_set(s, s_len), side, host, port, seed);
    *out = new papir_fetch_result{std::move(result)};
    return PAPIR_OK;
  });
}

int papir_fetch_scheme(const papir_fetch_result* result) {
  if (result == nullptr) return -1;
  return result->impl.scheme == papir::SchemeKind::partition_and_code ? 0 : 1;
}

uint64_t papir_fetch_download_units(const papir_fetch_result* result) {
  return result ? result->impl.download_units : 0;
}

size_t papir_fetch_message_len(const papir_fetch_result* result) {
  return result ? result->impl.message.length() : 0;
}

uint64_t papir_fetch_message_coord(const papir_fetch_result* result, size_t index) {
  if (result == nullptr || index >= result->impl.message.length()) return 0;
  return result->impl.message.raw(index);
}

void papir_fetch_result_free(papir_fetch_result* result) { delete result; }

}  // extern "C"
