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

// Command-line front end. Everything goes through the C API in papir.h.

#include <csignal>
#include <ctime>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "papir.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdictFailed = 1;
constexpr int kExitUsage = 2;

[[noreturn]] void fail(int rc) {
  std::cerr << "error: " << papir_last_error() << " (status " << rc << ")\n";
  std::exit(kExitUsage);
}

void check(int rc) {
  if (rc != PAPIR_OK) fail(rc);
}

struct ProfileOptions {
  std::string file;
  std::string weights;  // comma-separated
  bool uniform = false;
  std::string dist;  // zipf | gamma | weibull
  double shape = 0.62;
  double scale = 31.22;
  double zipf_s = 1.0;
  std::uint32_t zipf_n = 100;
  std::uint64_t seed = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--profile", file, "profile file, one weight per line");
    cmd->add_option("--weights", weights, "inline weights, comma separated");
    cmd->add_flag("--uniform", uniform, "uniform popularity profile");
    cmd->add_option("--dist", dist, "sample the profile: zipf|gamma|weibull")
        ->check(CLI::IsMember({"zipf", "gamma", "weibull"}));
    cmd->add_option("--shape", shape, "shape parameter (gamma/weibull)");
    cmd->add_option("--scale", scale, "scale parameter (gamma/weibull)");
    cmd->add_option("--zipf-s", zipf_s, "zipf exponent");
    cmd->add_option("--zipf-n", zipf_n, "zipf support size");
    cmd->add_option("--profile-seed", seed, "seed for --dist sampling");
  }

  papir_profile* load(std::uint32_t k) const {
    papir_profile* profile = nullptr;
    int sources = (!file.empty()) + (!weights.empty()) + uniform + (!dist.empty());
    if (sources != 1) {
      std::cerr << "error: give exactly one of --profile, --weights, --uniform, --dist\n";
      std::exit(kExitUsage);
    }
    if (!file.empty()) {
      check(papir_profile_from_file(file.c_str(), &profile));
    } else if (!weights.empty()) {
      std::string text = weights;
      for (auto& c : text) {
        if (c == ',') c = '\n';
      }
      check(papir_profile_parse(text.c_str(), &profile));
    } else if (uniform) {
      check(papir_profile_uniform(k, &profile));
    } else {
      double a = dist == "zipf" ? zipf_s : shape;
      check(papir_profile_sample(dist.c_str(), a, scale, zipf_n, k, seed, &profile));
    }
    if (k != 0 && papir_profile_size(profile) != k) {
      std::cerr << "error: profile has " << papir_profile_size(profile) << " weights but K is "
                << k << "\n";
      std::exit(kExitUsage);
    }
    return profile;
  }
};

papir_params make_params(std::uint32_t k, std::uint32_t m, std::uint64_t q, std::uint32_t n) {
  if (q == 0) q = papir_default_field(k);
  return papir_params{k, m, q, n};
}

std::vector<std::uint32_t> parse_id_list(const std::string& text) {
  std::vector<std::uint32_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(static_cast<std::uint32_t>(std::stoul(item)));
  }
  return out;
}

int cmd_rates(const ProfileOptions& popts, std::uint32_t k, std::uint32_t m, std::uint64_t q,
              std::uint32_t n, const std::string& format) {
  papir_params params = make_params(k, m, q, n);
  papir_profile* profile = popts.load(k);
  papir_rate_report* report = nullptr;
  check(papir_rates(profile, &params, &report));

  struct Field {
    papir_rate_field id;
    const char* key;
    const char* label;
  };
  const Field fields[] = {
      {PAPIR_RATE_UPPER, "rate_upper_bound", "rate upper bound   "},
      {PAPIR_RATE_LOWER, "rate_lower_bound", "achievable rate    "},
      {PAPIR_RATE_MDS, "rate_mds", "mds-only rate      "},
      {PAPIR_EXPECTED_DOWNLOAD, "expected_download_units", "expected download  "},
  };
  if (format == "kv") {
    std::printf("k=%u\nm=%u\nq=%llu\nn=%u\n", params.k, params.m,
                static_cast<unsigned long long>(params.q), params.n);
    for (const auto& f : fields) {
      std::printf("%s=%s\n%s_decimal=%s\n", f.key, papir_rate_fraction(report, f.id), f.key,
                  papir_rate_decimal(report, f.id));
    }
  } else if (format == "csv") {
    std::printf("field,fraction,decimal\n");
    for (const auto& f : fields) {
      std::printf("%s,%s,%s\n", f.key, papir_rate_fraction(report, f.id),
                  papir_rate_decimal(report, f.id));
    }
  } else {
    std::printf("K=%u M=%u q=%llu n=%u\n", params.k, params.m,
                static_cast<unsigned long long>(params.q), params.n);
    for (const auto& f : fields) {
      std::printf("%s %s (~%s)\n", f.label, papir_rate_fraction(report, f.id),
                  papir_rate_decimal(report, f.id));
    }
  }
  papir_rate_report_free(report);
  papir_profile_free(profile);
  return kExitOk;
}

papir_policy parse_policy(const std::string& name) {
  if (name == "pc") return PAPIR_POLICY_PC;
  if (name == "mds") return PAPIR_POLICY_MDS;
  return PAPIR_POLICY_RCS;
}

int cmd_verify_privacy(const ProfileOptions& popts, std::uint32_t k, std::uint32_t m,
                       const std::string& policy_name, const std::string& format) {
  papir_params params = make_params(k, m, 0, 1);
  papir_profile* profile = popts.load(k);
  papir_verdict* verdict = nullptr;
  check(papir_verify_privacy(profile, &params, parse_policy(policy_name), &verdict));

  bool passed = papir_verdict_passed(verdict) != 0;
  std::size_t count = papir_verdict_violation_count(verdict);
  if (format == "kv") {
    std::printf("policy=%s\npassed=%d\nviolations=%zu\n", policy_name.c_str(), passed ? 1 : 0,
                count);
    for (std::size_t i = 0; i < count; ++i) {
      std::printf("violation_%zu=%s\n", i, papir_verdict_violation(verdict, i));
    }
  } else if (format == "csv") {
    // Summary row only; per-violation detail lives in the text/kv formats.
    std::printf("policy,passed,violations\n%s,%d,%zu\n", policy_name.c_str(), passed ? 1 : 0,
                count);
  } else {
    std::printf("policy %s: %s\n", policy_name.c_str(),
                passed ? "privacy holds (posterior = prior for every query value)"
                       : "PRIVACY VIOLATED");
    for (std::size_t i = 0; i < count; ++i) {
      std::printf("  %s\n", papir_verdict_violation(verdict, i));
    }
  }
  papir_verdict_free(verdict);
  papir_profile_free(profile);
  return passed ? kExitOk : kExitVerdictFailed;
}

int cmd_gamma_table(const ProfileOptions& popts, std::uint32_t k, std::uint32_t m,
                    const std::string& format) {
  papir_params params = make_params(k, m, 0, 1);
  papir_profile* profile = popts.load(k);
  papir_gamma_table* table = nullptr;
  check(papir_gamma_table_build(profile, &params, &table));
  if (format == "kv") {
    std::printf("base_gamma=%s\n", papir_gamma_table_base(table));
    for (std::size_t i = 0; i < papir_gamma_table_count(table); ++i) {
      std::printf("entry_%zu=%s\n", i, papir_gamma_table_entry(table, i));
    }
  } else if (format == "csv") {
    // entries are "w=A s={B,C} gamma=G"; render as A,B;C,G
    std::printf("w,s,gamma\n");
    for (std::size_t i = 0; i < papir_gamma_table_count(table); ++i) {
      std::string line = papir_gamma_table_entry(table, i);
      std::string w_part = line.substr(2, line.find(" s={") - 2);
      std::size_t s_open = line.find("s={") + 3;
      std::string s_part = line.substr(s_open, line.find('}', s_open) - s_open);
      for (auto& c : s_part) {
        if (c == ',') c = ';';
      }
      std::string g_part = line.substr(line.find("gamma=") + 6);
      std::printf("%s,%s,%s\n", w_part.c_str(), s_part.c_str(), g_part.c_str());
    }
  } else {
    std::printf("base gamma (w=1, s={2..%u}): %s\n", m + 1, papir_gamma_table_base(table));
    for (std::size_t i = 0; i < papir_gamma_table_count(table); ++i) {
      std::printf("%s\n", papir_gamma_table_entry(table, i));
    }
  }
  papir_gamma_table_free(table);
  papir_profile_free(profile);
  return kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path) {
  check(papir_simulate_file(config_path.c_str(), out_path.c_str()));
  std::printf("wrote %s\n", out_path.c_str());
  return kExitOk;
}

volatile std::sig_atomic_t g_stop_requested = 0;

void handle_stop_signal(int) { g_stop_requested = 1; }

int cmd_serve(const std::string& dataset, const std::string& host, std::uint16_t port) {
  papir_server* server = nullptr;
  check(papir_server_start(dataset.c_str(), host.c_str(), port, &server));
  std::printf("serving %s on %s:%u\n", dataset.c_str(), host.c_str(), papir_server_port(server));
  std::fflush(stdout);

  std::signal(SIGINT, handle_stop_signal);
  std::signal(SIGTERM, handle_stop_signal);
  while (!g_stop_requested) {
    timespec ts{0, 100 * 1000 * 1000};
    nanosleep(&ts, nullptr);
  }
  papir_server_stop(server);
  papir_server_free(server);
  std::printf("stopped\n");
  return kExitOk;
}

int cmd_fetch(const ProfileOptions& popts, const std::string& host, std::uint16_t port,
              std::uint32_t k, std::uint32_t m, std::uint64_t q, std::uint32_t n,
              std::uint32_t want, const std::string& have, const std::string& side_info,
              std::uint64_t seed) {
  papir_params params = make_params(k, m, q, n);
  papir_profile* profile = popts.load(k);
  std::vector<std::uint32_t> s = parse_id_list(have);
  papir_fetch_result* result = nullptr;
  check(papir_fetch(host.c_str(), port, &params, profile, want, s.data(), s.size(),
                    side_info.c_str(), seed, &result));

  std::printf("scheme: %s\n",
              papir_fetch_scheme(result) == 0 ? "partition-and-code" : "mds");
  std::printf("download_units: %llu\n",
              static_cast<unsigned long long>(papir_fetch_download_units(result)));
  std::printf("message %u:", want);
  for (std::size_t i = 0; i < papir_fetch_message_len(result); ++i) {
    std::printf(" %llu", static_cast<unsigned long long>(papir_fetch_message_coord(result, i)));
  }
  std::printf("\n");
  papir_fetch_result_free(result);
  papir_profile_free(profile);
  return kExitOk;
}

int cmd_gen_dataset(const std::string& out, std::uint32_t k, std::uint32_t n, std::uint64_t q,
                    std::uint64_t seed, const std::string& side_out,
                    const std::string& side_ids) {
  if (q == 0) q = papir_default_field(k);
  check(papir_dataset_generate(out.c_str(), k, n, q, seed));
  std::printf("wrote %s (K=%u n=%u q=%llu)\n", out.c_str(), k, n,
              static_cast<unsigned long long>(q));
  if (!side_out.empty()) {
    std::vector<std::uint32_t> ids = parse_id_list(side_ids);
    if (ids.empty()) {
      std::cerr << "error: --side-out needs --side-ids\n";
      return kExitUsage;
    }
    check(papir_side_info_extract(out.c_str(), ids.data(), ids.size(), side_out.c_str()));
    std::printf("wrote %s (%zu side messages)\n", side_out.c_str(), ids.size());
  }
  return kExitOk;
}

// Walks the K=6, M=1 example with one message twice as popular as the
// rest: exact demand model, selection probabilities, rates, and the
// posterior audit that separates the three policies.
int cmd_demo() {
  papir_profile* profile = nullptr;
  check(papir_profile_parse("2\n1\n1\n1\n1\n1\n", &profile));
  papir_profile* flat = nullptr;
  check(papir_profile_uniform(6, &flat));
  papir_params params = make_params(6, 1, 7, 1);

  char buf[256];
  std::printf("profile: lambda = (2,1,1,1,1,1), K=6, M=1\n\n");

  std::printf("joint demand/side pmf:\n");
  const std::uint32_t s2[] = {2}, s1[] = {1}, s5[] = {5};
  check(papir_joint_pmf(profile, &params, 1, s2, 1, buf, sizeof buf));
  std::printf("  p(w=1, s={2}) = %s\n", buf);
  check(papir_joint_pmf(profile, &params, 2, s1, 1, buf, sizeof buf));
  std::printf("  p(w=2, s={1}) = %s\n", buf);
  check(papir_joint_pmf(profile, &params, 3, s5, 1, buf, sizeof buf));
  std::printf("  p(w=3, s={5}) = %s\n", buf);

  std::printf("demand marginals:\n");
  check(papir_pmf_w(profile, &params, 1, buf, sizeof buf));
  std::printf("  p(w=1) = %s\n", buf);
  check(papir_pmf_w(profile, &params, 2, buf, sizeof buf));
  std::printf("  p(w=2) = %s  (same for w=3..6)\n", buf);

  std::printf("partition-and-code selection probabilities:\n");
  check(papir_gamma(profile, &params, 1, s2, 1, buf, sizeof buf));
  std::printf("  gamma(w=1, s={2}) = %s\n", buf);
  check(papir_gamma(profile, &params, 2, s1, 1, buf, sizeof buf));
  std::printf("  gamma(w=2, s={1}) = %s\n", buf);
  check(papir_gamma(profile, &params, 3, s5, 1, buf, sizeof buf));
  std::printf("  gamma(w=3, s={5}) = %s\n", buf);

  papir_rate_report* report = nullptr;
  check(papir_rates(profile, &params, &report));
  std::printf("rates:\n");
  std::printf("  expected download   = %s combos (~%s)\n",
              papir_rate_fraction(report, PAPIR_EXPECTED_DOWNLOAD),
              papir_rate_decimal(report, PAPIR_EXPECTED_DOWNLOAD));
  std::printf("  achievable rate     = %s (~%s)\n", papir_rate_fraction(report, PAPIR_RATE_LOWER),
              papir_rate_decimal(report, PAPIR_RATE_LOWER));
  std::printf("  upper bound (M+1)/K = %s, mds-only rate 1/(K-M) = %s\n",
              papir_rate_fraction(report, PAPIR_RATE_UPPER),
              papir_rate_fraction(report, PAPIR_RATE_MDS));
  papir_rate_report_free(report);

  const char* partition = "1,2|3,5|4,6";
  std::printf("\nposterior audit for the partition query {{1,2},{3,5},{4,6}}:\n");

  papir_posteriors* post = nullptr;
  check(papir_partition_posteriors(flat, &params, PAPIR_POLICY_PC, partition, &post));
  std::printf("  uniform profile, partition-and-code only:\n");
  std::printf("    P(Q=q) = %s, posterior(w=1) = %s  -> matches the 1/6 prior\n",
              papir_posteriors_query_prob(post), papir_posteriors_value(post, 1));
  papir_posteriors_free(post);

  check(papir_partition_posteriors(profile, &params, PAPIR_POLICY_PC, partition, &post));
  std::printf("  skewed profile, partition-and-code only:\n");
  std::printf("    posterior(w=2) = %s but prior = 13/90  -> leak\n",
              papir_posteriors_value(post, 2));
  papir_posteriors_free(post);

  check(papir_partition_posteriors(profile, &params, PAPIR_POLICY_RCS, partition, &post));
  std::printf("  skewed profile, randomized selection:\n");
  std::printf("    P(Q=q) = %s, posterior(w=1) = %s, posterior(w=2) = %s\n",
              papir_posteriors_query_prob(post), papir_posteriors_value(post, 1),
              papir_posteriors_value(post, 2));
  papir_posteriors_free(post);

  papir_verdict* verdict = nullptr;
  check(papir_verify_privacy(profile, &params, PAPIR_POLICY_PC, &verdict));
  std::printf("\nexhaustive audit, partition-and-code only: %s\n",
              papir_verdict_passed(verdict) ? "passes" : "FAILS (as it must on a skewed profile)");
  papir_verdict_free(verdict);

  check(papir_verify_privacy(profile, &params, PAPIR_POLICY_RCS, &verdict));
  std::printf("exhaustive audit, randomized selection:   %s\n",
              papir_verdict_passed(verdict) ? "passes" : "FAILS");
  bool rcs_ok = papir_verdict_passed(verdict) != 0;
  papir_verdict_free(verdict);

  papir_profile_free(profile);
  papir_profile_free(flat);
  return rcs_ok ? kExitOk : kExitVerdictFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"popularity-aware private information retrieval with side information"};
  app.require_subcommand(1);

  std::uint32_t k = 6, m = 1, n = 1, want = 1;
  std::uint64_t q = 0, seed = 1;
  std::uint16_t port = 0;
  std::string format = "text", policy = "rcs", config_path, out_path, dataset_path;
  std::string host = "127.0.0.1", have, side_info_path;
  ProfileOptions popts;

  auto add_km = [&](CLI::App* cmd, bool with_field) {
    cmd->add_option("-K,--messages", k, "number of messages K")->required();
    cmd->add_option("-M,--side-count", m, "side information size M")->required();
    if (with_field) {
      cmd->add_option("--q", q, "field modulus (default: smallest prime >= K)");
      cmd->add_option("--n", n, "message length in field symbols");
    }
  };

  CLI::App* rates = app.add_subcommand("rates", "exact rate bounds for a profile");
  add_km(rates, true);
  popts.attach(rates);
  rates->add_option("--format", format, "text|kv|csv")
      ->check(CLI::IsMember({"text", "kv", "csv"}));

  CLI::App* verify = app.add_subcommand("verify-privacy", "exhaustive posterior audit");
  add_km(verify, false);
  popts.attach(verify);
  verify->add_option("--policy", policy, "pc|mds|rcs")
      ->check(CLI::IsMember({"pc", "mds", "rcs"}));
  verify->add_option("--format", format, "text|kv|csv")
      ->check(CLI::IsMember({"text", "kv", "csv"}));

  CLI::App* simulate = app.add_subcommand("simulate", "rate-ratio sweep to csv");
  simulate->add_option("--config", config_path, "key/value config file")->required();
  simulate->add_option("--out", out_path, "output csv path")->required();

  CLI::App* gamma = app.add_subcommand("gamma-table", "selection probability table");
  add_km(gamma, false);
  popts.attach(gamma);
  gamma->add_option("--format", format, "text|kv|csv")
      ->check(CLI::IsMember({"text", "kv", "csv"}));

  CLI::App* serve = app.add_subcommand("serve", "serve a dataset over tcp");
  serve->add_option("--dataset", dataset_path, "dataset file")->required();
  serve->add_option("--host", host, "listen address");
  serve->add_option("--port", port, "listen port (0 = ephemeral)");

  CLI::App* fetch = app.add_subcommand("fetch", "retrieve one message from a server");
  fetch->add_option("--host", host, "server address");
  fetch->add_option("--port", port, "server port")->required();
  add_km(fetch, true);
  popts.attach(fetch);
  fetch->add_option("--want", want, "demand message id")->required();
  fetch->add_option("--have", have, "side information ids, comma separated")->required();
  fetch->add_option("--side-info", side_info_path, "side information file")->required();
  fetch->add_option("--seed", seed, "round seed");

  CLI::App* gen = app.add_subcommand("gen-dataset", "write a random dataset file");
  gen->add_option("--out", out_path, "output path")->required();
  gen->add_option("-K,--messages", k, "number of messages K")->required();
  gen->add_option("--n", n, "message length in field symbols");
  gen->add_option("--q", q, "field modulus (default: smallest prime >= K)");
  gen->add_option("--seed", seed, "dataset seed");
  std::string side_out, side_ids;
  gen->add_option("--side-out", side_out, "also extract a side-information file here");
  gen->add_option("--side-ids", side_ids, "message ids for --side-out, comma separated");

  app.add_subcommand("demo", "walk the skewed-popularity example end to end");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (rates->parsed()) return cmd_rates(popts, k, m, q, n, format);
  if (verify->parsed()) return cmd_verify_privacy(popts, k, m, policy, format);
  if (simulate->parsed()) return cmd_simulate(config_path, out_path);
  if (gamma->parsed()) return cmd_gamma_table(popts, k, m, format);
  if (serve->parsed()) return cmd_serve(dataset_path, host, port);
  if (fetch->parsed())
    return cmd_fetch(popts, host, port, k, m, q, n, want, have, side_info_path, seed);
  if (gen->parsed()) return cmd_gen_dataset(out_path, k, n, q, seed, side_out, side_ids);
  return cmd_demo();
}
