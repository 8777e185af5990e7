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

// Exercises the shared-library surface the CLI builds on: opaque handles,
// status codes, and the per-thread error string.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstring>
#include <string>

#include "doctest.h"
#include "papir.h"

namespace {

papir_profile* skewed() {
  papir_profile* p = nullptr;
  REQUIRE(papir_profile_parse("2\n1\n1\n1\n1\n1\n", &p) == PAPIR_OK);
  return p;
}

const papir_params kParams{6, 1, 7, 1};

}  // namespace

TEST_CASE("version and default field") {
  CHECK(std::strlen(papir_version()) > 0);
  CHECK(papir_default_field(6) == 7);
  CHECK(papir_default_field(20) == 23);
}

TEST_CASE("profile handles") {
  papir_profile* p = skewed();
  CHECK(papir_profile_size(p) == 6);
  CHECK(std::string(papir_profile_weight(p, 1)) == "2");
  CHECK(std::string(papir_profile_weight(p, 4)) == "1");
  CHECK(papir_profile_weight(p, 9) == nullptr);
  papir_profile_free(p);

  papir_profile* u = nullptr;
  REQUIRE(papir_profile_uniform(4, &u) == PAPIR_OK);
  CHECK(papir_profile_size(u) == 4);
  papir_profile_free(u);

  papir_profile* z = nullptr;
  REQUIRE(papir_profile_sample("zipf", 1.0, 0, 100, 8, 42, &z) == PAPIR_OK);
  CHECK(papir_profile_size(z) == 8);
  papir_profile_free(z);

  papir_profile* bad = nullptr;
  CHECK(papir_profile_parse("0\n1\n", &bad) == PAPIR_ERR_USAGE);
  CHECK(std::strlen(papir_last_error()) > 0);
  CHECK(papir_profile_from_file("no_such_profile.txt", &bad) == PAPIR_ERR_IO);
}

TEST_CASE("exact model values through the C surface") {
  papir_profile* p = skewed();
  char buf[128];

  REQUIRE(papir_pmf_w(p, &kParams, 1, buf, sizeof buf) == PAPIR_OK);
  CHECK(std::string(buf) == "5/18");
  REQUIRE(papir_pmf_w(p, &kParams, 2, buf, sizeof buf) == PAPIR_OK);
  CHECK(std::string(buf) == "13/90");

  const uint32_t s2[] = {2};
  REQUIRE(papir_joint_pmf(p, &kParams, 1, s2, 1, buf, sizeof buf) == PAPIR_OK);
  CHECK(std::string(buf) == "1/18");
  REQUIRE(papir_gamma(p, &kParams, 1, s2, 1, buf, sizeof buf) == PAPIR_OK);
  CHECK(std::string(buf) == "25/26");

  // Too-small buffer is a usage error, not a truncation.
  char tiny[3];
  CHECK(papir_pmf_w(p, &kParams, 1, tiny, sizeof tiny) == PAPIR_ERR_USAGE);

  papir_params bad = kParams;
  bad.q = 6;  // composite
  CHECK(papir_pmf_w(p, &bad, 1, buf, sizeof buf) == PAPIR_ERR_USAGE);
  papir_profile_free(p);
}

TEST_CASE("rates through the C surface") {
  papir_profile* p = skewed();
  papir_rate_report* report = nullptr;
  REQUIRE(papir_rates(p, &kParams, &report) == PAPIR_OK);
  CHECK(std::string(papir_rate_fraction(report, PAPIR_RATE_UPPER)) == "1/3");
  CHECK(std::string(papir_rate_fraction(report, PAPIR_RATE_LOWER)) == "13/40");
  CHECK(std::string(papir_rate_fraction(report, PAPIR_RATE_MDS)) == "1/5");
  CHECK(std::string(papir_rate_fraction(report, PAPIR_EXPECTED_DOWNLOAD)) == "40/13");
  CHECK(std::string(papir_rate_decimal(report, PAPIR_RATE_LOWER)) == "0.325");
  papir_rate_report_free(report);

  // Unsupported dimensions surface as config errors.
  papir_params bad{7, 1, 7, 1};
  papir_profile* seven = nullptr;
  REQUIRE(papir_profile_uniform(7, &seven) == PAPIR_OK);
  CHECK(papir_rates(seven, &bad, &report) == PAPIR_ERR_CONFIG);
  papir_profile_free(seven);
  papir_profile_free(p);
}

TEST_CASE("privacy verdicts through the C surface") {
  papir_profile* p = skewed();
  papir_verdict* verdict = nullptr;
  REQUIRE(papir_verify_privacy(p, &kParams, PAPIR_POLICY_PC, &verdict) == PAPIR_OK);
  CHECK(papir_verdict_passed(verdict) == 0);
  REQUIRE(papir_verdict_violation_count(verdict) > 0);
  std::string line = papir_verdict_violation(verdict, 0);
  CHECK(line.find("13/90") != std::string::npos);
  papir_verdict_free(verdict);

  REQUIRE(papir_verify_privacy(p, &kParams, PAPIR_POLICY_RCS, &verdict) == PAPIR_OK);
  CHECK(papir_verdict_passed(verdict) == 1);
  CHECK(papir_verdict_violation_count(verdict) == 0);
  papir_verdict_free(verdict);

  papir_posteriors* post = nullptr;
  REQUIRE(papir_partition_posteriors(p, &kParams, PAPIR_POLICY_RCS, "1,2|3,5|4,6", &post) ==
          PAPIR_OK);
  CHECK(std::string(papir_posteriors_query_prob(post)) == "5/78");
  CHECK(std::string(papir_posteriors_value(post, 1)) == "5/18");
  CHECK(std::string(papir_posteriors_value(post, 2)) == "13/90");
  papir_posteriors_free(post);
  papir_profile_free(p);
}

TEST_CASE("gamma table through the C surface") {
  papir_profile* p = skewed();
  papir_gamma_table* table = nullptr;
  REQUIRE(papir_gamma_table_build(p, &kParams, &table) == PAPIR_OK);
  CHECK(std::string(papir_gamma_table_base(table)) == "25/26");
  CHECK(papir_gamma_table_count(table) == 30);  // 6 * C(5,1)
  bool found = false;
  for (size_t i = 0; i < papir_gamma_table_count(table); ++i) {
    if (std::string(papir_gamma_table_entry(table, i)) == "w=2 s={1} gamma=5/6") found = true;
  }
  CHECK(found);
  papir_gamma_table_free(table);
  papir_profile_free(p);
}

TEST_CASE("simulation through the C surface") {
  const char* cfg_path = "capi_sim_config.txt";
  const char* csv_path = "capi_sim_out.csv";
  {
    std::FILE* f = std::fopen(cfg_path, "w");
    std::fputs("distribution = uniform\nm_values = 1\nk_values = 6\nprofiles_per_point = 3\n",
               f);
    std::fclose(f);
  }
  REQUIRE(papir_simulate_file(cfg_path, csv_path) == PAPIR_OK);
  std::FILE* f = std::fopen(csv_path, "r");
  REQUIRE(f != nullptr);
  char line[256];
  REQUIRE(std::fgets(line, sizeof line, f) != nullptr);
  CHECK(std::string(line) == "K,M,distribution,mean_rcs_ratio,std_err,mds_ratio\n");
  REQUIRE(std::fgets(line, sizeof line, f) != nullptr);
  CHECK(std::string(line).rfind("6,1,uniform,1,", 0) == 0);
  std::fclose(f);
  std::remove(cfg_path);
  std::remove(csv_path);

  CHECK(papir_simulate_file("missing_config.txt", csv_path) == PAPIR_ERR_IO);
}

TEST_CASE("dataset, server and fetch through the C surface") {
  const char* dataset_path = "capi_dataset.bin";
  const char* side_path = "capi_side.bin";
  REQUIRE(papir_dataset_generate(dataset_path, 6, 3, 7, 2024) == PAPIR_OK);

  const uint32_t side_ids[] = {2};
  REQUIRE(papir_side_info_extract(dataset_path, side_ids, 1, side_path) == PAPIR_OK);

  papir_server* server = nullptr;
  REQUIRE(papir_server_start(dataset_path, "127.0.0.1", 0, &server) == PAPIR_OK);
  uint16_t port = papir_server_port(server);
  REQUIRE(port != 0);

  papir_profile* p = skewed();
  papir_params params{6, 1, 7, 3};
  papir_fetch_result* result = nullptr;
  REQUIRE(papir_fetch("127.0.0.1", port, &params, p, 1, side_ids, 1, side_path, 5, &result) ==
          PAPIR_OK);
  CHECK(papir_fetch_message_len(result) == 3);
  uint64_t coords[3];
  for (size_t i = 0; i < 3; ++i) coords[i] = papir_fetch_message_coord(result, i);

  // The decode must agree with an independent fetch under another seed.
  papir_fetch_result* again = nullptr;
  REQUIRE(papir_fetch("127.0.0.1", port, &params, p, 1, side_ids, 1, side_path, 99, &again) ==
          PAPIR_OK);
  for (size_t i = 0; i < 3; ++i) CHECK(papir_fetch_message_coord(again, i) == coords[i]);
  CHECK(papir_fetch_download_units(result) >= 3);

  papir_fetch_result_free(result);
  papir_fetch_result_free(again);
  REQUIRE(papir_server_stop(server) == PAPIR_OK);
  papir_server_free(server);
  papir_profile_free(p);
  std::remove(dataset_path);
  std::remove(side_path);
}
