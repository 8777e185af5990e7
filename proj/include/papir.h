/*
 * Copyright 2026 The papir authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the papir library: popularity-aware single-server private
 * information retrieval with side information.
 *
 * Conventions:
 *   - Functions return PAPIR_OK (0) or a negative papir_status code; the
 *     per-thread papir_last_error() string describes the most recent
 *     failure in the calling thread.
 *   - Objects are opaque handles created by papir_*_ functions and
 *     released with the matching papir_*_free. Strings returned as
 *     const char* are owned by their handle and remain valid until it is
 *     freed.
 *   - Message ids are 1-based and refer to the caller's ordering (the
 *     order weights were supplied in); exact values are rendered as
 *     fractions "p/q".
 */

#ifndef PAPIR_H
#define PAPIR_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum papir_status {
  PAPIR_OK = 0,
  PAPIR_ERR_USAGE = -1,
  PAPIR_ERR_CONFIG = -2,
  PAPIR_ERR_RESOURCE = -3,
  PAPIR_ERR_IO = -4,
  PAPIR_ERR_PROTOCOL = -5,
  PAPIR_ERR_NET = -6,
  PAPIR_ERR_DECODE = -7,
  PAPIR_ERR_INTERNAL = -8
};

typedef struct papir_profile papir_profile;
typedef struct papir_rate_report papir_rate_report;
typedef struct papir_verdict papir_verdict;
typedef struct papir_gamma_table papir_gamma_table;
typedef struct papir_posteriors papir_posteriors;
typedef struct papir_server papir_server;
typedef struct papir_fetch_result papir_fetch_result;

/* K messages, M side-information messages, field modulus q (prime),
 * message length n in field symbols. */
typedef struct papir_params {
  uint32_t k;
  uint32_t m;
  uint64_t q;
  uint32_t n;
} papir_params;

const char* papir_version(void);
const char* papir_last_error(void);

/* Smallest prime >= k, the default field modulus. */
uint64_t papir_default_field(uint32_t k);

/* ---- popularity profiles ---- */

int papir_profile_from_file(const char* path, papir_profile** out);
int papir_profile_parse(const char* text, papir_profile** out);
int papir_profile_uniform(uint32_t k, papir_profile** out);
/* distribution: "uniform" | "zipf" | "gamma" | "weibull".
 * a/b are shape/scale (gamma, weibull) or the zipf exponent in a
 * (zipf_n carries the support size; ignored otherwise). */
int papir_profile_sample(const char* distribution, double a, double b, uint32_t zipf_n,
                         uint32_t k, uint64_t seed, papir_profile** out);
uint32_t papir_profile_size(const papir_profile* profile);
const char* papir_profile_weight(papir_profile* profile, uint32_t message_id);
void papir_profile_free(papir_profile* profile);

/* ---- exact demand model ---- */

/* Writes "p/q" into buf. s is the side set (s_len ids). */
int papir_pmf_w(const papir_profile* profile, const papir_params* params, uint32_t w, char* buf,
                size_t buf_len);
int papir_joint_pmf(const papir_profile* profile, const papir_params* params, uint32_t w,
                    const uint32_t* s, size_t s_len, char* buf, size_t buf_len);
int papir_gamma(const papir_profile* profile, const papir_params* params, uint32_t w,
                const uint32_t* s, size_t s_len, char* buf, size_t buf_len);

/* ---- rate bounds ---- */

typedef enum papir_rate_field {
  PAPIR_RATE_UPPER = 0,
  PAPIR_RATE_LOWER = 1,
  PAPIR_RATE_MDS = 2,
  PAPIR_EXPECTED_DOWNLOAD = 3
} papir_rate_field;

int papir_rates(const papir_profile* profile, const papir_params* params,
                papir_rate_report** out);
const char* papir_rate_fraction(const papir_rate_report* report, papir_rate_field field);
const char* papir_rate_decimal(const papir_rate_report* report, papir_rate_field field);
void papir_rate_report_free(papir_rate_report* report);

/* ---- privacy audit ---- */

typedef enum papir_policy {
  PAPIR_POLICY_PC = 0,
  PAPIR_POLICY_MDS = 1,
  PAPIR_POLICY_RCS = 2
} papir_policy;

int papir_verify_privacy(const papir_profile* profile, const papir_params* params,
                         papir_policy policy, papir_verdict** out);
int papir_verdict_passed(const papir_verdict* verdict);
size_t papir_verdict_violation_count(const papir_verdict* verdict);
/* Formatted "query=... w=... posterior=p/q prior=p/q". */
const char* papir_verdict_violation(const papir_verdict* verdict, size_t index);
void papir_verdict_free(papir_verdict* verdict);

/* Posterior audit of one partition query, written "1,2|3,5|4,6". */
int papir_partition_posteriors(const papir_profile* profile, const papir_params* params,
                               papir_policy policy, const char* partition,
                               papir_posteriors** out);
const char* papir_posteriors_query_prob(const papir_posteriors* post);
const char* papir_posteriors_value(const papir_posteriors* post, uint32_t message_id);
void papir_posteriors_free(papir_posteriors* post);

/* ---- selection-probability table ---- */

int papir_gamma_table_build(const papir_profile* profile, const papir_params* params,
                      papir_gamma_table** out);
const char* papir_gamma_table_base(const papir_gamma_table* table);
size_t papir_gamma_table_count(const papir_gamma_table* table);
/* Formatted "w=... s=... gamma=p/q". */
const char* papir_gamma_table_entry(const papir_gamma_table* table, size_t index);
void papir_gamma_table_free(papir_gamma_table* table);

/* ---- simulation sweeps ---- */

/* Runs the sweep described by the key/value config file and writes the
 * csv (header K,M,distribution,mean_rcs_ratio,std_err,mds_ratio). */
int papir_simulate_file(const char* config_path, const char* csv_path);

/* ---- datasets and the wire protocol ---- */

/* Writes a random dataset file: u16 K, u16 n, u64 q, K*n u64 values,
 * big-endian. */
int papir_dataset_generate(const char* path, uint32_t k, uint32_t n, uint64_t q, uint64_t seed);

/* Copies the given messages out of a dataset file into a side-information
 * file (u16 count, u16 n, u64 q, then per entry u16 id + n u64 values). */
int papir_side_info_extract(const char* dataset_path, const uint32_t* ids, size_t id_count,
                            const char* out_path);

int papir_server_start(const char* dataset_path, const char* host, uint16_t port,
                       papir_server** out);
uint16_t papir_server_port(const papir_server* server);
int papir_server_stop(papir_server* server);
void papir_server_free(papir_server* server);

/* One retrieval round against a running server. s lists the side set ids;
 * side_info_path points at the matching side-information file. */
int papir_fetch(const char* host, uint16_t port, const papir_params* params,
                const papir_profile* profile, uint32_t w, const uint32_t* s, size_t s_len,
                const char* side_info_path, uint64_t seed, papir_fetch_result** out);
/* 0 = partition-and-code, 1 = mds. */
int papir_fetch_scheme(const papir_fetch_result* result);
uint64_t papir_fetch_download_units(const papir_fetch_result* result);
size_t papir_fetch_message_len(const papir_fetch_result* result);
uint64_t papir_fetch_message_coord(const papir_fetch_result* result, size_t index);
void papir_fetch_result_free(papir_fetch_result* result);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PAPIR_H */
