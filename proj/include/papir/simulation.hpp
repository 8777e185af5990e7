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
#include <string>
#include <vector>

#include "papir/profile.hpp"

namespace papir {

// Sweep description: one distribution, a set of M values, and per-M lists
// of K values. An empty k_values means the default grid for each M: all
// multiples of M+1 that are > (M+1)^2, up to 60.
struct ExperimentConfig {
  ProfileSpec distribution;
  std::vector<std::uint32_t> m_values{1};
  std::vector<std::uint32_t> k_values;  // empty = default grid per M
  std::uint32_t profiles_per_point = 1000;
  std::uint64_t seed = 1;
  std::uint32_t threads = 0;  // 0 = hardware concurrency

  // Plain-text key/value file ("key = value", '#' comments).
  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig parse(const std::string& text);

  std::vector<std::uint32_t> grid_for(std::uint32_t m) const;
};

struct ExperimentRow {
  std::uint32_t k = 0;
  std::uint32_t m = 0;
  std::string distribution;
  double mean_rcs_ratio = 0.0;  // mean of exact R_LB/R_UB over the profiles
  double std_err = 0.0;
  double mds_ratio = 0.0;       // K / ((K-M)(M+1)), exact before conversion
};

// Rows ordered by (distribution, M, K) ascending. Per-profile seeds are
// derived from the master seed by counter, and the mean is accumulated by
// compensated summation in profile order, so the output is bit-identical
// for a given config regardless of thread count.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);

// Header K,M,distribution,mean_rcs_ratio,std_err,mds_ratio; floats with 12
// significant digits.
void write_csv(const std::vector<ExperimentRow>& rows, const std::string& path);
std::string csv_string(const std::vector<ExperimentRow>& rows);
std::vector<ExperimentRow> parse_csv(const std::string& text);

}  // namespace papir
