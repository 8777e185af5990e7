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

#include "papir/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "papir/analysis.hpp"
#include "papir/errors.hpp"
#include "papir/rational.hpp"
#include "papir/rng.hpp"

namespace papir {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

std::uint64_t parse_u64(const std::string& s, const std::string& key) {
  try {
    if (s.empty() || s[0] == '-') throw std::invalid_argument(s);
    std::size_t used = 0;
    std::uint64_t v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw usage_error("config: bad integer for " + key + ": " + s);
  }
}

double parse_f64(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw usage_error("config: bad number for " + key + ": " + s);
  }
}

std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  cfg.distribution.kind = DistributionKind::zipf;
  cfg.distribution.zipf_n = 100;
  cfg.distribution.zipf_s = 1.0;

  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool kind_set = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw usage_error("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    if (key == "distribution") {
      kind_set = true;
      if (value == "uniform") {
        cfg.distribution.kind = DistributionKind::uniform;
      } else if (value == "explicit") {
        cfg.distribution.kind = DistributionKind::explicit_weights;
      } else if (value == "zipf") {
        cfg.distribution.kind = DistributionKind::zipf;
      } else if (value == "gamma") {
        cfg.distribution.kind = DistributionKind::gamma;
        cfg.distribution.shape = 0.62;
        cfg.distribution.scale = 31.22;
      } else if (value == "weibull") {
        cfg.distribution.kind = DistributionKind::weibull;
        cfg.distribution.shape = 0.79;
        cfg.distribution.scale = 16.80;
      } else {
        throw usage_error("config: unknown distribution " + value);
      }
    } else if (key == "zipf_n") {
      cfg.distribution.zipf_n = static_cast<std::uint32_t>(parse_u64(value, key));
    } else if (key == "zipf_s") {
      cfg.distribution.zipf_s = parse_f64(value, key);
    } else if (key == "gamma_shape" || key == "weibull_shape" || key == "shape") {
      cfg.distribution.shape = parse_f64(value, key);
    } else if (key == "gamma_scale" || key == "weibull_scale" || key == "scale") {
      cfg.distribution.scale = parse_f64(value, key);
    } else if (key == "weights") {
      cfg.distribution.explicit_weights.clear();
      for (const auto& item : split(value, ',')) {
        cfg.distribution.explicit_weights.push_back(parse_rational(item, true));
      }
    } else if (key == "quant_bits") {
      cfg.distribution.quant_bits = static_cast<std::uint32_t>(parse_u64(value, key));
    } else if (key == "m_values") {
      cfg.m_values.clear();
      for (const auto& item : split(value, ',')) {
        cfg.m_values.push_back(static_cast<std::uint32_t>(parse_u64(item, key)));
      }
    } else if (key == "k_values") {
      cfg.k_values.clear();
      if (value != "auto") {
        for (const auto& item : split(value, ',')) {
          cfg.k_values.push_back(static_cast<std::uint32_t>(parse_u64(item, key)));
        }
      }
    } else if (key == "profiles_per_point") {
      cfg.profiles_per_point = static_cast<std::uint32_t>(parse_u64(value, key));
    } else if (key == "seed") {
      cfg.seed = parse_u64(value, key);
    } else if (key == "threads") {
      cfg.threads = static_cast<std::uint32_t>(parse_u64(value, key));
    } else {
      throw usage_error("config: unknown key " + key);
    }
  }
  if (!kind_set) throw usage_error("config: missing distribution");
  if (cfg.profiles_per_point < 1) throw usage_error("config: profiles_per_point must be >= 1");
  if (cfg.m_values.empty()) throw usage_error("config: m_values must not be empty");
  if (cfg.distribution.kind == DistributionKind::explicit_weights &&
      cfg.distribution.explicit_weights.empty()) {
    throw usage_error("config: explicit distribution needs weights");
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::vector<std::uint32_t> ExperimentConfig::grid_for(std::uint32_t m) const {
  std::vector<std::uint32_t> grid;
  if (k_values.empty()) {
    // Default sweep: multiples of M+1 above (M+1)^2, capped at 60.
    std::uint32_t p = m + 1;
    for (std::uint32_t k = p * p + 1; k <= 60; ++k) {
      if (k % p == 0) grid.push_back(k);
    }
  } else {
    grid = k_values;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (std::uint32_t k : grid) {
      ProblemParams::with_default_field(k, m).require_rcs();
    }
  }
  return grid;
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config) {
  std::vector<std::uint32_t> ms = config.m_values;
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());

  struct Point {
    std::uint32_t k;
    std::uint32_t m;
  };
  std::vector<Point> points;
  for (std::uint32_t m : ms) {
    for (std::uint32_t k : config.grid_for(m)) points.push_back({k, m});
  }

  std::uint32_t thread_count = config.threads ? config.threads : std::thread::hardware_concurrency();
  if (thread_count == 0) thread_count = 1;
  thread_count = std::min<std::uint32_t>(thread_count, config.profiles_per_point);

  std::vector<ExperimentRow> rows;
  rows.reserve(points.size());
  for (const Point& pt : points) {
    if (config.distribution.kind == DistributionKind::explicit_weights &&
        config.distribution.explicit_weights.size() != pt.k) {
      throw config_error("explicit profile has " +
                         std::to_string(config.distribution.explicit_weights.size()) +
                         " weights but the sweep point needs K=" + std::to_string(pt.k));
    }
    ProblemParams params = ProblemParams::with_default_field(pt.k, pt.m);
    params.require_rcs();
    Rational r_ub = rate_upper_bound(params);

    const std::uint32_t count = config.profiles_per_point;
    std::vector<double> ratios(count);
    std::atomic<std::uint32_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mu;

    auto worker = [&] {
      for (;;) {
        std::uint32_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          std::uint64_t seed = derive_seed(config.seed, pt.m, pt.k, i);
          PopularityProfile profile = sample_profile(config.distribution, pt.k, seed);
          Rational r_lb = rate_lower_bound(profile, params);
          ratios[i] = to_double(r_lb / r_ub);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(failure_mu);
          failure = e.what();
          failed.store(true);
          return;
        }
      }
    };

    if (thread_count <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::uint32_t t = 0; t < thread_count; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (failed.load()) {
      throw resource_error("sweep point K=" + std::to_string(pt.k) + " M=" +
                           std::to_string(pt.m) + " aborted: " + failure);
    }

    // Compensated sum in profile order keeps the result independent of the
    // thread schedule.
    double sum = 0.0, comp = 0.0;
    for (double r : ratios) {
      double y = r - comp;
      double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    double mean = sum / count;

    double var_sum = 0.0, var_comp = 0.0;
    for (double r : ratios) {
      double d = (r - mean) * (r - mean);
      double y = d - var_comp;
      double t = var_sum + y;
      var_comp = (t - var_sum) - y;
      var_sum = t;
    }
    double std_err = count > 1 ? std::sqrt(var_sum / (count - 1)) / std::sqrt(double(count)) : 0.0;

    Rational mds_exact = rate_mds(params) / r_ub;  // K / ((K-M)(M+1))
    ExperimentRow row{pt.k, pt.m, config.distribution.label(), mean, std_err,
                      to_double(mds_exact)};
    if (!(row.mean_rcs_ratio > row.mds_ratio - 1e-12 && row.mean_rcs_ratio <= 1.0 + 1e-12)) {
      throw internal_error("mean ratio out of band at K=" + std::to_string(pt.k));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_string(const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  out << "K,M,distribution,mean_rcs_ratio,std_err,mds_ratio\n";
  for (const auto& row : rows) {
    out << row.k << ',' << row.m << ',' << row.distribution << ',' << format_g12(row.mean_rcs_ratio)
        << ',' << format_g12(row.std_err) << ',' << format_g12(row.mds_ratio) << '\n';
  }
  return out.str();
}

void write_csv(const std::vector<ExperimentRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << csv_string(rows);
  if (!out) throw io_error("write failed: " + path);
}

std::vector<ExperimentRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "K,M,distribution,mean_rcs_ratio,std_err,mds_ratio") {
    throw io_error("bad csv header");
  }
  std::vector<ExperimentRow> rows;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != 6) throw io_error("bad csv row: " + line);
    ExperimentRow row;
    row.k = static_cast<std::uint32_t>(parse_u64(fields[0], "K"));
    row.m = static_cast<std::uint32_t>(parse_u64(fields[1], "M"));
    row.distribution = fields[2];
    row.mean_rcs_ratio = parse_f64(fields[3], "mean_rcs_ratio");
    row.std_err = parse_f64(fields[4], "std_err");
    row.mds_ratio = parse_f64(fields[5], "mds_ratio");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace papir
