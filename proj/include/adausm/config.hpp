#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adausm/optimizers.hpp"

namespace adausm {

struct ProblemSpec {
  std::string name = "noisy_quadratic";  // noisy_quadratic | rosenbrock | logistic
  // noisy_quadratic
  std::size_t dim = 10;
  double condition_number = 10.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;
  // logistic: synthetic blob generator unless csv_path is set
  std::size_t n = 200;
  double separation = 2.0;
  std::string csv_path;
  std::string label_column = "label";
  std::size_t batch_size = 0;  // 0 = full batch
  double l2 = 0.0;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

struct RunSettings {
  std::int64_t steps = 1000;
  std::vector<std::uint64_t> seeds = {1};
  std::int64_t record_every = 1;
  std::vector<double> eta_grid;   // non-empty: every optimizer runs the grid
  std::string output_dir;         // empty: ADAUSM_OUT_DIR or "out"
  std::vector<double> x1;         // explicit start point
  std::optional<double> x1_fill;  // scalar start fill (default 0.5; logistic 0)

  friend bool operator==(const RunSettings&, const RunSettings&) = default;
};

struct ExperimentConfig {
  ProblemSpec problem;
  RunSettings run;
  std::vector<OptimizerSpec> optimizers;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Flat text format: [problem] and [run] sections plus repeated [[optimizer]]
// blocks; `key = value` lines; # comments; lists as [a, b, c]; strings bare or
// double-quoted. parse(serialize(parse(text))) == parse(text).
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

// FNV-1a of the canonical serialization, 16 hex characters; tags traces so a
// file can be matched back to the exact configuration that produced it.
std::string config_hash(const ExperimentConfig& cfg);

inline const std::vector<double> default_eta_grid = {1.0, 0.1, 0.01, 0.001, 0.0001};

}  // namespace adausm
