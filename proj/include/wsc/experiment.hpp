#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "wsc/synthetic.hpp"

namespace wsc {

// Full protocol for one comparative run: dataset (CSV or synthetic blobs),
// optional distance-biased subsample, coreset methods to compare, and the
// evaluation setup (reference centers per k, plain and fair relative cost).
struct ExperimentSpec {
  std::string dataset_csv;  // nonempty: load this CSV instead of blobs
  std::vector<std::string> csv_group_columns;
  BlobsSpec blobs;

  int subsample = 0;  // 0 = use the dataset as-is; else target size
  std::vector<int> k_values = {2, 4, 6};
  double z = 1;
  double epsilon = 0.5;
  int coreset_size = 100;  // uniform-baseline size
  std::vector<std::string> methods = {"ours-unconstrained", "ours-fair", "uniform-baseline"};
  int repetitions = 10;

  double corruption_prob = 1.0 / 3.0;
  std::string adversary = "small-value";

  int fairness_attribute = 0;  // dataset attribute whose groups get bounds
  double alpha = 0.1;          // lower share bound, every group
  double beta = 1.0;           // upper share bound, every group

  // knob pass-through for the pipeline methods
  double desk_divisor = 320;
  double cm_constant = 1.0;
  int weak_passes = 0;
  int weak_rounds = 0;

  std::uint64_t seed = 1;
  std::string output;  // path prefix for <output>.json / <output>.csv

  nlohmann::json to_json() const;
  static ExperimentSpec from_json(const nlohmann::json& j);
};

struct ExperimentCell {
  int k = 0;
  std::string method;
  std::vector<double> plain_rel;  // per repetition
  std::vector<double> fair_rel;
  double plain_mean = 0, plain_stderr = 0;
  double fair_mean = 0, fair_stderr = 0;
  double mean_entries = 0;
  double mean_strong = 0, mean_weak = 0;
};

struct ExperimentReport {
  nlohmann::json spec;
  std::vector<ExperimentCell> cells;
  std::vector<std::string> failures;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// Runs the protocol: per k, reference centers come from the oracle-free
// plug-in solver and the dataset-side plain/fair costs are computed once;
// per method and repetition a coreset is built under a hierarchically
// derived seed and its relative cost |cost_X - cost_S| / cost_X is recorded
// under both evaluations. Per-run failures are collected, not fatal. When
// spec.output is nonempty the JSON and CSV reports are also written there.
ExperimentReport run_experiment(const ExperimentSpec& spec);

// Write-temp-rename so concurrent readers never observe a partial file.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace wsc
