// Copyright 2026 The btl-fisher Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Declarative Monte-Carlo experiments.
//
// For every sweep value and replicate r the harness derives a seed from
// (base_seed, sweep value, r), draws scores and (for random topologies) the
// schedule, samples outcomes, checks Ford's condition, fits the MLE and records
// the squared l2 error and the proxy error ||h(w_hat - w*)||^2. Cells aggregate
// the replicates that passed Ford's condition and converged.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "btl/bounds.hpp"
#include "btl/estimation.hpp"
#include "btl/graph_gen.hpp"

namespace btl {

inline constexpr const char* kCodeVersion = "btl-fisher 0.1.0";

enum class ScoreModel { kEvenSpread, kGaussianNormalized };
enum class SweepParameter { kRange, kWidth, kDimension };

std::string to_string(ScoreModel model);
std::string to_string(SweepParameter parameter);

struct ExperimentConfig {
  std::string name = "experiment";
  TopologySpec topology;
  ScoreModel score_model = ScoreModel::kEvenSpread;
  // Dynamic range B when it is not the swept parameter.
  double range = 1.0;
  SweepParameter sweep = SweepParameter::kRange;
  std::vector<double> sweep_values;
  int replicates = 100;
  double t_value = 1.0;
  std::uint64_t base_seed = 0;
  SolverKind solver = SolverKind::kNewton;
  SolverOptions solver_options;

  void validate() const;

  // Topology and range with the sweep value substituted in.
  TopologySpec topology_at(double sweep_value) const;
  double range_at(double sweep_value) const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

struct ReplicateRecord {
  int sweep_index = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  std::int64_t n = 0;
  bool ford_ok = false;
  bool converged = false;
  int iterations = 0;
  // Squared l2 error ||w_hat - w*||^2 and ||h(w_hat - w*)||^2; NaN when not fitted.
  double l2_error = 0.0;
  double proxy_error = 0.0;
  // Spectral quantities and bounds of this replicate's (schedule, w*).
  double lambda2_laplacian = 0.0;
  double lambda2_fisher = 0.0;
  double kappa = 0.0;
  double bound_ours = 0.0;
  double bound_shah = 0.0;
};

struct CellSummary {
  double sweep_value = 0.0;
  double n = 0.0;
  int replicates = 0;
  int ford_failures = 0;
  int nonconverged = 0;
  // Over replicates that passed Ford's condition and converged.
  int included = 0;
  double mean_l2 = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  double percentile95 = 0.0;
  double mean_proxy = 0.0;
  // Means over all replicates of the per-replicate bound values.
  double bound_ours = 0.0;
  double bound_shah = 0.0;
  double lambda2_laplacian = 0.0;
  double lambda2_fisher = 0.0;
  double kappa = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::string code_version = kCodeVersion;
  // Ordered by sweep index, then replicate.
  std::vector<ReplicateRecord> records;
  std::vector<CellSummary> cells;
};

std::uint64_t replicate_seed(std::uint64_t base_seed, double sweep_value, int replicate);

// Runs one replicate; never throws for Ford failures or non-convergence.
ReplicateRecord run_replicate(const ExperimentConfig& config, int sweep_index, int replicate);

// Aggregates records into one summary per sweep value.
std::vector<CellSummary> aggregate(const ExperimentConfig& config,
                                   const std::vector<ReplicateRecord>& records);

// `threads` <= 0 selects 1. Output does not depend on the thread count.
ExperimentResult run_experiment(const ExperimentConfig& config, int threads = 1);

// Linear-interpolation quantile of unsorted values, q in [0, 1].
double quantile(std::vector<double> values, double q);

// Multiplies `bound` by the factor that makes it equal `empirical` at index 0.
std::vector<double> one_point_calibration(const std::vector<double>& empirical,
                                          const std::vector<double>& bound);

inline constexpr const char* kResultsCsvHeader =
    "sweep_value,n,mean_l2,ci_low,ci_high,p95_l2,mean_proxy,bound_ours,bound_shah,ford_failures";

void write_results_csv(std::ostream& out, const ExperimentResult& result);
nlohmann::json results_to_json(const ExperimentResult& result);
ExperimentResult results_from_json(const nlohmann::json& j);

// Writes results.csv and results.json under `directory` (created if needed).
void export_results(const ExperimentResult& result, const std::filesystem::path& directory);
ExperimentResult load_results(const std::filesystem::path& json_path);

}  // namespace btl
