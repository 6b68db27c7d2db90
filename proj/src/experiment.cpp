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

#include "btl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

#include "btl/csv_io.hpp"
#include "btl/error.hpp"
#include "btl/rng.hpp"
#include "btl/spectral.hpp"

namespace btl {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Streams derived from the replicate seed.
constexpr std::uint64_t kScoreStream = 1;
constexpr std::uint64_t kGraphStream = 2;
constexpr std::uint64_t kOutcomeStream = 3;

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

ScoreModel parse_score_model(const std::string& name) {
  if (name == "even_spread") return ScoreModel::kEvenSpread;
  if (name == "gaussian_normalized") return ScoreModel::kGaussianNormalized;
  throw ArgumentError("unknown score model '" + name +
                      "' (expected even_spread or gaussian_normalized)");
}

SweepParameter parse_sweep(const std::string& name) {
  if (name == "B") return SweepParameter::kRange;
  if (name == "W") return SweepParameter::kWidth;
  if (name == "d") return SweepParameter::kDimension;
  throw ArgumentError("unknown sweep parameter '" + name + "' (expected B, W or d)");
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

// JSON has no NaN; store it as null.
nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

double number_from(const nlohmann::json& j) {
  return j.is_null() ? kNaN : j.get<double>();
}

}  // namespace

std::string to_string(ScoreModel model) {
  return model == ScoreModel::kEvenSpread ? "even_spread" : "gaussian_normalized";
}

std::string to_string(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::kRange:
      return "B";
    case SweepParameter::kWidth:
      return "W";
    case SweepParameter::kDimension:
      return "d";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Config

TopologySpec ExperimentConfig::topology_at(double sweep_value) const {
  TopologySpec spec = topology;
  if (sweep == SweepParameter::kWidth) spec.width = static_cast<int>(sweep_value);
  if (sweep == SweepParameter::kDimension) spec.d = static_cast<int>(sweep_value);
  return spec;
}

double ExperimentConfig::range_at(double sweep_value) const {
  return sweep == SweepParameter::kRange ? sweep_value : range;
}

void ExperimentConfig::validate() const {
  if (replicates < 1) throw ArgumentError("config: replicates must be >= 1");
  if (!(t_value > 0.0)) throw ArgumentError("config: t_value must be positive");
  if (sweep_values.empty()) throw ArgumentError("config: sweep.values must not be empty");
  if (!(solver_options.tol > 0.0)) throw ArgumentError("config: tol must be positive");
  if (solver_options.max_iter < 1) throw ArgumentError("config: max_iter must be >= 1");
  if (sweep == SweepParameter::kWidth && topology.kind != TopologyKind::kBanded) {
    throw ArgumentError("config: sweeping W requires a banded topology");
  }
  for (const double v : sweep_values) {
    if (sweep != SweepParameter::kRange && !is_integer(v)) {
      throw ArgumentError("config: sweep values for " + to_string(sweep) + " must be integers");
    }
    const double b = range_at(v);
    if (!std::isfinite(b) || b < 0.0 ||
        (score_model == ScoreModel::kGaussianNormalized && b == 0.0)) {
      throw ArgumentError("config: invalid dynamic range B = " + format_double(b));
    }
    topology_at(v).validate();
  }
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    ExperimentConfig config;
    config.name = get_or<std::string>(j, "name", "experiment");

    const auto& topo = j.at("topology");
    config.topology.kind = parse_topology(topo.at("kind").get<std::string>());
    config.topology.d = topo.at("d").get<int>();
    config.topology.comparisons_per_pair = get_or<std::int64_t>(topo, "T", 1);
    config.topology.width = get_or<int>(topo, "W", 1);
    config.topology.edge_probability = get_or<double>(topo, "p", 1.0);
    config.topology.seed = get_or<std::uint64_t>(topo, "seed", 0);

    const auto& scores = j.at("score_model");
    config.score_model = parse_score_model(scores.at("kind").get<std::string>());
    config.range = get_or<double>(scores, "B", 0.0);

    const auto& sweep = j.at("sweep");
    config.sweep = parse_sweep(sweep.at("parameter").get<std::string>());
    config.sweep_values = sweep.at("values").get<std::vector<double>>();

    config.replicates = get_or<int>(j, "replicates", 100);
    config.t_value = get_or<double>(j, "t_value", 1.0);
    config.base_seed = get_or<std::uint64_t>(j, "base_seed", 0);
    config.solver = parse_solver(get_or<std::string>(j, "solver", "newton"));
    config.solver_options.tol = get_or<double>(j, "tol", 1e-10);
    config.solver_options.max_iter = get_or<int>(j, "max_iter", 100000);
    config.validate();
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  nlohmann::json topo = {
      {"kind", to_string(config.topology.kind)},
      {"d", config.topology.d},
      {"T", config.topology.comparisons_per_pair},
  };
  if (config.topology.kind == TopologyKind::kBanded) topo["W"] = config.topology.width;
  if (config.topology.kind == TopologyKind::kErdosRenyi) {
    topo["p"] = config.topology.edge_probability;
    topo["seed"] = config.topology.seed;
  }
  return {
      {"name", config.name},
      {"topology", topo},
      {"score_model", {{"kind", to_string(config.score_model)}, {"B", config.range}}},
      {"sweep", {{"parameter", to_string(config.sweep)}, {"values", config.sweep_values}}},
      {"replicates", config.replicates},
      {"t_value", config.t_value},
      {"base_seed", config.base_seed},
      {"solver", to_string(config.solver)},
      {"tol", config.solver_options.tol},
      {"max_iter", config.solver_options.max_iter},
  };
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path, 0, e.what());
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Running

std::uint64_t replicate_seed(std::uint64_t base_seed, double sweep_value, int replicate) {
  const auto bits = std::bit_cast<std::uint64_t>(sweep_value);
  return base_seed ^ splitmix64(bits ^ splitmix64(static_cast<std::uint64_t>(replicate) + 1));
}

ReplicateRecord run_replicate(const ExperimentConfig& config, int sweep_index, int replicate) {
  const double value = config.sweep_values.at(sweep_index);
  ReplicateRecord record;
  record.sweep_index = sweep_index;
  record.replicate = replicate;
  record.seed = replicate_seed(config.base_seed, value, replicate);

  TopologySpec topo = config.topology_at(value);
  if (topo.kind == TopologyKind::kErdosRenyi) topo.seed = derive_seed(record.seed, kGraphStream);
  const double range = config.range_at(value);

  auto schedule = std::make_shared<const ComparisonSchedule>(generate_schedule(topo));
  const ScoreVector truth =
      config.score_model == ScoreModel::kEvenSpread
          ? even_spread_scores(topo.d, range)
          : gaussian_normalized_scores(topo.d, range, derive_seed(record.seed, kScoreStream));
  record.n = schedule->total_comparisons();

  const InstanceSpectrum spectrum = instance_spectrum(*schedule, truth);
  record.lambda2_laplacian = spectrum.laplacian.lambda2;
  record.lambda2_fisher = spectrum.fisher.lambda2;
  record.kappa = spectrum.kappa;
  const double n = static_cast<double>(record.n);
  record.bound_ours = l2_bound_ours(record.lambda2_fisher, record.kappa, topo.d, n, config.t_value);
  record.bound_shah = l2_bound_shah(range, record.lambda2_laplacian, topo.d, n, config.t_value);

  const OutcomeTable data =
      sample_outcomes(truth, schedule, derive_seed(record.seed, kOutcomeStream));
  const FitResult fit = fit_mle(data, config.solver, config.solver_options);
  record.ford_ok = fit.existence != Existence::kFailsFord;
  record.converged = fit.converged;
  record.iterations = fit.iterations;
  if (fit.estimate) {
    const Eigen::VectorXd delta = fit.estimate->values() - truth.values();
    record.l2_error = delta.squaredNorm();
    record.proxy_error = proxy_error(delta);
  } else {
    record.l2_error = kNaN;
    record.proxy_error = kNaN;
  }
  return record;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double position = q * static_cast<double>(values.size() - 1);
  const auto lower = static_cast<std::size_t>(std::floor(position));
  const std::size_t upper = std::min(lower + 1, values.size() - 1);
  const double fraction = position - static_cast<double>(lower);
  return values[lower] + fraction * (values[upper] - values[lower]);
}

std::vector<CellSummary> aggregate(const ExperimentConfig& config,
                                   const std::vector<ReplicateRecord>& records) {
  std::vector<CellSummary> cells(config.sweep_values.size());
  std::vector<std::vector<const ReplicateRecord*>> by_cell(cells.size());
  for (const ReplicateRecord& r : records) by_cell.at(r.sweep_index).push_back(&r);

  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto& members = by_cell[c];
    std::stable_sort(members.begin(), members.end(),
                     [](const ReplicateRecord* a, const ReplicateRecord* b) {
                       return a->seed < b->seed;
                     });
    CellSummary& cell = cells[c];
    cell.sweep_value = config.sweep_values[c];
    cell.replicates = static_cast<int>(members.size());
    std::vector<double> l2;
    double proxy_sum = 0.0, n_sum = 0.0, ours = 0.0, shah = 0.0;
    double lambda_l = 0.0, lambda_f = 0.0, kappa_sum = 0.0;
    for (const ReplicateRecord* r : members) {
      n_sum += static_cast<double>(r->n);
      ours += r->bound_ours;
      shah += r->bound_shah;
      lambda_l += r->lambda2_laplacian;
      lambda_f += r->lambda2_fisher;
      kappa_sum += r->kappa;
      if (!r->ford_ok) {
        ++cell.ford_failures;
        continue;
      }
      if (!r->converged) {
        ++cell.nonconverged;
        continue;
      }
      l2.push_back(r->l2_error);
      proxy_sum += r->proxy_error;
    }
    const double count = std::max(1, cell.replicates);
    cell.n = n_sum / count;
    cell.bound_ours = ours / count;
    cell.bound_shah = shah / count;
    cell.lambda2_laplacian = lambda_l / count;
    cell.lambda2_fisher = lambda_f / count;
    cell.kappa = kappa_sum / count;

    cell.included = static_cast<int>(l2.size());
    if (l2.empty()) {
      cell.mean_l2 = cell.ci95_low = cell.ci95_high = cell.percentile95 = cell.mean_proxy = kNaN;
      continue;
    }
    const double k = static_cast<double>(l2.size());
    cell.mean_l2 = std::accumulate(l2.begin(), l2.end(), 0.0) / k;
    cell.mean_proxy = proxy_sum / k;
    double sd = 0.0;
    if (l2.size() > 1) {
      double ss = 0.0;
      for (const double v : l2) ss += (v - cell.mean_l2) * (v - cell.mean_l2);
      sd = std::sqrt(ss / (k - 1.0));
    }
    const double half_width = 1.96 * sd / std::sqrt(k);
    cell.ci95_low = cell.mean_l2 - half_width;
    cell.ci95_high = cell.mean_l2 + half_width;
    cell.percentile95 = quantile(l2, 0.95);
  }
  return cells;
}

ExperimentResult run_experiment(const ExperimentConfig& config, int threads) {
  config.validate();
  const int cells = static_cast<int>(config.sweep_values.size());
  const int total = cells * config.replicates;
  std::vector<ReplicateRecord> records(total);

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (int task = next++; task < total && !failed; task = next++) {
      try {
        records[task] = run_replicate(config, task / config.replicates, task % config.replicates);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(threads, 1, std::max(1, total));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  result.config = config;
  result.records = std::move(records);
  result.cells = aggregate(config, result.records);
  return result;
}

std::vector<double> one_point_calibration(const std::vector<double>& empirical,
                                          const std::vector<double>& bound) {
  if (empirical.empty() || empirical.size() != bound.size()) {
    throw ArgumentError("one_point_calibration: curves must be non-empty and equally long");
  }
  if (!(bound[0] > 0.0)) throw ArgumentError("one_point_calibration: bound must be positive");
  const double factor = empirical[0] / bound[0];
  std::vector<double> scaled(bound.size());
  std::transform(bound.begin(), bound.end(), scaled.begin(),
                 [factor](double v) { return factor * v; });
  return scaled;
}

// ---------------------------------------------------------------------------
// Export

void write_results_csv(std::ostream& out, const ExperimentResult& result) {
  out << kResultsCsvHeader << '\n';
  for (const CellSummary& c : result.cells) {
    out << format_double(c.sweep_value) << ',' << format_double(c.n) << ','
        << format_double(c.mean_l2) << ',' << format_double(c.ci95_low) << ','
        << format_double(c.ci95_high) << ',' << format_double(c.percentile95) << ','
        << format_double(c.mean_proxy) << ',' << format_double(c.bound_ours) << ','
        << format_double(c.bound_shah) << ',' << c.ford_failures << '\n';
  }
}

nlohmann::json results_to_json(const ExperimentResult& result) {
  nlohmann::json cells = nlohmann::json::array();
  for (const CellSummary& c : result.cells) {
    cells.push_back({
        {"sweep_value", c.sweep_value},
        {"n", c.n},
        {"replicates", c.replicates},
        {"ford_failures", c.ford_failures},
        {"nonconverged", c.nonconverged},
        {"included", c.included},
        {"mean_l2", number_or_null(c.mean_l2)},
        {"ci95_low", number_or_null(c.ci95_low)},
        {"ci95_high", number_or_null(c.ci95_high)},
        {"percentile95", number_or_null(c.percentile95)},
        {"mean_proxy", number_or_null(c.mean_proxy)},
        {"bound_ours", c.bound_ours},
        {"bound_shah", c.bound_shah},
        {"lambda2_laplacian", c.lambda2_laplacian},
        {"lambda2_fisher", c.lambda2_fisher},
        {"kappa", c.kappa},
    });
  }
  nlohmann::json records = nlohmann::json::array();
  for (const ReplicateRecord& r : result.records) {
    records.push_back({
        {"sweep_index", r.sweep_index},
        {"sweep_value", result.config.sweep_values.at(r.sweep_index)},
        {"replicate", r.replicate},
        {"seed", r.seed},
        {"n", r.n},
        {"ford_ok", r.ford_ok},
        {"converged", r.converged},
        {"iterations", r.iterations},
        {"l2_error", number_or_null(r.l2_error)},
        {"proxy_error", number_or_null(r.proxy_error)},
        {"lambda2_laplacian", r.lambda2_laplacian},
        {"lambda2_fisher", r.lambda2_fisher},
        {"kappa", r.kappa},
        {"bound_ours", r.bound_ours},
        {"bound_shah", r.bound_shah},
    });
  }
  return {
      {"code_version", result.code_version},
      {"config", config_to_json(result.config)},
      {"constant_convention", BoundReport{}.constant_convention},
      {"cells", cells},
      {"replicates", records},
  };
}

ExperimentResult results_from_json(const nlohmann::json& j) {
  try {
    ExperimentResult result;
    result.code_version = j.at("code_version").get<std::string>();
    result.config = config_from_json(j.at("config"));
    for (const auto& r : j.at("replicates")) {
      ReplicateRecord record;
      record.sweep_index = r.at("sweep_index").get<int>();
      record.replicate = r.at("replicate").get<int>();
      record.seed = r.at("seed").get<std::uint64_t>();
      record.n = r.at("n").get<std::int64_t>();
      record.ford_ok = r.at("ford_ok").get<bool>();
      record.converged = r.at("converged").get<bool>();
      record.iterations = r.at("iterations").get<int>();
      record.l2_error = number_from(r.at("l2_error"));
      record.proxy_error = number_from(r.at("proxy_error"));
      record.lambda2_laplacian = r.at("lambda2_laplacian").get<double>();
      record.lambda2_fisher = r.at("lambda2_fisher").get<double>();
      record.kappa = r.at("kappa").get<double>();
      record.bound_ours = r.at("bound_ours").get<double>();
      record.bound_shah = r.at("bound_shah").get<double>();
      result.records.push_back(record);
    }
    for (const auto& c : j.at("cells")) {
      CellSummary cell;
      cell.sweep_value = c.at("sweep_value").get<double>();
      cell.n = c.at("n").get<double>();
      cell.replicates = c.at("replicates").get<int>();
      cell.ford_failures = c.at("ford_failures").get<int>();
      cell.nonconverged = c.at("nonconverged").get<int>();
      cell.included = c.at("included").get<int>();
      cell.mean_l2 = number_from(c.at("mean_l2"));
      cell.ci95_low = number_from(c.at("ci95_low"));
      cell.ci95_high = number_from(c.at("ci95_high"));
      cell.percentile95 = number_from(c.at("percentile95"));
      cell.mean_proxy = number_from(c.at("mean_proxy"));
      cell.bound_ours = c.at("bound_ours").get<double>();
      cell.bound_shah = c.at("bound_shah").get<double>();
      cell.lambda2_laplacian = c.at("lambda2_laplacian").get<double>();
      cell.lambda2_fisher = c.at("lambda2_fisher").get<double>();
      cell.kappa = c.at("kappa").get<double>();
      result.cells.push_back(cell);
    }
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("results.json", 0, e.what());
  }
}

void export_results(const ExperimentResult& result, const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create '" + directory.string() + "': " + ec.message());

  const auto csv_path = directory / "results.csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw IoError("cannot open '" + csv_path.string() + "' for writing");
  write_results_csv(csv, result);
  if (!csv) throw IoError("write to '" + csv_path.string() + "' failed");

  const auto json_path = directory / "results.json";
  std::ofstream json(json_path, std::ios::binary);
  if (!json) throw IoError("cannot open '" + json_path.string() + "' for writing");
  json << results_to_json(result).dump(2) << '\n';
  if (!json) throw IoError("write to '" + json_path.string() + "' failed");
}

ExperimentResult load_results(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw IoError("cannot open '" + json_path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(json_path.string(), 0, e.what());
  }
  return results_from_json(j);
}

}  // namespace btl
