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

#include "btl/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "btl/bounds.hpp"
#include "btl/csv_io.hpp"
#include "btl/error.hpp"
#include "btl/estimation.hpp"
#include "btl/experiment.hpp"
#include "btl/graph_gen.hpp"
#include "btl/spectral.hpp"

namespace btl::cli {
namespace {

using nlohmann::json;

// Optional score generator given as `even:B` or `gaussian:B:seed`.
ScoreVector scores_from_flag(const std::string& flag, int d) {
  std::vector<std::string> parts;
  std::stringstream stream(flag);
  for (std::string part; std::getline(stream, part, ':');) parts.push_back(part);
  try {
    if (parts.size() == 2 && parts[0] == "even") {
      return even_spread_scores(d, std::stod(parts[1]));
    }
    if (parts.size() == 3 && parts[0] == "gaussian") {
      return gaussian_normalized_scores(d, std::stod(parts[1]), std::stoull(parts[2]));
    }
  } catch (const std::logic_error&) {
    // std::stod / std::stoull failures fall through to the usage error.
  }
  throw ArgumentError("--scores must be even:B or gaussian:B:seed, got '" + flag + "'");
}

json fit_to_json(const FitResult& fit) {
  json j = {
      {"solver", fit.solver},
      {"tol", fit.tol},
      {"converged", fit.converged},
      {"iterations", fit.iterations},
      {"final_gradient_norm", fit.final_gradient_norm},
      {"existence", to_string(fit.existence)},
  };
  if (fit.estimate) {
    const auto& v = fit.estimate->values();
    j["estimate"] = std::vector<double>(v.data(), v.data() + v.size());
  } else {
    j["estimate"] = nullptr;
  }
  return j;
}

json summary_to_json(const SpectralSummary& s) {
  json j = {{"lambda2", s.lambda2}, {"lambda_max", s.lambda_max}};
  if (s.kappa) j["kappa"] = *s.kappa;
  return j;
}

json report_to_json(const BoundReport& r) {
  json j = {
      {"kind", to_string(r.kind)},
      {"value", r.value},
      {"inputs",
       {{"lambda2_fisher", r.inputs.lambda2_fisher},
        {"lambda2_laplacian", r.inputs.lambda2_laplacian},
        {"kappa", r.inputs.kappa},
        {"B", r.inputs.range},
        {"d", r.inputs.d},
        {"n", r.inputs.n},
        {"t", r.inputs.t}}},
      {"constant_convention", r.constant_convention},
  };
  if (r.satisfied) j["satisfied"] = *r.satisfied;
  return j;
}

struct GenerateArgs {
  std::string kind;
  int d = 0;
  std::int64_t t = 1;
  int width = 1;
  double p = 1.0;
  std::uint64_t seed = 0;
  std::string out;
  std::string scores;
  std::string scores_out = "scores.csv";
  std::string outcomes_out;
  std::uint64_t outcome_seed = 0;
};

int cmd_generate(const GenerateArgs& args, std::ostream& out) {
  TopologySpec spec;
  spec.kind = parse_topology(args.kind);
  spec.d = args.d;
  spec.comparisons_per_pair = args.t;
  spec.width = args.width;
  spec.edge_probability = args.p;
  spec.seed = args.seed;
  spec.validate();
  std::optional<ScoreVector> scores;
  if (!args.scores.empty()) scores = scores_from_flag(args.scores, spec.d);
  if (!args.outcomes_out.empty() && !scores) {
    throw ArgumentError("--outcomes-out requires --scores");
  }

  const ComparisonSchedule schedule = generate_schedule(spec);
  if (args.out.empty()) {
    write_schedule_csv(out, schedule);
  } else {
    save_schedule(args.out, schedule);
    out << "edges=" << schedule.edge_count() << " n=" << schedule.total_comparisons()
        << " max_degree=" << schedule.max_degree() << '\n';
  }
  if (scores) save_scores(args.scores_out, *scores);
  if (!args.outcomes_out.empty()) {
    auto shared = std::make_shared<const ComparisonSchedule>(schedule);
    save_outcomes(args.outcomes_out, sample_outcomes(*scores, shared, args.outcome_seed));
  }
  return kExitOk;
}

struct FitArgs {
  std::string data;
  std::string solver = "mm";
  double tol = 1e-10;
  int max_iter = 100000;
};

int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err) {
  const SolverKind kind = parse_solver(args.solver);
  const OutcomeTable data = load_outcomes(args.data);
  SolverOptions options;
  options.tol = args.tol;
  options.max_iter = args.max_iter;
  const FitResult fit = fit_mle(data, kind, options);
  out << fit_to_json(fit).dump(2) << '\n';
  switch (fit.existence) {
    case Existence::kFailsFord:
      err << "error: maximum likelihood estimate does not exist (Ford's condition fails: some "
             "group of items never lost to the others)\n";
      return kExitNoMle;
    case Existence::kMaxIter:
      err << "error: solver did not converge in " << fit.iterations
          << " iterations (gradient sup-norm " << fit.final_gradient_norm << ")\n";
      return kExitNotConverged;
    case Existence::kExists:
      break;
  }
  return kExitOk;
}

struct ScheduleArgs {
  std::string data;
  std::string schedule;
  std::string scores;
  double t = 1.0;
  double range = -1.0;
};

int cmd_check_existence(const ScheduleArgs& args, std::ostream& out) {
  if (!args.data.empty()) {
    const OutcomeTable data = load_outcomes(args.data);
    const bool ok = check_ford_condition(data);
    out << json{{"ford_condition", ok}}.dump(2) << '\n';
    return ok ? kExitOk : kExitNoMle;
  }
  if (args.schedule.empty() || args.scores.empty()) {
    throw ArgumentError("check-existence needs --data, or --schedule with --scores");
  }
  const ComparisonSchedule schedule = load_schedule(args.schedule);
  const ScoreVector w = load_scores(args.scores);
  const ExistencePrediction p = predict_existence(w, schedule);
  json j = {{"lambda2_fisher", p.lambda2_fisher},
            {"threshold", p.threshold},
            {"satisfied", p.satisfied}};
  j["failure_bound"] = p.failure_bound ? json(*p.failure_bound) : json("no guarantee");
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_spectral(const ScheduleArgs& args, std::ostream& out) {
  const ComparisonSchedule schedule = load_schedule(args.schedule);
  json j = {{"d", schedule.dimension()},
            {"n", schedule.total_comparisons()},
            {"edges", schedule.edge_count()},
            {"max_degree", schedule.max_degree()},
            {"laplacian", summary_to_json(summarize(schedule.laplacian()))}};
  if (!args.scores.empty()) {
    const InstanceSpectrum s = instance_spectrum(schedule, load_scores(args.scores));
    j["fisher"] = summary_to_json(s.fisher);
    j["kappa"] = s.kappa;
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_bounds(const ScheduleArgs& args, std::ostream& out) {
  const ComparisonSchedule schedule = load_schedule(args.schedule);
  const ScoreVector w = load_scores(args.scores);
  const InstanceSpectrum s = instance_spectrum(schedule, w);
  BoundInputs inputs;
  inputs.lambda2_fisher = s.fisher.lambda2;
  inputs.lambda2_laplacian = s.laplacian.lambda2;
  inputs.kappa = s.kappa;
  inputs.range = args.range >= 0.0 ? args.range : w.sup_norm();
  inputs.d = schedule.dimension();
  inputs.n = static_cast<double>(schedule.total_comparisons());
  inputs.t = args.t;
  const ConsistencyCondition condition =
      consistency_condition(inputs.lambda2_fisher, schedule.max_degree(), inputs.d, inputs.n);
  const CurvatureConstant ca = estimate_curvature_constant();
  json j = {
      {"ours_l2", report_to_json(report_ours(inputs))},
      {"shah_l2", report_to_json(report_shah(inputs))},
      {"existence", report_to_json(report_existence(inputs))},
      {"consistency_condition",
       {{"lambda2_fisher", condition.lambda2_fisher},
        {"threshold", condition.threshold},
        {"satisfied", condition.satisfied},
        {"note", "threshold uses c0 = 1; the true constant is unspecified"}}},
      {"gamma", shah_gamma(inputs.range)},
      {"zeta", shah_zeta(inputs.range)},
      {"c_a_estimate", {{"value", ca.value}, {"argmin", ca.argmin}}},
  };
  out << j.dump(2) << '\n';
  return kExitOk;
}

struct SimulateArgs {
  std::string config;
  std::string out_dir = "results";
  int threads = 0;
  bool dry_run = false;
};

int default_threads() {
  if (const char* env = std::getenv(kThreadsEnv)) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::logic_error&) {
      throw ArgumentError(std::string(kThreadsEnv) + " must be an integer");
    }
  }
  return 1;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
  const ExperimentConfig config = load_config(args.config);
  if (args.dry_run) {
    out << "config '" << config.name << "' is valid: " << config.sweep_values.size()
        << " sweep values x " << config.replicates << " replicates\n";
    return kExitOk;
  }
  const int threads = args.threads > 0 ? args.threads : default_threads();
  const ExperimentResult result = run_experiment(config, threads);
  export_results(result, args.out_dir);

  out << config.name << " (" << to_string(config.topology.kind) << ", sweep "
      << to_string(config.sweep) << ", " << config.replicates << " replicates)\n";
  out << std::setw(12) << to_string(config.sweep) << std::setw(10) << "n" << std::setw(14)
      << "mean_l2" << std::setw(14) << "p95_l2" << std::setw(14) << "mean_proxy"
      << std::setw(14) << "bound_ours" << std::setw(14) << "bound_shah" << std::setw(8)
      << "ford" << '\n';
  for (const CellSummary& c : result.cells) {
    out << std::setw(12) << std::setprecision(5) << c.sweep_value << std::setw(10) << c.n
        << std::setw(14) << c.mean_l2 << std::setw(14) << c.percentile95 << std::setw(14)
        << c.mean_proxy << std::setw(14) << c.bound_ours << std::setw(14) << c.bound_shah
        << std::setw(8) << c.ford_failures << '\n';
  }
  out << "wrote " << (std::filesystem::path(args.out_dir) / "results.csv").string() << " and "
      << (std::filesystem::path(args.out_dir) / "results.json").string() << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bradley-Terry-Luce estimation, diagnostics and simulation", "btl"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a comparison schedule (and scores)");
  generate->add_option("--kind", gen.kind, "complete, erdos_renyi, banded, star, barbell")
      ->required();
  generate->add_option("--d", gen.d, "Number of items")->required();
  generate->add_option("--T", gen.t, "Comparisons per compared pair");
  generate->add_option("--W", gen.width, "Band width (banded)");
  generate->add_option("--p", gen.p, "Edge probability (erdos_renyi)");
  generate->add_option("--seed", gen.seed, "Graph seed (erdos_renyi)");
  generate->add_option("--out", gen.out, "Schedule CSV path (default: stdout)");
  generate->add_option("--scores", gen.scores, "even:B or gaussian:B:seed");
  generate->add_option("--scores-out", gen.scores_out, "Scores CSV path");
  generate->add_option("--outcomes-out", gen.outcomes_out,
                       "Also sample outcomes under --scores and write them here");
  generate->add_option("--outcome-seed", gen.outcome_seed, "Seed for --outcomes-out");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the MLE to an outcome CSV");
  fit_cmd->add_option("--data", fit.data, "Outcome CSV (i,j,n_ij,a_ij)")->required();
  fit_cmd->add_option("--solver", fit.solver, "mm or newton");
  fit_cmd->add_option("--tol", fit.tol, "Gradient sup-norm tolerance");
  fit_cmd->add_option("--max-iter", fit.max_iter, "Iteration limit");

  ScheduleArgs exist;
  auto* exist_cmd =
      app.add_subcommand("check-existence", "Ford's condition on data, or the design-time bound");
  exist_cmd->add_option("--data", exist.data, "Outcome CSV");
  exist_cmd->add_option("--schedule", exist.schedule, "Schedule CSV");
  exist_cmd->add_option("--scores", exist.scores, "Hypothesized scores CSV");

  ScheduleArgs spec;
  auto* spectral_cmd = app.add_subcommand("spectral", "Laplacian and Fisher spectra, kappa");
  spectral_cmd->add_option("--schedule", spec.schedule, "Schedule CSV")->required();
  spectral_cmd->add_option("--scores", spec.scores, "Scores CSV");

  ScheduleArgs bound;
  auto* bounds_cmd = app.add_subcommand("bounds", "Both l2 bound families and existence bound");
  bounds_cmd->add_option("--schedule", bound.schedule, "Schedule CSV")->required();
  bounds_cmd->add_option("--scores", bound.scores, "Scores CSV")->required();
  bounds_cmd->add_option("--t", bound.t, "Tail parameter t > 0");
  bounds_cmd->add_option("--B", bound.range, "Dynamic range (default: max |w_i|)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte-Carlo experiment config");
  simulate->add_option("--config", sim.config, "Experiment JSON")->required();
  simulate->add_option("--out", sim.out_dir, "Output directory");
  simulate->add_option("--threads", sim.threads,
                       std::string("Worker threads (default: $") + kThreadsEnv + " or 1)");
  simulate->add_flag("--dry-run", sim.dry_run, "Validate the config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) return cmd_generate(gen, out);
    if (*fit_cmd) return cmd_fit(fit, out, err);
    if (*exist_cmd) return cmd_check_existence(exist, out);
    if (*spectral_cmd) return cmd_spectral(spec, out);
    if (*bounds_cmd) return cmd_bounds(bound, out);
    if (*simulate) return cmd_simulate(sim, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ArgumentError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ExistenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNoMle;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace btl::cli
