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

#include "btl/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "btl/error.hpp"
#include "btl/spectral.hpp"

namespace btl {
namespace {

// Winner -> loser adjacency lists.
std::vector<std::vector<int>> win_digraph(const OutcomeTable& data) {
  std::vector<std::vector<int>> out(data.dimension());
  const auto edges = data.schedule().edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    if (data.wins_of_first(k) > 0) out[e.first].push_back(e.second);
    if (e.count - data.wins_of_first(k) > 0) out[e.second].push_back(e.first);
  }
  return out;
}

// Number of strongly connected components (iterative Tarjan).
int count_sccs(const std::vector<std::vector<int>>& graph) {
  const int n = static_cast<int>(graph.size());
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  std::vector<std::pair<int, std::size_t>> call;  // (vertex, next successor)
  int next_index = 0;
  int components = 0;

  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, pos] = call.back();
      if (pos < graph[v].size()) {
        const int w = graph[v][pos++];
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const int finished = v;
      call.pop_back();
      if (!call.empty()) {
        const int parent = call.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
      if (low[finished] == index[finished]) {
        ++components;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
        } while (w != finished);
      }
    }
  }
  return components;
}

double sup_norm(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

FitResult ford_failure(const char* solver, const SolverOptions& options) {
  FitResult result;
  result.solver = solver;
  result.tol = options.tol;
  result.existence = Existence::kFailsFord;
  return result;
}

void check_options(const SolverOptions& options) {
  if (!(options.tol > 0.0)) throw ArgumentError("solver tolerance must be positive");
  if (options.max_iter < 1) throw ArgumentError("max_iter must be >= 1");
}

}  // namespace

std::string to_string(Existence existence) {
  switch (existence) {
    case Existence::kExists:
      return "exists";
    case Existence::kFailsFord:
      return "fails_ford";
    case Existence::kMaxIter:
      return "max_iter";
  }
  return "unknown";
}

std::string to_string(SolverKind kind) { return kind == SolverKind::kMm ? "mm" : "newton"; }

SolverKind parse_solver(const std::string& name) {
  if (name == "mm") return SolverKind::kMm;
  if (name == "newton") return SolverKind::kNewton;
  throw ArgumentError("unknown solver '" + name + "' (expected mm or newton)");
}

const ScoreVector& FitResult::value() const {
  if (!estimate) {
    throw ExistenceError(
        "maximum likelihood estimate does not exist: some group of items never lost to the "
        "rest (Ford's condition fails)");
  }
  return *estimate;
}

bool check_ford_condition(const OutcomeTable& data) {
  return count_sccs(win_digraph(data)) == 1;
}

FitResult fit_mle_mm(const OutcomeTable& data, const SolverOptions& options) {
  check_options(options);
  if (!check_ford_condition(data)) return ford_failure("mm", options);

  const ComparisonSchedule& schedule = data.schedule();
  const int d = schedule.dimension();
  const double n = static_cast<double>(schedule.total_comparisons());
  const Eigen::VectorXd wins = data.total_wins();
  const auto edges = schedule.edges();

  FitResult result;
  result.solver = "mm";
  result.tol = options.tol;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd expected(d);
  if (options.record_likelihood) result.likelihood_trace.push_back(log_likelihood(w, data));
  for (int sweep = 1; sweep <= options.max_iter; ++sweep) {
    // expected_i = sum_j n_ij p_ij, so the gradient is (wins - expected) / n.
    expected.setZero();
    for (const Edge& e : edges) {
      const double p = 1.0 / (1.0 + std::exp(w[e.second] - w[e.first]));
      const double c = static_cast<double>(e.count);
      expected[e.first] += c * p;
      expected[e.second] += c * (1.0 - p);
    }
    result.iterations = sweep;
    result.final_gradient_norm = sup_norm(wins - expected) / n;
    if (result.final_gradient_norm <= options.tol) {
      result.converged = true;
      break;
    }
    // pi_i W_i / sum_j n_ij p_ij, in log space.
    for (int i = 0; i < d; ++i) w[i] += std::log(wins[i] / expected[i]);
    w.array() -= w.mean();
    if (options.record_likelihood) result.likelihood_trace.push_back(log_likelihood(w, data));
  }
  result.existence = result.converged ? Existence::kExists : Existence::kMaxIter;
  result.estimate = ScoreVector::centered(std::move(w));
  return result;
}

FitResult fit_mle_newton(const OutcomeTable& data, const SolverOptions& options) {
  check_options(options);
  if (!check_ford_condition(data)) return ford_failure("newton", options);

  constexpr int kMaxHalvings = 50;
  const ComparisonSchedule& schedule = data.schedule();
  const int d = schedule.dimension();
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Constant(d, d, 1.0 / d);

  FitResult result;
  result.solver = "newton";
  result.tol = options.tol;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double current = log_likelihood(w, data);
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    const Eigen::VectorXd g = gradient(w, data);
    result.iterations = iter;
    result.final_gradient_norm = sup_norm(g);
    if (result.final_gradient_norm <= options.tol) {
      result.converged = true;
      break;
    }
    // Adding 11^T/d makes the system nonsingular without touching directions
    // orthogonal to 1; g is orthogonal to 1, so the step is as well.
    const Eigen::MatrixXd hessian = fisher_information(w, schedule).matrix() + ones;
    const Eigen::LLT<Eigen::MatrixXd> factor(hessian);
    if (factor.info() != Eigen::Success) {
      throw NumericalError("fit_mle_newton: restricted Hessian is singular at iteration " +
                           std::to_string(iter));
    }
    Eigen::VectorXd step = factor.solve(g);
    step.array() -= step.mean();
    if (!step.allFinite()) {
      throw NumericalError("fit_mle_newton: non-finite Newton step at iteration " +
                           std::to_string(iter));
    }

    // Near the optimum the likelihood gain drops below rounding; a step that
    // loses no more than a few ulps counts as non-decreasing.
    const double floor = current - 64.0 * std::numeric_limits<double>::epsilon() *
                                       std::max(1.0, std::abs(current));
    double scale = 1.0;
    Eigen::VectorXd candidate = w + step;
    double value = log_likelihood(candidate, data);
    int halvings = 0;
    while (!(value >= floor) && halvings < kMaxHalvings) {
      scale *= 0.5;
      candidate = w + scale * step;
      value = log_likelihood(candidate, data);
      ++halvings;
    }
    if (!(value >= floor)) break;  // no ascent left at working precision
    w = std::move(candidate);
    w.array() -= w.mean();
    current = value;
  }
  result.existence = result.converged ? Existence::kExists : Existence::kMaxIter;
  result.estimate = ScoreVector::centered(std::move(w));
  return result;
}

FitResult fit_mle(const OutcomeTable& data, SolverKind kind, const SolverOptions& options) {
  return kind == SolverKind::kMm ? fit_mle_mm(data, options) : fit_mle_newton(data, options);
}

ExistencePrediction predict_existence(const ScoreVector& w, const ComparisonSchedule& schedule) {
  ExistencePrediction prediction;
  const int d = schedule.dimension();
  prediction.lambda2_fisher = algebraic_connectivity(fisher_information(w, schedule).matrix());
  prediction.threshold =
      2.0 * std::log(static_cast<double>(d)) / static_cast<double>(schedule.total_comparisons());
  prediction.satisfied = prediction.lambda2_fisher >= prediction.threshold;
  if (prediction.satisfied) prediction.failure_bound = 2.0 / std::sqrt(static_cast<double>(d));
  return prediction;
}

}  // namespace btl
