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

#include <optional>
#include <string>
#include <vector>

#include "btl/model.hpp"

namespace btl {

enum class Existence { kExists, kFailsFord, kMaxIter };

std::string to_string(Existence existence);

struct SolverOptions {
  // Convergence test on the sup-norm of the log-likelihood gradient.
  double tol = 1e-10;
  int max_iter = 100000;
  // MM only: record the log-likelihood after every sweep.
  bool record_likelihood = false;
};

struct FitResult {
  std::string solver;
  double tol = 0.0;
  // Empty iff existence == kFailsFord.
  std::optional<ScoreVector> estimate;
  bool converged = false;
  int iterations = 0;
  double final_gradient_norm = 0.0;
  Existence existence = Existence::kExists;
  // Per-sweep log-likelihood, starting with the initial point; MM only.
  std::vector<double> likelihood_trace;

  // The estimate; throws ExistenceError when the MLE does not exist.
  const ScoreVector& value() const;
};

// Ford's condition: the digraph with an edge from winner to loser for every
// pair with at least one recorded win is strongly connected. One Tarjan pass,
// O(d + edges).
bool check_ford_condition(const OutcomeTable& data);

// Minorization-maximization fixed point on strengths pi_i = exp(w_i):
//   pi_i <- W_i / sum_j n_ij / (pi_i + pi_j),   W_i = total wins of i,
// re-centered in log space after every sweep. Starts from w = 0.
FitResult fit_mle_mm(const OutcomeTable& data, const SolverOptions& options = {});

// Damped Newton on the zero-sum subspace with the Fisher matrix as the
// (negative) Hessian; step halving until the likelihood does not decrease.
FitResult fit_mle_newton(const OutcomeTable& data, const SolverOptions& options = {});

enum class SolverKind { kMm, kNewton };
std::string to_string(SolverKind kind);
SolverKind parse_solver(const std::string& name);
FitResult fit_mle(const OutcomeTable& data, SolverKind kind, const SolverOptions& options = {});

struct ExistencePrediction {
  double lambda2_fisher = 0.0;
  // 2 log d / n
  double threshold = 0.0;
  bool satisfied = false;
  // 2 / sqrt(d) when satisfied.
  std::optional<double> failure_bound;
};

// Design-time check of the sufficient condition lambda2(I(w)) >= 2 log d / n
// under a hypothesized score vector.
ExistencePrediction predict_existence(const ScoreVector& w, const ComparisonSchedule& schedule);

}  // namespace btl
