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

// Computable theoretical quantities: the proxy function h, the two l2 error
// bound families, the MLE existence bound, and the auxiliary functions f and g
// used to relate the expected log-likelihood gap to h.
//
// Universal constants are set to 1 throughout; BoundReport carries that
// convention along with every input so reported values can be audited.

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace btl {

// h(x) = sgn(x) (sqrt(|x| + 1) - 1). Odd, increasing, h(x)^2 <= |x|,
// h(x)^2 >= |x|/2 - 1, |h(x)| <= |x|/2.
double proxy_h(double x);
Eigen::VectorXd proxy_h_vec(const Eigen::VectorXd& v);

// ||h_d(delta)||_2^2
double proxy_error(const Eigen::VectorXd& delta);

// kappa / lambda2(I) * t d / n
double l2_bound_ours(double lambda2_fisher, double kappa, int d, double n, double t);

// (e^-B + e^B)^4 / lambda2(L) * t d / n
double l2_bound_shah(double range, double lambda2_laplacian, int d, double n, double t);

// Curvature parameters of the bounded-range analysis for the logistic link.
double shah_gamma(double range);  // 1 / (e^-B + e^B)^2
double shah_zeta(double range);   // 1 for every B

struct ExistenceBound {
  bool satisfied = false;
  // 2 / sqrt(d) when satisfied.
  std::optional<double> failure_prob_bound;
  // 2 [(1 + exp(-3 n lambda2 / 4))^d - 1]; the union bound before the final
  // simplification, valid for any lambda2.
  double union_bound = 0.0;
};

// Sufficient condition lambda2(I*) >= 2 log d / n.
ExistenceBound existence_bound(double lambda2_fisher, int d, double n);

struct ConsistencyCondition {
  double lambda2_fisher = 0.0;
  // c0 sqrt(v_max log d) / n with c0 = 1.
  double threshold = 0.0;
  bool satisfied = false;
};

// The curvature condition of the l2 bound. The value depends on the unknown
// universal constant c0, which is fixed to 1 here.
ConsistencyCondition consistency_condition(double lambda2_fisher, double max_degree, int d,
                                           double n);

struct LemmaValues {
  double f = 0.0;
  double g = 0.0;
};

// f(x, y) = (1 + e^-x) log((1 + e^{x+y}) / (1 + e^x))
//         + (1 + e^x) log((1 + e^{-x-y}) / (1 + e^-x))
// g(y)    = log((1 + e^y) / 2) + log((1 + e^-y) / 2) = 2 log cosh(y / 2)
LemmaValues lemma_functions_f_g(double x, double y);
double lemma_f(double x, double y);
double lemma_g(double y);

struct CurvatureConstant {
  double value = 0.0;  // min g(y) / h(y)^2 over the grid
  double argmin = 0.0;
  double grid_low = 0.0;
  double grid_high = 0.0;
  int grid_points = 0;
};

// Estimates c_a = inf_y g(y) / h(y)^2 on a log-spaced grid of y > 0 (the
// ratio is even in y).
CurvatureConstant estimate_curvature_constant(double low = 1e-6, double high = 1e6,
                                              int points = 20001);

enum class BoundKind { kOursL2, kShahL2, kExistence };
std::string to_string(BoundKind kind);

struct BoundInputs {
  double lambda2_fisher = 0.0;
  double lambda2_laplacian = 0.0;
  double kappa = 0.0;
  double range = 0.0;
  int d = 0;
  double n = 0.0;
  double t = 0.0;
};

struct BoundReport {
  BoundKind kind = BoundKind::kOursL2;
  double value = 0.0;
  BoundInputs inputs;
  std::string constant_convention = "universal constants c0, c1, c'' and c_a set to 1";
  // Existence reports only.
  std::optional<bool> satisfied;
};

BoundReport report_ours(const BoundInputs& inputs);
BoundReport report_shah(const BoundInputs& inputs);
// value is the failure probability bound, 2/sqrt(d), or the union bound when
// the sufficient condition does not hold.
BoundReport report_existence(const BoundInputs& inputs);

}  // namespace btl
