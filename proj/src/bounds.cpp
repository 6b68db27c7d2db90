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

#include "btl/bounds.hpp"

#include <cmath>
#include <limits>

#include "btl/error.hpp"

namespace btl {
namespace {

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// (1 + e^{-x}) log((1 + e^{x+y}) / (1 + e^x)) = log1p(s expm1(y)) / s, s = sigmoid(x).
double f_term(double x, double y) {
  const double s = sigmoid(x);
  const double grow = std::expm1(y);
  if (s == 0.0) return grow;
  const double u = s * grow;
  if (std::isfinite(grow) && u > -0.5) return std::log1p(u) / s;
  // 1 + u cancels (or y is beyond the exp range); here s > 1/2 so e^{-x} < 1.
  return (1.0 + std::exp(-x)) * (softplus(x + y) - softplus(x));
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ArgumentError(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

double proxy_h(double x) {
  const double a = std::abs(x);
  // sqrt(a + 1) - 1 without cancellation near 0.
  const double magnitude = a / (std::sqrt(a + 1.0) + 1.0);
  return x < 0.0 ? -magnitude : magnitude;
}

Eigen::VectorXd proxy_h_vec(const Eigen::VectorXd& v) { return v.unaryExpr(&proxy_h); }

double proxy_error(const Eigen::VectorXd& delta) { return proxy_h_vec(delta).squaredNorm(); }

double l2_bound_ours(double lambda2_fisher, double kappa, int d, double n, double t) {
  require_positive(lambda2_fisher, "l2_bound_ours: lambda2 of the Fisher matrix");
  require_positive(t, "l2_bound_ours: t");
  require_positive(n, "l2_bound_ours: n");
  return kappa / lambda2_fisher * t * d / n;
}

double l2_bound_shah(double range, double lambda2_laplacian, int d, double n, double t) {
  require_positive(lambda2_laplacian, "l2_bound_shah: lambda2 of the Laplacian");
  require_positive(t, "l2_bound_shah: t");
  require_positive(n, "l2_bound_shah: n");
  const double spread = std::exp(-range) + std::exp(range);
  return std::pow(spread, 4) / lambda2_laplacian * t * d / n;
}

double shah_gamma(double range) {
  const double spread = std::exp(-range) + std::exp(range);
  return 1.0 / (spread * spread);
}

double shah_zeta(double) { return 1.0; }

ExistenceBound existence_bound(double lambda2_fisher, int d, double n) {
  if (d < 2) throw ArgumentError("existence_bound: d must be >= 2");
  require_positive(n, "existence_bound: n");
  ExistenceBound bound;
  const double dd = static_cast<double>(d);
  bound.satisfied = lambda2_fisher >= 2.0 * std::log(dd) / n;
  if (bound.satisfied) bound.failure_prob_bound = 2.0 / std::sqrt(dd);
  bound.union_bound = 2.0 * std::expm1(dd * std::log1p(std::exp(-0.75 * n * lambda2_fisher)));
  return bound;
}

ConsistencyCondition consistency_condition(double lambda2_fisher, double max_degree, int d,
                                           double n) {
  require_positive(n, "consistency_condition: n");
  ConsistencyCondition condition;
  condition.lambda2_fisher = lambda2_fisher;
  condition.threshold = std::sqrt(max_degree * std::log(static_cast<double>(d))) / n;
  condition.satisfied = lambda2_fisher >= condition.threshold;
  return condition;
}

double lemma_g(double y) {
  // 2 log cosh(y/2); log1p(2 sinh^2(y/4)) is exact to rounding near 0.
  const double t = std::abs(y) / 2.0;
  if (t < 1.0) {
    const double s = std::sinh(t / 2.0);
    return 2.0 * std::log1p(2.0 * s * s);
  }
  return 2.0 * (t + std::log1p(std::exp(-2.0 * t)) - std::log(2.0));
}

double lemma_f(double x, double y) { return f_term(x, y) + f_term(-x, -y); }

LemmaValues lemma_functions_f_g(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw ArgumentError("lemma_functions_f_g: inputs must be finite");
  }
  return {lemma_f(x, y), lemma_g(y)};
}

CurvatureConstant estimate_curvature_constant(double low, double high, int points) {
  if (!(low > 0.0) || !(high > low) || points < 2) {
    throw ArgumentError("estimate_curvature_constant: need 0 < low < high and >= 2 points");
  }
  CurvatureConstant result;
  result.value = std::numeric_limits<double>::infinity();
  result.grid_low = low;
  result.grid_high = high;
  result.grid_points = points;
  const double step = (std::log(high) - std::log(low)) / (points - 1);
  for (int k = 0; k < points; ++k) {
    const double y = std::exp(std::log(low) + step * k);
    const double h = proxy_h(y);
    const double ratio = lemma_g(y) / (h * h);
    if (ratio < result.value) {
      result.value = ratio;
      result.argmin = y;
    }
  }
  return result;
}

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::kOursL2:
      return "ours_l2";
    case BoundKind::kShahL2:
      return "shah_l2";
    case BoundKind::kExistence:
      return "existence";
  }
  return "unknown";
}

BoundReport report_ours(const BoundInputs& inputs) {
  BoundReport report;
  report.kind = BoundKind::kOursL2;
  report.inputs = inputs;
  report.value = l2_bound_ours(inputs.lambda2_fisher, inputs.kappa, inputs.d, inputs.n, inputs.t);
  return report;
}

BoundReport report_shah(const BoundInputs& inputs) {
  BoundReport report;
  report.kind = BoundKind::kShahL2;
  report.inputs = inputs;
  report.value =
      l2_bound_shah(inputs.range, inputs.lambda2_laplacian, inputs.d, inputs.n, inputs.t);
  return report;
}

BoundReport report_existence(const BoundInputs& inputs) {
  BoundReport report;
  report.kind = BoundKind::kExistence;
  report.inputs = inputs;
  const ExistenceBound bound = existence_bound(inputs.lambda2_fisher, inputs.d, inputs.n);
  report.satisfied = bound.satisfied;
  report.value = bound.failure_prob_bound.value_or(bound.union_bound);
  return report;
}

}  // namespace btl
