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

// Bradley-Terry-Luce pairwise comparison model.
//
// Items are indexed 0..d-1. Scores live on the zero-sum subspace; only score
// differences enter the model, Pr[i beats j] = 1 / (1 + exp(w_j - w_i)).
//
// Data are kept as sufficient statistics: a ComparisonSchedule records how
// often each unordered pair was compared (n_ij) and an OutcomeTable records
// how often the lower-indexed item of each pair won (A_ij). The normalized
// Laplacian of the comparison graph has L_ij = -n_ij / n off the diagonal.

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

namespace btl {

// Zero-sum vector of log-strength scores.
class ScoreVector {
 public:
  static constexpr double kSumTolerance = 1e-9;

  // Validates d >= 2, finiteness, and |sum| <= kSumTolerance.
  explicit ScoreVector(Eigen::VectorXd values);

  // Subtracts the mean; pairwise gaps are unchanged.
  static ScoreVector centered(Eigen::VectorXd values);
  static ScoreVector zeros(int d);

  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }
  const Eigen::VectorXd& values() const { return values_; }

  // max_i |w_i|
  double sup_norm() const { return values_.cwiseAbs().maxCoeff(); }
  // max_{i,j} |w_i - w_j|
  double dynamic_range() const { return values_.maxCoeff() - values_.minCoeff(); }

 private:
  Eigen::VectorXd values_;
};

// One compared unordered pair, first < second.
struct Edge {
  int first = 0;
  int second = 0;
  std::int64_t count = 0;
};

// Which pairs are compared and how often. Immutable; validated on construction
// (indices in range, no self pairs, no duplicates, positive counts, connected).
class ComparisonSchedule {
 public:
  ComparisonSchedule(int d, std::vector<Edge> edges);

  int dimension() const { return d_; }
  // Total number of comparisons, sum of n_ij.
  std::int64_t total_comparisons() const { return total_; }
  // Sorted by (first, second).
  std::span<const Edge> edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  // n_ij for either orientation; 0 when the pair is not compared.
  std::int64_t count(int i, int j) const;
  // Position of {i, j} in edges(), or -1.
  int edge_index(int i, int j) const;

  // Number of distinct opponents of the busiest item.
  int max_degree() const;
  // Largest per-item comparison total, max_i sum_j n_ij.
  std::int64_t max_comparison_degree() const;

  // Dense normalized Laplacian; rows sum to exactly zero.
  Eigen::MatrixXd laplacian() const;

  // Same edge set with every count multiplied by `factor` (>= 1).
  ComparisonSchedule scaled(std::int64_t factor) const;

 private:
  static std::uint64_t key(int i, int j) {
    return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j);
  }

  int d_;
  std::int64_t total_ = 0;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, int> index_;
};

// Observed wins tied to a schedule. Stores A_ij for each stored edge (i < j);
// A_ji = n_ij - A_ij, so the conservation invariant holds by construction.
class OutcomeTable {
 public:
  // `wins_of_first[k]` is the number of wins of edges()[k].first.
  OutcomeTable(std::shared_ptr<const ComparisonSchedule> schedule,
               std::vector<std::int64_t> wins_of_first);

  const ComparisonSchedule& schedule() const { return *schedule_; }
  const std::shared_ptr<const ComparisonSchedule>& schedule_ptr() const { return schedule_; }
  int dimension() const { return schedule_->dimension(); }

  // Times i defeated j; 0 for non-compared pairs.
  std::int64_t wins(int i, int j) const;
  std::int64_t wins_of_first(std::size_t edge) const { return wins_[edge]; }
  std::span<const std::int64_t> wins_of_first() const { return wins_; }

  // Total wins per item.
  Eigen::VectorXd total_wins() const;

 private:
  std::shared_ptr<const ComparisonSchedule> schedule_;
  std::vector<std::int64_t> wins_;
};

// Fisher information of the model at a given score vector.
class FisherMatrix {
 public:
  explicit FisherMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {}

  int dimension() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& matrix() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  Eigen::MatrixXd entries_;
};

// log(1 + e^x) without overflow.
double log1p_exp(double x);

// Pr[i beats j] under scores w.
double win_probability(const Eigen::VectorXd& w, int i, int j);
inline double win_probability(const ScoreVector& w, int i, int j) {
  return win_probability(w.values(), i, j);
}

// Normalized log-likelihood (1/n) * sum log Pr[observed outcomes]; always <= 0.
// Accepts any finite vector; the value depends only on score differences.
double log_likelihood(const Eigen::VectorXd& w, const OutcomeTable& data);
inline double log_likelihood(const ScoreVector& w, const OutcomeTable& data) {
  return log_likelihood(w.values(), data);
}

// Gradient of log_likelihood: entry i is (1/n) sum_j (A_ij - n_ij p_ij).
Eigen::VectorXd gradient(const Eigen::VectorXd& w, const OutcomeTable& data);
inline Eigen::VectorXd gradient(const ScoreVector& w, const OutcomeTable& data) {
  return gradient(w.values(), data);
}

// Fisher information: off-diagonal -n_ij p_ij p_ji / n, diagonal the negated
// row sum. Equals the negative Hessian of log_likelihood for any outcomes.
FisherMatrix fisher_information(const Eigen::VectorXd& w, const ComparisonSchedule& schedule);
inline FisherMatrix fisher_information(const ScoreVector& w, const ComparisonSchedule& schedule) {
  return fisher_information(w.values(), schedule);
}

// Draws A_ij ~ Binomial(n_ij, p_ij) for every edge, in edge order, from a
// single engine seeded with `seed`.
OutcomeTable sample_outcomes(const ScoreVector& w,
                             std::shared_ptr<const ComparisonSchedule> schedule,
                             std::uint64_t seed);

}  // namespace btl
