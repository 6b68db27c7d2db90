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

#include "btl/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "btl/error.hpp"
#include "btl/rng.hpp"

namespace btl {
namespace {

class DisjointSet {
 public:
  explicit DisjointSet(int n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

void check_dimension(const Eigen::VectorXd& w, int d, const char* where) {
  if (w.size() != d) {
    throw ArgumentError(std::string(where) + ": score vector has length " +
                        std::to_string(w.size()) + ", schedule has " + std::to_string(d) +
                        " items");
  }
}

// p * (1 - p) for p = 1 / (1 + e^{-x}); symmetric in x.
double bernoulli_variance(double x) {
  const double e = std::exp(-std::abs(x));
  return e / ((1.0 + e) * (1.0 + e));
}

}  // namespace

// ---------------------------------------------------------------------------
// ScoreVector

ScoreVector::ScoreVector(Eigen::VectorXd values) : values_(std::move(values)) {
  if (values_.size() < 2) throw ArgumentError("ScoreVector: need at least 2 items");
  if (!values_.allFinite()) throw ArgumentError("ScoreVector: non-finite score");
  const double sum = values_.sum();
  if (std::abs(sum) > kSumTolerance) {
    throw ArgumentError("ScoreVector: scores must sum to zero (sum = " + std::to_string(sum) +
                        ")");
  }
}

ScoreVector ScoreVector::centered(Eigen::VectorXd values) {
  if (values.size() < 2) throw ArgumentError("ScoreVector: need at least 2 items");
  values.array() -= values.mean();
  return ScoreVector(std::move(values));
}

ScoreVector ScoreVector::zeros(int d) { return ScoreVector(Eigen::VectorXd::Zero(d)); }

// ---------------------------------------------------------------------------
// ComparisonSchedule

ComparisonSchedule::ComparisonSchedule(int d, std::vector<Edge> edges)
    : d_(d), edges_(std::move(edges)) {
  if (d_ < 2) throw ArgumentError("ComparisonSchedule: need at least 2 items");
  for (Edge& e : edges_) {
    if (e.first < 0 || e.first >= d_ || e.second < 0 || e.second >= d_) {
      throw ArgumentError("ComparisonSchedule: item index out of range in pair (" +
                          std::to_string(e.first) + "," + std::to_string(e.second) + ")");
    }
    if (e.first == e.second) {
      throw ArgumentError("ComparisonSchedule: self comparison of item " +
                          std::to_string(e.first));
    }
    if (e.count < 1) {
      throw ArgumentError("ComparisonSchedule: pair (" + std::to_string(e.first) + "," +
                          std::to_string(e.second) + ") has non-positive count");
    }
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.first != b.first ? a.first < b.first : a.second < b.second;
  });

  index_.reserve(edges_.size());
  DisjointSet components(d_);
  int merges = 0;
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const Edge& e = edges_[k];
    if (!index_.emplace(key(e.first, e.second), static_cast<int>(k)).second) {
      throw ArgumentError("ComparisonSchedule: duplicate pair (" + std::to_string(e.first) +
                          "," + std::to_string(e.second) + ")");
    }
    total_ += e.count;
    if (components.unite(e.first, e.second)) ++merges;
  }
  if (merges != d_ - 1) {
    throw ArgumentError("ComparisonSchedule: comparison graph is not connected (" +
                        std::to_string(d_ - merges) + " components)");
  }
}

int ComparisonSchedule::edge_index(int i, int j) const {
  if (i > j) std::swap(i, j);
  const auto it = index_.find(key(i, j));
  return it == index_.end() ? -1 : it->second;
}

std::int64_t ComparisonSchedule::count(int i, int j) const {
  const int k = edge_index(i, j);
  return k < 0 ? 0 : edges_[k].count;
}

int ComparisonSchedule::max_degree() const {
  std::vector<int> degree(d_, 0);
  for (const Edge& e : edges_) {
    ++degree[e.first];
    ++degree[e.second];
  }
  return *std::max_element(degree.begin(), degree.end());
}

std::int64_t ComparisonSchedule::max_comparison_degree() const {
  std::vector<std::int64_t> degree(d_, 0);
  for (const Edge& e : edges_) {
    degree[e.first] += e.count;
    degree[e.second] += e.count;
  }
  return *std::max_element(degree.begin(), degree.end());
}

Eigen::MatrixXd ComparisonSchedule::laplacian() const {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(d_, d_);
  const double n = static_cast<double>(total_);
  for (const Edge& e : edges_) {
    const double weight = static_cast<double>(e.count) / n;
    l(e.first, e.second) = -weight;
    l(e.second, e.first) = -weight;
  }
  for (int i = 0; i < d_; ++i) {
    double row = 0.0;
    for (int j = 0; j < d_; ++j) {
      if (j != i) row += l(i, j);
    }
    l(i, i) = -row;
  }
  return l;
}

ComparisonSchedule ComparisonSchedule::scaled(std::int64_t factor) const {
  if (factor < 1) throw ArgumentError("ComparisonSchedule::scaled: factor must be >= 1");
  std::vector<Edge> edges(edges_.begin(), edges_.end());
  for (Edge& e : edges) e.count *= factor;
  return ComparisonSchedule(d_, std::move(edges));
}

// ---------------------------------------------------------------------------
// OutcomeTable

OutcomeTable::OutcomeTable(std::shared_ptr<const ComparisonSchedule> schedule,
                           std::vector<std::int64_t> wins_of_first)
    : schedule_(std::move(schedule)), wins_(std::move(wins_of_first)) {
  if (!schedule_) throw ArgumentError("OutcomeTable: null schedule");
  if (wins_.size() != schedule_->edge_count()) {
    throw ArgumentError("OutcomeTable: expected " + std::to_string(schedule_->edge_count()) +
                        " win counts, got " + std::to_string(wins_.size()));
  }
  const auto edges = schedule_->edges();
  for (std::size_t k = 0; k < wins_.size(); ++k) {
    if (wins_[k] < 0 || wins_[k] > edges[k].count) {
      throw ArgumentError("OutcomeTable: wins for pair (" + std::to_string(edges[k].first) +
                          "," + std::to_string(edges[k].second) + ") outside [0, n_ij]");
    }
  }
}

std::int64_t OutcomeTable::wins(int i, int j) const {
  const int k = schedule_->edge_index(i, j);
  if (k < 0) return 0;
  const Edge& e = schedule_->edges()[k];
  return i == e.first ? wins_[k] : e.count - wins_[k];
}

Eigen::VectorXd OutcomeTable::total_wins() const {
  Eigen::VectorXd total = Eigen::VectorXd::Zero(dimension());
  const auto edges = schedule_->edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    total[edges[k].first] += static_cast<double>(wins_[k]);
    total[edges[k].second] += static_cast<double>(edges[k].count - wins_[k]);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Model functions

double log1p_exp(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double win_probability(const Eigen::VectorXd& w, int i, int j) {
  const int d = static_cast<int>(w.size());
  if (i < 0 || i >= d || j < 0 || j >= d) {
    throw ArgumentError("win_probability: index out of range");
  }
  if (i == j) throw ArgumentError("win_probability: i and j must differ");
  return 1.0 / (1.0 + std::exp(w[j] - w[i]));
}

double log_likelihood(const Eigen::VectorXd& w, const OutcomeTable& data) {
  const ComparisonSchedule& schedule = data.schedule();
  check_dimension(w, schedule.dimension(), "log_likelihood");
  double total = 0.0;
  const auto edges = schedule.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    const double gap = w[e.first] - w[e.second];
    const auto a_ij = static_cast<double>(data.wins_of_first(k));
    const auto a_ji = static_cast<double>(e.count - data.wins_of_first(k));
    if (a_ij > 0) total += a_ij * log1p_exp(-gap);
    if (a_ji > 0) total += a_ji * log1p_exp(gap);
  }
  return -total / static_cast<double>(schedule.total_comparisons());
}

Eigen::VectorXd gradient(const Eigen::VectorXd& w, const OutcomeTable& data) {
  const ComparisonSchedule& schedule = data.schedule();
  check_dimension(w, schedule.dimension(), "gradient");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(schedule.dimension());
  const auto edges = schedule.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    const double p = 1.0 / (1.0 + std::exp(w[e.second] - w[e.first]));
    const double residual =
        static_cast<double>(data.wins_of_first(k)) - static_cast<double>(e.count) * p;
    g[e.first] += residual;
    g[e.second] -= residual;
  }
  return g / static_cast<double>(schedule.total_comparisons());
}

FisherMatrix fisher_information(const Eigen::VectorXd& w, const ComparisonSchedule& schedule) {
  check_dimension(w, schedule.dimension(), "fisher_information");
  const int d = schedule.dimension();
  const double n = static_cast<double>(schedule.total_comparisons());
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(d, d);
  for (const Edge& e : schedule.edges()) {
    const double weight =
        static_cast<double>(e.count) / n * bernoulli_variance(w[e.first] - w[e.second]);
    info(e.first, e.second) = -weight;
    info(e.second, e.first) = -weight;
  }
  for (int i = 0; i < d; ++i) {
    double row = 0.0;
    for (int j = 0; j < d; ++j) {
      if (j != i) row += info(i, j);
    }
    info(i, i) = -row;
  }
  return FisherMatrix(std::move(info));
}

OutcomeTable sample_outcomes(const ScoreVector& w,
                             std::shared_ptr<const ComparisonSchedule> schedule,
                             std::uint64_t seed) {
  if (!schedule) throw ArgumentError("sample_outcomes: null schedule");
  check_dimension(w.values(), schedule->dimension(), "sample_outcomes");
  Engine engine = make_engine(seed);
  std::vector<std::int64_t> wins;
  wins.reserve(schedule->edge_count());
  for (const Edge& e : schedule->edges()) {
    const double p = win_probability(w, e.first, e.second);
    std::binomial_distribution<std::int64_t> draw(e.count, p);
    wins.push_back(draw(engine));
  }
  return OutcomeTable(std::move(schedule), std::move(wins));
}

}  // namespace btl
