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

#include "btl/graph_gen.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "btl/error.hpp"
#include "btl/rng.hpp"

namespace btl {
namespace {

bool is_connected(int d, const std::vector<Edge>& edges) {
  std::vector<std::vector<int>> adjacent(d);
  for (const Edge& e : edges) {
    adjacent[e.first].push_back(e.second);
    adjacent[e.second].push_back(e.first);
  }
  std::vector<char> seen(d, 0);
  std::vector<int> frontier{0};
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int v = frontier.back();
    frontier.pop_back();
    for (const int u : adjacent[v]) {
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        frontier.push_back(u);
      }
    }
  }
  return reached == d;
}

}  // namespace

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::kComplete:
      return "complete";
    case TopologyKind::kErdosRenyi:
      return "erdos_renyi";
    case TopologyKind::kBanded:
      return "banded";
    case TopologyKind::kStar:
      return "star";
    case TopologyKind::kBarbell:
      return "barbell";
  }
  return "unknown";
}

TopologyKind parse_topology(const std::string& name) {
  if (name == "complete") return TopologyKind::kComplete;
  if (name == "erdos_renyi") return TopologyKind::kErdosRenyi;
  if (name == "banded") return TopologyKind::kBanded;
  if (name == "star") return TopologyKind::kStar;
  if (name == "barbell") return TopologyKind::kBarbell;
  throw ArgumentError("unknown topology '" + name +
                      "' (expected complete, erdos_renyi, banded, star or barbell)");
}

void TopologySpec::validate() const {
  if (d < 2) throw ArgumentError("topology: d must be >= 2");
  if (comparisons_per_pair < 1) throw ArgumentError("topology: T must be >= 1");
  switch (kind) {
    case TopologyKind::kBanded:
      if (width < 1 || width > d - 1) throw ArgumentError("topology: banded width W must lie in [1, d-1]");
      break;
    case TopologyKind::kErdosRenyi:
      if (!(edge_probability > 0.0 && edge_probability <= 1.0)) {
        throw ArgumentError("topology: erdos_renyi p must lie in (0, 1]");
      }
      break;
    case TopologyKind::kBarbell:
      if (d % 2 != 0) throw ArgumentError("topology: barbell requires an even d");
      break;
    default:
      break;
  }
}

ComparisonSchedule generate_schedule(const TopologySpec& spec, int* draws) {
  spec.validate();
  if (draws) *draws = 1;
  const int d = spec.d;
  const std::int64_t t = spec.comparisons_per_pair;
  std::vector<Edge> edges;
  switch (spec.kind) {
    case TopologyKind::kComplete:
      for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) edges.push_back({i, j, t});
      }
      break;
    case TopologyKind::kBanded:
      for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d && j - i <= spec.width; ++j) edges.push_back({i, j, t});
      }
      break;
    case TopologyKind::kStar:
      for (int j = 1; j < d; ++j) edges.push_back({0, j, t});
      break;
    case TopologyKind::kBarbell: {
      const int half = d / 2;
      for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
          if ((i < half) == (j < half)) edges.push_back({i, j, t});
        }
      }
      edges.push_back({half - 1, half, t});
      break;
    }
    case TopologyKind::kErdosRenyi: {
      Engine engine = make_engine(spec.seed);
      std::bernoulli_distribution coin(spec.edge_probability);
      for (int attempt = 0; attempt < kErdosRenyiMaxRetries; ++attempt) {
        edges.clear();
        for (int i = 0; i < d; ++i) {
          for (int j = i + 1; j < d; ++j) {
            if (coin(engine)) edges.push_back({i, j, t});
          }
        }
        if (draws) *draws = attempt + 1;
        if (is_connected(d, edges)) return ComparisonSchedule(d, std::move(edges));
      }
      throw GenerationError("erdos_renyi: no connected graph in " +
                            std::to_string(kErdosRenyiMaxRetries) + " draws (d = " +
                            std::to_string(d) + ", p = " + std::to_string(spec.edge_probability) +
                            ")");
    }
  }
  return ComparisonSchedule(d, std::move(edges));
}

std::int64_t banded_total_comparisons(int d, int width, std::int64_t comparisons_per_pair) {
  const std::int64_t w = width;
  return comparisons_per_pair * (static_cast<std::int64_t>(d) * w - w * (w + 1) / 2);
}

ScoreVector even_spread_scores(int d, double range) {
  if (d < 2) throw ArgumentError("even_spread_scores: d must be >= 2");
  if (!(range >= 0.0) || !std::isfinite(range)) {
    throw ArgumentError("even_spread_scores: B must be finite and >= 0");
  }
  Eigen::VectorXd w(d);
  for (int i = 1; i <= d; ++i) w[i - 1] = (2.0 * i - d) / d * range;
  return ScoreVector::centered(std::move(w));
}

Eigen::VectorXd gaussian_normalized_raw(int d, double range, std::uint64_t seed) {
  if (d < 2) throw ArgumentError("gaussian_normalized_scores: d must be >= 2");
  if (!(range > 0.0) || !std::isfinite(range)) {
    throw ArgumentError("gaussian_normalized_scores: B must be finite and > 0");
  }
  Engine engine = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd w(d);
  for (int i = 0; i < d; ++i) w[i] = normal(engine);
  const double sup = w.cwiseAbs().maxCoeff();
  return (w / sup) * range;
}

ScoreVector gaussian_normalized_scores(int d, double range, std::uint64_t seed) {
  return ScoreVector::centered(gaussian_normalized_raw(d, range, seed));
}

}  // namespace btl
