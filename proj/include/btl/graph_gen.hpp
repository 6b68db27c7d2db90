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

// Comparison schedule and score generators used by the simulation studies.

#include <cstdint>
#include <string>

#include "btl/model.hpp"

namespace btl {

enum class TopologyKind { kComplete, kErdosRenyi, kBanded, kStar, kBarbell };

std::string to_string(TopologyKind kind);
TopologyKind parse_topology(const std::string& name);

struct TopologySpec {
  TopologyKind kind = TopologyKind::kComplete;
  int d = 2;
  // Comparisons per included pair.
  std::int64_t comparisons_per_pair = 1;
  // Banded only: pairs with 0 < |i - j| <= width are compared.
  int width = 1;
  // Erdos-Renyi only: edge probability and graph seed.
  double edge_probability = 1.0;
  std::uint64_t seed = 0;

  // Throws ArgumentError when the invariants for `kind` do not hold.
  void validate() const;
};

inline constexpr int kErdosRenyiMaxRetries = 100;

// complete:    all pairs
// banded:      0 < |i - j| <= width
// star:        item 0 against every other item
// barbell:     complete on {0..d/2-1} and on {d/2..d-1}, plus (d/2-1, d/2)
// erdos_renyi: each pair independently with probability p, redrawn until
//              connected (GenerationError after kErdosRenyiMaxRetries draws)
//
// `draws`, when given, receives the number of graphs drawn (1 unless
// erdos_renyi rejected disconnected draws).
ComparisonSchedule generate_schedule(const TopologySpec& spec, int* draws = nullptr);

// Total comparisons of a banded schedule, T (dW - W(W+1)/2).
std::int64_t banded_total_comparisons(int d, int width, std::int64_t comparisons_per_pair);

// w_i = (2i - d) / d * B for 1-based i, re-centered to zero sum. Pairwise gaps
// are (2/d) B |i - j|.
ScoreVector even_spread_scores(int d, double range);

// w'_i iid N(0, 1); w = B w' / ||w'||_inf, then re-centered.
ScoreVector gaussian_normalized_scores(int d, double range, std::uint64_t seed);

// The pre-centering vector B w' / ||w'||_inf, exposed for inspection.
Eigen::VectorXd gaussian_normalized_raw(int d, double range, std::uint64_t seed);

}  // namespace btl
