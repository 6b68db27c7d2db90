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

// Plain-text formats.
//
//   outcomes:  i,j,n_ij,a_ij   one row per compared pair, 0-based, a_ij = wins of i
//   schedule:  i,j,n_ij
//   scores:    item,score
//
// Readers report malformed input as ParseError with the offending line.

#include <iosfwd>
#include <memory>
#include <string>

#include "btl/model.hpp"

namespace btl {

// Shortest representation that round-trips to the same double.
std::string format_double(double value);

void write_schedule_csv(std::ostream& out, const ComparisonSchedule& schedule);
void write_outcomes_csv(std::ostream& out, const OutcomeTable& data);
void write_scores_csv(std::ostream& out, const ScoreVector& scores);

// The item count is one more than the largest index seen unless `d` > 0.
ComparisonSchedule read_schedule_csv(std::istream& in, const std::string& source = "<schedule>",
                                     int d = 0);
OutcomeTable read_outcomes_csv(std::istream& in, const std::string& source = "<outcomes>",
                               int d = 0);
// Scores are validated as given; they must already sum to zero.
ScoreVector read_scores_csv(std::istream& in, const std::string& source = "<scores>");

// File-path conveniences; failures to open raise IoError.
ComparisonSchedule load_schedule(const std::string& path);
OutcomeTable load_outcomes(const std::string& path);
ScoreVector load_scores(const std::string& path);
void save_schedule(const std::string& path, const ComparisonSchedule& schedule);
void save_outcomes(const std::string& path, const OutcomeTable& data);
void save_scores(const std::string& path, const ScoreVector& scores);

}  // namespace btl
