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

#include "btl/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include "btl/error.hpp"

namespace btl {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos ? line.npos
                                                                               : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
      field.remove_suffix(1);
    }
    fields.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <typename T>
T parse_number(std::string_view field, const std::string& source, std::size_t line,
               const char* name) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(source, line,
                     std::string("invalid ") + name + " '" + std::string(field) + "'");
  }
  return value;
}

struct Row {
  std::size_t line;
  std::vector<std::string_view> fields;
};

// Reads all non-empty lines, checks the header verbatim and the field count.
std::vector<Row> read_rows(std::istream& in, const std::string& source,
                           std::string_view header, std::vector<std::string>& storage) {
  std::string text;
  std::size_t line_no = 0;
  bool have_header = false;
  const std::size_t columns = split_fields(header).size();
  std::vector<std::size_t> lines;
  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    if (!have_header) {
      if (text != header) {
        throw ParseError(source, line_no,
                         "expected header '" + std::string(header) + "', got '" + text + "'");
      }
      have_header = true;
      continue;
    }
    storage.push_back(text);
    lines.push_back(line_no);
  }
  if (!have_header) throw ParseError(source, 0, "empty input, missing header");
  std::vector<Row> rows;
  rows.reserve(storage.size());
  for (std::size_t k = 0; k < storage.size(); ++k) {
    Row row{lines[k], split_fields(storage[k])};
    if (row.fields.size() != columns) {
      throw ParseError(source, row.line,
                       "expected " + std::to_string(columns) + " fields, got " +
                           std::to_string(row.fields.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

struct ParsedPairs {
  int d = 0;
  std::vector<Edge> edges;
  std::vector<std::int64_t> wins;
};

ParsedPairs parse_pairs(std::istream& in, const std::string& source, int d, bool with_wins) {
  std::vector<std::string> storage;
  const auto rows = read_rows(in, source, with_wins ? "i,j,n_ij,a_ij" : "i,j,n_ij", storage);
  ParsedPairs parsed;
  int max_index = -1;
  for (const Row& row : rows) {
    Edge e;
    e.first = parse_number<int>(row.fields[0], source, row.line, "item index i");
    e.second = parse_number<int>(row.fields[1], source, row.line, "item index j");
    e.count = parse_number<std::int64_t>(row.fields[2], source, row.line, "count n_ij");
    if (e.first < 0 || e.second < 0) throw ParseError(source, row.line, "negative item index");
    if (e.first == e.second) throw ParseError(source, row.line, "self comparison");
    if (e.count < 1) throw ParseError(source, row.line, "n_ij must be positive");
    if (d > 0 && (e.first >= d || e.second >= d)) {
      throw ParseError(source, row.line, "item index exceeds item count");
    }
    if (with_wins) {
      auto a = parse_number<std::int64_t>(row.fields[3], source, row.line, "win count a_ij");
      if (a < 0 || a > e.count) throw ParseError(source, row.line, "a_ij outside [0, n_ij]");
      // Rows may list a pair as (j, i); normalize to wins of the lower index.
      if (e.first > e.second) {
        std::swap(e.first, e.second);
        a = e.count - a;
      }
      parsed.wins.push_back(a);
    }
    max_index = std::max({max_index, e.first, e.second});
    parsed.edges.push_back(e);
  }
  parsed.d = d > 0 ? d : max_index + 1;
  return parsed;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

void write_schedule_csv(std::ostream& out, const ComparisonSchedule& schedule) {
  out << "i,j,n_ij\n";
  for (const Edge& e : schedule.edges()) {
    out << e.first << ',' << e.second << ',' << e.count << '\n';
  }
}

void write_outcomes_csv(std::ostream& out, const OutcomeTable& data) {
  out << "i,j,n_ij,a_ij\n";
  const auto edges = data.schedule().edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    out << edges[k].first << ',' << edges[k].second << ',' << edges[k].count << ','
        << data.wins_of_first(k) << '\n';
  }
}

void write_scores_csv(std::ostream& out, const ScoreVector& scores) {
  out << "item,score\n";
  for (int i = 0; i < scores.size(); ++i) out << i << ',' << format_double(scores[i]) << '\n';
}

ComparisonSchedule read_schedule_csv(std::istream& in, const std::string& source, int d) {
  ParsedPairs parsed = parse_pairs(in, source, d, false);
  return ComparisonSchedule(parsed.d, std::move(parsed.edges));
}

OutcomeTable read_outcomes_csv(std::istream& in, const std::string& source, int d) {
  ParsedPairs parsed = parse_pairs(in, source, d, true);
  // The schedule sorts its edges; carry the wins along by pair lookup.
  auto schedule = std::make_shared<const ComparisonSchedule>(parsed.d, parsed.edges);
  std::vector<std::int64_t> wins(schedule->edge_count(), 0);
  for (std::size_t k = 0; k < parsed.edges.size(); ++k) {
    wins[schedule->edge_index(parsed.edges[k].first, parsed.edges[k].second)] = parsed.wins[k];
  }
  return OutcomeTable(std::move(schedule), std::move(wins));
}

ScoreVector read_scores_csv(std::istream& in, const std::string& source) {
  std::vector<std::string> storage;
  const auto rows = read_rows(in, source, "item,score", storage);
  Eigen::VectorXd values(static_cast<Eigen::Index>(rows.size()));
  std::vector<bool> seen(rows.size(), false);
  for (const Row& row : rows) {
    const int item = parse_number<int>(row.fields[0], source, row.line, "item index");
    if (item < 0 || item >= static_cast<int>(rows.size())) {
      throw ParseError(source, row.line, "item index out of range");
    }
    if (seen[item]) throw ParseError(source, row.line, "duplicate item");
    seen[item] = true;
    values[item] = parse_number<double>(row.fields[1], source, row.line, "score");
  }
  return ScoreVector(std::move(values));
}

ComparisonSchedule load_schedule(const std::string& path) {
  auto in = open_for_read(path);
  return read_schedule_csv(in, path);
}

OutcomeTable load_outcomes(const std::string& path) {
  auto in = open_for_read(path);
  return read_outcomes_csv(in, path);
}

ScoreVector load_scores(const std::string& path) {
  auto in = open_for_read(path);
  return read_scores_csv(in, path);
}

void save_schedule(const std::string& path, const ComparisonSchedule& schedule) {
  auto out = open_for_write(path);
  write_schedule_csv(out, schedule);
  if (!out) throw IoError("write to '" + path + "' failed");
}

void save_outcomes(const std::string& path, const OutcomeTable& data) {
  auto out = open_for_write(path);
  write_outcomes_csv(out, data);
  if (!out) throw IoError("write to '" + path + "' failed");
}

void save_scores(const std::string& path, const ScoreVector& scores) {
  auto out = open_for_write(path);
  write_scores_csv(out, scores);
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace btl
