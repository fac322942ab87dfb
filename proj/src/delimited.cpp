//
// Copyright 2026 The WADER Authors
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
//

#include "wader/delimited.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wader/error.hpp"

namespace wader {

std::vector<Row> parse_records(std::string_view content, char delimiter,
                               std::vector<std::size_t>* lines) {
  std::vector<Row> records;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool field_quoted = false;
  bool row_open = false;
  std::size_t line = 1;
  std::size_t row_line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_quoted = false;
  };
  auto end_row = [&] {
    end_field();
    records.push_back(std::move(row));
    row.clear();
    if (lines != nullptr) lines->push_back(row_line);
    row_open = false;
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (!row_open) {
      row_open = true;
      row_line = line;
    }
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && field.empty() && !field_quoted) {
      in_quotes = true;
      field_quoted = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') {
      // CR of a CRLF pair; the LF ends the row.
    } else if (c == '\n') {
      end_row();
      ++line;
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) {
    throw InvalidInput("unterminated quoted field starting on line " +
                       std::to_string(row_line));
  }
  if (row_open) end_row();
  return records;
}

DelimitedTable parse_delimited(std::string_view content) {
  if (content.size() >= 3 && content.substr(0, 3) == "\xEF\xBB\xBF") {
    content.remove_prefix(3);
  }
  const auto header_end = content.find('\n');
  const std::string_view header_line = content.substr(0, header_end);
  DelimitedTable table;
  table.delimiter =
      header_line.find('\t') != std::string_view::npos ? '\t' : ',';
  std::vector<std::size_t> lines;
  std::vector<Row> records;
  {
    auto parsed = parse_records(content, table.delimiter, &lines);
    // Blank lines carry no record.
    for (std::size_t r = 0; r < parsed.size(); ++r) {
      if (parsed[r].size() == 1 && parsed[r][0].empty()) continue;
      records.push_back(std::move(parsed[r]));
      table.lines.push_back(lines[r]);
    }
  }
  if (records.empty()) throw InvalidInput("missing header row");
  table.header = std::move(records.front());
  table.rows.assign(std::make_move_iterator(records.begin() + 1),
                    std::make_move_iterator(records.end()));
  table.lines.erase(table.lines.begin());
  return table;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw InvalidInput("short write: " + path);
}

std::string quote_field(std::string_view field, char delimiter) {
  const bool needs_quotes =
      field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) !=
      std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted.push_back('"');
    quoted.push_back(c);
  }
  quoted.push_back('"');
  return quoted;
}

void write_row(std::string& out, const Row& row, char delimiter) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out.push_back(delimiter);
    out += quote_field(row[i], delimiter);
  }
  out.push_back('\n');
}

std::string format_exact(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

double parse_double(std::string_view text, std::string_view what) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' ||
                           text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto result =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || result.ec != std::errc() ||
      result.ptr != text.data() + text.size()) {
    throw InvalidInput(std::string(what) + ": not a number: '" +
                       std::string(text) + "'");
  }
  return value;
}

}  // namespace wader
