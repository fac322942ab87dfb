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

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace wader {

using Row = std::vector<std::string>;

struct DelimitedTable {
  char delimiter = ',';
  Row header;
  std::vector<Row> rows;
  // 1-based physical line on which each row starts, for error messages.
  std::vector<std::size_t> lines;
};

// Parses RFC-4180-style delimited text. The delimiter is a tab when the
// header line contains one, otherwise a comma. Quoted fields may contain the
// delimiter, newlines and doubled quotes. A trailing newline is optional;
// CRLF line endings are accepted.
DelimitedTable parse_delimited(std::string_view content);

// Headerless variant with an explicit delimiter.
std::vector<Row> parse_records(std::string_view content, char delimiter,
                               std::vector<std::size_t>* lines = nullptr);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

std::string quote_field(std::string_view field, char delimiter);
void write_row(std::string& out, const Row& row, char delimiter);

// Shortest decimal form that parses back to the same double.
std::string format_exact(double value);
// Strict full-string parse; throws InvalidInput naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);

}  // namespace wader
