/**
 * Copyright 2026 The mammopipe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mammopipe::io {

/// Header-first CSV with RFC 4180 quoting. Lines starting with '#' before
/// the header carry format metadata and are kept in `comments`.
struct CsvTable {
  std::string source;  // file name used in error messages
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  std::optional<std::size_t> column(std::string_view name) const;
  std::size_t require_column(std::string_view name) const;
  /// Cell text; empty when the column is absent.
  std::string get(std::size_t row, std::string_view name) const;
  /// "file:line" for error messages.
  std::string where(std::size_t row) const;
};

CsvTable parse_csv(std::string_view text, std::string source = "<memory>");
CsvTable read_csv(const std::filesystem::path& path);

std::string csv_escape(std::string_view field);

class CsvWriter {
 public:
  CsvWriter(std::string format_tag, std::vector<std::string> header);
  void add_row(const std::vector<std::string>& fields);
  const std::string& str() const { return out_; }

 private:
  std::size_t columns_;
  std::string out_;
};

/// Shortest round-trip decimal form; identical on every conforming platform.
std::string format_double(double v);
double parse_double(std::string_view s, std::string_view context);

}  // namespace mammopipe::io
