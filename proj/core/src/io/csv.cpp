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

#include "mammopipe/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "mammopipe/io/atomic_file.hpp"
#include "mammopipe/io/png.hpp"

namespace mammopipe::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t CsvTable::require_column(std::string_view name) const {
  if (auto c = column(name)) return *c;
  throw IoError(source + ": missing required column '" + std::string(name) + "'");
}

std::string CsvTable::get(std::size_t row, std::string_view name) const {
  const auto c = column(name);
  if (!c || *c >= rows[row].size()) return {};
  return rows[row][*c];
}

std::string CsvTable::where(std::size_t row) const {
  return source + ":" + std::to_string(line_numbers[row]);
}

CsvTable parse_csv(std::string_view text, std::string source) {
  CsvTable t;
  t.source = std::move(source);

  std::size_t pos = 0;
  std::size_t line = 0;
  bool have_header = false;
  while (pos < text.size()) {
    ++line;
    const std::size_t start_line = line;
    if (!have_header && text[pos] == '#') {
      const std::size_t eol = text.find('\n', pos);
      t.comments.emplace_back(trim(text.substr(pos + 1, eol == std::string_view::npos ? eol : eol - pos - 1)));
      pos = eol == std::string_view::npos ? text.size() : eol + 1;
      continue;
    }

    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (; pos < text.size(); ++pos) {
      const char c = text[pos];
      if (quoted) {
        if (c == '"') {
          if (pos + 1 < text.size() && text[pos + 1] == '"') {
            field.push_back('"');
            ++pos;
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
        }
      } else if (c == '"') {
        quoted = true;
        was_quoted = true;
      } else if (c == ',') {
        fields.push_back(was_quoted ? field : std::string(trim(field)));
        field.clear();
        was_quoted = false;
      } else if (c == '\n') {
        ++pos;
        break;
      } else {
        field.push_back(c);
      }
    }
    if (quoted) throw IoError(t.source + ":" + std::to_string(start_line) + ": unterminated quote");
    fields.push_back(was_quoted ? field : std::string(trim(field)));

    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw IoError(t.source + ":" + std::to_string(start_line) + ": expected " +
                    std::to_string(t.header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(start_line);
  }
  if (!have_header) throw IoError(t.source + ": no header row");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  return parse_csv(read_text_file(path), path.string());
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

CsvWriter::CsvWriter(std::string format_tag, std::vector<std::string> header)
    : columns_(header.size()) {
  if (!format_tag.empty()) out_ = "# " + format_tag + "\n";
  add_row(header);
}

void CsvWriter::add_row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw std::logic_error("CsvWriter: wrong number of fields");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_.push_back(',');
    out_ += csv_escape(fields[i]);
  }
  out_.push_back('\n');
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view s, std::string_view context) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw IoError(std::string(context) + ": '" + std::string(s) + "' is not a number");
  }
  return v;
}

}  // namespace mammopipe::io
