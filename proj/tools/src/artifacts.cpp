/*
 Copyright 2026 The softtraj Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "softtraj_cli/artifacts.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace softtraj::cli {

namespace fs = std::filesystem;

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw ArtifactError("missing column '" + name + "'");
}

bool Table::has_column(const std::string& name) const {
  for (const std::string& c : columns) {
    if (c == name) return true;
  }
  return false;
}

std::vector<double> Table::values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[c]);
  return out;
}

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw ArtifactError("row has " + std::to_string(row.size()) + " fields, header has " +
                        std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

bool Table::operator==(const Table& other) const {
  if (columns != other.columns || rows.size() != other.rows.size()) return false;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const double a = rows[r][c], b = other.rows[r][c];
      if (!(a == b || (std::isnan(a) && std::isnan(b)))) return false;
    }
  }
  return true;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (table.columns[c].find_first_of(",\n\"") != std::string::npos) {
      throw ArtifactError("column name '" + table.columns[c] + "' cannot be written to CSV");
    }
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_number(row[c]);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_field(const std::string& f, const std::string& where) {
  if (f.empty()) return std::nan("");
  if (f == "inf") return INFINITY;
  if (f == "-inf") return -INFINITY;
  double x = 0.0;
  const auto res = std::from_chars(f.data(), f.data() + f.size(), x);
  if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
    throw ArtifactError(where + ": '" + f + "' is not a number");
  }
  return x;
}

}  // namespace

Table parse_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  Table t;
  if (!std::getline(in, line) || line.empty()) throw ArtifactError(source + ": missing header");
  t.columns = split(line);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line);
    const std::string where = source + ":" + std::to_string(line_no);
    if (fields.size() != t.columns.size()) {
      throw ArtifactError(where + ": expected " + std::to_string(t.columns.size()) +
                          " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string& f : fields) row.push_back(parse_field(f, where));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw ArtifactError(path.string() + ": cannot write");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError(path.string() + ": missing or unreadable");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_csv(const fs::path& path, const Table& table) { write_text(path, to_csv(table)); }

Table read_csv(const fs::path& path) { return parse_csv(read_text(path), path.string()); }

void write_json(const fs::path& path, const nlohmann::json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

nlohmann::json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ArtifactError(path.string() + ": not valid JSON (" + e.what() + ")");
  }
}

}  // namespace softtraj::cli
