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

// Run artifacts on disk: numeric CSV tables and JSON sidecars.
//
// Numbers are written in the shortest form that parses back to the same
// double, so write/read round-trips exactly. An empty field stands for a
// missing value and reads back as NaN.

#ifndef SOFTTRAJ_CLI_ARTIFACTS_HPP
#define SOFTTRAJ_CLI_ARTIFACTS_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "softtraj/errors.hpp"

namespace softtraj::cli {

/// Missing or malformed run artifacts.
class ArtifactError : public Error {
 public:
  using Error::Error;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a column; throws ArtifactError when absent.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
  /// Appends a row; its length must match the header.
  void add_row(std::vector<double> row);
  bool operator==(const Table& other) const;
};

std::string format_number(double x);
std::string to_csv(const Table& table);
/// `source` names the input in error messages.
Table parse_csv(const std::string& text, const std::string& source);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const Table& table);
Table read_csv(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace softtraj::cli

#endif  // SOFTTRAJ_CLI_ARTIFACTS_HPP
