// Copyright (c) 2026 The spkanon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPKANON_TEXT_UTIL_H_
#define SPKANON_TEXT_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace spkanon {

/// All recoverable failures in the library (bad input files, contract
/// violations, numerical breakdowns) are reported with this type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal representation that parses back to the same double.
std::string FormatDouble(double value);

/// Parses a finite decimal double; the whole token must be consumed.
/// Throws Error naming `what` on failure.
double ParseDouble(std::string_view token, std::string_view what = "value");

std::uint64_t ParseUint64(std::string_view token, std::string_view what = "value");
long long ParseInt(std::string_view token, std::string_view what = "value");

std::vector<std::string_view> Split(std::string_view text, char sep);
std::string_view Trim(std::string_view text);

/// Comma-separated row of FormatDouble values.
std::string FormatRow(const Eigen::Ref<const Eigen::VectorXd>& values);
Eigen::VectorXd ParseRow(std::string_view text, std::string_view what = "row");

/// Writes `contents` to a temporary sibling file and renames it over `path`,
/// so readers never observe a partially written file.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view contents);

std::string ReadFile(const std::filesystem::path& path);

}  // namespace spkanon

#endif  // SPKANON_TEXT_UTIL_H_
