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

#ifndef SPKANON_KEY_VALUE_CONFIG_H_
#define SPKANON_KEY_VALUE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace spkanon {

/// Flat `key = value` text configuration. Blank lines and lines starting
/// with '#' are ignored; keys must be unique. Getters record which keys were
/// read so that RequireAllConsumed() can reject typos.
class KeyValueConfig {
 public:
  static KeyValueConfig Parse(std::string_view text, std::string_view source_name = "<config>");
  static KeyValueConfig Load(const std::filesystem::path& path);

  bool Has(std::string_view key) const;
  std::optional<std::string> Find(std::string_view key) const;

  std::string GetString(std::string_view key) const;
  std::string GetString(std::string_view key, std::string_view fallback) const;
  double GetDouble(std::string_view key) const;
  double GetDouble(std::string_view key, double fallback) const;
  std::uint64_t GetUint64(std::string_view key) const;
  std::uint64_t GetUint64(std::string_view key, std::uint64_t fallback) const;
  bool GetBool(std::string_view key, bool fallback) const;
  /// Comma-separated list; empty value gives an empty list.
  std::vector<std::string> GetList(std::string_view key) const;

  /// Keys in file order.
  const std::vector<std::string>& keys() const { return order_; }

  /// Throws Error naming the first key that no getter asked for.
  void RequireAllConsumed() const;

  /// Directory of the loaded file, for resolving relative paths.
  const std::filesystem::path& base_dir() const { return base_dir_; }
  std::filesystem::path ResolvePath(std::string_view key) const;

 private:
  std::string Require(std::string_view key) const;

  std::string source_;
  std::filesystem::path base_dir_;
  std::map<std::string, std::string, std::less<>> values_;
  std::vector<std::string> order_;
  mutable std::set<std::string, std::less<>> consumed_;
};

}  // namespace spkanon

#endif  // SPKANON_KEY_VALUE_CONFIG_H_
