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

#include "spkanon/key_value_config.h"

#include "spkanon/text_util.h"

namespace spkanon {

KeyValueConfig KeyValueConfig::Parse(std::string_view text, std::string_view source_name) {
  KeyValueConfig cfg;
  cfg.source_ = std::string(source_name);
  auto lines = Split(text, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = Trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const std::string where = cfg.source_ + ":" + std::to_string(i + 1) + ": ";
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(where + "expected 'key = value'");
    std::string key(Trim(line.substr(0, eq)));
    std::string value(Trim(line.substr(eq + 1)));
    if (key.empty()) throw Error(where + "empty key");
    if (cfg.values_.count(key) != 0) throw Error(where + "duplicate key '" + key + "'");
    cfg.order_.push_back(key);
    cfg.values_.emplace(std::move(key), std::move(value));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::Load(const std::filesystem::path& path) {
  KeyValueConfig cfg = Parse(ReadFile(path), path.string());
  cfg.base_dir_ = path.parent_path();
  return cfg;
}

bool KeyValueConfig::Has(std::string_view key) const { return values_.count(key) != 0; }

std::optional<std::string> KeyValueConfig::Find(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  consumed_.emplace(key);
  return it->second;
}

std::string KeyValueConfig::Require(std::string_view key) const {
  auto v = Find(key);
  if (!v) throw Error(source_ + ": missing required key '" + std::string(key) + "'");
  return *v;
}

std::string KeyValueConfig::GetString(std::string_view key) const { return Require(key); }

std::string KeyValueConfig::GetString(std::string_view key, std::string_view fallback) const {
  auto v = Find(key);
  return v ? *v : std::string(fallback);
}

double KeyValueConfig::GetDouble(std::string_view key) const {
  return ParseDouble(Require(key), key);
}

double KeyValueConfig::GetDouble(std::string_view key, double fallback) const {
  auto v = Find(key);
  return v ? ParseDouble(*v, key) : fallback;
}

std::uint64_t KeyValueConfig::GetUint64(std::string_view key) const {
  return ParseUint64(Require(key), key);
}

std::uint64_t KeyValueConfig::GetUint64(std::string_view key, std::uint64_t fallback) const {
  auto v = Find(key);
  return v ? ParseUint64(*v, key) : fallback;
}

bool KeyValueConfig::GetBool(std::string_view key, bool fallback) const {
  auto v = Find(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw Error(source_ + ": key '" + std::string(key) + "' expects true/false, got '" + *v + "'");
}

std::vector<std::string> KeyValueConfig::GetList(std::string_view key) const {
  std::vector<std::string> out;
  std::string raw = Require(key);
  if (Trim(raw).empty()) return out;
  for (auto part : Split(raw, ',')) out.emplace_back(Trim(part));
  return out;
}

void KeyValueConfig::RequireAllConsumed() const {
  for (const auto& key : order_) {
    if (consumed_.count(key) == 0) throw Error(source_ + ": unknown key '" + key + "'");
  }
}

std::filesystem::path KeyValueConfig::ResolvePath(std::string_view key) const {
  std::filesystem::path p(Require(key));
  if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
  return p;
}

}  // namespace spkanon
