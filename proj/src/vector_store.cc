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

#include "spkanon/vector_store.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>
#include <utility>

#include "spkanon/random.h"
#include "spkanon/text_util.h"

namespace spkanon {

namespace {

std::string LinePrefix(std::string_view source, std::size_t line_no) {
  return std::string(source) + ":" + std::to_string(line_no) + ": ";
}

bool IsSkippable(std::string_view line) {
  std::string_view t = Trim(line);
  return t.empty() || t.front() == '#';
}

void AppendComments(std::string& out, std::span<const std::string> comments) {
  for (const auto& c : comments) {
    for (auto part : Split(c, '\n')) {
      out += "# ";
      out += part;
      out += '\n';
    }
  }
}

std::string TrialKey(std::string_view enroll, std::string_view test) {
  std::string key(enroll);
  key += '\t';
  key += test;
  return key;
}

}  // namespace

bool SpeakerVector::operator==(const SpeakerVector& other) const {
  return utterance_id == other.utterance_id && speaker_id == other.speaker_id &&
         domain == other.domain && values.size() == other.values.size() &&
         values == other.values;
}

void ValidateIdentifier(std::string_view id, std::string_view what) {
  if (id.empty()) throw Error(std::string(what) + " is empty");
  if (id.find_first_of("\t\r\n") != std::string_view::npos) {
    throw Error(std::string(what) + " contains a tab or newline: '" + std::string(id) + "'");
  }
  if (id.front() == '#' || Trim(id) != id) {
    throw Error(std::string(what) + " must not start with '#' or carry surrounding spaces: '" +
                std::string(id) + "'");
  }
}

VectorSet::VectorSet(int dimension) : dimension_(dimension) {
  if (dimension <= 0) throw Error("dimension must be positive");
}

void VectorSet::Add(SpeakerVector vec) {
  ValidateIdentifier(vec.utterance_id, "utterance_id");
  ValidateIdentifier(vec.speaker_id, "speaker_id");
  ValidateIdentifier(vec.domain, "domain");
  if (vec.values.size() != dimension_) {
    throw Error("vector '" + vec.utterance_id + "' has " + std::to_string(vec.values.size()) +
                " values, expected " + std::to_string(dimension_));
  }
  if (!vec.values.allFinite()) {
    throw Error("vector '" + vec.utterance_id + "' has a non-finite value");
  }
  if ((vec.values.array() == 0.0).all()) {
    throw Error("vector '" + vec.utterance_id + "' is all zeros");
  }
  if (index_.count(vec.utterance_id) != 0) {
    throw Error("duplicate utterance_id '" + vec.utterance_id + "'");
  }
  index_.emplace(vec.utterance_id, vectors_.size());
  vectors_.push_back(std::move(vec));
}

std::optional<std::size_t> VectorSet::IndexOf(std::string_view utterance_id) const {
  auto it = index_.find(std::string(utterance_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const SpeakerVector& VectorSet::Get(std::string_view utterance_id) const {
  auto idx = IndexOf(utterance_id);
  if (!idx) throw Error("unknown utterance_id '" + std::string(utterance_id) + "'");
  return vectors_[*idx];
}

Eigen::MatrixXd VectorSet::ToMatrix() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(vectors_.size()), dimension_);
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = vectors_[i].values.transpose();
  }
  return m;
}

VectorSet VectorSet::Subset(std::span<const std::size_t> indices) const {
  VectorSet out(dimension_);
  for (std::size_t i : indices) {
    if (i >= vectors_.size()) throw Error("subset index out of range");
    out.Add(vectors_[i]);
  }
  return out;
}

std::string VectorSet::DomainLabel() const {
  if (vectors_.empty()) return {};
  const std::string& first = vectors_.front().domain;
  for (const auto& v : vectors_) {
    if (v.domain != first) return "mixed";
  }
  return first;
}

bool VectorSet::operator==(const VectorSet& other) const {
  return dimension_ == other.dimension_ && vectors_ == other.vectors_;
}

VectorSet ParseVectorSet(std::string_view text, std::string_view source_name) {
  auto lines = Split(text, '\n');
  std::optional<VectorSet> set;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (IsSkippable(line)) continue;
    const std::size_t line_no = i + 1;
    if (!set) {
      std::string_view header = Trim(line);
      if (header.substr(0, 4) != "dim=") {
        throw Error(LinePrefix(source_name, line_no) + "expected header 'dim=<d>'");
      }
      long long d = 0;
      try {
        d = ParseInt(header.substr(4), "dimension");
      } catch (const Error& e) {
        throw Error(LinePrefix(source_name, line_no) + e.what());
      }
      if (d <= 0 || d > 1'000'000) {
        throw Error(LinePrefix(source_name, line_no) + "dimension out of range");
      }
      set.emplace(static_cast<int>(d));
      continue;
    }
    try {
      auto fields = Split(line, '\t');
      if (fields.size() != 4) {
        throw Error("expected 4 tab-separated fields, found " + std::to_string(fields.size()));
      }
      SpeakerVector vec;
      vec.utterance_id = std::string(fields[0]);
      vec.speaker_id = std::string(fields[1]);
      vec.domain = std::string(fields[2]);
      vec.values = ParseRow(fields[3], "vector value");
      set->Add(std::move(vec));
    } catch (const Error& e) {
      throw Error(LinePrefix(source_name, line_no) + e.what());
    }
  }
  if (!set) throw Error(std::string(source_name) + ": missing 'dim=<d>' header");
  return std::move(*set);
}

std::string SerializeVectorSet(const VectorSet& set, std::span<const std::string> comments) {
  std::string out = "dim=" + std::to_string(set.dimension()) + "\n";
  AppendComments(out, comments);
  for (const auto& v : set) {
    out += v.utterance_id;
    out += '\t';
    out += v.speaker_id;
    out += '\t';
    out += v.domain;
    out += '\t';
    out += FormatRow(v.values);
    out += '\n';
  }
  return out;
}

VectorSet LoadVectorSet(const std::filesystem::path& path) {
  return ParseVectorSet(ReadFile(path), path.string());
}

void SaveVectorSet(const VectorSet& set, const std::filesystem::path& path,
                   std::span<const std::string> comments) {
  WriteFileAtomic(path, SerializeVectorSet(set, comments));
}

std::string_view ToString(TrialLabel label) {
  return label == TrialLabel::kGenuine ? "genuine" : "impostor";
}

void TrialSet::Add(Trial trial) {
  ValidateIdentifier(trial.enroll_id, "enroll id");
  ValidateIdentifier(trial.test_id, "test id");
  std::string key = TrialKey(trial.enroll_id, trial.test_id);
  if (keys_.count(key) != 0) {
    throw Error("duplicate trial (" + trial.enroll_id + ", " + trial.test_id + ")");
  }
  keys_.emplace(std::move(key), trials_.size());
  trials_.push_back(std::move(trial));
}

std::size_t TrialSet::CountGenuine() const {
  return static_cast<std::size_t>(std::count_if(
      trials_.begin(), trials_.end(), [](const Trial& t) { return t.label == TrialLabel::kGenuine; }));
}

void TrialSet::RequireBothClasses() const {
  if (CountGenuine() == 0) throw Error("trial set has no genuine pairs");
  if (CountImpostor() == 0) throw Error("trial set has no impostor pairs");
}

TrialSet ParseTrialSet(std::string_view text, std::string_view source_name) {
  TrialSet trials;
  auto lines = Split(text, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (IsSkippable(line)) continue;
    try {
      auto fields = Split(line, '\t');
      if (fields.size() != 3) {
        throw Error("expected 3 tab-separated fields, found " + std::to_string(fields.size()));
      }
      TrialLabel label;
      if (fields[2] == "genuine") {
        label = TrialLabel::kGenuine;
      } else if (fields[2] == "impostor") {
        label = TrialLabel::kImpostor;
      } else {
        throw Error("label must be 'genuine' or 'impostor', got '" + std::string(fields[2]) + "'");
      }
      trials.Add({std::string(fields[0]), std::string(fields[1]), label});
    } catch (const Error& e) {
      throw Error(LinePrefix(source_name, i + 1) + e.what());
    }
  }
  return trials;
}

std::string SerializeTrialSet(const TrialSet& trials, std::span<const std::string> comments) {
  std::string out;
  AppendComments(out, comments);
  for (const auto& t : trials) {
    out += t.enroll_id;
    out += '\t';
    out += t.test_id;
    out += '\t';
    out += ToString(t.label);
    out += '\n';
  }
  return out;
}

TrialSet LoadTrialSet(const std::filesystem::path& path) {
  return ParseTrialSet(ReadFile(path), path.string());
}

void SaveTrialSet(const TrialSet& trials, const std::filesystem::path& path,
                  std::span<const std::string> comments) {
  WriteFileAtomic(path, SerializeTrialSet(trials, comments));
}

TrialSet GenerateTrials(const VectorSet& set, std::span<const std::string> enroll_ids,
                        std::span<const std::string> test_ids, const ImpostorPolicy& policy) {
  std::set<std::string> enroll(enroll_ids.begin(), enroll_ids.end());
  std::set<std::string> test(test_ids.begin(), test_ids.end());
  if (enroll.size() != enroll_ids.size()) throw Error("duplicate id in enrollment list");
  if (test.size() != test_ids.size()) throw Error("duplicate id in test list");
  for (const auto& id : enroll) {
    set.Get(id);
    if (test.count(id) != 0) throw Error("id '" + id + "' is in both enroll and test lists");
  }
  for (const auto& id : test) set.Get(id);

  std::vector<Trial> genuine;
  std::vector<Trial> impostor;
  for (const auto& e : enroll) {
    const std::string& e_spk = set.Get(e).speaker_id;
    for (const auto& t : test) {
      if (set.Get(t).speaker_id == e_spk) {
        genuine.push_back({e, t, TrialLabel::kGenuine});
      } else {
        impostor.push_back({e, t, TrialLabel::kImpostor});
      }
    }
  }
  if (genuine.empty()) throw Error("no genuine pairs: enroll and test share no speaker");
  if (policy.kind == ImpostorPolicy::Kind::kSampled) {
    if (policy.count == 0) throw Error("sampled impostor count must be positive");
    if (policy.count > impostor.size()) {
      throw Error("requested " + std::to_string(policy.count) + " impostor pairs but only " +
                  std::to_string(impostor.size()) + " exist");
    }
    Rng rng(policy.seed);
    auto picks = SampleWithoutReplacement(rng, impostor.size(), policy.count);
    std::sort(picks.begin(), picks.end());
    std::vector<Trial> chosen;
    chosen.reserve(picks.size());
    for (std::size_t i : picks) chosen.push_back(std::move(impostor[i]));
    impostor = std::move(chosen);
  }
  if (impostor.empty()) throw Error("no impostor pairs: only one speaker present");

  std::vector<Trial> all = std::move(genuine);
  all.insert(all.end(), std::make_move_iterator(impostor.begin()),
             std::make_move_iterator(impostor.end()));
  std::sort(all.begin(), all.end(), [](const Trial& a, const Trial& b) {
    return std::tie(a.enroll_id, a.test_id) < std::tie(b.enroll_id, b.test_id);
  });
  TrialSet out;
  for (auto& t : all) out.Add(std::move(t));
  return out;
}

}  // namespace spkanon
