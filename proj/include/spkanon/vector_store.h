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

#ifndef SPKANON_VECTOR_STORE_H_
#define SPKANON_VECTOR_STORE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace spkanon {

inline constexpr const char* kDatasetFormatVersion = "spkanon-dataset-1";
inline constexpr const char* kTrialFormatVersion = "spkanon-trials-1";
inline constexpr int kDefaultDimension = 192;

/// One speaker embedding together with its identity fields.
struct SpeakerVector {
  std::string utterance_id;
  std::string speaker_id;
  std::string domain;
  Eigen::VectorXd values;

  bool operator==(const SpeakerVector& other) const;
};

/// Ordered collection of SpeakerVectors of a common dimension.
///
/// Every vector added is checked: identity fields must be non-empty and
/// representable in the text format, values must be finite and not all zero,
/// and utterance ids must be unique. Iteration follows insertion order.
class VectorSet {
 public:
  explicit VectorSet(int dimension = kDefaultDimension);

  /// Appends `vec`; throws Error if it violates any invariant above.
  void Add(SpeakerVector vec);

  int dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }
  bool empty() const { return vectors_.empty(); }

  const SpeakerVector& operator[](std::size_t i) const { return vectors_[i]; }
  auto begin() const { return vectors_.begin(); }
  auto end() const { return vectors_.end(); }

  std::optional<std::size_t> IndexOf(std::string_view utterance_id) const;
  /// Throws Error if the id is absent.
  const SpeakerVector& Get(std::string_view utterance_id) const;

  /// Vectors as rows of an n x d matrix.
  Eigen::MatrixXd ToMatrix() const;

  /// New set holding the listed members, in the listed order.
  VectorSet Subset(std::span<const std::size_t> indices) const;

  /// The domain label shared by all members, "mixed" when they differ, or an
  /// empty string for an empty set.
  std::string DomainLabel() const;

  bool operator==(const VectorSet& other) const;

 private:
  int dimension_;
  std::vector<SpeakerVector> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Throws Error unless `id` can be written as one field of the text formats.
void ValidateIdentifier(std::string_view id, std::string_view what);

// Dataset text format (UTF-8):
//   dim=<d>
//   # comment lines are ignored anywhere
//   <utterance_id>\t<speaker_id>\t<domain>\t<v1>,<v2>,...,<vd>
//
// Floats are written in shortest round-trip form, so save/load is exact.

VectorSet ParseVectorSet(std::string_view text, std::string_view source_name = "<text>");
std::string SerializeVectorSet(const VectorSet& set,
                               std::span<const std::string> comments = {});

VectorSet LoadVectorSet(const std::filesystem::path& path);
void SaveVectorSet(const VectorSet& set, const std::filesystem::path& path,
                   std::span<const std::string> comments = {});

enum class TrialLabel { kGenuine, kImpostor };

std::string_view ToString(TrialLabel label);

struct Trial {
  std::string enroll_id;
  std::string test_id;
  TrialLabel label;

  bool operator==(const Trial&) const = default;
};

/// Enrollment/test pairings. Duplicate (enroll, test) pairs are rejected.
class TrialSet {
 public:
  void Add(Trial trial);

  std::size_t size() const { return trials_.size(); }
  bool empty() const { return trials_.empty(); }
  const Trial& operator[](std::size_t i) const { return trials_[i]; }
  auto begin() const { return trials_.begin(); }
  auto end() const { return trials_.end(); }

  std::size_t CountGenuine() const;
  std::size_t CountImpostor() const { return size() - CountGenuine(); }

  /// Throws Error unless both classes are present.
  void RequireBothClasses() const;

  bool operator==(const TrialSet& other) const { return trials_ == other.trials_; }

 private:
  std::vector<Trial> trials_;
  std::unordered_map<std::string, std::size_t> keys_;
};

// Trial text format: <enroll_utt>\t<test_utt>\tgenuine|impostor per line.
TrialSet ParseTrialSet(std::string_view text, std::string_view source_name = "<text>");
std::string SerializeTrialSet(const TrialSet& trials,
                              std::span<const std::string> comments = {});
TrialSet LoadTrialSet(const std::filesystem::path& path);
void SaveTrialSet(const TrialSet& trials, const std::filesystem::path& path,
                  std::span<const std::string> comments = {});

struct ImpostorPolicy {
  enum class Kind { kExhaustive, kSampled };
  Kind kind = Kind::kExhaustive;
  std::size_t count = 0;
  std::uint64_t seed = 0;

  static ImpostorPolicy Exhaustive() { return {}; }
  static ImpostorPolicy Sampled(std::size_t count, std::uint64_t seed) {
    return {Kind::kSampled, count, seed};
  }
};

/// Pairs every enrollment id with every test id of the same speaker (genuine)
/// and with different-speaker test ids according to `policy` (impostor).
///
/// The output is sorted by (enroll_id, test_id), and sampled impostors are
/// drawn from the candidates in that canonical order, so the result depends
/// only on the id sets and the seed, never on the order the ids are listed.
/// Throws Error on unknown or duplicate ids, overlapping enroll/test lists,
/// an impostor sample larger than the candidate pool, or an empty class.
TrialSet GenerateTrials(const VectorSet& set, std::span<const std::string> enroll_ids,
                        std::span<const std::string> test_ids,
                        const ImpostorPolicy& policy);

}  // namespace spkanon

#endif  // SPKANON_VECTOR_STORE_H_
