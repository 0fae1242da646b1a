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

#ifndef SPKANON_ANONYMIZER_H_
#define SPKANON_ANONYMIZER_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "spkanon/vector_store.h"

namespace spkanon {

inline constexpr std::size_t kDefaultFarthestK = 200;
inline constexpr std::size_t kDefaultSelectN = 100;
inline constexpr const char* kDefaultIdSuffix = "-anon";

/// Whose identity keys the random subset draw.
enum class RandomnessScope {
  kPerUtterance,  // seed derived from (base seed, utterance_id)
  kPerSpeaker,    // seed derived from (base seed, speaker_id)
};

std::string_view ToString(RandomnessScope scope);
RandomnessScope ParseRandomnessScope(std::string_view text);

struct AnonymizationPolicy {
  std::size_t farthest_k = kDefaultFarthestK;
  std::size_t select_n = kDefaultSelectN;
  std::uint64_t seed = 0;
  /// Appended to the source utterance_id of every anonymized vector.
  std::string id_suffix = kDefaultIdSuffix;

  /// Throws Error unless 0 < select_n <= farthest_k <= pool_size.
  void Validate(std::size_t pool_size) const;
};

/// 1 - cos(a, b), in [0, 2]. Throws Error on a zero-norm input.
double CosineDistance(const Eigen::Ref<const Eigen::VectorXd>& a,
                      const Eigen::Ref<const Eigen::VectorXd>& b);

/// Indices of the k pool members with the largest cosine distance to
/// `source`, ordered by (distance desc, index asc).
std::vector<std::size_t> SelectFarthest(const Eigen::Ref<const Eigen::VectorXd>& source,
                                        const VectorSet& pool, std::size_t k);

/// The pool indices averaged by Anonymize for `source` under an explicit
/// draw seed, sorted ascending. The draw seeds one mt19937_64 that assigns a
/// 64-bit key to every pool index in order; the select_n farthest members
/// with the smallest keys (ties by index) are chosen.
std::vector<std::size_t> SelectAnonymizationSubset(const Eigen::Ref<const Eigen::VectorXd>& source,
                                                   const VectorSet& pool, std::size_t farthest_k,
                                                   std::size_t select_n, std::uint64_t draw_seed);

/// Mean of `select_n` pool vectors drawn uniformly without replacement from
/// the `farthest_k` farthest (by cosine) from `source`. `policy.seed` is
/// used directly as the draw seed. The result keeps the source speaker id,
/// gets utterance_id + policy.id_suffix, and takes the pool's domain label.
SpeakerVector Anonymize(const SpeakerVector& source, const VectorSet& pool,
                        const AnonymizationPolicy& policy);

/// Draw seed used for `source` when anonymizing a whole set: DeriveSeed of
/// the base seed with the utterance id or speaker id, depending on `scope`.
std::uint64_t DrawSeedFor(const SpeakerVector& source, std::uint64_t base_seed,
                          RandomnessScope scope);

/// Anonymizes every member of `set` with per-vector draw seeds from
/// DrawSeedFor(., policy.seed, scope).
VectorSet AnonymizeSet(const VectorSet& set, const VectorSet& pool,
                       const AnonymizationPolicy& policy,
                       RandomnessScope scope = RandomnessScope::kPerUtterance);

}  // namespace spkanon

#endif  // SPKANON_ANONYMIZER_H_
