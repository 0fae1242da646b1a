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

#include "spkanon/anonymizer.h"

#include <algorithm>
#include <numeric>

#include "spkanon/random.h"
#include "spkanon/text_util.h"

namespace spkanon {

std::string_view ToString(RandomnessScope scope) {
  return scope == RandomnessScope::kPerSpeaker ? "per_speaker" : "per_utterance";
}

RandomnessScope ParseRandomnessScope(std::string_view text) {
  if (text == "per_utterance") return RandomnessScope::kPerUtterance;
  if (text == "per_speaker") return RandomnessScope::kPerSpeaker;
  throw Error("randomness scope must be 'per_utterance' or 'per_speaker', got '" +
              std::string(text) + "'");
}

void AnonymizationPolicy::Validate(std::size_t pool_size) const {
  if (select_n == 0) throw Error("select_n must be positive");
  if (select_n > farthest_k) {
    throw Error("select_n (" + std::to_string(select_n) + ") exceeds farthest_k (" +
                std::to_string(farthest_k) + ")");
  }
  if (farthest_k > pool_size) {
    throw Error("farthest_k (" + std::to_string(farthest_k) + ") exceeds pool size (" +
                std::to_string(pool_size) + ")");
  }
}

double CosineDistance(const Eigen::Ref<const Eigen::VectorXd>& a,
                      const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) throw Error("cosine distance: dimension mismatch");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw Error("cosine distance of a zero-norm vector");
  const double cos = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return 1.0 - cos;
}

std::vector<std::size_t> SelectFarthest(const Eigen::Ref<const Eigen::VectorXd>& source,
                                        const VectorSet& pool, std::size_t k) {
  if (k > pool.size()) {
    throw Error("cannot select " + std::to_string(k) + " farthest vectors from a pool of " +
                std::to_string(pool.size()));
  }
  if (source.size() != pool.dimension()) throw Error("source and pool dimensions differ");
  std::vector<double> dist(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) dist[i] = CosineDistance(source, pool[i].values);
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto farther = [&](std::size_t a, std::size_t b) {
    if (dist[a] != dist[b]) return dist[a] > dist[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    farther);
  order.resize(k);
  return order;
}

std::vector<std::size_t> SelectAnonymizationSubset(const Eigen::Ref<const Eigen::VectorXd>& source,
                                                   const VectorSet& pool, std::size_t farthest_k,
                                                   std::size_t select_n, std::uint64_t draw_seed) {
  if (select_n > farthest_k) throw Error("select_n exceeds farthest_k");
  auto chosen = SelectFarthest(source, pool, farthest_k);
  // Every pool member gets a key from the seeded engine, and the n farthest
  // members with the smallest keys are kept. This is a uniform n-subset, and
  // two sources whose farthest sets agree draw the same subset under one seed.
  Rng rng(draw_seed);
  std::vector<std::uint64_t> key(pool.size());
  for (auto& k : key) k = rng();
  auto smaller_key = [&](std::size_t a, std::size_t b) {
    return key[a] != key[b] ? key[a] < key[b] : a < b;
  };
  std::partial_sort(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(select_n),
                    chosen.end(), smaller_key);
  chosen.resize(select_n);
  // Summation order fixed by pool index, so n = k is bit-identical for any seed.
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

SpeakerVector Anonymize(const SpeakerVector& source, const VectorSet& pool,
                        const AnonymizationPolicy& policy) {
  policy.Validate(pool.size());
  if (source.values.norm() == 0.0) throw Error("source vector '" + source.utterance_id + "' is zero");
  for (const auto& p : pool) {
    if (p.values.norm() == 0.0) throw Error("pool vector '" + p.utterance_id + "' is zero");
  }
  auto chosen = SelectAnonymizationSubset(source.values, pool, policy.farthest_k, policy.select_n,
                                          policy.seed);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(pool.dimension());
  for (std::size_t i : chosen) sum += pool[i].values;
  SpeakerVector out;
  out.utterance_id = source.utterance_id + policy.id_suffix;
  out.speaker_id = source.speaker_id;
  out.domain = pool.DomainLabel();
  out.values = sum / static_cast<double>(chosen.size());
  return out;
}

std::uint64_t DrawSeedFor(const SpeakerVector& source, std::uint64_t base_seed,
                          RandomnessScope scope) {
  return DeriveSeed(base_seed,
                    scope == RandomnessScope::kPerSpeaker ? source.speaker_id : source.utterance_id);
}

VectorSet AnonymizeSet(const VectorSet& set, const VectorSet& pool,
                       const AnonymizationPolicy& policy, RandomnessScope scope) {
  policy.Validate(pool.size());
  VectorSet out(set.dimension());
  AnonymizationPolicy per_vector = policy;
  for (const auto& v : set) {
    per_vector.seed = DrawSeedFor(v, policy.seed, scope);
    out.Add(Anonymize(v, pool, per_vector));
  }
  return out;
}

}  // namespace spkanon
