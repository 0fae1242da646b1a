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

#ifndef SPKANON_RANDOM_H_
#define SPKANON_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace spkanon {

// Seeded randomness used everywhere in the toolkit.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Distributions come from Boost.Random rather than <random>,
// because the standard leaves distribution algorithms to the implementation
// and we need identical draws across compilers. kRngAlgorithm is written into
// every report so results can be matched to the generator that produced them.
using Rng = std::mt19937_64;

extern const char* const kRngAlgorithm;

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t Mix64(std::uint64_t x);

/// FNV-1a 64-bit hash of a string.
std::uint64_t HashString(std::string_view text);

/// Child seed for a numbered stream: Mix64(base ^ Mix64(tag + 1)).
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t tag);

/// Child seed keyed by a name (utterance id, speaker id, domain label):
/// Mix64(base ^ HashString(name)).
std::uint64_t DeriveSeed(std::uint64_t base, std::string_view name);

/// Per-run seed: Mix64(base ^ run_index).
std::uint64_t RunSeed(std::uint64_t base, std::uint64_t run_index);

/// Uniform integer in [0, bound).
std::size_t UniformIndex(Rng& rng, std::size_t bound);

/// Standard normal draw.
double StandardNormal(Rng& rng);

/// Uniform real in [lo, hi).
double UniformReal(Rng& rng, double lo, double hi);

/// `count` distinct indices from [0, population) via a partial Fisher-Yates
/// shuffle, returned in draw order.
std::vector<std::size_t> SampleWithoutReplacement(Rng& rng, std::size_t population,
                                                  std::size_t count);

}  // namespace spkanon

#endif  // SPKANON_RANDOM_H_
