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

#include "spkanon/random.h"

#include <numeric>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <boost/version.hpp>

#include "spkanon/text_util.h"

namespace spkanon {

#define SPKANON_STR2(x) #x
#define SPKANON_STR(x) SPKANON_STR2(x)
const char* const kRngAlgorithm = "mt19937_64/boost-random-" SPKANON_STR(BOOST_VERSION);
#undef SPKANON_STR
#undef SPKANON_STR2

std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t HashString(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t tag) {
  return Mix64(base ^ Mix64(tag + 1));
}

std::uint64_t DeriveSeed(std::uint64_t base, std::string_view name) {
  return Mix64(base ^ HashString(name));
}

std::uint64_t RunSeed(std::uint64_t base, std::uint64_t run_index) {
  return Mix64(base ^ run_index);
}

std::size_t UniformIndex(Rng& rng, std::size_t bound) {
  if (bound == 0) throw Error("UniformIndex: empty range");
  boost::random::uniform_int_distribution<std::size_t> dist(0, bound - 1);
  return dist(rng);
}

double StandardNormal(Rng& rng) {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

double UniformReal(Rng& rng, double lo, double hi) {
  boost::random::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng);
}

std::vector<std::size_t> SampleWithoutReplacement(Rng& rng, std::size_t population,
                                                  std::size_t count) {
  if (count > population) {
    throw Error("cannot draw " + std::to_string(count) + " items from " +
                std::to_string(population));
  }
  std::vector<std::size_t> perm(population);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + UniformIndex(rng, population - i);
    std::swap(perm[i], perm[j]);
  }
  perm.resize(count);
  return perm;
}

}  // namespace spkanon
