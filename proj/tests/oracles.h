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

// Brute-force reference implementations, written without library code so
// that tests compare two independent computations.

#ifndef SPKANON_TESTS_ORACLES_H_
#define SPKANON_TESTS_ORACLES_H_

#include <algorithm>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spkanon/vector_store.h"

namespace spkanon::testing {

// Full stable sort of every pool index by (distance desc, index asc).
inline std::vector<std::size_t> FarthestOracle(const Eigen::VectorXd& source, const VectorSet& pool,
                                        std::size_t k) {
  std::vector<std::pair<double, std::size_t>> keyed;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& p = pool[i].values;
    keyed.push_back({1.0 - std::clamp(source.dot(p) / (source.norm() * p.norm()), -1.0, 1.0), i});
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(keyed[i].second);
  return out;
}

// Evaluates FAR/FRR at every midpoint between consecutive distinct scores,
// plus one point below and one above the range, by direct counting.
inline double EerOracle(const std::vector<double>& gen, const std::vector<double>& imp) {
  std::vector<double> all = gen;
  all.insert(all.end(), imp.begin(), imp.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<double> ts{all.front() - 1.0};
  for (std::size_t i = 1; i < all.size(); ++i) ts.push_back(0.5 * (all[i - 1] + all[i]));
  ts.push_back(all.back() + 1.0);
  double pf = 0, pr = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double far = 0, frr = 0;
    for (double s : imp) far += s >= ts[i];
    for (double s : gen) frr += s < ts[i];
    far /= static_cast<double>(imp.size());
    frr /= static_cast<double>(gen.size());
    if (far == frr) return far;
    if (far < frr) {
      const double a = (pf - pr) / ((pf - pr) - (far - frr));
      return pf + a * (far - pf);
    }
    pf = far;
    pr = frr;
  }
  return -1.0;  // unreachable: the top point has far < frr
}

}  // namespace spkanon::testing

#endif  // SPKANON_TESTS_ORACLES_H_
