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

#ifndef SPKANON_ASV_METRICS_H_
#define SPKANON_ASV_METRICS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spkanon/vector_store.h"

namespace spkanon {

inline constexpr const char* kScoringBackend = "cosine";
inline constexpr const char* kEerMethod = "linear-interpolation-at-far-frr-crossing";

struct ScoredTrial {
  std::string enroll_id;
  std::string test_id;
  TrialLabel label;
  double score = 0.0;
};

/// cos(a, b). Throws Error on zero-norm input or dimension mismatch.
double CosineSimilarity(const Eigen::Ref<const Eigen::VectorXd>& a,
                        const Eigen::Ref<const Eigen::VectorXd>& b);

/// Cosine score for every trial, in trial order. Enrollment ids resolve in
/// `enroll`, test ids in `test`; an unresolved id throws Error.
std::vector<ScoredTrial> ScoreTrials(const VectorSet& enroll, const VectorSet& test,
                                     const TrialSet& trials);

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

/**
   Equal error rate of a set of detection scores.

   With a threshold t, the false acceptance rate FAR(t) is the fraction of
   impostor scores >= t and the false rejection rate FRR(t) is the fraction of
   genuine scores < t. Both are evaluated at every distinct score (plus a
   point above the maximum where FAR = 0, FRR = 1). FAR - FRR never
   increases along this sweep; the EER is taken where it first reaches zero,
   either exactly at a sweep point or by linear interpolation between the
   two adjacent points that bracket the sign change. The threshold is
   interpolated the same way.

   Throws Error if either class is empty.
*/
EerResult ComputeEer(std::span<const double> genuine, std::span<const double> impostor);
EerResult ComputeEer(std::span<const ScoredTrial> scores);

struct ScoreReport {
  std::vector<ScoredTrial> scores;
  EerResult eer;
  std::size_t n_genuine = 0;
  std::size_t n_impostor = 0;
};

ScoreReport BuildScoreReport(const VectorSet& enroll, const VectorSet& test,
                             const TrialSet& trials);

/// TSV score lines followed by the summary line
/// `eer=.. threshold=.. n_genuine=.. n_impostor=.. scoring=cosine`.
std::string SerializeScoreReport(const ScoreReport& report,
                                 std::span<const std::string> comments = {});

}  // namespace spkanon

#endif  // SPKANON_ASV_METRICS_H_
