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

#include "spkanon/asv_metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spkanon/text_util.h"

namespace spkanon {

double CosineSimilarity(const Eigen::Ref<const Eigen::VectorXd>& a,
                        const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) throw Error("cosine similarity: dimension mismatch");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw Error("cosine similarity of a zero-norm vector");
  return a.dot(b) / (na * nb);
}

std::vector<ScoredTrial> ScoreTrials(const VectorSet& enroll, const VectorSet& test,
                                     const TrialSet& trials) {
  if (enroll.dimension() != test.dimension()) {
    throw Error("enroll and test sets have different dimensions");
  }
  std::vector<ScoredTrial> out;
  out.reserve(trials.size());
  for (const auto& t : trials) {
    const auto e = enroll.IndexOf(t.enroll_id);
    if (!e) throw Error("trial references unknown enrollment id '" + t.enroll_id + "'");
    const auto s = test.IndexOf(t.test_id);
    if (!s) throw Error("trial references unknown test id '" + t.test_id + "'");
    out.push_back({t.enroll_id, t.test_id, t.label,
                   CosineSimilarity(enroll[*e].values, test[*s].values)});
  }
  return out;
}

EerResult ComputeEer(std::span<const double> genuine, std::span<const double> impostor) {
  if (genuine.empty()) throw Error("EER needs at least one genuine score");
  if (impostor.empty()) throw Error("EER needs at least one impostor score");
  std::vector<double> gen(genuine.begin(), genuine.end());
  std::vector<double> imp(impostor.begin(), impostor.end());
  for (double s : gen) {
    if (!std::isfinite(s)) throw Error("non-finite genuine score");
  }
  for (double s : imp) {
    if (!std::isfinite(s)) throw Error("non-finite impostor score");
  }
  std::sort(gen.begin(), gen.end());
  std::sort(imp.begin(), imp.end());
  std::vector<double> thresholds;
  thresholds.reserve(gen.size() + imp.size());
  std::merge(gen.begin(), gen.end(), imp.begin(), imp.end(), std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  const double n_gen = static_cast<double>(gen.size());
  const double n_imp = static_cast<double>(imp.size());
  // Running positions: genuines strictly below t, impostors strictly below t.
  std::size_t gen_below = 0;
  std::size_t imp_below = 0;
  double prev_far = 1.0, prev_frr = 0.0, prev_t = thresholds.front();
  for (double t : thresholds) {
    while (gen_below < gen.size() && gen[gen_below] < t) ++gen_below;
    while (imp_below < imp.size() && imp[imp_below] < t) ++imp_below;
    const double far = static_cast<double>(imp.size() - imp_below) / n_imp;
    const double frr = static_cast<double>(gen_below) / n_gen;
    const double diff = far - frr;
    if (diff == 0.0) return {far, t};
    if (diff < 0.0) {
      // Never reached on the first threshold, where FAR = 1 and FRR = 0.
      const double prev_diff = prev_far - prev_frr;
      const double alpha = prev_diff / (prev_diff - diff);
      return {prev_far + alpha * (far - prev_far), prev_t + alpha * (t - prev_t)};
    }
    prev_far = far;
    prev_frr = frr;
    prev_t = t;
  }
  // Above every score: FAR = 0, FRR = 1.
  const double top = std::nextafter(thresholds.back(), std::numeric_limits<double>::infinity());
  const double prev_diff = prev_far - prev_frr;
  const double alpha = prev_diff / (prev_diff + 1.0);
  return {prev_far + alpha * (0.0 - prev_far), prev_t + alpha * (top - prev_t)};
}

EerResult ComputeEer(std::span<const ScoredTrial> scores) {
  std::vector<double> gen;
  std::vector<double> imp;
  for (const auto& s : scores) {
    (s.label == TrialLabel::kGenuine ? gen : imp).push_back(s.score);
  }
  return ComputeEer(gen, imp);
}

ScoreReport BuildScoreReport(const VectorSet& enroll, const VectorSet& test,
                             const TrialSet& trials) {
  trials.RequireBothClasses();
  ScoreReport report;
  report.scores = ScoreTrials(enroll, test, trials);
  report.eer = ComputeEer(report.scores);
  report.n_genuine = trials.CountGenuine();
  report.n_impostor = trials.CountImpostor();
  return report;
}

std::string SerializeScoreReport(const ScoreReport& report,
                                 std::span<const std::string> comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  out += "# eer_method=" + std::string(kEerMethod) + "\n";
  for (const auto& s : report.scores) {
    out += s.enroll_id + "\t" + s.test_id + "\t" + std::string(ToString(s.label)) + "\t" +
           FormatDouble(s.score) + "\n";
  }
  out += "eer=" + FormatDouble(report.eer.eer) + " threshold=" +
         FormatDouble(report.eer.threshold) + " n_genuine=" + std::to_string(report.n_genuine) +
         " n_impostor=" + std::to_string(report.n_impostor) + " scoring=" + kScoringBackend +
         "\n";
  return out;
}

}  // namespace spkanon
