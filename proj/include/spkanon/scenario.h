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

#ifndef SPKANON_SCENARIO_H_
#define SPKANON_SCENARIO_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spkanon/anonymizer.h"
#include "spkanon/coral.h"
#include "spkanon/key_value_config.h"
#include "spkanon/vector_store.h"

namespace spkanon {

inline constexpr const char* kReportFormatVersion = "spkanon-report-1";
inline constexpr std::size_t kDefaultRuns = 5;

// Attack scenarios. kResynthesized is accepted as an alias of kUnprotected:
// without a vocoder in the loop the resynthesized vectors are the originals.
enum class Scenario { kUnprotected, kResynthesized, kIgnorant, kLazyInformed };

std::string_view ToString(Scenario scenario);
Scenario ParseScenario(std::string_view text);

struct CoralSpec {
  bool enabled = false;
  /// Fit vectors drawn from each of the source and target sets per fit.
  std::size_t sample_count = 10;
  double lambda = kDefaultCoralLambda;
  DenormMode denorm = DenormMode::kTarget;
};

/// Everything one party (user or attacker) needs to anonymize vectors.
struct PartyPolicy {
  AnonymizationPolicy anonymization;  // anonymization.seed is the party's base seed
  RandomnessScope scope = RandomnessScope::kPerUtterance;
  CoralSpec coral;
};

struct ScenarioConfig {
  Scenario scenario = Scenario::kUnprotected;
  PartyPolicy user;
  std::optional<PartyPolicy> attacker;
  std::size_t runs = kDefaultRuns;
  /// Reuse the run-0 anonymization draws in every run.
  bool freeze_anonymization = false;
  /// Reuse the run-0 CORAL fit samples in every run.
  bool freeze_coral_samples = false;
  /// Permits attacker seeds equal to the user's (test-only degenerate case).
  bool allow_equal_seeds = false;
  /// Keep the anonymized vectors of every run in the report.
  bool keep_vectors = false;

  /// Throws Error on any violation: lazy_informed without an attacker policy,
  /// an attacker policy for another scenario, equal user/attacker seeds
  /// (unless allowed), zero runs, or invalid k/n.
  void Validate() const;
};

/// The vector sets a scenario works on. Pointers are non-owning and must
/// outlive the call; optional ones fall back as documented.
struct ScenarioData {
  const VectorSet* pool = nullptr;
  const VectorSet* attacker_pool = nullptr;  // defaults to pool
  const VectorSet* enroll = nullptr;
  const VectorSet* test = nullptr;
  const TrialSet* trials = nullptr;
  const VectorSet* coral_source = nullptr;   // defaults to pool
  const VectorSet* coral_target = nullptr;   // required when CORAL is enabled
};

struct RunRecord {
  std::size_t run = 0;
  std::uint64_t user_seed = 0;
  std::optional<std::uint64_t> attacker_seed;
  double eer = 0.0;
  double threshold = 0.0;
  std::size_t n_genuine = 0;
  std::size_t n_impostor = 0;
  /// ||A_user - A_attacker||_F when both parties fit a CORAL matrix.
  std::optional<double> coral_divergence;
  std::optional<VectorSet> user_vectors;      // anonymized test side
  std::optional<VectorSet> attacker_vectors;  // anonymized enrollment side
};

struct ExperimentReport {
  Scenario scenario = Scenario::kUnprotected;
  std::string label;
  std::vector<RunRecord> runs;
  double mean_eer = 0.0;
  double std_eer = 0.0;  // sample std over runs, 0 for a single run
  std::optional<double> mean_divergence;
  std::vector<std::pair<std::string, std::string>> provenance;
  std::vector<std::string> notes;
};

/// Anonymizes `vectors` as one party would in run `run_index`: subset draws
/// seeded from the party seed, then (optionally) a CORAL matrix fit on
/// freshly drawn samples and applied. Utterance ids are kept unchanged.
struct PartyOutput {
  VectorSet vectors;
  std::optional<CoralTransform> transform;
};
PartyOutput AnonymizeAsParty(const PartyPolicy& party, const VectorSet& vectors,
                             const VectorSet& pool, const VectorSet* coral_source,
                             const VectorSet* coral_target, std::size_t run_index,
                             bool freeze_anonymization, bool freeze_coral_samples);

/// Seeds used by AnonymizeAsParty for run r: the run seed is
/// RunSeed(base, r); subset draws use DeriveSeed(run seed, 1) and CORAL
/// sampling DeriveSeed(run seed, 2).
std::uint64_t AnonymizationSeedForRun(std::uint64_t base_seed, std::size_t run_index);
std::uint64_t CoralSeedForRun(std::uint64_t base_seed, std::size_t run_index);

ExperimentReport RunUnprotected(const ScenarioConfig& config, const ScenarioData& data);
ExperimentReport RunIgnorant(const ScenarioConfig& config, const ScenarioData& data);
ExperimentReport RunLazyInformed(const ScenarioConfig& config, const ScenarioData& data);
/// Dispatches on config.scenario.
ExperimentReport RunScenario(const ScenarioConfig& config, const ScenarioData& data);

/// One lazy-informed experiment per N with both parties' CORAL sample count
/// set to N. Requires an attacker policy.
std::vector<ExperimentReport> CoralNSweep(const ScenarioConfig& base_config,
                                          const ScenarioData& data,
                                          std::span<const std::size_t> n_values,
                                          std::size_t runs);

/// Report text: comment lines with provenance and notes, a TSV table of
/// runs, and a `summary ...` line.
std::string SerializeReport(const ExperimentReport& report);
std::string SerializeReports(std::span<const ExperimentReport> reports,
                             std::span<const std::string> comments = {});

/// Reads the scenario keys of a flat config (see README for the key list).
/// Data paths are not read here.
ScenarioConfig ParseScenarioConfig(const KeyValueConfig& config);

}  // namespace spkanon

#endif  // SPKANON_SCENARIO_H_
