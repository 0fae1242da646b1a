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

#include "spkanon/scenario.h"

#include <cmath>
#include <set>

#include "spkanon/asv_metrics.h"
#include "spkanon/random.h"
#include "spkanon/text_util.h"

namespace spkanon {

namespace {

constexpr const char* kResynthesizedNote =
    "resynthesized is reported as unprotected: without a vocoder the resynthesized speaker "
    "vectors are identical to the originals";

void RequireData(const ScenarioData& data, bool needs_pool) {
  if (data.enroll == nullptr || data.test == nullptr || data.trials == nullptr) {
    throw Error("scenario needs enroll, test and trials");
  }
  if (needs_pool && data.pool == nullptr) throw Error("scenario needs an anonymization pool");
  data.trials->RequireBothClasses();
}

// Members of `set` referenced by the trials on one side, in set order.
VectorSet ReferencedSubset(const VectorSet& set, const TrialSet& trials, bool enroll_side) {
  std::set<std::string> ids;
  for (const auto& t : trials) ids.insert(enroll_side ? t.enroll_id : t.test_id);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (ids.count(set[i].utterance_id) != 0) idx.push_back(i);
  }
  if (idx.size() != ids.size()) {
    for (const auto& id : ids) set.Get(id);  // throws naming the missing id
  }
  return set.Subset(idx);
}

void AddPartyProvenance(ExperimentReport& report, const std::string& who,
                        const PartyPolicy& party) {
  auto& p = report.provenance;
  p.emplace_back(who + "_seed", std::to_string(party.anonymization.seed));
  p.emplace_back(who + "_k", std::to_string(party.anonymization.farthest_k));
  p.emplace_back(who + "_n", std::to_string(party.anonymization.select_n));
  p.emplace_back(who + "_randomness", std::string(ToString(party.scope)));
  p.emplace_back(who + "_coral", party.coral.enabled ? "true" : "false");
  if (party.coral.enabled) {
    p.emplace_back(who + "_coral_n", std::to_string(party.coral.sample_count));
    p.emplace_back(who + "_lambda", FormatDouble(party.coral.lambda));
    p.emplace_back(who + "_denorm", std::string(ToString(party.coral.denorm)));
  }
}

ExperimentReport StartReport(const ScenarioConfig& config, const ScenarioData& data) {
  ExperimentReport report;
  report.scenario = config.scenario;
  report.label = std::string(ToString(config.scenario));
  auto& p = report.provenance;
  p.emplace_back("scenario", report.label);
  const bool single = config.scenario == Scenario::kUnprotected ||
                      config.scenario == Scenario::kResynthesized;
  p.emplace_back("runs", std::to_string(single ? 1 : config.runs));
  p.emplace_back("scoring", kScoringBackend);
  p.emplace_back("eer_method", kEerMethod);
  p.emplace_back("rng", kRngAlgorithm);
  p.emplace_back("report_format", kReportFormatVersion);
  p.emplace_back("dataset_format", kDatasetFormatVersion);
  p.emplace_back("coral_format", kCoralFormatVersion);
  p.emplace_back("n_enroll", std::to_string(data.enroll ? data.enroll->size() : 0));
  p.emplace_back("n_test", std::to_string(data.test ? data.test->size() : 0));
  p.emplace_back("n_trials", std::to_string(data.trials ? data.trials->size() : 0));
  if (!single) {
    p.emplace_back("pool_size", std::to_string(data.pool ? data.pool->size() : 0));
    if (data.attacker_pool != nullptr && data.attacker_pool != data.pool) {
      p.emplace_back("attacker_pool_size", std::to_string(data.attacker_pool->size()));
    }
    p.emplace_back("freeze_anonymization", config.freeze_anonymization ? "true" : "false");
    p.emplace_back("freeze_coral_samples", config.freeze_coral_samples ? "true" : "false");
    AddPartyProvenance(report, "user", config.user);
    if (config.attacker) AddPartyProvenance(report, "attacker", *config.attacker);
  }
  return report;
}

void Finish(ExperimentReport& report) {
  const double n = static_cast<double>(report.runs.size());
  double sum = 0.0;
  for (const auto& r : report.runs) sum += r.eer;
  report.mean_eer = sum / n;
  double sq = 0.0;
  for (const auto& r : report.runs) sq += (r.eer - report.mean_eer) * (r.eer - report.mean_eer);
  report.std_eer = report.runs.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
  double div_sum = 0.0;
  std::size_t div_count = 0;
  for (const auto& r : report.runs) {
    if (r.coral_divergence) {
      div_sum += *r.coral_divergence;
      ++div_count;
    }
  }
  if (div_count > 0) report.mean_divergence = div_sum / static_cast<double>(div_count);
}

RunRecord ScoreRun(std::size_t run, const VectorSet& enroll, const VectorSet& test,
                   const TrialSet& trials) {
  ScoreReport scored = BuildScoreReport(enroll, test, trials);
  RunRecord rec;
  rec.run = run;
  rec.eer = scored.eer.eer;
  rec.threshold = scored.eer.threshold;
  rec.n_genuine = scored.n_genuine;
  rec.n_impostor = scored.n_impostor;
  return rec;
}

}  // namespace

std::string_view ToString(Scenario scenario) {
  switch (scenario) {
    case Scenario::kUnprotected:
      return "unprotected";
    case Scenario::kResynthesized:
      return "resynthesized";
    case Scenario::kIgnorant:
      return "ignorant";
    case Scenario::kLazyInformed:
      return "lazy_informed";
  }
  return "unknown";
}

Scenario ParseScenario(std::string_view text) {
  if (text == "unprotected") return Scenario::kUnprotected;
  if (text == "resynthesized") return Scenario::kResynthesized;
  if (text == "ignorant") return Scenario::kIgnorant;
  if (text == "lazy_informed") return Scenario::kLazyInformed;
  throw Error("unknown scenario '" + std::string(text) +
              "' (expected unprotected, resynthesized, ignorant or lazy_informed)");
}

void ScenarioConfig::Validate() const {
  if (runs == 0) throw Error("runs must be positive");
  const bool lazy = scenario == Scenario::kLazyInformed;
  if (lazy && !attacker) throw Error("lazy_informed needs an attacker policy");
  if (!lazy && attacker) {
    throw Error(std::string(ToString(scenario)) + " does not take an attacker policy");
  }
  auto check_party = [](const PartyPolicy& p, const char* who) {
    if (p.anonymization.select_n == 0 || p.anonymization.select_n > p.anonymization.farthest_k) {
      throw Error(std::string(who) + ": need 0 < n <= k");
    }
    if (p.coral.enabled && p.coral.sample_count < 2) {
      throw Error(std::string(who) + ": CORAL needs at least 2 fit vectors");
    }
  };
  if (scenario == Scenario::kIgnorant || lazy) check_party(user, "user");
  if (attacker) {
    check_party(*attacker, "attacker");
    if (!allow_equal_seeds && attacker->anonymization.seed == user.anonymization.seed) {
      throw Error("user and attacker seeds must differ");
    }
  }
}

std::uint64_t AnonymizationSeedForRun(std::uint64_t base_seed, std::size_t run_index) {
  return DeriveSeed(RunSeed(base_seed, run_index), std::uint64_t{1});
}

std::uint64_t CoralSeedForRun(std::uint64_t base_seed, std::size_t run_index) {
  return DeriveSeed(RunSeed(base_seed, run_index), std::uint64_t{2});
}

PartyOutput AnonymizeAsParty(const PartyPolicy& party, const VectorSet& vectors,
                             const VectorSet& pool, const VectorSet* coral_source,
                             const VectorSet* coral_target, std::size_t run_index,
                             bool freeze_anonymization, bool freeze_coral_samples) {
  AnonymizationPolicy policy = party.anonymization;
  policy.id_suffix.clear();
  policy.seed = AnonymizationSeedForRun(party.anonymization.seed,
                                        freeze_anonymization ? 0 : run_index);
  PartyOutput out{AnonymizeSet(vectors, pool, policy, party.scope), std::nullopt};
  if (party.coral.enabled) {
    if (coral_target == nullptr) throw Error("CORAL is enabled but no target set was given");
    const VectorSet& source = coral_source != nullptr ? *coral_source : pool;
    out.transform = CoralFitSampled(
        source, *coral_target, party.coral.sample_count, party.coral.lambda,
        CoralSeedForRun(party.anonymization.seed, freeze_coral_samples ? 0 : run_index));
    out.vectors = CoralApplySet(*out.transform, out.vectors, party.coral.denorm);
  }
  return out;
}

ExperimentReport RunUnprotected(const ScenarioConfig& config, const ScenarioData& data) {
  config.Validate();
  RequireData(data, false);
  ExperimentReport report = StartReport(config, data);
  if (config.scenario == Scenario::kResynthesized) report.notes.push_back(kResynthesizedNote);
  report.notes.push_back("no randomness: a single run is scored");
  report.runs.push_back(ScoreRun(0, *data.enroll, *data.test, *data.trials));
  Finish(report);
  return report;
}

ExperimentReport RunIgnorant(const ScenarioConfig& config, const ScenarioData& data) {
  config.Validate();
  RequireData(data, true);
  ExperimentReport report = StartReport(config, data);
  const VectorSet test = ReferencedSubset(*data.test, *data.trials, false);
  for (std::size_t r = 0; r < config.runs; ++r) {
    PartyOutput user = AnonymizeAsParty(config.user, test, *data.pool, data.coral_source,
                                        data.coral_target, r, config.freeze_anonymization,
                                        config.freeze_coral_samples);
    RunRecord rec = ScoreRun(r, *data.enroll, user.vectors, *data.trials);
    rec.user_seed = RunSeed(config.user.anonymization.seed, r);
    if (config.keep_vectors) rec.user_vectors = std::move(user.vectors);
    report.runs.push_back(std::move(rec));
  }
  Finish(report);
  return report;
}

ExperimentReport RunLazyInformed(const ScenarioConfig& config, const ScenarioData& data) {
  config.Validate();
  RequireData(data, true);
  ExperimentReport report = StartReport(config, data);
  const VectorSet& attacker_pool = data.attacker_pool != nullptr ? *data.attacker_pool : *data.pool;
  const VectorSet* attacker_source =
      data.coral_source != nullptr ? data.coral_source : &attacker_pool;
  const VectorSet test = ReferencedSubset(*data.test, *data.trials, false);
  const VectorSet enroll = ReferencedSubset(*data.enroll, *data.trials, true);
  for (std::size_t r = 0; r < config.runs; ++r) {
    PartyOutput user = AnonymizeAsParty(config.user, test, *data.pool, data.coral_source,
                                        data.coral_target, r, config.freeze_anonymization,
                                        config.freeze_coral_samples);
    PartyOutput attacker = AnonymizeAsParty(*config.attacker, enroll, attacker_pool,
                                            attacker_source, data.coral_target, r,
                                            config.freeze_anonymization,
                                            config.freeze_coral_samples);
    RunRecord rec = ScoreRun(r, attacker.vectors, user.vectors, *data.trials);
    rec.user_seed = RunSeed(config.user.anonymization.seed, r);
    rec.attacker_seed = RunSeed(config.attacker->anonymization.seed, r);
    if (user.transform && attacker.transform) {
      rec.coral_divergence = (user.transform->matrix - attacker.transform->matrix).norm();
    }
    if (config.keep_vectors) {
      rec.user_vectors = std::move(user.vectors);
      rec.attacker_vectors = std::move(attacker.vectors);
    }
    report.runs.push_back(std::move(rec));
  }
  Finish(report);
  return report;
}

ExperimentReport RunScenario(const ScenarioConfig& config, const ScenarioData& data) {
  switch (config.scenario) {
    case Scenario::kUnprotected:
    case Scenario::kResynthesized:
      return RunUnprotected(config, data);
    case Scenario::kIgnorant:
      return RunIgnorant(config, data);
    case Scenario::kLazyInformed:
      return RunLazyInformed(config, data);
  }
  throw Error("unknown scenario");
}

std::vector<ExperimentReport> CoralNSweep(const ScenarioConfig& base_config,
                                          const ScenarioData& data,
                                          std::span<const std::size_t> n_values,
                                          std::size_t runs) {
  if (!base_config.attacker) throw Error("CORAL-N sweep needs an attacker policy");
  if (data.coral_target == nullptr) throw Error("CORAL-N sweep needs a CORAL target set");
  const VectorSet& source = data.coral_source != nullptr ? *data.coral_source : *data.pool;
  for (std::size_t n : n_values) {
    if (n > source.size() || n > data.coral_target->size()) {
      throw Error("CORAL-N sweep: N=" + std::to_string(n) + " exceeds available fit vectors (" +
                  std::to_string(source.size()) + " source, " +
                  std::to_string(data.coral_target->size()) + " target)");
    }
  }
  std::vector<ExperimentReport> reports;
  for (std::size_t n : n_values) {
    ScenarioConfig cfg = base_config;
    cfg.scenario = Scenario::kLazyInformed;
    cfg.runs = runs;
    for (PartyPolicy* p : {&cfg.user, &*cfg.attacker}) {
      p->coral.enabled = true;
      p->coral.sample_count = n;
    }
    ExperimentReport report = RunLazyInformed(cfg, data);
    report.label = "coral-" + std::to_string(n);
    report.provenance.emplace_back("sweep_n", std::to_string(n));
    reports.push_back(std::move(report));
  }
  return reports;
}

std::string SerializeReport(const ExperimentReport& report) {
  std::string out = "# report " + report.label + "\n";
  for (const auto& [k, v] : report.provenance) out += "# " + k + "=" + v + "\n";
  for (const auto& n : report.notes) out += "# note: " + n + "\n";
  out += "run\tuser_seed\tattacker_seed\teer\tthreshold\tn_genuine\tn_impostor\tcoral_divergence\n";
  for (const auto& r : report.runs) {
    out += std::to_string(r.run) + "\t" + std::to_string(r.user_seed) + "\t" +
           (r.attacker_seed ? std::to_string(*r.attacker_seed) : std::string("-")) + "\t" +
           FormatDouble(r.eer) + "\t" + FormatDouble(r.threshold) + "\t" +
           std::to_string(r.n_genuine) + "\t" + std::to_string(r.n_impostor) + "\t" +
           (r.coral_divergence ? FormatDouble(*r.coral_divergence) : std::string("-")) + "\n";
  }
  out += "summary label=" + report.label + " scenario=" + std::string(ToString(report.scenario)) +
         " runs=" + std::to_string(report.runs.size()) + " mean_eer=" +
         FormatDouble(report.mean_eer) + " std_eer=" + FormatDouble(report.std_eer);
  if (report.mean_divergence) out += " mean_divergence=" + FormatDouble(*report.mean_divergence);
  out += " scoring=" + std::string(kScoringBackend) + "\n";
  return out;
}

std::string SerializeReports(std::span<const ExperimentReport> reports,
                             std::span<const std::string> comments) {
  std::string out = "# format_version=" + std::string(kReportFormatVersion) + "\n";
  for (const auto& c : comments) out += "# " + c + "\n";
  for (const auto& r : reports) out += SerializeReport(r);
  return out;
}

ScenarioConfig ParseScenarioConfig(const KeyValueConfig& config) {
  ScenarioConfig cfg;
  cfg.runs = config.GetUint64("runs", kDefaultRuns);
  cfg.freeze_anonymization = config.GetBool("freeze_anonymization", false);
  cfg.freeze_coral_samples = config.GetBool("freeze_coral_samples", false);
  cfg.allow_equal_seeds = config.GetBool("allow_equal_seeds", false);

  PartyPolicy& user = cfg.user;
  user.anonymization.farthest_k = config.GetUint64("k", kDefaultFarthestK);
  user.anonymization.select_n = config.GetUint64("n", kDefaultSelectN);
  user.anonymization.seed = config.GetUint64("user_seed");
  user.scope = ParseRandomnessScope(config.GetString("randomness", "per_utterance"));
  user.coral.enabled = config.GetBool("coral", false);
  user.coral.lambda = config.GetDouble("lambda", kDefaultCoralLambda);
  user.coral.denorm = ParseDenormMode(config.GetString("denorm", "target"));
  user.coral.sample_count = config.GetUint64("user_n", user.coral.sample_count);

  if (config.Has("attacker_seed")) {
    PartyPolicy attacker = user;
    attacker.anonymization.seed = config.GetUint64("attacker_seed");
    attacker.coral.sample_count = config.GetUint64("attacker_n", user.coral.sample_count);
    cfg.attacker = attacker;
  } else if (config.Has("attacker_n")) {
    throw Error("attacker_n given without attacker_seed");
  }
  return cfg;
}

}  // namespace spkanon
