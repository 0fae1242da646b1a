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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "spkanon/scenario.h"
#include "spkanon/text_util.h"
#include "trend_corpus.h"

using namespace spkanon;
using testing::Party;

namespace {

const testing::TrendCorpus& Corpus() {
  static const testing::TrendCorpus corpus = testing::MakeTrendCorpus(1);
  return corpus;
}

ScenarioConfig Config(Scenario s, std::size_t runs = 5) {
  ScenarioConfig cfg;
  cfg.scenario = s;
  cfg.runs = runs;
  cfg.user = Party(11);
  if (s == Scenario::kLazyInformed) cfg.attacker = Party(22);
  return cfg;
}

}  // namespace

TEST_CASE("unprotected baseline on separable clusters") {
  ExperimentReport r = RunScenario(Config(Scenario::kUnprotected), Corpus().Data());
  REQUIRE(r.runs.size() == 1);
  CHECK(r.mean_eer < 0.05);
  CHECK(r.std_eer == 0.0);
  ExperimentReport resyn = RunScenario(Config(Scenario::kResynthesized), Corpus().Data());
  CHECK(resyn.mean_eer == r.mean_eer);
  CHECK(resyn.notes.size() == r.notes.size() + 1);
}

TEST_CASE("enrolling on the test set itself gives zero EER, in any trial order") {
  const auto& c = Corpus();
  std::vector<std::string> ids;
  for (const auto& v : c.test) ids.push_back(v.utterance_id);
  VectorSet half = c.test.Subset([&] {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < c.test.size(); i += 5) idx.push_back(i);
    return idx;
  }());
  TrialSet trials;
  for (const auto& e : half) {
    for (const auto& t : half) {
      trials.Add({e.utterance_id, t.utterance_id,
                  e.speaker_id == t.speaker_id ? TrialLabel::kGenuine : TrialLabel::kImpostor});
    }
  }
  ScenarioData data;
  data.enroll = &half;
  data.test = &half;
  data.trials = &trials;
  ExperimentReport r = RunScenario(Config(Scenario::kUnprotected), data);
  CHECK(r.mean_eer == 0.0);

  TrialSet reversed;
  for (std::size_t i = c.trials.size(); i-- > 0;) reversed.Add(c.trials[i]);
  ScenarioData rev = c.Data();
  rev.trials = &reversed;
  CHECK(RunScenario(Config(Scenario::kUnprotected), rev).mean_eer ==
        RunScenario(Config(Scenario::kUnprotected), c.Data()).mean_eer);
}

TEST_CASE("ignorant and lazy-informed trends") {
  const double unprotected = RunScenario(Config(Scenario::kUnprotected), Corpus().Data()).mean_eer;
  ExperimentReport ignorant = RunScenario(Config(Scenario::kIgnorant), Corpus().Data());
  ExperimentReport lazy = RunScenario(Config(Scenario::kLazyInformed), Corpus().Data());
  CHECK(ignorant.mean_eer > unprotected + 0.25);
  CHECK(lazy.mean_eer < ignorant.mean_eer);
  CHECK(lazy.mean_eer > unprotected);
  // Mean and std are recomputable from the per-run values.
  double sum = 0.0;
  for (const auto& run : lazy.runs) sum += run.eer;
  const double mean = sum / 5.0;
  double sq = 0.0;
  for (const auto& run : lazy.runs) sq += (run.eer - mean) * (run.eer - mean);
  CHECK(lazy.mean_eer == doctest::Approx(mean).epsilon(1e-14));
  CHECK(lazy.std_eer == doctest::Approx(std::sqrt(sq / 4.0)).epsilon(1e-12));
}

TEST_CASE("n = k makes every run identical") {
  ScenarioConfig cfg = Config(Scenario::kIgnorant);
  cfg.user = Party(11, 100, 100);
  ExperimentReport r = RunScenario(cfg, Corpus().Data());
  for (const auto& run : r.runs) CHECK(run.eer == r.runs[0].eer);
  CHECK(r.std_eer == 0.0);
}

TEST_CASE("reports are deterministic and prefixes agree across run counts") {
  ScenarioConfig cfg = Config(Scenario::kLazyInformed, 3);
  cfg.user.coral.enabled = true;
  cfg.attacker->coral.enabled = true;
  cfg.attacker->coral.sample_count = 100;
  const std::string a = SerializeReport(RunScenario(cfg, Corpus().Data()));
  const std::string b = SerializeReport(RunScenario(cfg, Corpus().Data()));
  CHECK(a == b);
  CHECK(a.find("# user_coral_n=10\n") != std::string::npos);
  CHECK(a.find("# attacker_coral_n=100\n") != std::string::npos);
  CHECK(a.find("# rng=") != std::string::npos);
  ExperimentReport five = RunScenario(Config(Scenario::kIgnorant, 5), Corpus().Data());
  ExperimentReport one = RunScenario(Config(Scenario::kIgnorant, 1), Corpus().Data());
  CHECK(one.runs[0].eer == five.runs[0].eer);
  CHECK(one.runs[0].user_seed == five.runs[0].user_seed);
}

TEST_CASE("attacker behaviour never perturbs the user's vectors") {
  ScenarioConfig ign = Config(Scenario::kIgnorant, 2);
  ign.keep_vectors = true;
  ign.user.coral.enabled = true;
  ScenarioConfig lazy = Config(Scenario::kLazyInformed, 2);
  lazy.keep_vectors = true;
  lazy.user.coral.enabled = true;
  lazy.attacker->coral.enabled = true;
  ExperimentReport a = RunScenario(ign, Corpus().Data());
  ExperimentReport b = RunScenario(lazy, Corpus().Data());
  for (std::size_t r = 0; r < 2; ++r) CHECK(*a.runs[r].user_vectors == *b.runs[r].user_vectors);

  ScenarioConfig other_user = lazy;
  other_user.user.anonymization.seed = 12;
  ExperimentReport c = RunScenario(other_user, Corpus().Data());
  CHECK_FALSE(*c.runs[0].user_vectors == *b.runs[0].user_vectors);
  CHECK(*c.runs[0].attacker_vectors == *b.runs[0].attacker_vectors);
}

TEST_CASE("an attacker replicating the user's seeds undoes the protection") {
  ScenarioConfig cfg = Config(Scenario::kLazyInformed);
  cfg.user.scope = RandomnessScope::kPerSpeaker;
  cfg.attacker = cfg.user;
  CHECK_THROWS_AS(RunScenario(cfg, Corpus().Data()), Error);
  cfg.allow_equal_seeds = true;
  const double unprotected = RunScenario(Config(Scenario::kUnprotected), Corpus().Data()).mean_eer;
  CHECK(RunScenario(cfg, Corpus().Data()).mean_eer <= unprotected + 0.02);
}

TEST_CASE("freeze flags hold the draws fixed across runs") {
  ScenarioConfig cfg = Config(Scenario::kIgnorant, 3);
  cfg.freeze_anonymization = true;
  ExperimentReport r = RunScenario(cfg, Corpus().Data());
  CHECK(r.runs[1].eer == r.runs[0].eer);
  cfg.user.coral.enabled = true;
  r = RunScenario(cfg, Corpus().Data());
  CHECK(r.runs[1].eer != r.runs[0].eer);
  cfg.freeze_coral_samples = true;
  r = RunScenario(cfg, Corpus().Data());
  CHECK(r.runs[2].eer == r.runs[0].eer);
}

TEST_CASE("config validation") {
  ScenarioConfig cfg = Config(Scenario::kIgnorant);
  cfg.attacker = Party(3);
  CHECK_THROWS_AS(RunScenario(cfg, Corpus().Data()), Error);
  cfg = Config(Scenario::kLazyInformed);
  cfg.attacker.reset();
  CHECK_THROWS_AS(RunScenario(cfg, Corpus().Data()), Error);
  cfg = Config(Scenario::kIgnorant);
  cfg.runs = 0;
  CHECK_THROWS_AS(RunScenario(cfg, Corpus().Data()), Error);
  cfg = Config(Scenario::kIgnorant);
  cfg.user = Party(1, 300, 100);  // pool has 250 vectors
  CHECK_THROWS_AS(RunScenario(cfg, Corpus().Data()), Error);
  cfg = Config(Scenario::kIgnorant);
  cfg.user.coral.enabled = true;
  cfg.user.coral.sample_count = 201;  // target has 200 vectors
  CHECK_THROWS_AS(RunScenario(cfg, Corpus().Data()), Error);
  CHECK_THROWS_AS(ParseScenario("semi_informed"), Error);
}

TEST_CASE("CORAL-N sweep") {
  const auto& c = Corpus();
  ScenarioConfig base = Config(Scenario::kLazyInformed);
  CHECK(CoralNSweep(base, c.Data(), std::vector<std::size_t>{}, 5).empty());
  CHECK_THROWS_AS(CoralNSweep(base, c.Data(), std::vector<std::size_t>{201}, 5), Error);

  // Source and target of equal size: N = everything fixes the matrix.
  VectorSet source = c.pool.Subset([] {
    std::vector<std::size_t> idx(200);
    for (std::size_t i = 0; i < 200; ++i) idx[i] = i;
    return idx;
  }());
  ScenarioData data = c.Data();
  data.coral_source = &source;
  auto full = CoralNSweep(base, data, std::vector<std::size_t>{200}, 5);
  REQUIRE(full.size() == 1);
  CHECK(full[0].label == "coral-200");
  CHECK(*full[0].mean_divergence == 0.0);

  auto sweep = CoralNSweep(base, c.Data(), std::vector<std::size_t>{10, 100}, 20);
  REQUIRE(sweep.size() == 2);
  CHECK(*sweep[0].mean_divergence > *sweep[1].mean_divergence);
  CHECK(SerializeReports(sweep).rfind("# format_version=spkanon-report-1\n", 0) == 0);
}

TEST_CASE("scenario config parsing") {
  KeyValueConfig kv = KeyValueConfig::Parse(
      "runs = 3\nk = 50\nn = 20\nuser_seed = 7\nattacker_seed = 8\ncoral = true\n"
      "user_n = 10\nattacker_n = 100\nrandomness = per_speaker\ndenorm = none\n");
  ScenarioConfig cfg = ParseScenarioConfig(kv);
  CHECK(cfg.runs == 3);
  CHECK(cfg.user.anonymization.farthest_k == 50);
  CHECK(cfg.user.anonymization.select_n == 20);
  CHECK(cfg.user.scope == RandomnessScope::kPerSpeaker);
  CHECK(cfg.user.coral.denorm == DenormMode::kNone);
  REQUIRE(cfg.attacker);
  CHECK(cfg.attacker->anonymization.seed == 8);
  CHECK(cfg.attacker->coral.sample_count == 100);
  CHECK(cfg.user.coral.sample_count == 10);

  ScenarioConfig defaults = ParseScenarioConfig(KeyValueConfig::Parse("user_seed = 1\n"));
  CHECK(defaults.runs == kDefaultRuns);
  CHECK(defaults.user.anonymization.farthest_k == 200);
  CHECK(defaults.user.anonymization.select_n == 100);
  CHECK(defaults.user.coral.lambda == 1.0);
  CHECK_THROWS_AS(ParseScenarioConfig(KeyValueConfig::Parse("k = 5\n")), Error);
  CHECK_THROWS_AS(ParseScenarioConfig(KeyValueConfig::Parse("user_seed = 1\nattacker_n = 5\n")),
                  Error);
}
