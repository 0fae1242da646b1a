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

// spkanon command-line entry point. Every subcommand reads its inputs, calls
// the library, and writes its outputs atomically with provenance comments.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spkanon/anonymizer.h"
#include "spkanon/asv_metrics.h"
#include "spkanon/coral.h"
#include "spkanon/key_value_config.h"
#include "spkanon/random.h"
#include "spkanon/scenario.h"
#include "spkanon/stats.h"
#include "spkanon/synth.h"
#include "spkanon/text_util.h"
#include "spkanon/vector_store.h"

namespace fs = std::filesystem;
using namespace spkanon;

namespace {

constexpr const char* kToolVersion = "spkanon 1.0.0";

enum class LogLevel { kQuiet, kInfo };

struct Globals {
  std::string invocation;
  LogLevel log_level = LogLevel::kInfo;
};

Globals g_globals;

void Info(const std::string& msg) {
  if (g_globals.log_level == LogLevel::kInfo) std::cerr << "spkanon: " << msg << "\n";
}

std::vector<std::string> Provenance(std::string_view format_version,
                                    std::vector<std::string> extra = {}) {
  std::vector<std::string> out;
  out.push_back("format_version=" + std::string(format_version));
  out.push_back("tool=" + std::string(kToolVersion));
  out.push_back("invocation=" + g_globals.invocation);
  for (auto& e : extra) out.push_back(std::move(e));
  return out;
}

std::string SeedLine(std::uint64_t seed) { return "seed=" + std::to_string(seed); }
std::string RngLine() { return "rng=" + std::string(kRngAlgorithm); }

// The one value CLI11 cannot express as a default: a required seed that is
// still parsed as a full 64-bit unsigned.
CLI::Option* AddSeed(CLI::App* cmd, std::uint64_t& seed, bool required = true) {
  auto* opt = cmd->add_option("--seed", seed, "Base seed for every random draw (64-bit unsigned)");
  if (required) opt->required();
  return opt;
}

// ---- synth ---------------------------------------------------------------

struct SynthArgs {
  std::string spec;
  std::string out_dir;
  std::uint64_t seed = 0;
};

void RunSynth(const SynthArgs& a) {
  KeyValueConfig cfg = KeyValueConfig::Load(a.spec);
  SynthSpec spec = ParseSynthSpec(cfg, a.seed);
  cfg.RequireAllConsumed();
  auto corpus = GenerateCorpus(spec);
  fs::create_directories(a.out_dir);
  const auto described = DescribeSynthSpec(spec);
  for (const auto& [label, set] : corpus) {
    auto comments = Provenance(kDatasetFormatVersion, {SeedLine(a.seed), RngLine()});
    SaveVectorSet(set, fs::path(a.out_dir) / (label + ".tsv"), comments);
  }
  std::string sidecar;
  for (const auto& c : Provenance("spkanon-synth-1")) sidecar += "# " + c + "\n";
  for (const auto& line : described) sidecar += line + "\n";
  WriteFileAtomic(fs::path(a.out_dir) / "synth.provenance", sidecar);
  Info("wrote " + std::to_string(corpus.size()) + " domain files to " + a.out_dir);
}

// ---- anonymize -----------------------------------------------------------

struct AnonymizeArgs {
  std::string in, pool, out;
  std::size_t k = kDefaultFarthestK;
  std::size_t n = kDefaultSelectN;
  std::uint64_t seed = 0;
  std::string randomness = "per_utterance";
  std::string id_suffix = kDefaultIdSuffix;
};

void RunAnonymize(const AnonymizeArgs& a) {
  const RandomnessScope scope = ParseRandomnessScope(a.randomness);
  VectorSet in = LoadVectorSet(a.in);
  VectorSet pool = LoadVectorSet(a.pool);
  AnonymizationPolicy policy{a.k, a.n, a.seed, a.id_suffix};
  VectorSet out = AnonymizeSet(in, pool, policy, scope);
  SaveVectorSet(out, a.out,
                Provenance(kDatasetFormatVersion,
                           {SeedLine(a.seed), RngLine(), "k=" + std::to_string(a.k),
                            "n=" + std::to_string(a.n), "randomness=" + a.randomness}));
  Info("anonymized " + std::to_string(out.size()) + " vectors into " + a.out);
}

// ---- coral-fit / coral-apply ---------------------------------------------

struct CoralFitArgs {
  std::string source, target, out;
  double lambda = kDefaultCoralLambda;
  std::optional<std::size_t> count;
  std::optional<std::uint64_t> seed;
};

void RunCoralFit(const CoralFitArgs& a) {
  VectorSet source = LoadVectorSet(a.source);
  VectorSet target = LoadVectorSet(a.target);
  std::vector<std::string> extra{"lambda=" + FormatDouble(a.lambda)};
  CoralTransform t;
  if (a.count) {
    if (!a.seed) throw Error("coral-fit --n draws fit vectors at random and needs --seed");
    t = CoralFitSampled(source, target, *a.count, a.lambda, *a.seed);
    extra.push_back("n=" + std::to_string(*a.count));
    extra.push_back(SeedLine(*a.seed));
    extra.push_back(RngLine());
  } else {
    if (a.seed) throw Error("coral-fit --seed only applies together with --n");
    t = CoralFit(source, target, a.lambda);
  }
  SaveCoralTransform(t, a.out, Provenance(kCoralFormatVersion, std::move(extra)));
  Info("wrote CORAL transform (dim " + std::to_string(t.dimension()) + ") to " + a.out);
}

struct CoralApplyArgs {
  std::string transform, in, out;
  std::string denorm = "target";
};

void RunCoralApply(const CoralApplyArgs& a) {
  const DenormMode mode = ParseDenormMode(a.denorm);
  CoralTransform t = LoadCoralTransform(a.transform);
  VectorSet out = CoralApplySet(t, LoadVectorSet(a.in), mode);
  SaveVectorSet(out, a.out, Provenance(kDatasetFormatVersion, {"denorm=" + a.denorm}));
  Info("transformed " + std::to_string(out.size()) + " vectors into " + a.out);
}

// ---- trials ----------------------------------------------------------------

struct TrialsArgs {
  std::string in, out, enroll_out, test_out;
  std::size_t enroll_per_speaker = 1;
  std::optional<std::size_t> impostors;
  std::optional<std::uint64_t> seed;
};

void RunTrials(const TrialsArgs& a) {
  if (a.enroll_per_speaker == 0) throw Error("--enroll-per-speaker must be positive");
  VectorSet set = LoadVectorSet(a.in);
  // The first E utterances of each speaker, in file order, enroll.
  std::map<std::string, std::size_t> seen;
  std::vector<std::size_t> enroll_idx, test_idx;
  for (std::size_t i = 0; i < set.size(); ++i) {
    (seen[set[i].speaker_id]++ < a.enroll_per_speaker ? enroll_idx : test_idx).push_back(i);
  }
  std::vector<std::string> enroll_ids, test_ids;
  for (std::size_t i : enroll_idx) enroll_ids.push_back(set[i].utterance_id);
  for (std::size_t i : test_idx) test_ids.push_back(set[i].utterance_id);
  std::vector<std::string> extra{"enroll_per_speaker=" + std::to_string(a.enroll_per_speaker)};
  ImpostorPolicy policy = ImpostorPolicy::Exhaustive();
  if (a.impostors) {
    if (!a.seed) throw Error("trials --impostors samples at random and needs --seed");
    policy = ImpostorPolicy::Sampled(*a.impostors, *a.seed);
    extra.push_back("impostors=" + std::to_string(*a.impostors));
    extra.push_back(SeedLine(*a.seed));
    extra.push_back(RngLine());
  } else if (a.seed) {
    throw Error("trials --seed only applies together with --impostors");
  }
  TrialSet trials = GenerateTrials(set, enroll_ids, test_ids, policy);
  SaveTrialSet(trials, a.out, Provenance(kTrialFormatVersion, extra));
  if (!a.enroll_out.empty()) {
    SaveVectorSet(set.Subset(enroll_idx), a.enroll_out, Provenance(kDatasetFormatVersion));
  }
  if (!a.test_out.empty()) {
    SaveVectorSet(set.Subset(test_idx), a.test_out, Provenance(kDatasetFormatVersion));
  }
  Info("wrote " + std::to_string(trials.size()) + " trials (" +
       std::to_string(trials.CountGenuine()) + " genuine) to " + a.out);
}

// ---- score -----------------------------------------------------------------

struct ScoreArgs {
  std::string enroll, test, trials, out;
};

void RunScore(const ScoreArgs& a) {
  ScoreReport r = BuildScoreReport(LoadVectorSet(a.enroll), LoadVectorSet(a.test),
                                   LoadTrialSet(a.trials));
  WriteFileAtomic(a.out, SerializeScoreReport(r, Provenance("spkanon-scores-1")));
  std::cout << "eer=" << FormatDouble(r.eer.eer) << " threshold=" << FormatDouble(r.eer.threshold)
            << " n_genuine=" << r.n_genuine << " n_impostor=" << r.n_impostor
            << " scoring=" << kScoringBackend << "\n";
}

// ---- scenario / sweep --------------------------------------------------------

// Data sets referenced by a scenario config, paths relative to the config.
struct LoadedData {
  std::optional<VectorSet> pool, attacker_pool, enroll, test, coral_source, coral_target;
  std::optional<TrialSet> trials;

  ScenarioData View() const {
    ScenarioData d;
    auto ptr = [](const std::optional<VectorSet>& s) { return s ? &*s : nullptr; };
    d.pool = ptr(pool);
    d.attacker_pool = ptr(attacker_pool);
    d.enroll = ptr(enroll);
    d.test = ptr(test);
    d.coral_source = ptr(coral_source);
    d.coral_target = ptr(coral_target);
    d.trials = trials ? &*trials : nullptr;
    return d;
  }
};

LoadedData LoadScenarioData(const KeyValueConfig& cfg) {
  LoadedData d;
  auto load = [&](const char* key, std::optional<VectorSet>& slot) {
    if (cfg.Has(key)) slot = LoadVectorSet(cfg.ResolvePath(key));
  };
  load("enroll", d.enroll);
  load("test", d.test);
  load("pool", d.pool);
  load("attacker_pool", d.attacker_pool);
  load("coral_source", d.coral_source);
  load("coral_target", d.coral_target);
  if (!d.enroll || !d.test || !cfg.Has("trials")) {
    throw Error(cfg.base_dir().string() + ": config needs enroll, test and trials paths");
  }
  d.trials = LoadTrialSet(cfg.ResolvePath("trials"));
  return d;
}

std::vector<std::string> ConfigEcho(const KeyValueConfig& cfg, std::string_view path) {
  std::vector<std::string> out{"config=" + std::string(path)};
  for (const auto& k : cfg.keys()) out.push_back("config." + k + "=" + *cfg.Find(k));
  return out;
}

void DumpVectors(const fs::path& dir, const ExperimentReport& r) {
  fs::create_directories(dir);
  for (const auto& run : r.runs) {
    const std::string stem = r.label + "-run" + std::to_string(run.run);
    if (run.user_vectors) {
      SaveVectorSet(*run.user_vectors, dir / (stem + "-user.tsv"), Provenance(kDatasetFormatVersion));
    }
    if (run.attacker_vectors) {
      SaveVectorSet(*run.attacker_vectors, dir / (stem + "-attacker.tsv"),
                    Provenance(kDatasetFormatVersion));
    }
  }
}

void PrintSummaries(const std::vector<ExperimentReport>& reports) {
  for (const auto& r : reports) {
    std::cout << r.label << " mean_eer=" << FormatDouble(r.mean_eer)
              << " std_eer=" << FormatDouble(r.std_eer);
    if (r.mean_divergence) std::cout << " mean_divergence=" << FormatDouble(*r.mean_divergence);
    std::cout << "\n";
  }
}

struct ScenarioArgs {
  std::string config, out, dump_dir;
};

void RunScenarioCommand(const ScenarioArgs& a) {
  KeyValueConfig cfg = KeyValueConfig::Load(a.config);
  std::vector<Scenario> scenarios;
  for (const auto& s : cfg.GetList("scenario")) scenarios.push_back(ParseScenario(s));
  if (scenarios.empty()) throw Error(a.config + ": 'scenario' lists no scenarios");
  ScenarioConfig base = ParseScenarioConfig(cfg);
  LoadedData data = LoadScenarioData(cfg);
  cfg.RequireAllConsumed();
  base.keep_vectors = !a.dump_dir.empty();

  std::vector<ExperimentReport> reports;
  for (Scenario s : scenarios) {
    ScenarioConfig c = base;
    c.scenario = s;
    // A shared config may name an attacker; only lazy_informed uses one.
    if (s != Scenario::kLazyInformed) c.attacker.reset();
    reports.push_back(RunScenario(c, data.View()));
    if (!a.dump_dir.empty()) DumpVectors(a.dump_dir, reports.back());
  }
  WriteFileAtomic(a.out, SerializeReports(reports, [&] {
                    auto p = Provenance(kReportFormatVersion, ConfigEcho(cfg, a.config));
                    p.erase(p.begin());  // SerializeReports writes format_version itself
                    return p;
                  }()));
  PrintSummaries(reports);
}

struct SweepArgs {
  std::string config, out;
};

void RunSweep(const SweepArgs& a) {
  KeyValueConfig cfg = KeyValueConfig::Load(a.config);
  std::vector<std::size_t> n_values;
  for (const auto& s : cfg.GetList("n_values")) {
    n_values.push_back(static_cast<std::size_t>(ParseUint64(s, "n_values entry")));
  }
  if (cfg.Has("scenario")) {
    const auto listed = cfg.GetList("scenario");
    if (listed.size() != 1 || ParseScenario(listed[0]) != Scenario::kLazyInformed) {
      throw Error(a.config + ": sweep always runs lazy_informed");
    }
  }
  ScenarioConfig base = ParseScenarioConfig(cfg);
  base.scenario = Scenario::kLazyInformed;
  LoadedData data = LoadScenarioData(cfg);
  cfg.RequireAllConsumed();
  auto reports = CoralNSweep(base, data.View(), n_values, base.runs);
  WriteFileAtomic(a.out, SerializeReports(reports, [&] {
                    auto p = Provenance(kReportFormatVersion, ConfigEcho(cfg, a.config));
                    p.erase(p.begin());
                    return p;
                  }()));
  PrintSummaries(reports);
}

// ---- project -----------------------------------------------------------------

struct ProjectArgs {
  std::vector<std::string> in;
  std::string out;
};

void RunProject(const ProjectArgs& a) {
  std::vector<VectorSet> sets;
  for (const auto& p : a.in) sets.push_back(LoadVectorSet(p));
  auto points = Project2d(sets);
  WriteFileAtomic(a.out, SerializeProjection(points, Provenance("spkanon-projection-1")));
  Info("projected " + std::to_string(points.size()) + " vectors into " + a.out);
}

std::string OneLine(std::string msg) {
  for (char& c : msg) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return msg;
}

}  // namespace

int main(int argc, char** argv) {
  g_globals.invocation = "spkanon";
  for (int i = 1; i < argc; ++i) g_globals.invocation += std::string(" ") + argv[i];

  CLI::App app{"Speaker-vector anonymization, CORAL alignment and privacy evaluation"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  std::map<std::string, LogLevel> levels{{"quiet", LogLevel::kQuiet}, {"info", LogLevel::kInfo}};
  app.add_option("--log-level", g_globals.log_level, "Progress messages on stderr")
      ->transform(CLI::CheckedTransformer(levels, CLI::ignore_case))
      ->default_str("info");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic multi-domain corpus");
  c_synth->add_option("--spec", synth.spec, "Spec file (key = value)")->required()->check(CLI::ExistingFile);
  c_synth->add_option("--out-dir", synth.out_dir, "Output directory")->required();
  AddSeed(c_synth, synth.seed);

  AnonymizeArgs anon;
  auto* c_anon = app.add_subcommand("anonymize", "Replace each vector by a pool average");
  c_anon->add_option("--in", anon.in, "Vectors to anonymize")->required()->check(CLI::ExistingFile);
  c_anon->add_option("--pool", anon.pool, "External pool")->required()->check(CLI::ExistingFile);
  c_anon->add_option("--out", anon.out, "Output dataset")->required();
  c_anon->add_option("--k", anon.k, "Farthest pool vectors considered")->capture_default_str();
  c_anon->add_option("--n", anon.n, "Vectors averaged out of the k farthest")->capture_default_str();
  c_anon->add_option("--randomness", anon.randomness, "per_utterance or per_speaker")
      ->capture_default_str();
  c_anon->add_option("--id-suffix", anon.id_suffix, "Appended to every output utterance id")
      ->capture_default_str();
  AddSeed(c_anon, anon.seed);

  CoralFitArgs fit;
  auto* c_fit = app.add_subcommand("coral-fit", "Fit a CORAL transform from source to target");
  c_fit->add_option("--source", fit.source, "Source-domain sample")->required()->check(CLI::ExistingFile);
  c_fit->add_option("--target", fit.target, "Target-domain sample")->required()->check(CLI::ExistingFile);
  c_fit->add_option("--out", fit.out, "Output transform")->required();
  c_fit->add_option("--lambda", fit.lambda, "Ridge added to both covariances")->capture_default_str();
  c_fit->add_option("--n", fit.count, "Fit on N vectors drawn from each side (needs --seed)");
  c_fit->add_option("--seed", fit.seed, "Seed for the --n draw");

  CoralApplyArgs apply;
  auto* c_apply = app.add_subcommand("coral-apply", "Apply a fitted CORAL transform");
  c_apply->add_option("--transform", apply.transform, "Transform file")->required()->check(CLI::ExistingFile);
  c_apply->add_option("--in", apply.in, "Vectors to transform")->required()->check(CLI::ExistingFile);
  c_apply->add_option("--out", apply.out, "Output dataset")->required();
  c_apply->add_option("--denorm", apply.denorm, "target or none")->capture_default_str();

  TrialsArgs trials;
  auto* c_trials = app.add_subcommand("trials", "Split a dataset into enrollment/test and list trials");
  c_trials->add_option("--in", trials.in, "Dataset")->required()->check(CLI::ExistingFile);
  c_trials->add_option("--out", trials.out, "Output trial list")->required();
  c_trials->add_option("--enroll-per-speaker", trials.enroll_per_speaker,
                       "Leading utterances per speaker used for enrollment")
      ->capture_default_str();
  c_trials->add_option("--enroll-out", trials.enroll_out, "Write the enrollment split here");
  c_trials->add_option("--test-out", trials.test_out, "Write the test split here");
  c_trials->add_option("--impostors", trials.impostors,
                       "Sample this many impostor trials (default: all, needs --seed)");
  c_trials->add_option("--seed", trials.seed, "Seed for --impostors");

  ScoreArgs score;
  auto* c_score = app.add_subcommand("score", "Cosine-score trials and compute the EER");
  c_score->add_option("--enroll", score.enroll, "Enrollment vectors")->required()->check(CLI::ExistingFile);
  c_score->add_option("--test", score.test, "Test vectors")->required()->check(CLI::ExistingFile);
  c_score->add_option("--trials", score.trials, "Trial list")->required()->check(CLI::ExistingFile);
  c_score->add_option("--out", score.out, "Output score report")->required();

  ScenarioArgs scen;
  auto* c_scen = app.add_subcommand(
      "scenario",
      "Run attack scenarios from a config. Keys: scenario (list), enroll, test, trials, pool, "
      "attacker_pool, coral_source, coral_target, runs (default 5), k (200), n (100), "
      "user_seed, attacker_seed, randomness, coral, lambda (1.0), denorm, user_n, attacker_n, "
      "freeze_anonymization, freeze_coral_samples, allow_equal_seeds");
  c_scen->add_option("--config", scen.config, "Scenario config")->required()->check(CLI::ExistingFile);
  c_scen->add_option("--out", scen.out, "Output report")->required();
  c_scen->add_option("--dump-dir", scen.dump_dir, "Also write every run's anonymized vectors");

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand(
      "sweep", "CORAL-N sweep under lazy_informed; the scenario config plus n_values (list)");
  c_sweep->add_option("--config", sweep.config, "Sweep config")->required()->check(CLI::ExistingFile);
  c_sweep->add_option("--out", sweep.out, "Output report")->required();

  ProjectArgs proj;
  auto* c_proj = app.add_subcommand("project", "PCA projection to 2D for plotting");
  c_proj->add_option("--in", proj.in, "Datasets (repeatable)")->required()->check(CLI::ExistingFile);
  c_proj->add_option("--out", proj.out, "Output TSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "spkanon: error: " << OneLine(e.what()) << "\n";
    return 2;
  }

  try {
    if (*c_synth) RunSynth(synth);
    if (*c_anon) RunAnonymize(anon);
    if (*c_fit) RunCoralFit(fit);
    if (*c_apply) RunCoralApply(apply);
    if (*c_trials) RunTrials(trials);
    if (*c_score) RunScore(score);
    if (*c_scen) RunScenarioCommand(scen);
    if (*c_sweep) RunSweep(sweep);
    if (*c_proj) RunProject(proj);
  } catch (const std::exception& e) {
    std::cerr << "spkanon: error: " << OneLine(e.what()) << "\n";
    return 1;
  }
  return 0;
}
