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

#include "spkanon/synth.h"

#include <cmath>
#include <cstdio>
#include <set>

#include "spkanon/random.h"
#include "spkanon/text_util.h"

namespace spkanon {

namespace {

Eigen::VectorXd NormalVector(Rng& rng, int d) {
  Eigen::VectorXd z(d);
  for (int i = 0; i < d; ++i) z[i] = StandardNormal(rng);
  return z;
}

std::string Numbered(std::string_view prefix, std::size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*zu", width, n);
  return std::string(prefix) + buf;
}

}  // namespace

CovarianceShape CovarianceShape::Isotropic(double sigma) {
  CovarianceShape s;
  s.kind = Kind::kIsotropic;
  s.sigma = sigma;
  return s;
}

CovarianceShape CovarianceShape::Diagonal(Eigen::VectorXd variances) {
  CovarianceShape s;
  s.kind = Kind::kDiagonal;
  s.variances = std::move(variances);
  return s;
}

CovarianceShape CovarianceShape::RandomSpd(std::uint64_t seed, double condition_cap) {
  CovarianceShape s;
  s.kind = Kind::kRandomSpd;
  s.spd_seed = seed;
  s.condition_cap = condition_cap;
  return s;
}

CovarianceShape CovarianceShape::Parse(std::string_view text) {
  auto parts = Split(Trim(text), ':');
  if (parts[0] == "isotropic" && parts.size() == 2) {
    return Isotropic(ParseDouble(parts[1], "isotropic sigma"));
  }
  if (parts[0] == "diagonal" && parts.size() == 2) {
    return Diagonal(ParseRow(parts[1], "diagonal variance"));
  }
  if (parts[0] == "random_spd" && parts.size() == 3) {
    return RandomSpd(ParseUint64(parts[1], "random_spd seed"),
                     ParseDouble(parts[2], "random_spd condition cap"));
  }
  throw Error("covariance shape must be isotropic:<sigma>, diagonal:<v,...> or "
              "random_spd:<seed>:<cap>, got '" + std::string(text) + "'");
}

std::string CovarianceShape::ToString() const {
  switch (kind) {
    case Kind::kIsotropic:
      return "isotropic:" + FormatDouble(sigma);
    case Kind::kDiagonal:
      return "diagonal:" + FormatRow(variances);
    case Kind::kRandomSpd:
      return "random_spd:" + std::to_string(spd_seed) + ":" + FormatDouble(condition_cap);
  }
  return {};
}

Eigen::MatrixXd CovarianceShape::Covariance(int d) const {
  switch (kind) {
    case Kind::kIsotropic:
      if (!(sigma > 0.0)) throw Error("isotropic sigma must be positive");
      return sigma * sigma * Eigen::MatrixXd::Identity(d, d);
    case Kind::kDiagonal:
      if (variances.size() != d) {
        throw Error("diagonal covariance has " + std::to_string(variances.size()) +
                    " entries, expected " + std::to_string(d));
      }
      if ((variances.array() <= 0.0).any()) throw Error("diagonal variances must be positive");
      return variances.asDiagonal();
    case Kind::kRandomSpd: {
      if (!(condition_cap >= 1.0)) throw Error("random_spd condition cap must be >= 1");
      Rng rng(spd_seed);
      Eigen::MatrixXd g(d, d);
      for (int c = 0; c < d; ++c) g.col(c) = NormalVector(rng, d);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
      Eigen::MatrixXd q = qr.householderQ();
      Eigen::VectorXd eig(d);
      const double log_cap = std::log(condition_cap);
      for (int i = 0; i < d; ++i) eig[i] = std::exp(UniformReal(rng, 0.0, 1.0) * log_cap);
      Eigen::MatrixXd cov = q * eig.asDiagonal() * q.transpose();
      return 0.5 * (cov + cov.transpose());
    }
  }
  throw Error("unknown covariance shape");
}

Eigen::VectorXd DomainSpec::Mean(int d) const {
  if (mean_shift) {
    if (mean_shift->size() != d) {
      throw Error("domain '" + label + "' mean_shift has " + std::to_string(mean_shift->size()) +
                  " entries, expected " + std::to_string(d));
    }
    return *mean_shift;
  }
  return Eigen::VectorXd::Constant(d, mean_shift_magnitude / std::sqrt(static_cast<double>(d)));
}

void SynthSpec::Validate() const {
  if (dimension <= 0) throw Error("synth: dimension must be positive");
  if (domains.empty()) throw Error("synth: at least one domain is required");
  if (!(within_speaker_std > 0.0)) throw Error("synth: within_speaker_std must be > 0");
  if (!(between_speaker_std > 0.0)) throw Error("synth: between_speaker_std must be > 0");
  std::set<std::string> labels;
  for (const auto& d : domains) {
    ValidateIdentifier(d.label, "domain label");
    if (!labels.insert(d.label).second) throw Error("synth: duplicate domain '" + d.label + "'");
    if (d.speakers.value_or(speakers_per_domain) == 0) {
      throw Error("synth: domain '" + d.label + "' has no speakers");
    }
    if (d.utterances.value_or(utterances_per_speaker) == 0) {
      throw Error("synth: domain '" + d.label + "' has no utterances per speaker");
    }
    if (d.covariance.kind == CovarianceShape::Kind::kRandomSpd &&
        !(d.covariance.condition_cap >= 1.0)) {
      throw Error("synth: condition_cap must be >= 1");
    }
    d.Mean(dimension);
  }
}

SynthSpec ParseSynthSpec(const KeyValueConfig& config, std::uint64_t seed) {
  SynthSpec spec;
  spec.seed = seed;
  spec.dimension = static_cast<int>(config.GetUint64("dimension", kDefaultDimension));
  spec.speakers_per_domain = config.GetUint64("speakers_per_domain", spec.speakers_per_domain);
  spec.utterances_per_speaker =
      config.GetUint64("utterances_per_speaker", spec.utterances_per_speaker);
  spec.between_speaker_std = config.GetDouble("between_speaker_std", spec.between_speaker_std);
  spec.within_speaker_std = config.GetDouble("within_speaker_std", spec.within_speaker_std);
  for (const auto& label : config.GetList("domains")) {
    DomainSpec d;
    d.label = label;
    const std::string prefix = "domain." + label + ".";
    if (auto shift = config.Find(prefix + "mean_shift")) {
      Eigen::VectorXd row = ParseRow(*shift, "mean_shift");
      if (row.size() == 1) {
        d.mean_shift_magnitude = row[0];
      } else {
        d.mean_shift = row;
      }
    }
    d.covariance = CovarianceShape::Parse(config.GetString(prefix + "covariance", "isotropic:1"));
    if (config.Has(prefix + "speakers")) d.speakers = config.GetUint64(prefix + "speakers");
    if (config.Has(prefix + "utterances")) d.utterances = config.GetUint64(prefix + "utterances");
    spec.domains.push_back(std::move(d));
  }
  config.RequireAllConsumed();
  spec.Validate();
  return spec;
}

std::vector<std::string> DescribeSynthSpec(const SynthSpec& spec) {
  std::vector<std::string> out;
  out.push_back("seed=" + std::to_string(spec.seed));
  out.push_back("rng=" + std::string(kRngAlgorithm));
  out.push_back("dimension=" + std::to_string(spec.dimension));
  out.push_back("speakers_per_domain=" + std::to_string(spec.speakers_per_domain));
  out.push_back("utterances_per_speaker=" + std::to_string(spec.utterances_per_speaker));
  out.push_back("between_speaker_std=" + FormatDouble(spec.between_speaker_std));
  out.push_back("within_speaker_std=" + FormatDouble(spec.within_speaker_std));
  for (const auto& d : spec.domains) {
    const std::string p = "domain." + d.label + ".";
    out.push_back(p + "mean_shift=" +
                  (d.mean_shift ? FormatRow(*d.mean_shift) : FormatDouble(d.mean_shift_magnitude)));
    out.push_back(p + "covariance=" + d.covariance.ToString());
    out.push_back(p + "speakers=" + std::to_string(d.speakers.value_or(spec.speakers_per_domain)));
    out.push_back(p + "utterances=" +
                  std::to_string(d.utterances.value_or(spec.utterances_per_speaker)));
  }
  return out;
}

std::map<std::string, VectorSet> GenerateCorpus(const SynthSpec& spec) {
  spec.Validate();
  const int d = spec.dimension;
  std::map<std::string, VectorSet> corpus;
  for (const auto& dom : spec.domains) {
    const Eigen::VectorXd mean = dom.Mean(d);
    Eigen::LLT<Eigen::MatrixXd> llt(dom.covariance.Covariance(d));
    if (llt.info() != Eigen::Success) throw Error("synth: covariance is not positive definite");
    const Eigen::MatrixXd factor = llt.matrixL();
    const std::size_t n_spk = dom.speakers.value_or(spec.speakers_per_domain);
    const std::size_t n_utt = dom.utterances.value_or(spec.utterances_per_speaker);
    Rng rng(DeriveSeed(spec.seed, dom.label));
    VectorSet set(d);
    for (std::size_t s = 0; s < n_spk; ++s) {
      const std::string spk = Numbered(dom.label + "-spk", s, 4);
      const Eigen::VectorXd spk_mean =
          mean + spec.between_speaker_std *
                     Eigen::VectorXd(factor.triangularView<Eigen::Lower>() * NormalVector(rng, d));
      for (std::size_t u = 0; u < n_utt; ++u) {
        Eigen::VectorXd v;
        do {
          v = spk_mean + spec.within_speaker_std *
                         Eigen::VectorXd(factor.triangularView<Eigen::Lower>() * NormalVector(rng, d));
        } while ((v.array() == 0.0).all());
        set.Add({Numbered(spk + "-utt", u, 3), spk, dom.label, std::move(v)});
      }
    }
    corpus.emplace(dom.label, std::move(set));
  }
  return corpus;
}

}  // namespace spkanon
