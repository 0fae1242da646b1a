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

#ifndef SPKANON_SYNTH_H_
#define SPKANON_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "spkanon/key_value_config.h"
#include "spkanon/vector_store.h"

namespace spkanon {

/// Shape of a domain's covariance.
struct CovarianceShape {
  enum class Kind { kIsotropic, kDiagonal, kRandomSpd };
  Kind kind = Kind::kIsotropic;
  double sigma = 1.0;              // isotropic: covariance sigma^2 I
  Eigen::VectorXd variances;       // diagonal: covariance diag(variances)
  std::uint64_t spd_seed = 0;      // random_spd
  double condition_cap = 1.0;      // random_spd: eigenvalues log-uniform in [1, cap]

  static CovarianceShape Isotropic(double sigma);
  static CovarianceShape Diagonal(Eigen::VectorXd variances);
  static CovarianceShape RandomSpd(std::uint64_t seed, double condition_cap);

  /// "isotropic:<sigma>", "diagonal:<v1>,<v2>,...", "random_spd:<seed>:<cap>".
  static CovarianceShape Parse(std::string_view text);
  std::string ToString() const;

  /// The d x d covariance this shape describes.
  Eigen::MatrixXd Covariance(int dimension) const;
};

struct DomainSpec {
  std::string label;
  /// Scalar shift s places the domain mean at s / sqrt(d) * (1, ..., 1), so
  /// domains with shifts +s and -s sit on opposite sides of the origin.
  double mean_shift_magnitude = 0.0;
  std::optional<Eigen::VectorXd> mean_shift;
  CovarianceShape covariance;
  std::optional<std::size_t> speakers;     // overrides SynthSpec default
  std::optional<std::size_t> utterances;   // overrides SynthSpec default

  Eigen::VectorXd Mean(int dimension) const;
};

/// Gaussian cluster model of a multi-domain embedding corpus.
///
/// For each domain with mean m and covariance shape S = L L^T:
///   speaker mean   = m + between_speaker_std * L z
///   utterance      = speaker mean + within_speaker_std * L z'
/// with z, z' standard normal. The domain's total covariance is therefore
/// (between^2 + within^2) S and the between/within variance ratio is
/// between^2 / within^2 in every direction.
struct SynthSpec {
  int dimension = kDefaultDimension;
  std::vector<DomainSpec> domains;
  std::size_t speakers_per_domain = 10;
  std::size_t utterances_per_speaker = 10;
  double between_speaker_std = 1.0;
  double within_speaker_std = 0.1;
  std::uint64_t seed = 0;

  void Validate() const;
};

/// Reads a spec from a flat key = value config:
///   dimension, speakers_per_domain, utterances_per_speaker,
///   between_speaker_std, within_speaker_std, domains = a,b,...
///   domain.<label>.mean_shift = <scalar> | <v1>,...,<vd>
///   domain.<label>.covariance = isotropic:1 | diagonal:.. | random_spd:<seed>:<cap>
///   domain.<label>.speakers, domain.<label>.utterances (optional)
/// The generation seed is not part of the file; it is passed separately.
SynthSpec ParseSynthSpec(const KeyValueConfig& config, std::uint64_t seed);

/// Provenance text describing the spec (one `key=value` per line).
std::vector<std::string> DescribeSynthSpec(const SynthSpec& spec);

/// Speaker ids are "<label>-spkNNNN", utterance ids "<label>-spkNNNN-uttNNN".
/// Each domain draws from its own generator seeded by
/// DeriveSeed(spec.seed, label).
std::map<std::string, VectorSet> GenerateCorpus(const SynthSpec& spec);

}  // namespace spkanon

#endif  // SPKANON_SYNTH_H_
