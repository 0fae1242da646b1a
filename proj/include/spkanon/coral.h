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

#ifndef SPKANON_CORAL_H_
#define SPKANON_CORAL_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "spkanon/stats.h"
#include "spkanon/vector_store.h"

namespace spkanon {

inline constexpr const char* kCoralFormatVersion = "spkanon-coral-1";
inline constexpr double kDefaultCoralLambda = 1.0;

/// Correlation alignment from a source domain to a target domain.
///
/// A vector v is mapped as row vector ZNorm(v, source_stats) * matrix, where
/// matrix = C_S^{-1/2} C_T^{1/2} whitens the source covariance and recolors
/// it with the target covariance. For full-rank C_S this sets
/// matrix^T C_S matrix = C_T exactly, the minimum of
/// ||A^T C_S A - C_T||_F^2.
struct CoralTransform {
  Eigen::MatrixXd matrix;
  DomainStats source_stats;
  DomainStats target_stats;
  double lambda = kDefaultCoralLambda;
  std::string source_domain;
  std::string target_domain;
  /// Seed that chose the fit samples, when they were drawn at random.
  std::optional<std::uint64_t> seed;

  int dimension() const { return static_cast<int>(matrix.rows()); }
  bool operator==(const CoralTransform& other) const;
};

/// Whitening-recoloring matrix for a pair of covariance matrices.
Eigen::MatrixXd CoralMatrix(const Eigen::Ref<const Eigen::MatrixXd>& source_cov,
                            const Eigen::Ref<const Eigen::MatrixXd>& target_cov,
                            double eigen_floor = kDefaultEigenFloor);

/// Objective ||A^T C_S A - C_T||_F^2.
double CoralObjective(const Eigen::Ref<const Eigen::MatrixXd>& a,
                      const Eigen::Ref<const Eigen::MatrixXd>& source_cov,
                      const Eigen::Ref<const Eigen::MatrixXd>& target_cov);

CoralTransform CoralFit(const VectorSet& source_sample, const VectorSet& target_sample,
                        double lambda = kDefaultCoralLambda,
                        std::optional<std::uint64_t> seed = std::nullopt);

/// Draws `count` vectors without replacement from each of `source` and
/// `target` (seeded, source draw first) and fits on them.
CoralTransform CoralFitSampled(const VectorSet& source, const VectorSet& target,
                               std::size_t count, double lambda, std::uint64_t seed);

enum class DenormMode { kNone, kTarget };

std::string_view ToString(DenormMode mode);
DenormMode ParseDenormMode(std::string_view text);

/// Maps the values of `v` through the transform. With kTarget the result is
/// brought back to the target scale with Denorm(., target_stats). Identity
/// fields are kept; the domain becomes the transform's target domain.
SpeakerVector CoralApply(const CoralTransform& t, const SpeakerVector& v,
                         DenormMode mode = DenormMode::kTarget);

Eigen::VectorXd CoralApplyValues(const CoralTransform& t,
                                 const Eigen::Ref<const Eigen::VectorXd>& values,
                                 DenormMode mode);

VectorSet CoralApplySet(const CoralTransform& t, const VectorSet& set,
                        DenormMode mode = DenormMode::kTarget);

// Transform text format:
//   dim=<d> lambda=<lambda>
//   # comments
//   meta<TAB>source_domain=..<TAB>target_domain=..<TAB>n_source=..<TAB>n_target=..<TAB>seed=..|none
//   source_mean<TAB>row, source_std<TAB>row, target_mean<TAB>row, target_std<TAB>row
//   source_cov<TAB>row  (d lines)
//   target_cov<TAB>row  (d lines)
//   matrix<TAB>row      (d lines)
std::string SerializeCoralTransform(const CoralTransform& t,
                                    std::span<const std::string> comments = {});
CoralTransform ParseCoralTransform(std::string_view text, std::string_view source_name = "<text>");
void SaveCoralTransform(const CoralTransform& t, const std::filesystem::path& path,
                        std::span<const std::string> comments = {});
CoralTransform LoadCoralTransform(const std::filesystem::path& path);

}  // namespace spkanon

#endif  // SPKANON_CORAL_H_
