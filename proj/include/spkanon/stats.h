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

#ifndef SPKANON_STATS_H_
#define SPKANON_STATS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spkanon/vector_store.h"

namespace spkanon {

/// Lower bound applied to per-dimension standard deviations.
inline constexpr double kStdFloor = 1e-8;
/// Default lower bound on eigenvalues inside SymmetricPower.
inline constexpr double kDefaultEigenFloor = 1e-10;

/// First and second order statistics of one domain sample.
///
/// `covariance` is computed on the z-normalized sample (so with lambda = 0 it
/// is the correlation matrix of the sample) and then regularized with
/// lambda * I.
struct DomainStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
  Eigen::MatrixXd covariance;
  std::size_t sample_count = 0;

  int dimension() const { return static_cast<int>(mean.size()); }
};

/// Per-dimension mean and std (denominator n-1, floored at kStdFloor), then
/// covariance of the normalized rows (denominator n-1) plus lambda * I,
/// symmetrized. Needs at least two rows.
DomainStats FitStats(const Eigen::Ref<const Eigen::MatrixXd>& rows, double lambda);
DomainStats FitStats(const VectorSet& sample, double lambda);

/// (v - mean) / std, elementwise.
Eigen::VectorXd ZNorm(const Eigen::Ref<const Eigen::VectorXd>& v, const DomainStats& stats);
/// Inverse of ZNorm: v * std + mean.
Eigen::VectorXd Denorm(const Eigen::Ref<const Eigen::VectorXd>& v, const DomainStats& stats);

/// Row-wise ZNorm over an n x d matrix.
Eigen::MatrixXd ZNormRows(const Eigen::Ref<const Eigen::MatrixXd>& rows, const DomainStats& stats);

enum class MatrixPower { kSqrt, kInvSqrt };

/// Q f(L) Q^T for a symmetric positive semidefinite input with
/// eigendecomposition Q L Q^T, where f raises each eigenvalue (first floored
/// at `eigen_floor`) to +1/2 or -1/2. The result is symmetrized.
/// Throws Error if the input is not symmetric within 1e-9 (relative to its
/// largest entry when that exceeds 1) or if the eigensolver fails.
Eigen::MatrixXd SymmetricPower(const Eigen::Ref<const Eigen::MatrixXd>& m, MatrixPower power,
                               double eigen_floor = kDefaultEigenFloor);

/// Sample covariance (denominator n-1) of the rows.
Eigen::MatrixXd SampleCovariance(const Eigen::Ref<const Eigen::MatrixXd>& rows);

struct ProjectedPoint {
  std::string utterance_id;
  std::string domain;
  double x = 0.0;
  double y = 0.0;
};

/// Pools all sets, centers them, and projects onto the top two principal
/// axes. Each axis is signed so that its largest-magnitude loading (first
/// such index on ties) is positive. Throws Error when the sets disagree on
/// dimension, fewer than 3 vectors are pooled, or the centered data has rank
/// below 2 (the message names the rank).
std::vector<ProjectedPoint> Project2d(std::span<const VectorSet> sets);

/// TSV: utterance_id<TAB>domain<TAB>x<TAB>y, preceded by `# ` comment lines.
std::string SerializeProjection(std::span<const ProjectedPoint> points,
                                std::span<const std::string> comments = {});

}  // namespace spkanon

#endif  // SPKANON_STATS_H_
