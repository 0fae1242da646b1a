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

#include "spkanon/stats.h"

#include <cmath>

#include "spkanon/text_util.h"

namespace spkanon {

namespace {

void CheckDimension(Eigen::Index got, const DomainStats& stats) {
  if (got != stats.mean.size()) {
    throw Error("dimension mismatch: vector has " + std::to_string(got) + ", stats have " +
                std::to_string(stats.mean.size()));
  }
}

}  // namespace

DomainStats FitStats(const Eigen::Ref<const Eigen::MatrixXd>& rows, double lambda) {
  const Eigen::Index n = rows.rows();
  if (n < 2) throw Error("FitStats needs at least 2 vectors, got " + std::to_string(n));
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error("regularization lambda must be a finite nonnegative number");
  }
  DomainStats stats;
  stats.sample_count = static_cast<std::size_t>(n);
  stats.mean = rows.colwise().mean().transpose();
  Eigen::MatrixXd centered = rows.rowwise() - stats.mean.transpose();
  stats.std = (centered.colwise().squaredNorm().array() / static_cast<double>(n - 1))
                  .sqrt()
                  .max(kStdFloor)
                  .transpose();
  Eigen::MatrixXd z = centered.array().rowwise() / stats.std.transpose().array();
  Eigen::MatrixXd cov = (z.transpose() * z) / static_cast<double>(n - 1);
  cov.diagonal().array() += lambda;
  stats.covariance = 0.5 * (cov + cov.transpose());
  return stats;
}

DomainStats FitStats(const VectorSet& sample, double lambda) {
  return FitStats(sample.ToMatrix(), lambda);
}

Eigen::VectorXd ZNorm(const Eigen::Ref<const Eigen::VectorXd>& v, const DomainStats& stats) {
  CheckDimension(v.size(), stats);
  return ((v - stats.mean).array() / stats.std.array()).matrix();
}

Eigen::VectorXd Denorm(const Eigen::Ref<const Eigen::VectorXd>& v, const DomainStats& stats) {
  CheckDimension(v.size(), stats);
  return (v.array() * stats.std.array() + stats.mean.array()).matrix();
}

Eigen::MatrixXd ZNormRows(const Eigen::Ref<const Eigen::MatrixXd>& rows, const DomainStats& stats) {
  CheckDimension(rows.cols(), stats);
  Eigen::MatrixXd centered = rows.rowwise() - stats.mean.transpose();
  return centered.array().rowwise() / stats.std.transpose().array();
}

Eigen::MatrixXd SymmetricPower(const Eigen::Ref<const Eigen::MatrixXd>& m, MatrixPower power,
                               double eigen_floor) {
  if (m.rows() != m.cols() || m.rows() == 0) throw Error("SymmetricPower needs a square matrix");
  if (!m.allFinite()) throw Error("SymmetricPower input has non-finite entries");
  if (!(eigen_floor > 0.0)) throw Error("eigen floor must be positive");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale) {
    throw Error("SymmetricPower input is not symmetric (max |m - m^T| = " + FormatDouble(asym) +
                ")");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (m + m.transpose()));
  if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");
  Eigen::ArrayXd eig = solver.eigenvalues().array().max(eigen_floor);
  Eigen::ArrayXd scaled = eig.sqrt();
  if (power == MatrixPower::kInvSqrt) scaled = scaled.inverse();
  const Eigen::MatrixXd& q = solver.eigenvectors();
  Eigen::MatrixXd out = q * scaled.matrix().asDiagonal() * q.transpose();
  return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd SampleCovariance(const Eigen::Ref<const Eigen::MatrixXd>& rows) {
  const Eigen::Index n = rows.rows();
  if (n < 2) throw Error("covariance needs at least 2 rows");
  Eigen::MatrixXd centered = rows.rowwise() - rows.colwise().mean();
  return (centered.transpose() * centered) / static_cast<double>(n - 1);
}

std::vector<ProjectedPoint> Project2d(std::span<const VectorSet> sets) {
  if (sets.empty()) throw Error("Project2d needs at least one set");
  const int d = sets.front().dimension();
  std::size_t total = 0;
  for (const auto& s : sets) {
    if (s.dimension() != d) throw Error("Project2d: sets have different dimensions");
    total += s.size();
  }
  if (total < 3) throw Error("Project2d needs at least 3 vectors, got " + std::to_string(total));

  Eigen::MatrixXd pooled(static_cast<Eigen::Index>(total), d);
  std::vector<ProjectedPoint> points;
  points.reserve(total);
  Eigen::Index row = 0;
  for (const auto& s : sets) {
    for (const auto& v : s) {
      pooled.row(row++) = v.values.transpose();
      points.push_back({v.utterance_id, v.domain, 0.0, 0.0});
    }
  }
  Eigen::MatrixXd centered = pooled.rowwise() - pooled.colwise().mean();
  Eigen::MatrixXd scatter = centered.transpose() * centered;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(scatter);
  if (solver.info() != Eigen::Success) throw Error("Project2d: eigensolver did not converge");
  const Eigen::VectorXd& eig = solver.eigenvalues();  // ascending
  const double top = eig[eig.size() - 1];
  int rank = 0;
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (top > 0.0 && eig[i] > 1e-12 * top) ++rank;
  }
  if (rank < 2) {
    throw Error("Project2d: pooled data has rank " + std::to_string(rank) + ", need at least 2");
  }
  Eigen::MatrixXd axes(d, 2);
  for (int k = 0; k < 2; ++k) {
    Eigen::VectorXd axis = solver.eigenvectors().col(eig.size() - 1 - k);
    Eigen::Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis[arg] < 0.0) axis = -axis;
    axes.col(k) = axis;
  }
  Eigen::MatrixXd projected = centered * axes;
  for (std::size_t i = 0; i < total; ++i) {
    points[i].x = projected(static_cast<Eigen::Index>(i), 0);
    points[i].y = projected(static_cast<Eigen::Index>(i), 1);
  }
  return points;
}

std::string SerializeProjection(std::span<const ProjectedPoint> points,
                                std::span<const std::string> comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  for (const auto& p : points) {
    out += p.utterance_id + "\t" + p.domain + "\t" + FormatDouble(p.x) + "\t" +
           FormatDouble(p.y) + "\n";
  }
  return out;
}

}  // namespace spkanon
