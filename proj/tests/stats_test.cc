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
#include "spkanon/stats.h"
#include "spkanon/text_util.h"
#include "test_util.h"

using namespace spkanon;

namespace {

double RelFrobenius(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  return (got - want).norm() / want.norm();
}

}  // namespace

TEST_CASE("FitStats on a two-point sample matches hand computation") {
  Eigen::MatrixXd rows(2, 2);
  rows << 1, 0, -1, 0;
  DomainStats s = FitStats(rows, 0.0);
  CHECK(s.sample_count == 2);
  CHECK(s.mean[0] == 0.0);
  CHECK(s.mean[1] == 0.0);
  CHECK(s.std[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(s.std[1] == kStdFloor);
  // Normalized rows are (+-1/sqrt2, 0); with n-1 = 1 the covariance is diag(1, 0).
  CHECK(s.covariance(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.covariance(0, 1) == 0.0);
  CHECK(s.covariance(1, 1) == 0.0);
}

TEST_CASE("FitStats errors") {
  CHECK_THROWS_AS(FitStats(Eigen::MatrixXd::Ones(1, 3), 0.0), Error);
  CHECK_THROWS_AS(FitStats(Eigen::MatrixXd::Ones(3, 3), -1.0), Error);
  CHECK_THROWS_AS(FitStats(VectorSet(4), 0.0), Error);
}

TEST_CASE("lambda = 1 puts every covariance diagonal at or above 1") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    Eigen::MatrixXd rows = testing::GaussMatrix(rng, 2 + t, 5);
    DomainStats s = FitStats(rows, 1.0);
    CHECK((s.covariance.diagonal().array() >= 1.0).all());
  }
}

TEST_CASE("self z-normalization gives zero mean and unit std (property)") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 30; ++t) {
    const int d = 1 + static_cast<int>(testing::UniformBelow(rng, 10));
    const int n = 2 + static_cast<int>(testing::UniformBelow(rng, 60));
    Eigen::MatrixXd rows = testing::GaussMatrix(rng, n, d);
    rows.array().rowwise() *= (testing::GaussVector(rng, d).array().abs() * 10 + 0.01).transpose();
    rows.rowwise() += (100.0 * testing::GaussVector(rng, d)).transpose();
    DomainStats s = FitStats(rows, 0.0);
    Eigen::MatrixXd z = ZNormRows(rows, s);
    for (int j = 0; j < d; ++j) {
      CHECK(std::abs(z.col(j).mean()) < 1e-12);
      const double sd = std::sqrt((z.col(j).array() - z.col(j).mean()).square().sum() / (n - 1));
      CHECK(std::abs(sd - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("FitStats is permutation invariant and regularized covariance is PD") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const int d = 2 + static_cast<int>(testing::UniformBelow(rng, 6));
    const int n = 3 + static_cast<int>(testing::UniformBelow(rng, 40));
    Eigen::MatrixXd rows = testing::GaussMatrix(rng, n, d);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(n);
    perm.setIdentity();
    std::shuffle(perm.indices().data(), perm.indices().data() + n, rng);
    const double lambda = 0.25 * static_cast<double>(t % 4);
    DomainStats a = FitStats(rows, lambda);
    DomainStats b = FitStats(perm * rows, lambda);
    CHECK((a.mean - b.mean).norm() < 1e-12);
    CHECK((a.std - b.std).norm() < 1e-12);
    CHECK((a.covariance - b.covariance).norm() < 1e-12);
    CHECK((a.covariance - a.covariance.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.covariance);
    CHECK(es.eigenvalues().minCoeff() >= lambda - 1e-12);
  }
}

TEST_CASE("ZNorm and Denorm") {
  std::mt19937_64 rng(8);
  Eigen::MatrixXd rows = testing::GaussMatrix(rng, 30, 6);
  DomainStats s = FitStats(rows, 0.0);
  CHECK(ZNorm(s.mean, s).norm() == 0.0);
  CHECK((Denorm(Eigen::VectorXd::Zero(6), s) - s.mean).norm() == 0.0);
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd v = 3.0 * testing::GaussVector(rng, 6);
    Eigen::VectorXd z = ZNorm(v, s);
    Eigen::VectorXd back = Denorm(z, s);
    CHECK((back - v).norm() <= 1e-12 * v.norm());
    for (int j = 0; j < 6; ++j) {
      CHECK(z[j] == doctest::Approx((v[j] - s.mean[j]) / s.std[j]).epsilon(1e-14));
      CHECK(Denorm(v, s)[j] == doctest::Approx(v[j] * s.std[j] + s.mean[j]).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS(ZNorm(Eigen::VectorXd::Ones(5), s), Error);
  CHECK_THROWS_AS(Denorm(Eigen::VectorXd::Ones(7), s), Error);
}

TEST_CASE("SymmetricPower analytic cases") {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
  CHECK((SymmetricPower(id, MatrixPower::kSqrt) - id).norm() < 1e-14);
  Eigen::MatrixXd m = Eigen::Vector2d(4, 9).asDiagonal();
  Eigen::MatrixXd r = SymmetricPower(m, MatrixPower::kInvSqrt);
  CHECK(r(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(std::abs(r(0, 1)) < 1e-15);
}

TEST_CASE("SymmetricPower self-consistency on random PSD matrices (property)") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 50; ++t) {
    const int d = 1 + static_cast<int>(testing::UniformBelow(rng, 12));
    Eigen::MatrixXd m = testing::RandomSpd(rng, d);
    Eigen::MatrixXd root = SymmetricPower(m, MatrixPower::kSqrt);
    Eigen::MatrixXd inv_root = SymmetricPower(m, MatrixPower::kInvSqrt);
    CHECK(RelFrobenius(root * root, m) < 1e-8);
    CHECK(RelFrobenius(root * inv_root, Eigen::MatrixXd::Identity(d, d)) < 1e-8);
    CHECK((root - root.transpose()).norm() == 0.0);
    CHECK((inv_root - inv_root.transpose()).norm() == 0.0);
  }
}

TEST_CASE("SymmetricPower floors small eigenvalues and rejects asymmetry") {
  Eigen::MatrixXd singular = Eigen::Vector3d(1, 0, 4).asDiagonal();
  Eigen::MatrixXd r = SymmetricPower(singular, MatrixPower::kInvSqrt, 1e-6);
  CHECK(r(1, 1) == doctest::Approx(1e3).epsilon(1e-9));
  CHECK(r.allFinite());
  Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(3, 3);
  asym(0, 1) = 1e-6;
  CHECK_THROWS_AS(SymmetricPower(asym, MatrixPower::kSqrt), Error);
  CHECK_THROWS_AS(SymmetricPower(Eigen::MatrixXd::Ones(2, 3), MatrixPower::kSqrt), Error);
}

namespace {

VectorSet FromRows(const Eigen::MatrixXd& rows, const std::string& domain) {
  VectorSet set(static_cast<int>(rows.cols()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    set.Add({domain + std::to_string(i), "s" + std::to_string(i), domain, rows.row(i).transpose()});
  }
  return set;
}

}  // namespace

TEST_CASE("Project2d on 2D data is a rigid motion") {
  std::mt19937_64 rng(21);
  Eigen::MatrixXd rows = testing::GaussMatrix(rng, 25, 2);
  rows.col(0) *= 5.0;
  rows.array() += 3.0;
  std::vector<VectorSet> sets{FromRows(rows.topRows(10), "a"), FromRows(rows.bottomRows(15), "b")};
  auto pts = Project2d(sets);
  REQUIRE(pts.size() == 25);
  CHECK(pts[0].domain == "a");
  CHECK(pts[24].domain == "b");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double orig = (rows.row(static_cast<Eigen::Index>(i)) -
                           rows.row(static_cast<Eigen::Index>(j))).norm();
      const double proj = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
      CHECK(std::abs(orig - proj) < 1e-9);
    }
  }
}

TEST_CASE("Project2d sign convention makes the dominant loading positive") {
  // Data stretched along +x: the first axis is +e1, so x equals the centered
  // first coordinate.
  Eigen::MatrixXd rows(4, 2);
  rows << 10, 0.1, -10, -0.2, 5, 0.3, -5, -0.2;
  std::vector<VectorSet> sets{FromRows(rows, "a")};
  auto pts = Project2d(sets);
  const double mean_x = rows.col(0).mean();
  for (int i = 0; i < 4; ++i) CHECK(pts[static_cast<std::size_t>(i)].x == doctest::Approx(rows(i, 0) - mean_x).epsilon(1e-3));
}

TEST_CASE("Project2d rejects degenerate inputs") {
  Eigen::MatrixXd line(5, 3);
  for (int i = 0; i < 5; ++i) line.row(i) = (1.0 + i) * Eigen::RowVector3d(1, 2, 3);
  std::vector<VectorSet> sets{FromRows(line, "a")};
  try {
    Project2d(sets);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("rank 1") != std::string::npos);
  }
  std::vector<VectorSet> two{FromRows(Eigen::MatrixXd::Identity(2, 3), "a")};
  CHECK_THROWS_AS(Project2d(two), Error);
  std::vector<VectorSet> mixed{FromRows(Eigen::MatrixXd::Identity(3, 3), "a"),
                               FromRows(Eigen::MatrixXd::Identity(2, 2), "b")};
  CHECK_THROWS_AS(Project2d(mixed), Error);
}

TEST_CASE("Project2d reconstruction error equals the discarded spectrum (property)") {
  std::mt19937_64 rng(34);
  for (int t = 0; t < 20; ++t) {
    const int d = 3 + static_cast<int>(testing::UniformBelow(rng, 8));
    const int n = 5 + static_cast<int>(testing::UniformBelow(rng, 50));
    Eigen::MatrixXd rows = testing::GaussMatrix(rng, n, d) * testing::GaussMatrix(rng, d, d);
    std::vector<VectorSet> sets{FromRows(rows, "a")};
    auto pts = Project2d(sets);
    Eigen::MatrixXd centered = rows.rowwise() - rows.colwise().mean();
    double kept = 0.0;
    for (const auto& p : pts) kept += p.x * p.x + p.y * p.y;
    const double recon_error = centered.squaredNorm() - kept;
    // Oracle: singular values of the centered data, independent of the
    // eigensolver used by the projection.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
    Eigen::VectorXd sv = svd.singularValues();
    double discarded = 0.0;
    for (Eigen::Index i = 2; i < sv.size(); ++i) discarded += sv[i] * sv[i];
    CHECK(std::abs(recon_error - discarded) <= 1e-8 * std::max(1.0, centered.squaredNorm()));
  }
}

TEST_CASE("projection TSV layout") {
  std::vector<ProjectedPoint> pts{{"u1", "en", 1.5, -2.0}};
  CHECK(SerializeProjection(pts, std::vector<std::string>{"c"}) == "# c\nu1\ten\t1.5\t-2\n");
}
