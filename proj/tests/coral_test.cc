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

#include <cmath>

#include "doctest.h"
#include "spkanon/coral.h"
#include "spkanon/text_util.h"
#include "test_util.h"

using namespace spkanon;

namespace {

VectorSet Sample(std::mt19937_64& rng, const Eigen::MatrixXd& cov, std::size_t n,
                 const std::string& domain, const Eigen::VectorXd& shift) {
  const int d = static_cast<int>(cov.rows());
  Eigen::MatrixXd l = cov.llt().matrixL();
  VectorSet set(d);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd v = l * testing::GaussVector(rng, d) + shift;
    set.Add({domain + std::to_string(i), domain + "spk" + std::to_string(i % 50), domain, v});
  }
  return set;
}

// Plain covariance loop, kept separate from the library implementation.
Eigen::MatrixXd BruteCovariance(const std::vector<Eigen::VectorXd>& xs) {
  const auto d = xs.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
  for (const auto& x : xs) {
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) c(i, j) += (x[i] - mean[i]) * (x[j] - mean[j]);
    }
  }
  return c / static_cast<double>(xs.size() - 1);
}

}  // namespace

TEST_CASE("fitting a sample against itself gives the identity") {
  std::mt19937_64 rng(1);
  VectorSet set = Sample(rng, testing::RandomSpd(rng, 6), 200, "en", Eigen::VectorXd::Ones(6));
  CoralTransform t = CoralFit(set, set, 0.0);
  CHECK((t.matrix - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-6);
  for (const auto& v : set) {
    SpeakerVector u = CoralApply(t, v, DenormMode::kTarget);
    CHECK((u.values - v.values).norm() <= 1e-6 * v.values.norm());
    CHECK(u.utterance_id == v.utterance_id);
    CHECK(u.speaker_id == v.speaker_id);
  }
}

TEST_CASE("transfer matrix on raw axis-aligned covariances") {
  // Source N(0, diag(1,4)), target N(0, diag(4,1)). On raw covariances the
  // closed form is diag(2, 0.5). After per-dimension z-normalization both
  // covariances are near the identity and the fitted matrix follows.
  std::mt19937_64 rng(2);
  VectorSet src = Sample(rng, Eigen::Vector2d(1, 4).asDiagonal(), 50000, "s", Eigen::Vector2d::Zero());
  VectorSet tgt = Sample(rng, Eigen::Vector2d(4, 1).asDiagonal(), 50000, "t", Eigen::Vector2d::Zero());
  Eigen::MatrixXd raw = CoralMatrix(SampleCovariance(src.ToMatrix()), SampleCovariance(tgt.ToMatrix()));
  CHECK(raw(0, 0) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(raw(1, 1) == doctest::Approx(0.5).epsilon(0.05));
  CHECK(std::abs(raw(0, 1)) < 0.05);
  CHECK(std::abs(raw(1, 0)) < 0.05);

  CoralTransform t = CoralFit(src, tgt, 0.0);
  CHECK((t.matrix - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.05);
  // With target denormalization the mapped source carries the target scales.
  VectorSet mapped = CoralApplySet(t, src, DenormMode::kTarget);
  Eigen::MatrixXd c = SampleCovariance(mapped.ToMatrix());
  CHECK(c(0, 0) == doctest::Approx(4.0).epsilon(0.05));
  CHECK(c(1, 1) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("transformed source covariance equals the target covariance (property)") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 25; ++t) {
    const int d = 2 + static_cast<int>(testing::UniformBelow(rng, 7));
    const std::size_t n = 3 * static_cast<std::size_t>(d) + testing::UniformBelow(rng, 100);
    VectorSet src = Sample(rng, testing::RandomSpd(rng, d), n, "s", testing::GaussVector(rng, d));
    VectorSet tgt = Sample(rng, testing::RandomSpd(rng, d), n + 7, "t", testing::GaussVector(rng, d));
    CoralTransform fit = CoralFit(src, tgt, 0.0);
    std::vector<Eigen::VectorXd> mapped;
    for (const auto& v : src) mapped.push_back(CoralApplyValues(fit, v.values, DenormMode::kNone));
    Eigen::MatrixXd c = BruteCovariance(mapped);
    const Eigen::MatrixXd& ct = fit.target_stats.covariance;
    CHECK((c - ct).norm() / ct.norm() < 1e-6);
  }
}

TEST_CASE("closed form minimizes the alignment objective (property)") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 30; ++t) {
    const int d = 1 + static_cast<int>(testing::UniformBelow(rng, 8));
    Eigen::MatrixXd cs = testing::RandomSpd(rng, d);
    Eigen::MatrixXd ct = testing::RandomSpd(rng, d);
    Eigen::MatrixXd a = CoralMatrix(cs, ct);
    const double best = CoralObjective(a, cs, ct);
    CHECK(best < 1e-12 * std::max(1.0, ct.squaredNorm()));
    for (int p = 0; p < 100; ++p) {
      const double eps = std::ldexp(1.0, -static_cast<int>(testing::UniformBelow(rng, 20)));
      Eigen::MatrixXd perturbed = a + eps * testing::GaussMatrix(rng, d, d);
      CHECK(best <= CoralObjective(perturbed, cs, ct) + 1e-9);
    }
  }
}

TEST_CASE("regularized fits are invertible and finite") {
  std::mt19937_64 rng(5);
  // Rank-deficient samples: fewer vectors than dimensions.
  VectorSet src = testing::RandomSet(rng, 12, 4, 2, "s");
  VectorSet tgt = testing::RandomSet(rng, 12, 5, 2, "t");
  CoralTransform t = CoralFit(src, tgt, 1.0);
  CHECK(t.matrix.allFinite());
  CHECK(std::abs(t.matrix.determinant()) > 0.0);
  CHECK(t.source_domain == "s");
  CHECK(t.target_domain == "t");
}

TEST_CASE("CORAL errors") {
  std::mt19937_64 rng(6);
  VectorSet a = testing::RandomSet(rng, 3, 10, 2);
  VectorSet b = testing::RandomSet(rng, 4, 10, 2);
  CHECK_THROWS_AS(CoralFit(a, b, 0.0), Error);
  CHECK_THROWS_AS(CoralFit(a, a, -1.0), Error);
  CHECK_THROWS_AS(CoralFit(a, a.Subset(std::vector<std::size_t>{0}), 0.0), Error);
  CHECK_THROWS_AS(CoralFitSampled(a, a, 11, 0.0, 1), Error);
  CoralTransform t = CoralFit(a, a, 0.0);
  CHECK_THROWS_AS(CoralApplyValues(t, Eigen::VectorXd::Ones(4), DenormMode::kNone), Error);
  CHECK_THROWS_AS(ParseDenormMode("sometimes"), Error);
}

TEST_CASE("sampled fits are seeded, and drawing everything ignores the seed") {
  std::mt19937_64 rng(7);
  VectorSet src = testing::RandomSet(rng, 5, 80, 8, "s");
  VectorSet tgt = testing::RandomSet(rng, 5, 90, 9, "t");
  CoralTransform a = CoralFitSampled(src, tgt, 10, 1.0, 42);
  CoralTransform b = CoralFitSampled(src, tgt, 10, 1.0, 42);
  CoralTransform c = CoralFitSampled(src, tgt, 10, 1.0, 43);
  CHECK(a == b);
  CHECK(a.seed == std::optional<std::uint64_t>(42));
  CHECK_FALSE(a.matrix == c.matrix);
  VectorSet tgt80 = tgt.Subset(std::vector<std::size_t>([] {
    std::vector<std::size_t> idx(80);
    for (std::size_t i = 0; i < 80; ++i) idx[i] = i;
    return idx;
  }()));
  CHECK(CoralFitSampled(src, tgt80, 80, 1.0, 1).matrix ==
        CoralFitSampled(src, tgt80, 80, 1.0, 2).matrix);
}

TEST_CASE("transform files round trip byte-identically (property)") {
  std::mt19937_64 rng(8);
  auto dir = testing::TempDir("coral");
  for (int t = 0; t < 20; ++t) {
    const int d = 1 + static_cast<int>(testing::UniformBelow(rng, 6));
    VectorSet src = testing::RandomSet(rng, d, 5 + testing::UniformBelow(rng, 20), 3, "s");
    VectorSet tgt = testing::RandomSet(rng, d, 5 + testing::UniformBelow(rng, 20), 3, "t");
    CoralTransform fit = t % 2 ? CoralFit(src, tgt, 0.5) : CoralFitSampled(src, tgt, 5, 0.0, rng());
    SaveCoralTransform(fit, dir / "a.coral", std::vector<std::string>{"note"});
    CoralTransform back = LoadCoralTransform(dir / "a.coral");
    CHECK(back == fit);
    SaveCoralTransform(back, dir / "b.coral", std::vector<std::string>{"note"});
    CHECK(ReadFile(dir / "a.coral") == ReadFile(dir / "b.coral"));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed transform files are rejected with a line number") {
  std::mt19937_64 rng(9);
  VectorSet s = testing::RandomSet(rng, 2, 6, 2, "s");
  const std::string good = SerializeCoralTransform(CoralFit(s, s, 0.0));
  CHECK_NOTHROW(ParseCoralTransform(good));
  std::string truncated = good.substr(0, good.rfind("matrix"));
  CHECK_THROWS_AS(ParseCoralTransform(truncated, "t.coral"), Error);
  std::string bad = good;
  bad.replace(bad.find("dim=2"), 5, "dim=3");
  try {
    ParseCoralTransform(bad, "t.coral");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("t.coral:", 0) == 0);
  }
}
