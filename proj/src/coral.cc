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

#include "spkanon/coral.h"

#include <algorithm>
#include <map>

#include "spkanon/random.h"
#include "spkanon/text_util.h"

namespace spkanon {

namespace {

bool StatsEqual(const DomainStats& a, const DomainStats& b) {
  return a.sample_count == b.sample_count && a.mean.size() == b.mean.size() &&
         a.mean == b.mean && a.std == b.std && a.covariance == b.covariance;
}

std::string MatrixRows(std::string_view key, const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out += key;
    out += '\t';
    out += FormatRow(m.row(r).transpose());
    out += '\n';
  }
  return out;
}

}  // namespace

bool CoralTransform::operator==(const CoralTransform& other) const {
  return matrix.rows() == other.matrix.rows() && matrix == other.matrix &&
         StatsEqual(source_stats, other.source_stats) &&
         StatsEqual(target_stats, other.target_stats) && lambda == other.lambda &&
         source_domain == other.source_domain && target_domain == other.target_domain &&
         seed == other.seed;
}

Eigen::MatrixXd CoralMatrix(const Eigen::Ref<const Eigen::MatrixXd>& source_cov,
                            const Eigen::Ref<const Eigen::MatrixXd>& target_cov,
                            double eigen_floor) {
  if (source_cov.rows() != target_cov.rows() || source_cov.cols() != target_cov.cols()) {
    throw Error("CORAL: source and target covariances differ in shape");
  }
  return SymmetricPower(source_cov, MatrixPower::kInvSqrt, eigen_floor) *
         SymmetricPower(target_cov, MatrixPower::kSqrt, eigen_floor);
}

double CoralObjective(const Eigen::Ref<const Eigen::MatrixXd>& a,
                      const Eigen::Ref<const Eigen::MatrixXd>& source_cov,
                      const Eigen::Ref<const Eigen::MatrixXd>& target_cov) {
  return (a.transpose() * source_cov * a - target_cov).squaredNorm();
}

CoralTransform CoralFit(const VectorSet& source_sample, const VectorSet& target_sample,
                        double lambda, std::optional<std::uint64_t> seed) {
  if (source_sample.dimension() != target_sample.dimension()) {
    throw Error("CORAL: source dimension " + std::to_string(source_sample.dimension()) +
                " != target dimension " + std::to_string(target_sample.dimension()));
  }
  CoralTransform t;
  t.source_stats = FitStats(source_sample, lambda);
  t.target_stats = FitStats(target_sample, lambda);
  t.matrix = CoralMatrix(t.source_stats.covariance, t.target_stats.covariance);
  if (!t.matrix.allFinite()) throw Error("CORAL: transfer matrix is not finite");
  t.lambda = lambda;
  t.source_domain = source_sample.DomainLabel();
  t.target_domain = target_sample.DomainLabel();
  t.seed = seed;
  return t;
}

CoralTransform CoralFitSampled(const VectorSet& source, const VectorSet& target,
                               std::size_t count, double lambda, std::uint64_t seed) {
  if (count > source.size() || count > target.size()) {
    throw Error("CORAL: asked for " + std::to_string(count) + " fit vectors but source has " +
                std::to_string(source.size()) + " and target has " +
                std::to_string(target.size()));
  }
  Rng rng(seed);
  auto src = SampleWithoutReplacement(rng, source.size(), count);
  auto tgt = SampleWithoutReplacement(rng, target.size(), count);
  // Canonical order, so drawing everything yields the same fit for any seed.
  std::sort(src.begin(), src.end());
  std::sort(tgt.begin(), tgt.end());
  return CoralFit(source.Subset(src), target.Subset(tgt), lambda, seed);
}

std::string_view ToString(DenormMode mode) {
  return mode == DenormMode::kTarget ? "target" : "none";
}

DenormMode ParseDenormMode(std::string_view text) {
  if (text == "target") return DenormMode::kTarget;
  if (text == "none") return DenormMode::kNone;
  throw Error("denorm mode must be 'target' or 'none', got '" + std::string(text) + "'");
}

Eigen::VectorXd CoralApplyValues(const CoralTransform& t,
                                 const Eigen::Ref<const Eigen::VectorXd>& values,
                                 DenormMode mode) {
  if (values.size() != t.dimension()) {
    throw Error("CORAL apply: vector has dimension " + std::to_string(values.size()) +
                ", transform has " + std::to_string(t.dimension()));
  }
  Eigen::VectorXd u = t.matrix.transpose() * ZNorm(values, t.source_stats);
  if (mode == DenormMode::kTarget) u = Denorm(u, t.target_stats);
  return u;
}

SpeakerVector CoralApply(const CoralTransform& t, const SpeakerVector& v, DenormMode mode) {
  SpeakerVector out = v;
  out.values = CoralApplyValues(t, v.values, mode);
  if (!t.target_domain.empty()) out.domain = t.target_domain;
  return out;
}

VectorSet CoralApplySet(const CoralTransform& t, const VectorSet& set, DenormMode mode) {
  VectorSet out(set.dimension());
  for (const auto& v : set) out.Add(CoralApply(t, v, mode));
  return out;
}

std::string SerializeCoralTransform(const CoralTransform& t,
                                    std::span<const std::string> comments) {
  std::string out = "dim=" + std::to_string(t.dimension()) + " lambda=" + FormatDouble(t.lambda) +
                    "\n";
  out += "# format_version=" + std::string(kCoralFormatVersion) + "\n";
  for (const auto& c : comments) out += "# " + c + "\n";
  out += "meta\tsource_domain=" + t.source_domain + "\ttarget_domain=" + t.target_domain +
         "\tn_source=" + std::to_string(t.source_stats.sample_count) +
         "\tn_target=" + std::to_string(t.target_stats.sample_count) +
         "\tseed=" + (t.seed ? std::to_string(*t.seed) : std::string("none")) + "\n";
  out += "source_mean\t" + FormatRow(t.source_stats.mean) + "\n";
  out += "source_std\t" + FormatRow(t.source_stats.std) + "\n";
  out += "target_mean\t" + FormatRow(t.target_stats.mean) + "\n";
  out += "target_std\t" + FormatRow(t.target_stats.std) + "\n";
  out += MatrixRows("source_cov", t.source_stats.covariance);
  out += MatrixRows("target_cov", t.target_stats.covariance);
  out += MatrixRows("matrix", t.matrix);
  return out;
}

CoralTransform ParseCoralTransform(std::string_view text, std::string_view source_name) {
  auto fail = [&](std::size_t line_no, const std::string& msg) -> Error {
    return Error(std::string(source_name) + ":" + std::to_string(line_no) + ": " + msg);
  };
  auto lines = Split(text, '\n');
  CoralTransform t;
  int d = -1;
  bool have_meta = false;
  std::map<std::string, std::vector<Eigen::VectorXd>> rows;
  std::size_t last_line = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::string_view trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const std::size_t line_no = i + 1;
    last_line = line_no;
    try {
      if (d < 0) {
        auto parts = Split(trimmed, ' ');
        if (parts.size() != 2 || parts[0].substr(0, 4) != "dim=" ||
            parts[1].substr(0, 7) != "lambda=") {
          throw Error("expected header 'dim=<d> lambda=<lambda>'");
        }
        long long dim = ParseInt(parts[0].substr(4), "dimension");
        if (dim <= 0 || dim > 100'000) throw Error("dimension out of range");
        d = static_cast<int>(dim);
        t.lambda = ParseDouble(parts[1].substr(7), "lambda");
        continue;
      }
      auto fields = Split(line, '\t');
      if (fields[0] == "meta") {
        if (have_meta) throw Error("duplicate meta line");
        have_meta = true;
        std::map<std::string, std::string, std::less<>> kv;
        for (std::size_t f = 1; f < fields.size(); ++f) {
          auto eq = fields[f].find('=');
          if (eq == std::string_view::npos) throw Error("meta field without '='");
          kv[std::string(fields[f].substr(0, eq))] = std::string(fields[f].substr(eq + 1));
        }
        for (const char* key : {"source_domain", "target_domain", "n_source", "n_target", "seed"}) {
          if (kv.count(key) == 0) throw Error(std::string("meta line lacks ") + key);
        }
        t.source_domain = kv["source_domain"];
        t.target_domain = kv["target_domain"];
        t.source_stats.sample_count = ParseUint64(kv["n_source"], "n_source");
        t.target_stats.sample_count = ParseUint64(kv["n_target"], "n_target");
        if (kv["seed"] != "none") t.seed = ParseUint64(kv["seed"], "seed");
        continue;
      }
      if (fields.size() != 2) throw Error("expected '<key>\\t<row>'");
      std::string key(fields[0]);
      static const char* const kKeys[] = {"source_mean", "source_std", "target_mean",
                                          "target_std",  "source_cov", "target_cov",
                                          "matrix"};
      if (std::find_if(std::begin(kKeys), std::end(kKeys),
                       [&](const char* k) { return key == k; }) == std::end(kKeys)) {
        throw Error("unknown row key '" + key + "'");
      }
      Eigen::VectorXd row = ParseRow(fields[1], key);
      if (row.size() != d) {
        throw Error(key + " row has " + std::to_string(row.size()) + " values, expected " +
                    std::to_string(d));
      }
      rows[key].push_back(std::move(row));
    } catch (const Error& e) {
      throw fail(line_no, e.what());
    }
  }
  if (d < 0) throw fail(last_line, "missing header");
  if (!have_meta) throw fail(last_line, "missing meta line");
  auto vec = [&](const char* key) {
    if (rows[key].size() != 1) throw fail(last_line, std::string("expected one ") + key + " row");
    return rows[key].front();
  };
  auto mat = [&](const char* key) {
    const auto& r = rows[key];
    if (r.size() != static_cast<std::size_t>(d)) {
      throw fail(last_line, std::string("expected ") + std::to_string(d) + " " + key + " rows");
    }
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i) m.row(i) = r[static_cast<std::size_t>(i)].transpose();
    return m;
  };
  t.source_stats.mean = vec("source_mean");
  t.source_stats.std = vec("source_std");
  t.target_stats.mean = vec("target_mean");
  t.target_stats.std = vec("target_std");
  t.source_stats.covariance = mat("source_cov");
  t.target_stats.covariance = mat("target_cov");
  t.matrix = mat("matrix");
  if ((t.source_stats.std.array() <= 0.0).any() || (t.target_stats.std.array() <= 0.0).any()) {
    throw fail(last_line, "std entries must be positive");
  }
  return t;
}

void SaveCoralTransform(const CoralTransform& t, const std::filesystem::path& path,
                        std::span<const std::string> comments) {
  WriteFileAtomic(path, SerializeCoralTransform(t, comments));
}

CoralTransform LoadCoralTransform(const std::filesystem::path& path) {
  return ParseCoralTransform(ReadFile(path), path.string());
}

}  // namespace spkanon
