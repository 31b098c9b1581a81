// Copyright 2026 The noveval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "noveval/detection.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "noveval/error.hpp"
#include "noveval/io.hpp"

namespace noveval {

void ScoreMatrix::validate(double tolerance) const {
  if (rows.rows() != static_cast<Eigen::Index>(instance_ids.size())) {
    throw InvariantError("score matrix has " + std::to_string(rows.rows()) +
                         " rows for " + std::to_string(instance_ids.size()) + " ids");
  }
  if (rows.cols() != k_known || k_known < 1) {
    throw InvariantError("score matrix width does not match k_known");
  }
  std::unordered_set<InstanceId> seen;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    if (!seen.insert(instance_ids[i]).second) {
      throw InvariantError("duplicate instance id " + std::to_string(instance_ids[i]));
    }
    const auto row = rows.row(i);
    if (!row.allFinite() || row.minCoeff() < 0.0 || row.maxCoeff() > 1.0) {
      throw InvariantError("score row " + std::to_string(i) +
                           " has entries outside [0, 1]");
    }
    if (std::abs(row.sum() - 1.0) > tolerance) {
      throw InvariantError("score row " + std::to_string(i) + " sums to " +
                           format_double(row.sum()));
    }
  }
}

std::string_view to_string(ScorerMethod method) {
  switch (method) {
    case ScorerMethod::kMaxProb: return "maxprob";
    case ScorerMethod::kCompMean: return "compmean";
    case ScorerMethod::kEuclid: return "euclid";
    case ScorerMethod::kMahalanobis: return "mahalanobis";
    case ScorerMethod::kExternal: return "external";
  }
  return "unknown";
}

std::optional<ScorerMethod> parse_scorer(std::string_view name) {
  for (auto m : {ScorerMethod::kMaxProb, ScorerMethod::kCompMean,
                 ScorerMethod::kEuclid, ScorerMethod::kMahalanobis,
                 ScorerMethod::kExternal}) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

ConfidenceRanking make_ranking(ScorerMethod method,
                               std::vector<InstanceId> instance_ids,
                               std::vector<double> confidence) {
  if (instance_ids.size() != confidence.size()) {
    throw std::invalid_argument("ranking ids and confidences differ in length");
  }
  for (double c : confidence) {
    if (!std::isfinite(c)) throw InvariantError("non-finite confidence value");
  }
  ConfidenceRanking out;
  out.method = method;
  out.order.resize(instance_ids.size());
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) {
    if (confidence[a] != confidence[b]) return confidence[a] < confidence[b];
    return instance_ids[a] < instance_ids[b];
  });
  out.instance_ids = std::move(instance_ids);
  out.confidence = std::move(confidence);
  return out;
}

ConfidenceRanking score_maxprob(const ScoreMatrix& scores) {
  std::vector<double> conf(scores.size());
  for (std::size_t i = 0; i < conf.size(); ++i) {
    conf[i] = scores.rows.row(static_cast<Eigen::Index>(i)).maxCoeff();
  }
  return make_ranking(ScorerMethod::kMaxProb, scores.instance_ids, std::move(conf));
}

ConfidenceRanking score_compmean(const ScoreMatrix& scores) {
  if (scores.k_known < 2) {
    throw std::invalid_argument("compmean needs at least 2 known classes");
  }
  const double others = static_cast<double>(scores.k_known - 1);
  std::vector<double> conf(scores.size());
  for (std::size_t i = 0; i < conf.size(); ++i) {
    const auto row = scores.rows.row(static_cast<Eigen::Index>(i));
    Eigen::Index top = 0;
    row.maxCoeff(&top);
    double rest = 0.0;
    for (Eigen::Index j = 0; j < row.size(); ++j) {
      if (j != top) rest += row(j);
    }
    conf[i] = 1.0 - rest / others;
  }
  return make_ranking(ScorerMethod::kCompMean, scores.instance_ids, std::move(conf));
}

namespace {

// Column mean taken relative to the first row, so identical rows centre to
// exactly zero.
Eigen::MatrixXd centered(const Eigen::MatrixXd& points) {
  const Eigen::RowVectorXd origin = points.row(0);
  const Eigen::MatrixXd shifted = points.rowwise() - origin;
  return shifted.rowwise() - shifted.colwise().mean();
}

}  // namespace

Eigen::VectorXd euclid_distances(const Eigen::MatrixXd& points) {
  if (points.rows() < 2) {
    throw std::invalid_argument("distance scorers need at least 2 rows");
  }
  return centered(points).rowwise().norm();
}

Eigen::VectorXd mahalanobis_sq_distances(const Eigen::MatrixXd& points,
                                         double ridge) {
  if (points.rows() < 2) {
    throw std::invalid_argument("distance scorers need at least 2 rows");
  }
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw std::invalid_argument("ridge must be finite and >= 0");
  }
  const Eigen::MatrixXd c = centered(points);
  const auto dim = points.cols();
  Eigen::MatrixXd cov = (c.transpose() * c) /
                        static_cast<double>(points.rows() - 1);
  const double shift = ridge * cov.trace() / static_cast<double>(dim);
  cov.diagonal().array() += shift;
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success || !(cov.trace() > 0.0)) {
    throw InvariantError(
        "regularized covariance is not positive definite (degenerate scores)");
  }
  // d_i^2 = ||L^{-1} c_i||^2 with cov = L L^T.
  const Eigen::MatrixXd whitened =
      llt.matrixL().solve(c.transpose());
  return whitened.colwise().squaredNorm().transpose();
}

ConfidenceRanking score_euclid(const ScoreMatrix& scores) {
  const Eigen::VectorXd dist = euclid_distances(scores.rows);
  std::vector<double> conf(dist.size());
  for (Eigen::Index i = 0; i < dist.size(); ++i) conf[i] = -dist(i);
  return make_ranking(ScorerMethod::kEuclid, scores.instance_ids, std::move(conf));
}

ConfidenceRanking score_mahalanobis(const ScoreMatrix& scores, double ridge) {
  const Eigen::VectorXd dist2 = mahalanobis_sq_distances(scores.rows, ridge);
  std::vector<double> conf(dist2.size());
  for (Eigen::Index i = 0; i < dist2.size(); ++i) {
    conf[i] = -std::sqrt(std::max(0.0, dist2(i)));
  }
  return make_ranking(ScorerMethod::kMahalanobis, scores.instance_ids,
                      std::move(conf));
}

ConfidenceRanking score(ScorerMethod method, const ScoreMatrix& scores,
                        double ridge) {
  switch (method) {
    case ScorerMethod::kMaxProb: return score_maxprob(scores);
    case ScorerMethod::kCompMean: return score_compmean(scores);
    case ScorerMethod::kEuclid: return score_euclid(scores);
    case ScorerMethod::kMahalanobis: return score_mahalanobis(scores, ridge);
    case ScorerMethod::kExternal: break;
  }
  throw std::invalid_argument("external rankings come from a score file");
}

DetectionReport report_novelties(const ConfidenceRanking& ranking,
                                 const ScoreMatrix& scores, int budget) {
  const std::size_t n = scores.size();
  if (ranking.instance_ids != scores.instance_ids) {
    throw std::invalid_argument("ranking and score matrix list different ids");
  }
  if (budget < 0 || static_cast<std::size_t>(budget) > n) {
    throw std::invalid_argument("budget " + std::to_string(budget) +
                                " outside 0.." + std::to_string(n));
  }
  DetectionReport report;
  report.budget = budget;
  report.instance_ids = scores.instance_ids;
  report.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = scores.rows.row(static_cast<Eigen::Index>(i));
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < row.size(); ++j) {
      if (row(j) > row(best)) best = j;
    }
    report.assignment[i] = static_cast<LabelId>(best + 1);
  }
  for (int r = 0; r < budget; ++r) {
    report.assignment[ranking.order[r]] = kNovelPseudoLabel;
  }
  return report;
}

namespace {

[[noreturn]] void fail(std::string_view name, int line_no, const std::string& what) {
  throw FormatError(std::string(name) + ":" + std::to_string(line_no) + ": " + what);
}

template <typename T>
T to_int(std::string_view token, std::string_view name, int line_no) {
  T out{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    fail(name, line_no, "bad integer '" + std::string(token) + "'");
  }
  return out;
}

double to_real(std::string_view token, std::string_view name, int line_no) {
  try {
    const double v = parse_double(token);
    if (std::isfinite(v)) return v;
  } catch (const std::invalid_argument&) {
  }
  fail(name, line_no, "bad number '" + std::string(token) + "'");
}

}  // namespace

ExternalScores parse_external_scores(std::istream& in, std::string_view name) {
  std::string line;
  auto next = [&]() {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next()) fail(name, 1, "missing header");
  const auto header = split_csv(line);
  if (header.size() < 3 || header[0] != "id" || header[1] != "true_label") {
    fail(name, 1, "header must be id,true_label,p_1,...,p_K[,confidence]");
  }
  const bool has_confidence = header.back() == "confidence";
  const int k = static_cast<int>(header.size()) - 2 - (has_confidence ? 1 : 0);
  if (k < 1) fail(name, 1, "no probability columns");
  for (int j = 0; j < k; ++j) {
    if (header[j + 2] != "p_" + std::to_string(j + 1)) {
      fail(name, 1, "expected column p_" + std::to_string(j + 1));
    }
  }

  std::vector<InstanceId> ids;
  std::vector<LabelId> labels;
  std::vector<double> values;
  std::vector<double> confidence;
  std::unordered_set<InstanceId> seen;
  int line_no = 1;
  while (next()) {
    ++line_no;
    if (line.empty()) continue;
    const auto cols = split_csv(line);
    if (cols.size() != header.size()) {
      fail(name, line_no, "expected " + std::to_string(header.size()) +
                              " columns, got " + std::to_string(cols.size()));
    }
    const auto id = to_int<InstanceId>(cols[0], name, line_no);
    if (!seen.insert(id).second) {
      fail(name, line_no, "duplicate id " + std::to_string(id));
    }
    const auto label = to_int<LabelId>(cols[1], name, line_no);
    if (label < 1) fail(name, line_no, "true_label must be >= 1");
    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
      const double p = to_real(cols[j + 2], name, line_no);
      if (p < 0.0 || p > 1.0) fail(name, line_no, "probability outside [0, 1]");
      values.push_back(p);
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-4) {
      fail(name, line_no, "row " + std::to_string(ids.size()) + " sums to " +
                              format_double(sum) + ", expected 1 within 1e-4");
    }
    for (int j = 0; j < k; ++j) values[values.size() - k + j] /= sum;
    if (has_confidence) confidence.push_back(to_real(cols.back(), name, line_no));
    ids.push_back(id);
    labels.push_back(label);
  }

  ExternalScores out;
  out.scores.k_known = k;
  out.scores.instance_ids = ids;
  out.scores.rows.resize(static_cast<Eigen::Index>(ids.size()), k);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (int j = 0; j < k; ++j) {
      out.scores.rows(static_cast<Eigen::Index>(i), j) = values[i * k + j];
    }
  }
  out.true_labels = std::move(labels);
  if (has_confidence) {
    out.ranking = make_ranking(ScorerMethod::kExternal, std::move(ids),
                               std::move(confidence));
  }
  return out;
}

ExternalScores load_external_scores(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return parse_external_scores(in, path.string());
}

void write_score_matrix(std::ostream& out, const ScoreMatrix& scores,
                        std::span<const LabelId> true_labels,
                        const ConfidenceRanking* ranking) {
  if (true_labels.size() != scores.size()) {
    throw std::invalid_argument("one true label per score row is required");
  }
  if (ranking != nullptr && ranking->instance_ids != scores.instance_ids) {
    throw std::invalid_argument("ranking ids differ from score ids");
  }
  out << "id,true_label";
  for (int j = 1; j <= scores.k_known; ++j) out << ",p_" << j;
  if (ranking != nullptr) out << ",confidence";
  out << '\n';
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out << scores.instance_ids[i] << ',' << true_labels[i];
    for (int j = 0; j < scores.k_known; ++j) {
      out << ',' << format_double(scores.rows(static_cast<Eigen::Index>(i), j));
    }
    if (ranking != nullptr) out << ',' << format_double(ranking->confidence[i]);
    out << '\n';
  }
}

}  // namespace noveval
