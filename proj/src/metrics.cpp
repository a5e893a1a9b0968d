/*
 * Copyright 2026 The numcomp Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "numcomp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "json.hpp"
#include "numcomp/error.hpp"

namespace numcomp {
namespace {

void check_series(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) fail(ErrorCode::LengthMismatch, "series differ in length");
  if (xs.size() < 3) fail(ErrorCode::InvalidArgument, "correlation needs at least 3 points");
}

}  // namespace

double d_num(double x, double y) { return std::fabs(x - y); }

double d_cl(const Range& a, const Range& b) {
  const double dc = 0.5 * (a.lo + a.hi) - 0.5 * (b.lo + b.hi);
  const double dl = (a.hi - a.lo) - (b.hi - b.lo);
  return std::hypot(dc, dl);
}

double d_iou(const Range& a, const Range& b) {
  const double inter = std::max(0.0, std::min(a.hi, b.hi) - std::max(a.lo, b.lo));
  const double uni = (a.hi - a.lo) + (b.hi - b.lo) - inter;
  if (uni <= 0.0) return a == b ? 0.0 : 1.0;
  return 1.0 - inter / uni;
}

double d_w2(const Gaussian& a, const Gaussian& b) {
  return std::hypot(a.mean - b.mean, a.sd - b.sd);
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  check_series(xs, ys);
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) fail(ErrorCode::ConstantSeries, "correlation of a constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  check_series(xs, ys);
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  return pearson(rx, ry);
}

double recall_at_k(const RankedResult& ranked, const std::set<std::string>& relevant, int k) {
  if (relevant.empty()) fail(ErrorCode::InvalidArgument, "empty relevance set");
  std::size_t hits = 0;
  const std::size_t top = std::min(ranked.size(), static_cast<std::size_t>(std::max(k, 0)));
  for (std::size_t i = 0; i < top; ++i) hits += relevant.count(ranked[i].id);
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double average_precision_at_k(const RankedResult& ranked, const std::set<std::string>& relevant,
                              int k) {
  if (relevant.empty()) fail(ErrorCode::InvalidArgument, "empty relevance set");
  std::size_t hits = 0;
  // Extended precision so small hand cases round to the exact fraction.
  long double sum = 0.0L;
  const std::size_t top = std::min(ranked.size(), static_cast<std::size_t>(std::max(k, 0)));
  for (std::size_t i = 0; i < top; ++i) {
    if (relevant.count(ranked[i].id)) {
      ++hits;
      sum += static_cast<long double>(hits) / static_cast<long double>(i + 1);
    }
  }
  const std::size_t denom = std::min(relevant.size(), static_cast<std::size_t>(std::max(k, 1)));
  return static_cast<double>(sum / static_cast<long double>(denom));
}

double reciprocal_rank_at_k(const RankedResult& ranked, const std::set<std::string>& relevant,
                            int k) {
  if (relevant.empty()) fail(ErrorCode::InvalidArgument, "empty relevance set");
  const std::size_t top = std::min(ranked.size(), static_cast<std::size_t>(std::max(k, 0)));
  for (std::size_t i = 0; i < top; ++i) {
    if (relevant.count(ranked[i].id)) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

RetrievalScores evaluate_retrieval(const std::map<std::string, RankedResult>& results,
                                   const GroundTruth& truth, int k) {
  if (results.empty()) fail(ErrorCode::NoQueries, "no queries to evaluate");
  RetrievalScores s;
  for (const auto& [query, ranked] : results) {
    auto it = truth.find(query);
    if (it == truth.end()) fail(ErrorCode::UnknownQueryId, "query without ground truth: " + query);
    s.recall += recall_at_k(ranked, it->second, k);
    s.map += average_precision_at_k(ranked, it->second, k);
    s.mrr += reciprocal_rank_at_k(ranked, it->second, k);
  }
  s.queries = results.size();
  const double n = static_cast<double>(s.queries);
  s.recall /= n;
  s.map /= n;
  s.mrr /= n;
  return s;
}

GroundTruth read_ground_truth(std::istream& in) {
  GroundTruth truth;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      auto& rel = truth[j.at("query").get<std::string>()];
      for (const auto& id : j.at("relevant")) rel.insert(id.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::CorruptFile,
           "ground truth line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return truth;
}

GroundTruth read_ground_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open ground truth: " + path);
  return read_ground_truth(in);
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
  for (const auto& [query, relevant] : truth) {
    nlohmann::ordered_json j;
    j["query"] = query;
    j["relevant"] = std::vector<std::string>(relevant.begin(), relevant.end());
    out << j.dump() << '\n';
  }
}

}  // namespace numcomp
