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

#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "numcomp/cell.hpp"
#include "numcomp/index.hpp"

namespace numcomp {

// Analytic distances.
double d_num(double x, double y);
/// Euclidean distance in (center, length) coordinates.
double d_cl(const Range& a, const Range& b);
/// 1 - |intersection| / |union|. Two identical intervals (including equal
/// points) are at distance 0; distinct points share nothing and are at 1.
double d_iou(const Range& a, const Range& b);
/// 2-Wasserstein distance between univariate Gaussians.
double d_w2(const Gaussian& a, const Gaussian& b);

/// Throw LengthMismatch, InvalidArgument (fewer than 3 points) or
/// ConstantSeries.
double pearson(std::span<const double> xs, std::span<const double> ys);
/// Pearson on average ranks (ties share their mean rank).
double spearman(std::span<const double> xs, std::span<const double> ys);
std::vector<double> average_ranks(std::span<const double> xs);

/// Query id -> relevant item ids.
using GroundTruth = std::map<std::string, std::set<std::string>>;

double recall_at_k(const RankedResult& ranked, const std::set<std::string>& relevant, int k);
/// Precision summed at each relevant rank within the top k, divided by
/// min(|relevant|, k).
double average_precision_at_k(const RankedResult& ranked, const std::set<std::string>& relevant,
                              int k);
double reciprocal_rank_at_k(const RankedResult& ranked, const std::set<std::string>& relevant,
                            int k);

struct RetrievalScores {
  double recall = 0.0;
  double map = 0.0;
  double mrr = 0.0;
  std::size_t queries = 0;
};

/// Averages the three metrics over every query in `results`. Throws
/// NoQueries, UnknownQueryId, or InvalidArgument for an empty relevance set.
RetrievalScores evaluate_retrieval(const std::map<std::string, RankedResult>& results,
                                   const GroundTruth& truth, int k);

/// JSON lines {"query": id, "relevant": [ids]}.
GroundTruth read_ground_truth(std::istream& in);
GroundTruth read_ground_truth(const std::string& path);
void write_ground_truth(std::ostream& out, const GroundTruth& truth);

}  // namespace numcomp
