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

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "numcomp/error.hpp"
#include "numcomp/metrics.hpp"
#include "support/oracles.hpp"

using namespace numcomp;

namespace {

RankedResult ranked(const std::vector<std::string>& ids) {
  RankedResult r;
  double s = 1.0;
  for (const auto& id : ids) r.push_back({id, s -= 0.01});
  return r;
}

}  // namespace

TEST_CASE("analytic distances") {
  CHECK(d_num(5, 5) == 0.0);
  CHECK(d_num(0, 100) == 100.0);
  CHECK(d_num(21.8, 23.4) == doctest::Approx(1.6));
  CHECK(d_cl({1, 10}, {1, 10}) == 0.0);
  CHECK(d_cl({1, 10}, {1, 11}) == doctest::Approx(std::sqrt(1.25)));
  CHECK(d_cl({0, 10}, {10, 20}) == doctest::Approx(10.0));
  CHECK(d_iou({0, 10}, {0, 10}) == 0.0);
  CHECK(d_iou({0, 10}, {20, 30}) == 1.0);
  CHECK(d_iou({0, 10}, {5, 15}) == doctest::Approx(2.0 / 3.0));
  CHECK(d_iou({3, 3}, {3, 3}) == 0.0);
  CHECK(d_iou({3, 3}, {4, 4}) == 1.0);
  CHECK(d_iou({3, 3}, {0, 10}) == 1.0);
  CHECK(d_w2({0, 1}, {0, 1}) == 0.0);
  CHECK(d_w2({0, 1}, {3, 5}) == doctest::Approx(5.0));
  CHECK(d_w2({0, 1}, {3, 5}) == d_w2({3, 5}, {0, 1}));
}

TEST_CASE("distance axioms on random inputs") {
  Rng rng(1);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int i = 0; i < 200; ++i) {
    double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    if (a > b) std::swap(a, b);
    if (c > d) std::swap(c, d);
    const Range r1{a, b}, r2{c, d};
    CHECK(d_cl(r1, r2) == d_cl(r2, r1));
    CHECK(d_iou(r1, r2) == doctest::Approx(d_iou(r2, r1)));
    CHECK(d_iou(r1, r2) >= 0.0);
    CHECK(d_iou(r1, r2) <= 1.0);
    CHECK(d_cl(r1, r2) >= 0.0);
  }
}

TEST_CASE("correlations") {
  const std::vector<double> xs{1, 2, 3, 4, 5};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(2 * x + 1);
  CHECK(pearson(xs, ys) == doctest::Approx(1.0));
  const std::vector<double> down{9, 7, 4, 2, -3};
  CHECK(spearman(xs, down) == doctest::Approx(-1.0));

  // Hand-computed: mean x = 3, mean y = 3.2; sxy = 10, sxx = 10, syy = 12.8.
  const std::vector<double> hy{2, 4, 3, 5, 2};
  CHECK(pearson(xs, std::vector<double>{1, 3, 2, 5, 5}) == doctest::Approx(10.0 / std::sqrt(10.0 * 12.8)));
  CHECK(average_ranks(hy) == std::vector<double>{1.5, 4, 3, 5, 1.5});

  CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), Error);
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}), Error);
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), Error);
}

TEST_CASE("ranking metrics hand case") {
  const RankedResult r = ranked({"a", "x", "b", "y"});
  const std::set<std::string> rel{"a", "b"};
  CHECK(recall_at_k(r, rel, 10) == 1.0);
  CHECK(average_precision_at_k(r, rel, 10) == 5.0 / 6.0);
  CHECK(reciprocal_rank_at_k(r, rel, 10) == 1.0);
  const std::set<std::string> none{"q"};
  CHECK(recall_at_k(r, none, 10) == 0.0);
  CHECK(average_precision_at_k(r, none, 10) == 0.0);
  CHECK(reciprocal_rank_at_k(r, none, 10) == 0.0);
  const RankedResult perfect = ranked({"a", "b", "x"});
  CHECK(recall_at_k(perfect, rel, 10) == 1.0);
  CHECK(average_precision_at_k(perfect, rel, 10) == 1.0);
}

TEST_CASE("ranking metrics match the naive oracle") {
  Rng rng(2);
  for (int c = 0; c < 50; ++c) {
    std::uniform_int_distribution<int> pool_size(5, 40);
    const int n = pool_size(rng);
    std::vector<std::string> pool;
    for (int i = 0; i < n; ++i) pool.push_back("d" + std::to_string(i));
    std::shuffle(pool.begin(), pool.end(), rng);
    std::uniform_int_distribution<int> rel_count(1, n);
    std::set<std::string> rel;
    for (int i = 0, m = rel_count(rng); i < m; ++i) rel.insert("d" + std::to_string(rng() % static_cast<unsigned>(n)));
    std::vector<std::string> ids(pool.begin(), pool.begin() + std::min(n, 15));
    const RankedResult r = ranked(ids);
    CHECK(std::fabs(recall_at_k(r, rel, 10) - oracle::recall(ids, rel, 10)) <= 1e-12);
    CHECK(std::fabs(average_precision_at_k(r, rel, 10) - oracle::average_precision(ids, rel, 10)) <= 1e-12);
    CHECK(std::fabs(reciprocal_rank_at_k(r, rel, 10) - oracle::reciprocal_rank(ids, rel, 10)) <= 1e-12);
  }
}

TEST_CASE("evaluate_retrieval averages over queries") {
  std::map<std::string, RankedResult> results{{"q1", ranked({"a", "x", "b"})}, {"q2", ranked({"x", "c"})}};
  const GroundTruth truth{{"q1", {"a", "b"}}, {"q2", {"c"}}};
  const RetrievalScores s = evaluate_retrieval(results, truth, 10);
  CHECK(s.queries == 2);
  CHECK(s.recall == doctest::Approx(1.0));
  CHECK(s.map == doctest::Approx((5.0 / 6.0 + 0.5) / 2.0));
  CHECK(s.mrr == doctest::Approx(0.75));
  CHECK_THROWS_AS(evaluate_retrieval({}, truth, 10), Error);
  std::map<std::string, RankedResult> unknown{{"zz", ranked({"a"})}};
  CHECK_THROWS_AS(evaluate_retrieval(unknown, truth, 10), Error);
}

TEST_CASE("ground truth jsonl round trip") {
  const GroundTruth truth{{"t0.c1", {"t1.c0", "t2.c3"}}, {"t1.c0", {"t0.c1"}}};
  std::stringstream io;
  write_ground_truth(io, truth);
  CHECK(read_ground_truth(io) == truth);
  std::istringstream bad("{\"query\": 3}\n");
  CHECK_THROWS_AS(read_ground_truth(bad), Error);
}
