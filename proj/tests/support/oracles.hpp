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

// Independent reference implementations used to cross-check the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "numcomp/index.hpp"
#include "numcomp/linalg.hpp"
#include "numcomp/nn.hpp"
#include "numcomp/rng.hpp"

namespace oracle {

inline double recall(const std::vector<std::string>& ranked, const std::set<std::string>& rel,
                     std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) hits += rel.count(ranked[i]);
  return static_cast<double>(hits) / static_cast<double>(rel.size());
}

inline double average_precision(const std::vector<std::string>& ranked,
                                const std::set<std::string>& rel, std::size_t k) {
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
    if (rel.count(ranked[i])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(std::min(rel.size(), k));
}

inline double reciprocal_rank(const std::vector<std::string>& ranked,
                              const std::set<std::string>& rel, std::size_t k) {
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
    if (rel.count(ranked[i])) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

/// Exhaustive cosine ranking over every stored vector, ties by id.
inline std::vector<std::string> brute_force_top_k(const std::vector<std::string>& ids,
                                                  const std::vector<numcomp::RowVector>& vecs,
                                                  const numcomp::RowVector& q, std::size_t k) {
  std::vector<std::pair<double, std::string>> scored;
  // The index keeps unit-normalized rows in float32; rank against the same rows.
  const numcomp::RowVector qn = q / q.norm();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const Eigen::RowVectorXf stored = (vecs[i] / vecs[i].norm()).cast<float>();
    double dot = 0.0;
    for (Eigen::Index j = 0; j < stored.size(); ++j) dot += static_cast<double>(stored[j]) * qn[j];
    scored.emplace_back(dot, ids[i]);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(scored[i].second);
  return out;
}

struct GradReport {
  double max_rel = 0.0;
  int checked = 0;
};

inline double relative_error(double analytic, double numeric) {
  return std::fabs(analytic - numeric) /
         std::max({std::fabs(analytic), std::fabs(numeric), 1e-6});
}

/// Central differences on a random subset of coordinates of each tensor.
/// `grad_of` returns the analytic gradient for tensor i; `loss` recomputes
/// the scalar loss from the current values.
inline GradReport check_tensors(const std::vector<numcomp::Matrix*>& values,
                                const std::function<numcomp::Matrix(std::size_t)>& grad_of,
                                const std::function<double()>& loss, std::uint64_t seed,
                                int per_tensor = 16, double h = 1e-5) {
  GradReport report;
  numcomp::Rng rng(seed);
  for (std::size_t t = 0; t < values.size(); ++t) {
    numcomp::Matrix& m = *values[t];
    const numcomp::Matrix analytic = grad_of(t);
    const Eigen::Index n = m.size();
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    const int count = static_cast<int>(std::min<Eigen::Index>(n, per_tensor));
    for (int c = 0; c < count; ++c) {
      const Eigen::Index flat = n <= per_tensor ? c : pick(rng);
      double& x = m.data()[flat];
      const double saved = x;
      x = saved + h;
      const double up = loss();
      x = saved - h;
      const double down = loss();
      x = saved;
      const double numeric = (up - down) / (2.0 * h);
      report.max_rel = std::max(report.max_rel, relative_error(analytic.data()[flat], numeric));
      ++report.checked;
    }
  }
  return report;
}

inline GradReport check_params(const std::vector<numcomp::nn::Param*>& params,
                               const std::function<double()>& loss, std::uint64_t seed,
                               int per_tensor = 16) {
  std::vector<numcomp::Matrix*> values;
  std::vector<numcomp::Matrix> grads;
  for (auto* p : params) {
    values.push_back(&p->value);
    grads.push_back(p->grad);
  }
  return check_tensors(values, [&](std::size_t i) { return grads[i]; }, loss, seed, per_tensor);
}

}  // namespace oracle
