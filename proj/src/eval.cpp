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

#include "numcomp/eval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <random>

#include "numcomp/error.hpp"
#include "numcomp/index.hpp"
#include "numcomp/metrics.hpp"
#include "numcomp/nn.hpp"
#include "numcomp/rng.hpp"
#include "numcomp/text.hpp"

namespace numcomp {
namespace {

double distance(const RowVector& u, const RowVector& v, Distance kind) {
  return kind == Distance::Cosine ? 1.0 - cosine(u, v) : (u - v).norm();
}

CorrelationResult finish(std::string kind, std::string metric, std::vector<double> analytic,
                         std::vector<double> embedded) {
  CorrelationResult r;
  r.kind = std::move(kind);
  r.metric = std::move(metric);
  r.pearson = pearson(analytic, embedded);
  r.spearman = spearman(analytic, embedded);
  r.analytic = std::move(analytic);
  r.embedded = std::move(embedded);
  return r;
}

// Multilayer perceptron with ReLU between layers.
class Mlp {
 public:
  Mlp(const std::vector<int>& widths, Rng& rng) {
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
      layers_.emplace_back(widths[i], widths[i + 1]);
      const bool last = i + 2 == widths.size();
      layers_.back().init(rng, std::sqrt((last ? 1.0 : 2.0) / widths[i]));
    }
    for (auto& l : layers_) l.collect(params_);
  }

  Matrix forward(const Matrix& x, std::vector<Matrix>* inputs = nullptr) const {
    Matrix h = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      if (inputs) inputs->push_back(h);
      h = layers_[i].forward(h);
      if (i + 1 < layers_.size()) h = h.cwiseMax(0.0);
    }
    return h;
  }

  void backward(const std::vector<Matrix>& inputs, Matrix d) {
    for (std::size_t i = layers_.size(); i-- > 0;) {
      d = layers_[i].backward(inputs[i], d);
      if (i > 0) d = d.cwiseProduct((inputs[i].array() > 0.0).cast<double>().matrix());
    }
  }

  const std::vector<nn::Param*>& params() const { return params_; }

 private:
  std::vector<nn::Linear> layers_;
  std::vector<nn::Param*> params_;
};

struct Dataset {
  Matrix x;
  Vector y;  // class index or regression target
};

void standardize(Matrix& train, Matrix& test) {
  for (Eigen::Index j = 0; j < train.cols(); ++j) {
    const double mean = train.col(j).mean();
    const double sd = std::sqrt((train.col(j).array() - mean).square().mean());
    const double scale = sd > 0.0 ? 1.0 / sd : 1.0;
    train.col(j) = (train.col(j).array() - mean) * scale;
    test.col(j) = (test.col(j).array() - mean) * scale;
  }
}

std::vector<int> sample_distinct(const std::vector<int>& pool, int count, Rng& rng) {
  std::vector<int> out;
  std::sample(pool.begin(), pool.end(), std::back_inserter(out), count, rng);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

Dataset build(ProbeTask task, const std::vector<int>& pool, int samples, int dim,
              const std::function<const RowVector&(int)>& embed, Rng& rng) {
  Dataset d;
  if (task == ProbeTask::ListMax) {
    if (pool.size() < 5) fail(ErrorCode::RangeTooSmall, "list maximum needs 5 distinct integers");
    d.x.resize(samples, 5 * dim);
    d.y.resize(samples);
    for (int i = 0; i < samples; ++i) {
      const auto list = sample_distinct(pool, 5, rng);
      for (int k = 0; k < 5; ++k) d.x.row(i).segment(k * dim, dim) = embed(list[k]);
      d.y(i) = static_cast<double>(std::max_element(list.begin(), list.end()) - list.begin());
    }
  } else if (task == ProbeTask::Decode) {
    if (pool.empty()) fail(ErrorCode::RangeTooSmall, "no integers to decode");
    const auto picked =
        sample_distinct(pool, std::min<int>(samples, static_cast<int>(pool.size())), rng);
    d.x.resize(static_cast<Eigen::Index>(picked.size()), dim);
    d.y.resize(static_cast<Eigen::Index>(picked.size()));
    for (std::size_t i = 0; i < picked.size(); ++i) {
      d.x.row(static_cast<Eigen::Index>(i)) = embed(picked[i]);
      d.y(static_cast<Eigen::Index>(i)) = picked[i];
    }
  } else {
    if (pool.empty()) fail(ErrorCode::RangeTooSmall, "no integers to add");
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    d.x.resize(samples, 2 * dim);
    d.y.resize(samples);
    for (int i = 0; i < samples; ++i) {
      const int a = pool[pick(rng)];
      const int b = pool[pick(rng)];
      d.x.row(i).head(dim) = embed(a);
      d.x.row(i).tail(dim) = embed(b);
      d.y(i) = a + b;
    }
  }
  return d;
}

double run_once(const ProbeConfig& config, const ValueEmbedding& embed_fn, int seed_index) {
  Rng rng = substream(config.seed, "probe-" + std::string(to_string(config.task)) + "-" +
                                       std::to_string(seed_index));
  std::vector<int> ints(static_cast<std::size_t>(config.max_value) + 1);
  std::iota(ints.begin(), ints.end(), 0);
  std::shuffle(ints.begin(), ints.end(), rng);
  const auto cut = static_cast<std::ptrdiff_t>(std::llround(0.8 * static_cast<double>(ints.size())));
  const std::vector<int> train_pool(ints.begin(), ints.begin() + cut);
  const std::vector<int> test_pool(ints.begin() + cut, ints.end());

  std::map<int, RowVector> cache;
  auto embed = [&](int v) -> const RowVector& {
    auto it = cache.find(v);
    if (it == cache.end()) it = cache.emplace(v, embed_fn(static_cast<double>(v))).first;
    return it->second;
  };
  const int dim = static_cast<int>(embed(ints.front()).size());
  Dataset train = build(config.task, train_pool, config.train_samples, dim, embed, rng);
  Dataset test = build(config.task, test_pool, config.test_samples, dim, embed, rng);
  standardize(train.x, test.x);

  const bool classify = config.task == ProbeTask::ListMax;
  double y_mean = 0.0;
  double y_scale = 1.0;
  if (!classify) {
    y_mean = train.y.mean();
    const double sd = std::sqrt((train.y.array() - y_mean).square().mean());
    y_scale = sd > 0.0 ? sd : 1.0;
  }
  const Vector y_std = classify ? train.y : Vector((train.y.array() - y_mean) / y_scale);

  const int in = static_cast<int>(train.x.cols());
  const std::vector<int> widths =
      classify ? std::vector<int>{in, 64, 5} : std::vector<int>{in, 128, 128, 128, 128, 1};
  Mlp mlp(widths, rng);
  nn::Adam adam(nn::AdamOptions{config.lr, 0.9, 0.999, 1e-8});
  const Eigen::Index n = train.x.rows();
  const Eigen::Index batch = std::min<Eigen::Index>(config.batch, n);
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  Matrix xb(batch, in);
  Vector yb(batch);
  for (int step = 0; step < config.steps; ++step) {
    for (Eigen::Index i = 0; i < batch; ++i) {
      const Eigen::Index r = batch == n ? i : pick(rng);
      xb.row(i) = train.x.row(r);
      yb(i) = y_std(r);
    }
    std::vector<Matrix> inputs;
    const Matrix out = mlp.forward(xb, &inputs);
    Matrix d(out.rows(), out.cols());
    if (classify) {
      const Matrix p = nn::softmax_rows(out);
      d = p;
      for (Eigen::Index i = 0; i < batch; ++i) d(i, static_cast<Eigen::Index>(yb(i))) -= 1.0;
    } else {
      d.col(0) = 2.0 * (out.col(0) - yb);
    }
    d /= static_cast<double>(batch);
    nn::zero_grads(mlp.params());
    mlp.backward(inputs, d);
    adam.step(mlp.params());
  }

  const Matrix out = mlp.forward(test.x);
  if (classify) {
    int correct = 0;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      Eigen::Index arg;
      out.row(i).maxCoeff(&arg);
      correct += static_cast<double>(arg) == test.y(i);
    }
    return static_cast<double>(correct) / static_cast<double>(out.rows());
  }
  const Vector pred = out.col(0).array() * y_scale + y_mean;
  return std::sqrt((pred - test.y).squaredNorm() / static_cast<double>(pred.size()));
}

}  // namespace

ValueEmbedding random_value_embedding(int dim, std::uint64_t seed) {
  return [dim, seed](double x) {
    Rng rng(splitmix64(seed ^ std::bit_cast<std::uint64_t>(x == 0.0 ? 0.0 : x)));
    std::normal_distribution<double> normal(0.0, 1.0);
    RowVector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = normal(rng);
    return v;
  };
}

KindEmbedding value_slots(ValueEmbedding value) {
  return [value = std::move(value)](const NumericKind& kind) -> RowVector {
    std::vector<double> parts;
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Scalar>) {
            parts = {k.x};
          } else if constexpr (std::is_same_v<K, Range>) {
            parts = {0.5 * (k.lo + k.hi), std::fabs(k.hi - k.lo)};
          } else if constexpr (std::is_same_v<K, Gaussian>) {
            parts = {k.mean - k.sd, k.mean, k.mean + k.sd};
          } else {
            fail(ErrorCode::TextCellUnsupported, "text cell has no value slots");
          }
        },
        kind);
    std::vector<RowVector> rows;
    for (double p : parts) rows.push_back(value(p));
    const Eigen::Index d = rows.front().size();
    RowVector out(d * static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out.segment(static_cast<Eigen::Index>(i) * d, d) = rows[i];
    return out;
  };
}

KindEmbedding composite_of(const CompositeEmbedder& embedder, std::string attribute,
                           std::optional<std::string> unit) {
  return [&embedder, attribute = std::move(attribute), unit = std::move(unit)](
             const NumericKind& kind) {
    return embedder.embed(ParsedCell{attribute, kind, unit});
  };
}

std::vector<CorrelationResult> correlation_audit(KindTag kind, const AuditConfig& config,
                                                 const KindEmbedding& embed, Distance dist) {
  std::vector<double> a1, a2, e;
  switch (kind) {
    case KindTag::Scalar: {
      Rng rng = substream(config.seed, "audit-number");
      std::uniform_real_distribution<double> u(0.0, config.number_max);
      for (int i = 0; i < config.number_pairs; ++i) {
        const double x = u(rng);
        const double y = u(rng);
        a1.push_back(d_num(x, y));
        e.push_back(distance(embed(Scalar{x}), embed(Scalar{y}), dist));
      }
      return {finish("number", "d_num", a1, e)};
    }
    case KindTag::Range: {
      Rng rng = substream(config.seed, "audit-range");
      static constexpr std::pair<double, double> kDomains[] = {{0, 100}, {1, 1000}, {0, 10000}};
      auto draw = [&](int domain) {
        std::uniform_real_distribution<double> u(kDomains[domain].first, kDomains[domain].second);
        double lo = u(rng), hi = u(rng);
        if (lo > hi) std::swap(lo, hi);
        return Range{lo, hi};
      };
      for (int i = 0; i < config.range_pairs; ++i) {
        const Range r = draw(i % 3);
        const Range s = draw(i % 3);
        a1.push_back(d_cl(r, s));
        a2.push_back(d_iou(r, s));
        e.push_back(distance(embed(r), embed(s), dist));
      }
      return {finish("range", "d_CL", a1, e), finish("range", "d_IoU", a2, e)};
    }
    case KindTag::Gaussian: {
      Rng rng = substream(config.seed, "audit-gaussian");
      std::uniform_real_distribution<double> mu(0.0, 100.0);
      std::uniform_real_distribution<double> sigma(1.0, 10.0);
      for (int i = 0; i < config.gaussian_pairs; ++i) {
        const Gaussian g{mu(rng), sigma(rng)};
        const Gaussian h{mu(rng), sigma(rng)};
        a1.push_back(d_w2(g, h));
        e.push_back(distance(embed(g), embed(h), dist));
      }
      return {finish("gaussian", "d_W2", a1, e)};
    }
    case KindTag::Text:
      break;
  }
  fail(ErrorCode::InvalidArgument, "no analytic distance for text cells");
}

void write_audit_csv(std::ostream& out, const std::vector<CorrelationResult>& results) {
  out << "kind,metric,analytic,embedding\n";
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.analytic.size(); ++i) {
      out << r.kind << ',' << r.metric << ',' << format_number(r.analytic[i]) << ','
          << format_number(r.embedded[i]) << '\n';
    }
  }
}

std::string_view to_string(ProbeTask task) {
  switch (task) {
    case ProbeTask::ListMax: return "list_max";
    case ProbeTask::Decode: return "decode";
    case ProbeTask::Add: return "add";
  }
  return "list_max";
}

ProbeResult run_probe(const ProbeConfig& config, const ValueEmbedding& embed) {
  if (config.max_value < 1 || config.seeds < 1 || config.steps < 1 || config.batch < 1 ||
      config.train_samples < 1 || config.test_samples < 1) {
    fail(ErrorCode::InvalidArgument, "probe sizes must be positive");
  }
  ProbeResult r;
  r.task = config.task;
  r.metric = config.task == ProbeTask::ListMax ? "accuracy" : "rmse";
  for (int s = 0; s < config.seeds; ++s) r.per_seed.push_back(run_once(config, embed, s));
  const double n = static_cast<double>(r.per_seed.size());
  r.mean = std::accumulate(r.per_seed.begin(), r.per_seed.end(), 0.0) / n;
  double var = 0.0;
  for (double v : r.per_seed) var += (v - r.mean) * (v - r.mean);
  r.stddev = std::sqrt(var / n);
  return r;
}

std::string_view to_string(RotatedPart part) {
  switch (part) {
    case RotatedPart::Attribute: return "attribute";
    case RotatedPart::Value: return "value";
    case RotatedPart::Unit: return "unit";
  }
  return "value";
}

std::vector<RotationRow> rotation_ablation(const CompositeEmbedder& embedder,
                                           const ParsedCell& reference,
                                           const std::vector<Rotation>& rotations) {
  if (reference.tag() != KindTag::Scalar) {
    fail(ErrorCode::InvalidArgument, "rotation needs a scalar reference cell");
  }
  const RowVector base = embedder.embed(reference);
  std::vector<RotationRow> rows{{"reference", 1.0, 0.0}};
  rows.front().similarity = cosine(base, base);
  for (const Rotation& rot : rotations) {
    ParsedCell cell = reference;
    std::string from, to;
    switch (rot.part) {
      case RotatedPart::Attribute:
        from = reference.attribute;
        to = rot.text;
        cell.attribute = rot.text;
        break;
      case RotatedPart::Value:
        from = format_number(std::get<Scalar>(reference.kind).x);
        to = format_number(rot.value);
        cell.kind = Scalar{rot.value};
        break;
      case RotatedPart::Unit:
        from = reference.unit.value_or("");
        to = rot.text;
        cell.unit = rot.text.empty() ? std::nullopt : std::optional<std::string>(rot.text);
        break;
    }
    const double sim = cosine(base, embedder.embed(cell));
    rows.push_back({std::string(to_string(rot.part)) + ": " + from + " -> " + to, sim,
                    1.0 - sim});
  }
  return rows;
}

}  // namespace numcomp
