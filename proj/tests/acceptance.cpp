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

// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

#include "numcomp/corpus.hpp"
#include "numcomp/csv.hpp"
#include "numcomp/eval.hpp"
#include "numcomp/metrics.hpp"
#include "numcomp/pipeline.hpp"
#include "numcomp/serialize.hpp"
#include "support/oracles.hpp"

using namespace numcomp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

// A trained pipeline kept alive for the criteria that share it.
struct Trained {
  PipelineConfig config;
  std::vector<IngestedTable> tables;
  std::optional<TrainedEncoder> encoder;
  std::unique_ptr<ComponentEncoder> components;
  std::optional<TrainedAutoencoder> autoencoder;
  std::unique_ptr<CompositeEmbedder> embedder;

  Trained() = default;
  Trained(const Trained&) = delete;
};

void train(Trained& t, const std::vector<Table>& tables, std::uint64_t seed, bool log_map,
           bool use_magnitude) {
  t.config.seed = seed;
  t.config.magnitude.log_map = log_map;
  t.config.fusion.use_magnitude = use_magnitude;
  t.config.finalize();
  t.tables = ingest(tables, load_units(t.config));
  t.encoder.emplace(train_encoder(tables, t.config));
  t.components = std::make_unique<ComponentEncoder>(t.encoder->model);
  t.autoencoder.emplace(fit_autoencoder(collect_blocks(*t.components, t.tables), t.config,
                                        t.encoder->model.dim()));
  t.embedder = std::make_unique<CompositeEmbedder>(*t.components, t.autoencoder->ae);
}

double decile_mean(const std::vector<double>& xs, bool last) {
  const std::size_t n = std::max<std::size_t>(1, xs.size() / 10);
  const auto begin = last ? xs.end() - static_cast<std::ptrdiff_t>(n) : xs.begin();
  return std::accumulate(begin, begin + static_cast<std::ptrdiff_t>(n), 0.0) / static_cast<double>(n);
}

const MagnitudeEmbedder& default_magnitude() {
  static const MagnitudeEmbedder e([] {
    MagnitudeConfig c;
    c.seed = substream_seed(1, "magnitude");
    return c;
  }());
  return e;
}

Outcome monotonicity() {
  const auto t0 = Clock::now();
  const MagnitudeEmbedder& e = default_magnitude();
  const RowVector zero = e.embed(0);
  int violations = 0;
  for (int limit : {100, 1000}) {
    double last = -1.0;
    for (int n = 0; n <= limit; ++n) {
      const double d = (e.embed(n) - zero).norm();
      violations += d < last;
      last = d;
    }
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < 1.0, fmt("%d violations, %.3fs", violations, secs)};
}

Outcome number_correlation() {
  const auto t0 = Clock::now();
  AuditConfig ac;
  ac.seed = 101;
  const MagnitudeEmbedder& e = default_magnitude();
  const auto mag = correlation_audit(KindTag::Scalar, ac, value_slots([&](double x) { return e.embed(x); }));
  const auto rnd = correlation_audit(KindTag::Scalar, ac, value_slots(random_value_embedding(64, 102)));
  const double secs = seconds_since(t0);
  const bool pass = mag[0].pearson >= 0.95 && mag[0].spearman >= 0.75 &&
                    std::fabs(rnd[0].pearson) < 0.2 && secs < 10.0;
  return {pass, fmt("r=%.4f rho=%.4f random r=%.4f, %.2fs", mag[0].pearson, mag[0].spearman,
                    rnd[0].pearson, secs)};
}

Outcome range_correlation(const Trained& audit) {
  AuditConfig ac;
  ac.seed = 201;
  const MagnitudeEmbedder& e = default_magnitude();
  const KindEmbedding slots = value_slots([&](double x) { return e.embed(x); });
  const auto pre = correlation_audit(KindTag::Range, ac, slots, Distance::Euclidean);
  const auto pre_cos = correlation_audit(KindTag::Range, ac, slots);
  const auto rnd = correlation_audit(KindTag::Range, ac, value_slots(random_value_embedding(64, 202)));
  const auto post = correlation_audit(KindTag::Range, ac, composite_of(*audit.embedder, "Range"));
  const double cl_pre = pre[0].pearson;
  const double cl_post = post[0].pearson;
  const double iou = pre_cos[1].pearson;
  const double iou_rnd = rnd[1].pearson;
  const bool pass = cl_pre >= 0.99 && cl_post >= 0.9 && iou > 0.0 && iou - iou_rnd >= 0.2;
  return {pass, fmt("d_CL pre r=%.4f post r=%.4f; d_IoU r=%.4f (composite %.4f) vs random %.4f",
                    cl_pre, cl_post, iou, post[1].pearson, iou_rnd)};
}

Outcome gaussian_correlation(const Trained& audit) {
  AuditConfig ac;
  ac.seed = 301;
  const auto r = correlation_audit(KindTag::Gaussian, ac, composite_of(*audit.embedder, "Gaussian"));
  return {r[0].spearman >= 0.6, fmt("rho=%.4f (r=%.4f) over %zu pairs", r[0].spearman, r[0].pearson,
                                    r[0].analytic.size())};
}

Outcome gradient_checks() {
  const auto t0 = Clock::now();
  Rng rng(401);
  std::normal_distribution<double> n;
  auto random = [&](Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
    return m;
  };

  // (a) encoder attention layer
  nn::TransformerLayer layer(8, 2);
  layer.init(rng, 0.3);
  Matrix x = random(3, 8);
  const Matrix w = random(3, 8);
  std::vector<nn::Param*> lp;
  layer.collect(lp);
  nn::zero_grads(lp);
  nn::TransformerLayer::Cache cache;
  layer.forward(x, &cache);
  const Matrix dx = layer.backward(cache, w);
  auto layer_loss = [&] { return (layer.forward(x).array() * w.array()).sum(); };
  double a = oracle::check_params(lp, layer_loss, 402, 24).max_rel;
  std::vector<Matrix*> xs{&x};
  a = std::max(a, oracle::check_tensors(xs, [&](std::size_t) { return dx; }, layer_loss, 403).max_rel);

  // (b) fusion block with the numeral loss, back through the encoder
  Vocabulary vocab(16);
  vocab.add("age");
  EncoderConfig ec;
  ec.dim = 8;
  ec.heads = 2;
  ec.layers = 1;
  ec.init_std = 0.3;
  ec.seed = 404;
  MagnitudeConfig mc;
  mc.dim = 8;
  mc.min = 0;
  mc.max = 100;
  NumeralModel model(Encoder(ec, vocab), MagnitudeEmbedder(mc));
  const TokenSequence seq = model.encoder.tokenize("[CLS] age [SEP] 28 [SEP] 34 [SEP] 61 [SEP]");
  const std::vector<char> masked{1, 0, 1};
  std::vector<nn::Param*> mp = model.encoder.params();
  for (auto* p : model.fusion_params()) mp.push_back(p);
  for (auto* p : model.head_params()) mp.push_back(p);
  nn::zero_grads(mp);
  model.loss(seq, masked, 1.0, true);
  const double b = oracle::check_params(
      mp, [&] { return model.loss(seq, masked, 1.0, false).total; }, 405, 16).max_rel;

  // (c) autoencoder reconstruction
  AutoencoderConfig ac;
  ac.input_dim = 20;
  ac.code_dim = 6;
  ac.seed = 406;
  Autoencoder ae(ac);
  SlotBlock block;
  block.dim = 4;
  block.values = random(1, 20).row(0);
  block.mask = {true, true, true, false, true};
  block.values.segment(12, 4).setZero();
  Matrix grad = Matrix::Zero(6, 20);
  ae.loss(block, &grad);
  std::vector<Matrix*> ws{&ae.w};
  const double c = oracle::check_tensors(ws, [&](std::size_t) { return grad; },
                                         [&] { return ae.loss(block); }, 407, 120).max_rel;
  const double secs = seconds_since(t0);
  const bool pass = a < 1e-3 && b < 1e-3 && c < 1e-3 && secs < 30.0;
  return {pass, fmt("max rel err attention %.2e, fusion %.2e, autoencoder %.2e, %.2fs", a, b, c, secs)};
}

Outcome training_progress(const Trained& audit, const std::vector<Table>& held_out) {
  std::vector<double> num, rec;
  for (const auto& r : audit.encoder->trace) {
    if (r.masked > 0) num.push_back(r.loss);
  }
  rec = audit.autoencoder->trace;
  auto seqs = training_sequences(held_out, static_cast<std::size_t>(audit.config.encoder.max_length));
  for (auto& s : seqs) audit.encoder->model.encoder.vocab().assign_ids(s);
  // The baseline predicts the training corpus mean.
  auto train_seqs = training_sequences(
      [&] {
        std::vector<Table> t;
        for (const auto& it : audit.tables) t.push_back(it.table);
        return t;
      }(),
      static_cast<std::size_t>(audit.config.encoder.max_length));
  const MagnitudeEval ev = evaluate_magnitude(audit.encoder->model, seqs, mean_log_magnitude(train_seqs));
  const double n0 = decile_mean(num, false), n1 = decile_mean(num, true);
  const double r0 = decile_mean(rec, false), r1 = decile_mean(rec, true);
  const bool pass = audit.encoder->trace.size() == 500 && rec.size() == 300 && n1 < n0 && r1 < r0 &&
                    ev.log_rmse < ev.baseline_log_rmse;
  return {pass, fmt("numeral loss %.3f -> %.3f; reconstruction %.3f -> %.3f; held-out log-RMSE %.3f vs mean baseline %.3f (%d numerals)",
                    n0, n1, r0, r1, ev.log_rmse, ev.baseline_log_rmse, ev.count)};
}

Outcome retrieval_exactness() {
  Rng rng(501);
  std::normal_distribution<double> n;
  std::vector<RowVector> vecs;
  std::vector<std::string> ids;
  FlatIndex index(64);
  for (int i = 0; i < 1000; ++i) {
    RowVector v(64);
    for (auto& x : v) x = n(rng);
    ids.push_back(fmt("item%04d", i));
    vecs.push_back(v);
    index.add(ids.back(), v);
  }
  int mismatches = 0;
  for (int q = 0; q < 50; ++q) {
    RowVector v(64);
    for (auto& x : v) x = n(rng);
    std::vector<std::string> got;
    for (const auto& h : index.query(v, 10)) got.push_back(h.id);
    mismatches += got != oracle::brute_force_top_k(ids, vecs, v, 10);
  }
  return {mismatches == 0, fmt("%d of 50 queries differ from the exhaustive ranking", mismatches)};
}

Outcome metric_oracles() {
  Rng rng(601);
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    const int pool = 5 + static_cast<int>(rng() % 30);
    std::vector<std::string> ids;
    for (int i = 0; i < pool; ++i) ids.push_back("d" + std::to_string(i));
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(std::min<std::size_t>(ids.size(), 12));
    std::set<std::string> rel;
    const int m = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < m; ++i) rel.insert("d" + std::to_string(rng() % static_cast<unsigned>(pool)));
    RankedResult r;
    for (std::size_t i = 0; i < ids.size(); ++i) r.push_back({ids[i], 1.0 - 0.01 * static_cast<double>(i)});
    worst = std::max({worst, std::fabs(recall_at_k(r, rel, 10) - oracle::recall(ids, rel, 10)),
                      std::fabs(average_precision_at_k(r, rel, 10) - oracle::average_precision(ids, rel, 10)),
                      std::fabs(reciprocal_rank_at_k(r, rel, 10) - oracle::reciprocal_rank(ids, rel, 10))});
  }
  const RankedResult hand{{"a", 0.9}, {"x", 0.8}, {"b", 0.7}};
  const double ap = average_precision_at_k(hand, {"a", "b"}, 10);
  return {worst <= 1e-12 && ap == 5.0 / 6.0, fmt("max abs diff %.1e; hand-case AP = %.17g", worst, ap)};
}

struct SeedRun {
  double full = 0, attribute = 0, no_magnitude = 0;
  std::vector<RotationRow> rotation;
};

SeedRun retrieval_seed(std::uint64_t seed) {
  const GeneratedCorpus corpus = generate_corpus(default_corpus_spec(), seed);
  SeedRun out;
  {
    Trained full;
    train(full, corpus.tables, seed, true, true);
    out.full = evaluate_items(embed_items(*full.embedder, full.tables, AggregateKind::Column),
                              corpus.columns, 10).recall;
    const CompositeEmbedder attr(*full.components, full.autoencoder->ae, Ablation::AttributeOnly);
    out.attribute = evaluate_items(embed_items(attr, full.tables, AggregateKind::Column),
                                   corpus.columns, 10).recall;
    out.rotation = rotation_ablation(*full.embedder, ParsedCell{"Tumor size", Scalar{20}, "cm"},
                                     {{RotatedPart::Value, "", 200},
                                      {RotatedPart::Attribute, "Sample size", 0},
                                      {RotatedPart::Unit, "mm", 0}});
  }
  Trained blind;
  train(blind, corpus.tables, seed, true, false);
  out.no_magnitude = evaluate_items(embed_items(*blind.embedder, blind.tables, AggregateKind::Column),
                                    corpus.columns, 10).recall;
  return out;
}

Outcome retrieval_quality(const std::vector<SeedRun>& runs) {
  double full = 0, attr = 0, blind = 0;
  std::string per_seed;
  for (const auto& r : runs) {
    full += r.full / static_cast<double>(runs.size());
    attr += r.attribute / static_cast<double>(runs.size());
    blind += r.no_magnitude / static_cast<double>(runs.size());
    per_seed += fmt(" [%.3f/%.3f/%.3f]", r.full, r.attribute, r.no_magnitude);
  }
  return {full > attr && full > blind,
          fmt("Recall@10 full %.3f, attribute-only %.3f, no-magnitude %.3f; per seed%s", full, attr,
              blind, per_seed.c_str())};
}

Outcome rotation_order(const std::vector<SeedRun>& runs) {
  bool pass = true;
  std::string detail;
  for (const auto& r : runs) {
    const double value = r.rotation[1].drop, attr = r.rotation[2].drop, unit = r.rotation[3].drop;
    pass = pass && value > attr && value > unit;
    detail += fmt("%s[value %.4f, attribute %.4f, unit %.4f]", detail.empty() ? "drops " : " ",
                  value, attr, unit);
  }
  return {pass, detail};
}

Outcome probes(const Trained& audit) {
  const auto t0 = Clock::now();
  const ValueEmbedding fused = [&](double x) { return audit.components->value(x); };
  const ValueEmbedding random = random_value_embedding(audit.encoder->model.dim(), 801);
  ProbeConfig pc;
  pc.seed = 802;
  pc.task = ProbeTask::ListMax;
  const double max_fused = run_probe(pc, fused).mean;
  const double max_random = run_probe(pc, random).mean;
  pc.task = ProbeTask::Decode;
  const double dec_fused = run_probe(pc, fused).mean;
  const double dec_random = run_probe(pc, random).mean;
  const double secs = seconds_since(t0);
  const bool pass = max_fused >= 0.9 && max_random <= 0.3 && dec_fused <= 5.0 && dec_random >= 20.0 &&
                    secs < 300.0;
  return {pass, fmt("list-max acc %.3f vs random %.3f; decode RMSE %.3f vs random %.3f; %.1fs",
                    max_fused, max_random, dec_fused, dec_random, secs)};
}

Outcome parser_goldens() {
  const Table t = read_csv(std::string(NUMCOMP_FIXTURES) + "/surgery_cohort.csv");
  const IngestedTable in = ingest_table(t, UnitTable::seed());
  auto all = [&](std::size_t j, KindTag tag, std::optional<std::string> unit) {
    for (const auto& c : in.columns[j]) {
      if (c.tag() != tag || c.unit != unit) return false;
    }
    return in.columns[j].size() == 6;
  };
  const bool kinds = all(0, KindTag::Scalar, std::nullopt) && all(2, KindTag::Text, std::nullopt) &&
                     all(6, KindTag::Range, "mmHg") && all(7, KindTag::Gaussian, "kg/m²") &&
                     in.columns[4][0].kind == NumericKind{Scalar{3000}} && in.columns[4][0].unit == "mL";
  const std::string column = serialize_column(t.headers[0], t.column(0)).text();
  const std::string row = serialize_row(t.headers, t.rows[0]).text();
  const bool col_ok = column == "[CLS] Age [SEP] 28 [SEP] 34 [SEP] 36 [SEP] 42 [SEP] 33 [SEP] 31 [SEP]";
  const bool row_ok =
      row == "[CLS] Age 28 [SEP] Sex F [SEP] Tumor Stage S1--3 [SEP] Operating time 7 hrs [SEP] "
             "Blood loss 3000 mL [SEP] Follow-up (months) 30 [SEP] BP (mmHg) 76-118 [SEP] "
             "BMI (kg/m2) 21.8 ± 2.9 [SEP]";
  return {kinds && col_ok && row_ok, fmt("kinds %s, column string %s, row string %s",
                                         kinds ? "ok" : "wrong", col_ok ? "ok" : "wrong",
                                         row_ok ? "ok" : "wrong")};
}

}  // namespace

int main() {
  const auto start = Clock::now();
  int failures = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  };
  auto guarded = [&](int id, const char* name, const std::function<Outcome()>& f) {
    try {
      report(id, name, f());
    } catch (const std::exception& e) {
      report(id, name, {false, std::string("exception: ") + e.what()});
    }
  };

  // Audit model: default linear magnitude map, trained on 80% of the corpus.
  const GeneratedCorpus corpus = generate_corpus(default_corpus_spec(), 1);
  const std::size_t cut = corpus.tables.size() * 4 / 5;
  const std::vector<Table> train_tables(corpus.tables.begin(), corpus.tables.begin() + static_cast<std::ptrdiff_t>(cut));
  const std::vector<Table> held_out(corpus.tables.begin() + static_cast<std::ptrdiff_t>(cut), corpus.tables.end());
  Trained audit;
  train(audit, train_tables, 1, false, true);

  // Retrieval models: log-scaled magnitude map, three seeds.
  std::vector<SeedRun> runs;
  std::string retrieval_error;
  try {
    for (std::uint64_t s = 1; s <= 3; ++s) runs.push_back(retrieval_seed(s));
  } catch (const std::exception& e) {
    retrieval_error = e.what();
  }
  auto from_runs = [&](auto f) {
    return [&, f]() -> Outcome {
      if (!retrieval_error.empty()) return {false, "exception: " + retrieval_error};
      return f(runs);
    };
  };

  guarded(1, "magnitude monotonicity", monotonicity);
  guarded(2, "number correlation", number_correlation);
  guarded(3, "range correlation", [&] { return range_correlation(audit); });
  guarded(4, "gaussian correlation", [&] { return gaussian_correlation(audit); });
  guarded(5, "gradient checks", gradient_checks);
  guarded(6, "training progress", [&] { return training_progress(audit, held_out); });
  guarded(7, "retrieval exactness", retrieval_exactness);
  guarded(8, "metric oracles", metric_oracles);
  guarded(9, "synthetic retrieval quality", from_runs(retrieval_quality));
  guarded(10, "rotation ablation ordering", from_runs(rotation_order));
  guarded(11, "numeracy probes", [&] { return probes(audit); });
  guarded(12, "parser goldens", parser_goldens);

  std::printf("%d of 12 criteria passed in %.1fs\n", 12 - failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
