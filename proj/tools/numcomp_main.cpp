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

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "numcomp/corpus.hpp"
#include "numcomp/error.hpp"
#include "numcomp/pipeline.hpp"
#include "numcomp/text.hpp"

namespace fs = std::filesystem;
using namespace numcomp;

namespace {

struct Globals {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

// Relative paths resolve against NUMCOMP_ROOT when it is set.
std::string resolve(const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  if (const char* root = std::getenv("NUMCOMP_ROOT"); root && *root) {
    return (fs::path(root) / path).string();
  }
  return path;
}

PipelineConfig load_config(const Globals& g) {
  PipelineConfig c;
  if (!g.config_path.empty()) apply_config(c, read_config_file(resolve(g.config_path)));
  std::map<std::string, std::string> flags;
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) fail(ErrorCode::InvalidArgument, "--set expects key=value, got " + kv);
    flags[std::string(trim(kv.substr(0, eq)))] = std::string(trim(kv.substr(eq + 1)));
  }
  apply_config(c, flags);
  if (g.seed) c.seed = *g.seed;
  c.finalize();
  return c;
}

// Flag value, else the config's paths.<key>, else an error.
std::string path_for(const PipelineConfig& c, const std::string& flag, const std::string& key) {
  if (!flag.empty()) return resolve(flag);
  if (auto it = c.paths.find(key); it != c.paths.end()) return resolve(it->second);
  fail(ErrorCode::InvalidArgument, "no path given for " + key + " (flag or paths." + key + ")");
}

std::ofstream open_report(const std::string& path) {
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  return out;
}

struct Loaded {
  NumeralModel model;
  std::unique_ptr<ComponentEncoder> components;
  std::optional<Autoencoder> ae;
  std::unique_ptr<CompositeEmbedder> embedder;

  explicit Loaded(NumeralModel m) : model(std::move(m)) {}
};

std::unique_ptr<Loaded> load_models(const std::string& encoder, const std::string& autoencoder) {
  auto out = std::make_unique<Loaded>(NumeralModel::load(encoder));
  out->components = std::make_unique<ComponentEncoder>(out->model);
  if (!autoencoder.empty()) {
    out->ae.emplace(Autoencoder::load(autoencoder));
    out->embedder = std::make_unique<CompositeEmbedder>(*out->components, *out->ae);
  }
  return out;
}

std::optional<std::string> optional_path(const PipelineConfig& c, const std::string& flag,
                                         const std::string& key) {
  if (!flag.empty() || c.paths.count(key)) return path_for(c, flag, key);
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Composite numeric embeddings for table data"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "key = value config file ([section] headers)");
  app.add_option("--set", g.overrides, "override a config key, e.g. --set train.steps=100");
  app.add_option("--seed", g.seed, "root seed (overrides the config)");

  std::string tables, out, encoder, autoencoder, vectors, meta, index, truth, trace, task;
  std::string embedding = "fused";
  int k = 10, n_tables = 0, rows = 0, max_value = 100;
  std::vector<std::string> query_ids;
  std::string attribute = "Tumor size", unit = "cm", to_attribute = "Sample size", to_unit = "mm";
  double value = 20, to_value = 200;
  std::vector<std::function<void()>> runs;
  auto on = [&](CLI::App* sub, std::function<void()> fn) {
    sub->callback([&runs, fn = std::move(fn)] { runs.push_back(fn); });
  };

  auto* gen = app.add_subcommand("gen-corpus", "write a synthetic corpus and its ground truth");
  gen->add_option("--out", out, "output directory");
  gen->add_option("--tables", n_tables, "number of tables (default from the corpus spec)");
  gen->add_option("--rows", rows, "rows per table");
  on(gen, [&] {
    const PipelineConfig c = load_config(g);
    CorpusSpec spec = default_corpus_spec();
    if (n_tables > 0) spec.tables = n_tables;
    if (rows > 0) spec.rows = rows;
    const std::string dir = path_for(c, out, "corpus");
    const GeneratedCorpus corpus = generate_corpus(spec, c.seed);
    write_corpus(corpus, dir);
    std::printf("wrote %zu tables, %zu column queries, %zu tuple queries to %s\n",
                corpus.tables.size(), corpus.columns.size(), corpus.tuples.size(), dir.c_str());
  });

  auto* ing = app.add_subcommand("ingest", "parse every cell into JSON lines");
  ing->add_option("--tables", tables, "CSV file or directory");
  ing->add_option("--out", out, "JSON-lines output (default stdout)");
  on(ing, [&] {
    const PipelineConfig c = load_config(g);
    const auto parsed = ingest(read_tables(path_for(c, tables, "tables"), c.delimiter), load_units(c));
    std::ofstream file;
    if (!out.empty()) file = open_report(resolve(out));
    std::ostream& os = out.empty() ? std::cout : file;
    std::size_t cells = 0;
    for (const auto& t : parsed) {
      for (const auto& column : t.columns) {
        for (const auto& cell : column) {
          os << to_json_line(cell) << '\n';
          ++cells;
        }
      }
    }
    if (!out.empty()) std::printf("parsed %zu cells from %zu tables\n", cells, parsed.size());
  });

  auto* train = app.add_subcommand("train", "train the numeral encoder or the autoencoder");
  train->require_subcommand(1);
  auto* train_enc = train->add_subcommand("encoder", "masked numeral prediction");
  train_enc->add_option("--tables", tables, "CSV file or directory");
  train_enc->add_option("--out", out, "model checkpoint");
  train_enc->add_option("--trace", trace, "loss trace CSV");
  on(train_enc, [&] {
    const PipelineConfig c = load_config(g);
    const auto t = read_tables(path_for(c, tables, "tables"), c.delimiter);
    TrainedEncoder trained = train_encoder(t, c);
    const std::string dest = path_for(c, out, "encoder");
    if (auto parent = fs::path(dest).parent_path(); !parent.empty()) fs::create_directories(parent);
    trained.model.save(dest);
    if (auto p = optional_path(c, trace, "encoder_trace")) {
      auto f = open_report(*p);
      write_trace_csv(f, trained.trace);
    }
    std::printf("trained %zu steps; final loss %s; saved %s\n", trained.trace.size(),
                format_number(trained.trace.back().loss).c_str(), dest.c_str());
  });

  auto* train_ae = train->add_subcommand("autoencoder", "masked slot reconstruction");
  train_ae->add_option("--tables", tables, "CSV file or directory");
  train_ae->add_option("--encoder", encoder, "encoder checkpoint");
  train_ae->add_option("--out", out, "autoencoder checkpoint");
  train_ae->add_option("--trace", trace, "loss trace CSV");
  on(train_ae, [&] {
    const PipelineConfig c = load_config(g);
    const auto parsed = ingest(read_tables(path_for(c, tables, "tables"), c.delimiter), load_units(c));
    auto m = load_models(path_for(c, encoder, "encoder"), "");
    TrainedAutoencoder trained =
        fit_autoencoder(collect_blocks(*m->components, parsed), c, m->model.dim());
    const std::string dest = path_for(c, out, "autoencoder");
    if (auto parent = fs::path(dest).parent_path(); !parent.empty()) fs::create_directories(parent);
    trained.ae.save(dest);
    if (auto p = optional_path(c, trace, "autoencoder_trace")) {
      auto f = open_report(*p);
      f << "step,loss\n";
      for (std::size_t i = 0; i < trained.trace.size(); ++i) {
        f << i + 1 << ',' << format_number(trained.trace[i]) << '\n';
      }
    }
    std::printf("trained %zu steps; final loss %s; saved %s\n", trained.trace.size(),
                format_number(trained.trace.back()).c_str(), dest.c_str());
  });

  auto* embed = app.add_subcommand("embed", "aggregate composites per column or per row");
  std::string embed_kind;
  embed->add_option("kind", embed_kind, "columns or tuples")
      ->required()
      ->check(CLI::IsMember({"columns", "tuples"}));
  embed->add_option("--tables", tables, "CSV file or directory");
  embed->add_option("--encoder", encoder, "encoder checkpoint");
  embed->add_option("--autoencoder", autoencoder, "autoencoder checkpoint");
  embed->add_option("--out", out, "vector file");
  embed->add_option("--meta", meta, "JSON-lines sidecar (default <out>.jsonl)");
  on(embed, [&] {
    const PipelineConfig c = load_config(g);
    const auto parsed = ingest(read_tables(path_for(c, tables, "tables"), c.delimiter), load_units(c));
    auto m = load_models(path_for(c, encoder, "encoder"), path_for(c, autoencoder, "autoencoder"));
    const AggregateKind kind = embed_kind == "columns" ? AggregateKind::Column : AggregateKind::Tuple;
    const auto items = embed_items(*m->embedder, parsed, kind);
    const std::string dest = path_for(c, out, "vectors");
    if (auto parent = fs::path(dest).parent_path(); !parent.empty()) fs::create_directories(parent);
    write_items(items, dest, meta.empty() ? dest + ".jsonl" : resolve(meta), kind);
    std::printf("embedded %zu %s into %s\n", items.size(), embed_kind.c_str(), dest.c_str());
  });

  auto* idx = app.add_subcommand("index", "build or query a flat index");
  idx->require_subcommand(1);
  auto* idx_build = idx->add_subcommand("build", "index a vector file");
  idx_build->add_option("--vectors", vectors, "vector file");
  idx_build->add_option("--out", out, "index file");
  on(idx_build, [&] {
    const PipelineConfig c = load_config(g);
    const VectorSet set = read_vectors(path_for(c, vectors, "vectors"));
    FlatIndex built(set.dim);
    for (std::size_t i = 0; i < set.ids.size(); ++i) {
      built.add(set.ids[i], set.vectors.row(static_cast<Eigen::Index>(i)));
    }
    const std::string dest = path_for(c, out, "index");
    built.save(dest);
    std::printf("indexed %zu vectors of dim %d into %s\n", built.size(), built.dim(), dest.c_str());
  });

  auto* idx_query = idx->add_subcommand("query", "top-k neighbours as CSV");
  idx_query->add_option("--index", index, "index file");
  idx_query->add_option("--vectors", vectors, "query vectors (default: the indexed rows)");
  idx_query->add_option("--id", query_ids, "query id (repeatable; default: every query vector)");
  idx_query->add_option("--k", k, "neighbours per query")->check(CLI::PositiveNumber);
  idx_query->add_option("--out", out, "CSV output (default stdout)");
  on(idx_query, [&] {
    const PipelineConfig c = load_config(g);
    const FlatIndex built = FlatIndex::load(path_for(c, index, "index"));
    if (built.size() == 0) fail(ErrorCode::EmptyIndex, "index holds no vectors");
    std::vector<std::pair<std::string, RowVector>> queries;
    if (!vectors.empty()) {
      const VectorSet set = read_vectors(resolve(vectors));
      for (std::size_t i = 0; i < set.ids.size(); ++i) {
        queries.emplace_back(set.ids[i], set.vectors.row(static_cast<Eigen::Index>(i)));
      }
    } else {
      const auto ids = built.ids();
      for (std::size_t i = 0; i < ids.size(); ++i) queries.emplace_back(ids[i], built.vector(i));
    }
    if (!query_ids.empty()) {
      std::vector<std::pair<std::string, RowVector>> picked;
      for (const auto& id : query_ids) {
        auto it = std::find_if(queries.begin(), queries.end(), [&](const auto& q) { return q.first == id; });
        if (it == queries.end()) fail(ErrorCode::UnknownQueryId, "no vector with id " + id);
        picked.push_back(*it);
      }
      queries = std::move(picked);
    }
    std::ofstream file;
    if (!out.empty()) file = open_report(resolve(out));
    std::ostream& os = out.empty() ? std::cout : file;
    os << "query,rank,id,score\n";
    for (const auto& [id, v] : queries) {
      const auto hits = built.query(v, k, id);
      for (std::size_t r = 0; r < hits.size(); ++r) {
        os << id << ',' << r + 1 << ',' << hits[r].id << ',' << format_number(hits[r].score) << '\n';
      }
    }
  });

  auto* ev = app.add_subcommand("eval", "audits, retrieval metrics, probes and rotations");
  ev->require_subcommand(1);

  auto* ev_corr = ev->add_subcommand("correlations", "analytic vs embedding distance audits");
  ev_corr->add_option("--encoder", encoder, "encoder checkpoint (omit for magnitude only)");
  ev_corr->add_option("--autoencoder", autoencoder, "autoencoder checkpoint");
  ev_corr->add_option("--out", out, "per-pair CSV");
  on(ev_corr, [&] {
    const PipelineConfig c = load_config(g);
    AuditConfig ac;
    ac.seed = substream_seed(c.seed, "audit");
    const MagnitudeEmbedder mag(c.magnitude);
    std::vector<std::pair<std::string, KindEmbedding>> sources{
        {"magnitude", value_slots([&](double x) { return mag.embed(x); })},
        {"random", value_slots(random_value_embedding(c.magnitude.dim, substream_seed(c.seed, "random")))}};
    std::unique_ptr<Loaded> m;
    if (auto enc = optional_path(c, encoder, "encoder")) {
      m = load_models(*enc, optional_path(c, autoencoder, "autoencoder").value_or(""));
      sources.emplace_back("fused", value_slots([&](double x) { return m->components->value(x); }));
    }
    std::ofstream file;
    if (auto p = optional_path(c, out, "correlations")) file = open_report(*p);
    std::printf("%-10s %-9s %-6s %9s %9s\n", "source", "kind", "metric", "pearson", "spearman");
    bool header = true;
    for (KindTag kind : {KindTag::Scalar, KindTag::Range, KindTag::Gaussian}) {
      auto run = [&](const std::string& name, const KindEmbedding& e) {
        const auto results = correlation_audit(kind, ac, e);
        for (const auto& r : results) {
          std::printf("%-10s %-9s %-6s %9.4f %9.4f\n", name.c_str(), r.kind.c_str(), r.metric.c_str(),
                      r.pearson, r.spearman);
        }
        if (file.is_open() && name != "random") {
          std::ostringstream block;
          write_audit_csv(block, results);
          std::string text = block.str();
          if (!header) text = text.substr(text.find('\n') + 1);
          header = false;
          file << text;
        }
      };
      for (const auto& [name, e] : sources) run(name, e);
      if (m && m->embedder) {
        const char* layout = kind == KindTag::Scalar ? "Scalar" : kind == KindTag::Range ? "Range" : "Gaussian";
        run("composite", composite_of(*m->embedder, layout));
      }
    }
  });

  auto* ev_ret = ev->add_subcommand("retrieval", "Recall/MAP/MRR@k against ground truth");
  ev_ret->add_option("--index", index, "index file");
  ev_ret->add_option("--truth", truth, "ground truth JSON lines");
  ev_ret->add_option("--k", k, "cutoff")->check(CLI::PositiveNumber);
  ev_ret->add_option("--out", out, "CSV report");
  on(ev_ret, [&] {
    const PipelineConfig c = load_config(g);
    const FlatIndex built = FlatIndex::load(path_for(c, index, "index"));
    const GroundTruth gt = read_ground_truth(path_for(c, truth, "truth"));
    const auto ids = built.ids();
    std::map<std::string, RankedResult> results;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (gt.count(ids[i])) results[ids[i]] = built.query(built.vector(i), k, ids[i]);
    }
    const RetrievalScores s = evaluate_retrieval(results, gt, k);
    if (auto p = optional_path(c, out, "retrieval")) {
      auto f = open_report(*p);
      f << "metric,value\nrecall@" << k << ',' << format_number(s.recall) << "\nmap@" << k << ','
        << format_number(s.map) << "\nmrr@" << k << ',' << format_number(s.mrr) << "\nqueries,"
        << s.queries << '\n';
    }
    std::printf("queries   %zu\nRecall@%d  %.4f\nMAP@%d     %.4f\nMRR@%d     %.4f\n", s.queries, k,
                s.recall, k, s.map, k, s.mrr);
  });

  auto* ev_probe = ev->add_subcommand("probes", "list maximum, decoding and addition probes");
  ev_probe->add_option("--task", task, "list_max, decode or add (default all)")
      ->check(CLI::IsMember({"list_max", "decode", "add"}));
  ev_probe->add_option("--embedding", embedding, "fused, magnitude or random")
      ->check(CLI::IsMember({"fused", "magnitude", "random"}));
  ev_probe->add_option("--encoder", encoder, "encoder checkpoint (needed for fused)");
  ev_probe->add_option("--max-value", max_value, "integers in [0, max]")->check(CLI::PositiveNumber);
  ev_probe->add_option("--out", out, "CSV report");
  on(ev_probe, [&] {
    const PipelineConfig c = load_config(g);
    const MagnitudeEmbedder mag(c.magnitude);
    std::unique_ptr<Loaded> m;
    ValueEmbedding fn;
    if (embedding == "fused") {
      m = load_models(path_for(c, encoder, "encoder"), "");
      fn = [&](double x) { return m->components->value(x); };
    } else if (embedding == "magnitude") {
      fn = [&](double x) { return mag.embed(x); };
    } else {
      fn = random_value_embedding(c.magnitude.dim, substream_seed(c.seed, "random"));
    }
    std::vector<ProbeTask> tasks{ProbeTask::ListMax, ProbeTask::Decode, ProbeTask::Add};
    if (task == "list_max") tasks = {ProbeTask::ListMax};
    if (task == "decode") tasks = {ProbeTask::Decode};
    if (task == "add") tasks = {ProbeTask::Add};
    std::ofstream file;
    if (auto p = optional_path(c, out, "probes")) {
      file = open_report(*p);
      file << "task,embedding,metric,seed,value\n";
    }
    std::printf("%-9s %-10s %-9s %10s %10s\n", "task", "embedding", "metric", "mean", "stddev");
    for (ProbeTask t : tasks) {
      ProbeConfig pc;
      pc.task = t;
      pc.max_value = max_value;
      pc.seed = substream_seed(c.seed, "probes");
      const ProbeResult r = run_probe(pc, fn);
      std::printf("%-9s %-10s %-9s %10.4f %10.4f\n", std::string(to_string(t)).c_str(),
                  embedding.c_str(), r.metric.c_str(), r.mean, r.stddev);
      for (std::size_t s = 0; s < r.per_seed.size() && file.is_open(); ++s) {
        file << to_string(t) << ',' << embedding << ',' << r.metric << ',' << s << ','
             << format_number(r.per_seed[s]) << '\n';
      }
    }
  });

  auto* ev_rot = ev->add_subcommand("rotate", "similarity drop when one component changes");
  ev_rot->add_option("--encoder", encoder, "encoder checkpoint");
  ev_rot->add_option("--autoencoder", autoencoder, "autoencoder checkpoint");
  ev_rot->add_option("--attribute", attribute, "reference attribute");
  ev_rot->add_option("--value", value, "reference value");
  ev_rot->add_option("--unit", unit, "reference unit");
  ev_rot->add_option("--to-attribute", to_attribute, "rotated attribute");
  ev_rot->add_option("--to-value", to_value, "rotated value");
  ev_rot->add_option("--to-unit", to_unit, "rotated unit");
  ev_rot->add_option("--out", out, "CSV report");
  on(ev_rot, [&] {
    const PipelineConfig c = load_config(g);
    auto m = load_models(path_for(c, encoder, "encoder"), path_for(c, autoencoder, "autoencoder"));
    const auto rows = rotation_ablation(*m->embedder, ParsedCell{attribute, Scalar{value}, unit},
                                        {{RotatedPart::Value, "", to_value},
                                         {RotatedPart::Attribute, to_attribute, 0},
                                         {RotatedPart::Unit, to_unit, 0}});
    std::ofstream file;
    if (auto p = optional_path(c, out, "rotation")) {
      file = open_report(*p);
      file << "rotation,similarity,drop\n";
    }
    for (const auto& r : rows) {
      std::printf("%-36s %.6f %.6f\n", r.label.c_str(), r.similarity, r.drop);
      if (file.is_open()) {
        file << '"' << r.label << "\"," << format_number(r.similarity) << ',' << format_number(r.drop) << '\n';
      }
    }
  });

  try {
    app.parse(argc, argv);
    for (auto& run : runs) run();
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::fprintf(stderr, "error[%s]: %s\n", std::string(to_string(e.code())).c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error[Io]: %s\n", e.what());
    return 2;
  }
  return 0;
}
