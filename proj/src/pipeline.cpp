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

#include "numcomp/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "numcomp/corpus.hpp"
#include "numcomp/error.hpp"
#include "numcomp/serialize.hpp"
#include "numcomp/text.hpp"

namespace numcomp {
namespace {

std::string unquote(std::string_view v) {
  v = trim(v);
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    return std::string(v.substr(1, v.size() - 2));
  }
  return std::string(v);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::InvalidArgument, "config key " + key + " expects a number, got '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used == v.size()) return i;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::InvalidArgument, "config key " + key + " expects an integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string l = to_lower(v);
  if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
  if (l == "false" || l == "0" || l == "no" || l == "off") return false;
  fail(ErrorCode::InvalidArgument, "config key " + key + " expects true or false, got '" + v + "'");
}

std::vector<std::vector<std::string>> chunk_column(const std::string& header,
                                                   const std::vector<std::string>& cells,
                                                   std::size_t max_length) {
  std::vector<std::vector<std::string>> chunks;
  std::vector<std::string> current;
  for (const auto& cell : cells) {
    current.push_back(cell);
    try {
      serialize_column(header, current, max_length);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SequenceTooLong) throw;
      current.pop_back();
      if (!current.empty()) chunks.push_back(current);
      current = {cell};
      try {
        serialize_column(header, current, max_length);
      } catch (const Error&) {
        current.clear();  // a single cell that never fits is skipped
      }
    }
  }
  if (!current.empty()) chunks.push_back(current);
  return chunks;
}

bool blank(const std::string& raw) { return trim(raw).empty(); }

}  // namespace

void PipelineConfig::finalize() {
  encoder.seed = substream_seed(seed, "encoder");
  magnitude.seed = substream_seed(seed, "magnitude");
  magnitude.dim = encoder.dim;
  train.seed = substream_seed(seed, "numeral-training");
  autoencoder.seed = substream_seed(seed, "autoencoder-training");
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view l = line;
    if (const auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    l = trim(l);
    if (l.empty()) continue;
    if (l.front() == '[') {
      if (l.back() != ']') {
        fail(ErrorCode::InvalidArgument, "config line " + std::to_string(lineno) +
                                             ": unterminated section header");
      }
      section = std::string(trim(l.substr(1, l.size() - 2)));
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::InvalidArgument,
           "config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key(trim(l.substr(0, eq)));
    out[section.empty() ? key : section + "." + key] = unquote(l.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_config(PipelineConfig& c, const std::map<std::string, std::string>& values) {
  for (const auto& [key, v] : values) {
    if (key == "seed") c.seed = static_cast<std::uint64_t>(to_int(key, v));
    else if (key == "encoder.dim") c.encoder.dim = static_cast<int>(to_int(key, v));
    else if (key == "encoder.heads") c.encoder.heads = static_cast<int>(to_int(key, v));
    else if (key == "encoder.layers") c.encoder.layers = static_cast<int>(to_int(key, v));
    else if (key == "encoder.max_length") c.encoder.max_length = static_cast<int>(to_int(key, v));
    else if (key == "encoder.init_std") c.encoder.init_std = to_double(key, v);
    else if (key == "encoder.buckets") c.vocab_buckets = static_cast<int>(to_int(key, v));
    else if (key == "magnitude.min") c.magnitude.min = to_double(key, v);
    else if (key == "magnitude.max") c.magnitude.max = to_double(key, v);
    else if (key == "magnitude.log_map") c.magnitude.log_map = to_bool(key, v);
    else if (key == "fusion.use_magnitude") c.fusion.use_magnitude = to_bool(key, v);
    else if (key == "fusion.magnitude_scale") c.fusion.magnitude_scale = to_double(key, v);
    else if (key == "train.steps") c.train.steps = static_cast<int>(to_int(key, v));
    else if (key == "train.batch") c.train.batch = static_cast<int>(to_int(key, v));
    else if (key == "train.lr") c.train.adam.lr = to_double(key, v);
    else if (key == "train.beta1") c.train.adam.beta1 = to_double(key, v);
    else if (key == "train.beta2") c.train.adam.beta2 = to_double(key, v);
    else if (key == "train.eps") c.train.adam.eps = to_double(key, v);
    else if (key == "train.mask_ratio") c.train.mask_ratio = to_double(key, v);
    else if (key == "train.freeze_encoder") c.train.freeze_encoder = to_bool(key, v);
    else if (key == "train.center_magnitude_head") c.train.center_magnitude_head = to_bool(key, v);
    else if (key == "autoencoder.code_dim") c.code_dim = static_cast<int>(to_int(key, v));
    else if (key == "autoencoder.steps") c.autoencoder.steps = static_cast<int>(to_int(key, v));
    else if (key == "autoencoder.batch") c.autoencoder.batch = static_cast<int>(to_int(key, v));
    else if (key == "autoencoder.lr") c.autoencoder.lr = to_double(key, v);
    else if (key == "data.delimiter") {
      if (v.size() != 1 && v != "\\t") {
        fail(ErrorCode::InvalidArgument, "data.delimiter must be a single character");
      }
      c.delimiter = v == "\\t" ? '\t' : v[0];
    } else if (key == "data.unit_table") c.unit_table = v;
    else if (key.rfind("paths.", 0) == 0) c.paths[key.substr(6)] = v;
    else fail(ErrorCode::InvalidArgument, "unknown config key: " + key);
  }
  if (c.encoder.dim < 2 || c.encoder.heads < 1 || c.encoder.layers < 0 ||
      c.encoder.max_length < 4 || c.code_dim < 1 || c.vocab_buckets < 1) {
    fail(ErrorCode::InvalidArgument, "dims must be positive");
  }
  if (!(c.train.mask_ratio > 0.0 && c.train.mask_ratio < 1.0)) {
    fail(ErrorCode::InvalidArgument, "train.mask_ratio must lie in (0, 1)");
  }
}

std::string describe_config(const PipelineConfig& c) {
  std::ostringstream o;
  o << "seed = " << c.seed << "\n\n[encoder]\ndim = " << c.encoder.dim
    << "\nheads = " << c.encoder.heads << "\nlayers = " << c.encoder.layers
    << "\nmax_length = " << c.encoder.max_length << "\ninit_std = " << format_number(c.encoder.init_std)
    << "\nbuckets = " << c.vocab_buckets << "\n\n[magnitude]\nmin = " << format_number(c.magnitude.min)
    << "\nmax = " << format_number(c.magnitude.max)
    << "\nlog_map = " << (c.magnitude.log_map ? "true" : "false")
    << "\n\n[fusion]\nuse_magnitude = " << (c.fusion.use_magnitude ? "true" : "false")
    << "\nmagnitude_scale = " << format_number(c.fusion.magnitude_scale)
    << "\n\n[train]\nsteps = " << c.train.steps << "\nbatch = " << c.train.batch
    << "\nlr = " << format_number(c.train.adam.lr) << "\nmask_ratio = " << format_number(c.train.mask_ratio)
    << "\nfreeze_encoder = " << (c.train.freeze_encoder ? "true" : "false")
    << "\ncenter_magnitude_head = " << (c.train.center_magnitude_head ? "true" : "false")
    << "\n\n[autoencoder]\ncode_dim = " << c.code_dim << "\nsteps = " << c.autoencoder.steps
    << "\nbatch = " << c.autoencoder.batch << "\nlr = " << format_number(c.autoencoder.lr) << "\n";
  if (!c.paths.empty()) {
    o << "\n[paths]\n";
    for (const auto& [k, v] : c.paths) o << k << " = \"" << v << "\"\n";
  }
  return o.str();
}

UnitTable load_units(const PipelineConfig& config) {
  UnitTable units = UnitTable::seed();
  if (!config.unit_table.empty()) units.merge(UnitTable::load(config.unit_table));
  return units;
}

IngestedTable ingest_table(const Table& table, const UnitTable& units) {
  IngestedTable out;
  out.table = table;
  for (std::size_t j = 0; j < table.headers.size(); ++j) {
    const std::string& header = table.headers[j];
    out.attributes.push_back(attribute_name(header, units));
    std::vector<ParsedCell> cells;
    cells.reserve(table.rows.size());
    for (const auto& row : table.rows) cells.push_back(parse_cell(row[j], header, units));
    if (const auto unit = infer_unit(cells)) {
      for (auto& cell : cells) {
        if (cell.is_numeric() && !cell.unit) cell.unit = unit;
      }
    }
    out.columns.push_back(std::move(cells));
  }
  return out;
}

std::vector<IngestedTable> ingest(const std::vector<Table>& tables, const UnitTable& units) {
  std::vector<IngestedTable> out;
  out.reserve(tables.size());
  for (const auto& t : tables) out.push_back(ingest_table(t, units));
  return out;
}

std::vector<Table> read_tables(const std::string& dir_or_file, char delimiter) {
  namespace fs = std::filesystem;
  fs::path root(dir_or_file);
  if (!fs::exists(root)) fail(ErrorCode::Io, "no such file or directory: " + dir_or_file);
  if (!fs::is_directory(root)) return {read_csv(root.string(), delimiter)};
  if (fs::is_directory(root / "tables")) root /= "tables";
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) fail(ErrorCode::EmptyCorpus, "no .csv files under " + root.string());
  std::vector<Table> tables;
  for (const auto& f : files) tables.push_back(read_csv(f.string(), delimiter));
  return tables;
}

std::vector<TokenSequence> training_sequences(const std::vector<Table>& tables,
                                              std::size_t max_length) {
  std::vector<TokenSequence> out;
  for (const auto& table : tables) {
    for (std::size_t j = 0; j < table.headers.size(); ++j) {
      std::vector<std::string> cells;
      for (const auto& row : table.rows) {
        if (!blank(row[j])) cells.push_back(row[j]);
      }
      for (const auto& chunk : chunk_column(table.headers[j], cells, max_length)) {
        out.push_back(serialize_column(table.headers[j], chunk, max_length));
      }
    }
    for (const auto& row : table.rows) {
      try {
        out.push_back(serialize_row(table.headers, row, max_length));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SequenceTooLong) throw;
      }
    }
  }
  return out;
}

Vocabulary build_vocabulary(const std::vector<TokenSequence>& sequences, int buckets) {
  Vocabulary vocab(buckets);
  for (const auto& seq : sequences) vocab.add_words(seq);
  return vocab;
}

TrainedEncoder train_encoder(const std::vector<Table>& tables, const PipelineConfig& config) {
  std::vector<TokenSequence> seqs =
      training_sequences(tables, static_cast<std::size_t>(config.encoder.max_length));
  if (seqs.empty()) fail(ErrorCode::EmptyCorpus, "no training sequences");
  Vocabulary vocab = build_vocabulary(seqs, config.vocab_buckets);
  for (auto& seq : seqs) vocab.assign_ids(seq);
  MagnitudeConfig mag = config.magnitude;
  mag.dim = config.encoder.dim;
  NumeralModel model(Encoder(config.encoder, std::move(vocab)), MagnitudeEmbedder(mag),
                     config.fusion);
  auto trace = train_numeral_model(model, seqs, config.train);
  return {std::move(model), std::move(trace)};
}

std::vector<SlotBlock> collect_blocks(const ComponentEncoder& components,
                                      const std::vector<IngestedTable>& tables) {
  std::vector<SlotBlock> blocks;
  for (const auto& t : tables) {
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      for (std::size_t i = 0; i < t.columns[j].size(); ++i) {
        if (blank(t.table.rows[i][j])) continue;
        ParsedCell cell = t.columns[j][i];
        cell.attribute = t.attributes[j];
        blocks.push_back(components.block(cell));
      }
    }
  }
  return blocks;
}

TrainedAutoencoder fit_autoencoder(const std::vector<SlotBlock>& blocks,
                                   const PipelineConfig& config, int slot_dim) {
  AutoencoderConfig ac;
  ac.input_dim = kSlotCount * slot_dim;
  ac.code_dim = config.code_dim;
  ac.seed = substream_seed(config.seed, "autoencoder-init");
  Autoencoder ae(ac);
  auto trace = train_autoencoder(ae, blocks, config.autoencoder);
  return {std::move(ae), std::move(trace)};
}

std::vector<EmbeddedItem> embed_items(const CompositeEmbedder& embedder,
                                      const std::vector<IngestedTable>& tables,
                                      AggregateKind kind) {
  std::vector<EmbeddedItem> items;
  for (const auto& t : tables) {
    const std::size_t rows = t.table.rows.size();
    const std::size_t cols = t.columns.size();
    const std::size_t outer = kind == AggregateKind::Column ? cols : rows;
    const std::size_t inner = kind == AggregateKind::Column ? rows : cols;
    for (std::size_t a = 0; a < outer; ++a) {
      std::vector<RowVector> vectors;
      std::map<std::string, int> layouts;
      for (std::size_t b = 0; b < inner; ++b) {
        const std::size_t i = kind == AggregateKind::Column ? b : a;
        const std::size_t j = kind == AggregateKind::Column ? a : b;
        if (blank(t.table.rows[i][j])) continue;
        ParsedCell cell = t.columns[j][i];
        cell.attribute = t.attributes[j];
        vectors.push_back(embedder.embed(cell));
        ++layouts[std::string(to_string(layout_of(cell)))];
      }
      if (vectors.empty()) continue;
      EmbeddedItem item;
      item.table = t.table.name;
      item.index = a;
      if (kind == AggregateKind::Column) {
        item.id = column_id(t.table.name, a);
        item.header = t.table.headers[a];
        item.vector = column_embedding(vectors, item.id).vector;
      } else {
        item.id = tuple_id(t.table.name, a);
        item.vector = tuple_embedding(vectors, item.id).vector;
      }
      item.layout = std::max_element(layouts.begin(), layouts.end(), [](const auto& x, const auto& y) {
                      return x.second < y.second;
                    })->first;
      items.push_back(std::move(item));
    }
  }
  return items;
}

void write_items(const std::vector<EmbeddedItem>& items, const std::string& vectors_path,
                 const std::string& meta_path, AggregateKind kind) {
  VectorSet set;
  set.dim = items.empty() ? 1 : static_cast<int>(items.front().vector.size());
  set.vectors.resize(static_cast<Eigen::Index>(items.size()), set.dim);
  for (std::size_t i = 0; i < items.size(); ++i) {
    set.ids.push_back(items[i].id);
    set.vectors.row(static_cast<Eigen::Index>(i)) = items[i].vector;
  }
  write_vectors(vectors_path, set);
  std::ofstream meta(meta_path, std::ios::binary);
  if (!meta) fail(ErrorCode::Io, "cannot write " + meta_path);
  for (const auto& item : items) {
    nlohmann::ordered_json j;
    j["id"] = item.id;
    j["kind"] = std::string(to_string(kind));
    j["table"] = item.table;
    j["index"] = item.index;
    if (kind == AggregateKind::Column) j["header"] = item.header;
    j["layout"] = item.layout;
    meta << j.dump() << '\n';
  }
}

FlatIndex build_index(const std::vector<EmbeddedItem>& items) {
  if (items.empty()) fail(ErrorCode::EmptyIndex, "nothing to index");
  FlatIndex index(static_cast<int>(items.front().vector.size()));
  for (const auto& item : items) index.add(item.id, item.vector);
  return index;
}

RetrievalScores evaluate_items(const std::vector<EmbeddedItem>& items, const GroundTruth& truth,
                               int k, std::map<std::string, RankedResult>* rankings) {
  const FlatIndex index = build_index(items);
  std::map<std::string, RankedResult> results;
  for (const auto& item : items) {
    if (!truth.count(item.id)) continue;
    results[item.id] = index.query(item.vector, k, item.id);
  }
  const RetrievalScores scores = evaluate_retrieval(results, truth, k);
  if (rankings) *rankings = std::move(results);
  return scores;
}

}  // namespace numcomp
