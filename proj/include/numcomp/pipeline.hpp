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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "numcomp/composite.hpp"
#include "numcomp/csv.hpp"
#include "numcomp/eval.hpp"
#include "numcomp/fusion.hpp"
#include "numcomp/index.hpp"
#include "numcomp/metrics.hpp"
#include "numcomp/units.hpp"

namespace numcomp {

/// Every knob of an end-to-end run. Seeds for the individual stages are
/// derived from `seed` by name.
struct PipelineConfig {
  std::uint64_t seed = 0;
  EncoderConfig encoder;
  int vocab_buckets = Vocabulary::kDefaultBuckets;
  MagnitudeConfig magnitude;
  FusionConfig fusion;
  TrainConfig train;
  int code_dim = 64;
  AutoencoderTrainConfig autoencoder;
  char delimiter = ',';
  std::string unit_table;  // optional extra table merged over the seed table
  std::map<std::string, std::string> paths;  // "paths.*" keys, resolved by the caller

  /// Propagates `seed` into the stage configs and the embedder dim.
  void finalize();
};

/// Parses `key = value` lines with `[section]` headers ("#" comments) into
/// dotted keys ("train.steps").
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::string& path);
/// Applies known keys; throws InvalidArgument for unknown keys or bad values.
void apply_config(PipelineConfig& config, const std::map<std::string, std::string>& values);
std::string describe_config(const PipelineConfig& config);

UnitTable load_units(const PipelineConfig& config);

/// A table with every cell parsed. Numeric cells without a unit take the
/// column's majority unit.
struct IngestedTable {
  Table table;
  std::vector<std::string> attributes;          // header minus unit annotation
  std::vector<std::vector<ParsedCell>> columns;  // [column][row]
};

IngestedTable ingest_table(const Table& table, const UnitTable& units);
std::vector<IngestedTable> ingest(const std::vector<Table>& tables, const UnitTable& units);
std::vector<Table> read_tables(const std::string& dir_or_file, char delimiter = ',');

/// Column serializations (split into chunks that fit `max_length`) followed
/// by row serializations; rows that do not fit are skipped.
std::vector<TokenSequence> training_sequences(const std::vector<Table>& tables,
                                              std::size_t max_length);
Vocabulary build_vocabulary(const std::vector<TokenSequence>& sequences, int buckets);

struct TrainedEncoder {
  NumeralModel model;
  std::vector<TraceRow> trace;
};

/// Builds the vocabulary from the tables and trains with masked numeral
/// prediction.
TrainedEncoder train_encoder(const std::vector<Table>& tables, const PipelineConfig& config);

/// One slot block per non-empty cell.
std::vector<SlotBlock> collect_blocks(const ComponentEncoder& components,
                                      const std::vector<IngestedTable>& tables);

struct TrainedAutoencoder {
  Autoencoder ae;
  std::vector<double> trace;
};

TrainedAutoencoder fit_autoencoder(const std::vector<SlotBlock>& blocks,
                                   const PipelineConfig& config, int slot_dim);

struct EmbeddedItem {
  std::string id;
  RowVector vector;
  std::string table;
  std::size_t index = 0;
  std::string header;
  std::string layout;
};

/// Aggregated (summed) composites per column or per row. Empty cells are
/// skipped; items with no cells are omitted.
std::vector<EmbeddedItem> embed_items(const CompositeEmbedder& embedder,
                                      const std::vector<IngestedTable>& tables,
                                      AggregateKind kind);

void write_items(const std::vector<EmbeddedItem>& items, const std::string& vectors_path,
                 const std::string& meta_path, AggregateKind kind);

FlatIndex build_index(const std::vector<EmbeddedItem>& items);

/// Queries the index with each item that has ground truth, excluding the
/// item itself, and scores the rankings.
RetrievalScores evaluate_items(const std::vector<EmbeddedItem>& items, const GroundTruth& truth,
                               int k, std::map<std::string, RankedResult>* rankings = nullptr);

}  // namespace numcomp
