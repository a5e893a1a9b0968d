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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "numcomp/cell.hpp"
#include "numcomp/fusion.hpp"

namespace numcomp {

enum class Slot { Attribute = 0, Value1 = 1, Value2 = 2, Value3 = 3, Unit = 4 };
inline constexpr int kSlotCount = 5;

/// Which value slots a cell may occupy. Text cells keep only the attribute
/// and unit slots.
enum class Layout { Scalar, Range, Gaussian, Text };

std::string_view to_string(Slot slot);
std::string_view to_string(Layout layout);
Layout layout_of(const ParsedCell& cell);

struct Component {
  Slot slot;
  RowVector vector;
};

/// |S| = 5 slots of width d laid out as [attr, v1, v2, v3, unit]; inactive
/// slots are zero.
struct SlotBlock {
  int dim = 0;
  Layout layout = Layout::Scalar;
  RowVector values;
  std::array<bool, kSlotCount> mask{};

  auto slot(Slot s) const { return values.segment(static_cast<int>(s) * dim, dim); }
  /// The per-coordinate mask M (slot bits broadcast over d).
  RowVector mask_vector() const;
  std::string mask_string() const;
};

/// Places components in the fixed slot order. Throws DuplicateSlot, or
/// ShapeMismatch when a component is not d wide.
SlotBlock assemble(std::span<const Component> components, int dim, Layout layout);

/// Produces slot embeddings from a trained numeral model:
/// attribute = mean fused output row over the attribute words of "[CLS] attr [SEP]",
/// value = the refined numeral row of "[CLS] x [SEP]",
/// unit = mean token embedding of the canonical unit's words.
/// Lookups are memoized; safe to share across threads.
class ComponentEncoder {
 public:
  explicit ComponentEncoder(const NumeralModel& model);

  int dim() const { return model_.dim(); }
  std::optional<RowVector> attribute(std::string_view attribute) const;
  RowVector value(double x) const;
  std::optional<RowVector> unit(std::string_view canonical) const;

  /// Components of a numeric cell; throws TextCellUnsupported for Text.
  std::vector<Component> components(const ParsedCell& cell) const;
  /// Block for any cell; Text cells fall back to the attribute and unit slots.
  SlotBlock block(const ParsedCell& cell) const;

 private:
  const NumeralModel& model_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::optional<RowVector>> attributes_;
  mutable std::map<double, RowVector> values_;
};

struct AutoencoderConfig {
  int input_dim = kSlotCount * 64;
  int code_dim = 64;
  std::uint64_t seed = 0;
};

/// Tied-weight linear autoencoder: z = W E, reconstruction W^T z, and the
/// composite output LayerNorm(z) with fixed gain 1 and bias 0.
class Autoencoder {
 public:
  explicit Autoencoder(AutoencoderConfig config = {});

  int input_dim() const { return static_cast<int>(w.cols()); }
  int code_dim() const { return static_cast<int>(w.rows()); }

  RowVector code(const SlotBlock& block) const;
  /// The composite embedding.
  RowVector project(const SlotBlock& block) const;
  /// || M (W^T W E - E) ||^2; optionally accumulates dL/dW.
  double loss(const SlotBlock& block, Matrix* grad = nullptr) const;

  void save(std::ostream& out) const;
  static Autoencoder load(std::istream& in);
  void save(const std::string& path) const;
  static Autoencoder load(const std::string& path);

  Matrix w;
  RowVector gain;
  RowVector bias;
  double eps = 1e-5;

 private:
  void check(const SlotBlock& block) const;
};

struct AutoencoderTrainConfig {
  int steps = 300;
  int batch = 32;
  double lr = 1e-3;
  std::uint64_t seed = 0;
};

/// Adam on the mean masked reconstruction loss over minibatches. Returns the
/// per-step loss trace.
std::vector<double> train_autoencoder(Autoencoder& ae, const std::vector<SlotBlock>& blocks,
                                      const AutoencoderTrainConfig& config);

}  // namespace numcomp

namespace numcomp {

/// Which parts of the composite are kept when embedding a cell.
enum class Ablation {
  None,
  /// Only the attribute slot: the composite structure is removed.
  AttributeOnly,
};

/// Cell -> composite embedding through a ComponentEncoder and a trained Autoencoder.
class CompositeEmbedder {
 public:
  CompositeEmbedder(const ComponentEncoder& components, const Autoencoder& ae,
                    Ablation ablation = Ablation::None);

  SlotBlock block(const ParsedCell& cell) const;
  RowVector embed(const ParsedCell& cell) const;
  const ComponentEncoder& components() const { return components_; }
  const Autoencoder& autoencoder() const { return ae_; }

 private:
  const ComponentEncoder& components_;
  const Autoencoder& ae_;
  Ablation ablation_;
};

}  // namespace numcomp
