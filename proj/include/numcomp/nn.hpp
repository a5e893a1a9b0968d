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
#include <string>
#include <vector>

#include "numcomp/linalg.hpp"
#include "numcomp/rng.hpp"

namespace numcomp::nn {

/// A trainable tensor with its gradient and Adam moments.
struct Param {
  Matrix value;
  Matrix grad;
  Matrix m;
  Matrix v;

  Param() = default;
  Param(Eigen::Index rows, Eigen::Index cols);
  void zero_grad() { grad.setZero(); }
};

void init_normal(Param& p, Rng& rng, double stddev);

struct AdamOptions {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}
  void step(const std::vector<Param*>& params);
  long steps() const { return t_; }

 private:
  AdamOptions options_;
  long t_ = 0;
};

void zero_grads(const std::vector<Param*>& params);
bool grads_finite(const std::vector<Param*>& params);

double gelu(double x);
double gelu_grad(double x);

/// y = x W + b, with W stored in x out.
struct Linear {
  Param w;
  Param b;

  Linear() = default;
  Linear(int in, int out);
  void init(Rng& rng, double stddev);
  Matrix forward(const Matrix& x) const;
  /// Accumulates dW, db and returns dx.
  Matrix backward(const Matrix& x, const Matrix& dy);
  void collect(std::vector<Param*>& out);
};

/// Row-wise normalization with learned gain and bias.
struct LayerNorm {
  Param gain;
  Param bias;
  double eps = 1e-5;

  struct Cache {
    Matrix xhat;
    Vector inv_std;
  };

  LayerNorm() = default;
  explicit LayerNorm(int dim);
  Matrix forward(const Matrix& x, Cache* cache = nullptr) const;
  Matrix backward(const Cache& cache, const Matrix& dy);
  void collect(std::vector<Param*>& out);
};

/// Multi-head scaled dot-product self-attention with an output projection.
struct MultiHeadAttention {
  Linear wq, wk, wv, wo;
  int heads = 1;

  struct Cache {
    Matrix x, q, k, v, mixed;
    std::vector<Matrix> probs;  // one l x l matrix per head
  };

  MultiHeadAttention() = default;
  MultiHeadAttention(int dim, int heads);
  void init(Rng& rng, double stddev);
  Matrix forward(const Matrix& x, Cache* cache = nullptr) const;
  Matrix backward(const Cache& cache, const Matrix& dy);
  void collect(std::vector<Param*>& out);
};

/// Post-norm encoder layer: h1 = LN(x + MHA(x)); out = LN(h1 + FF(h1)),
/// FF = GELU feed-forward of width 4d.
struct TransformerLayer {
  MultiHeadAttention attn;
  LayerNorm ln1;
  Linear ff1, ff2;
  LayerNorm ln2;

  struct Cache {
    MultiHeadAttention::Cache attn;
    LayerNorm::Cache ln1, ln2;
    Matrix h1, pre_act;
  };

  TransformerLayer() = default;
  TransformerLayer(int dim, int heads);
  void init(Rng& rng, double stddev);
  int dim() const { return static_cast<int>(ln1.gain.value.cols()); }
  Matrix forward(const Matrix& x, Cache* cache = nullptr) const;
  Matrix backward(const Cache& cache, const Matrix& dy);
  void collect(std::vector<Param*>& out);
};

Matrix softmax_rows(const Matrix& s);

/// Writes/reads parameter values in the given order (float32 tensors).
void save_params(std::ostream& out, const std::vector<Param*>& params);
void load_params(std::istream& in, const std::vector<Param*>& params);

}  // namespace numcomp::nn
