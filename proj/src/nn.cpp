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

#include "numcomp/nn.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "numcomp/error.hpp"
#include "numcomp/io.hpp"

namespace numcomp::nn {

Param::Param(Eigen::Index rows, Eigen::Index cols)
    : value(Matrix::Zero(rows, cols)),
      grad(Matrix::Zero(rows, cols)),
      m(Matrix::Zero(rows, cols)),
      v(Matrix::Zero(rows, cols)) {}

void init_normal(Param& p, Rng& rng, double stddev) {
  std::normal_distribution<double> normal(0.0, stddev);
  double* d = p.value.data();
  for (Eigen::Index i = 0; i < p.value.size(); ++i) d[i] = normal(rng);
}

void Adam::step(const std::vector<Param*>& params) {
  ++t_;
  const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
  for (Param* p : params) {
    p->m = options_.beta1 * p->m + (1.0 - options_.beta1) * p->grad;
    p->v = options_.beta2 * p->v + (1.0 - options_.beta2) * p->grad.cwiseAbs2();
    p->value.array() -= options_.lr * (p->m.array() / c1) /
                        ((p->v.array() / c2).sqrt() + options_.eps);
  }
}

void zero_grads(const std::vector<Param*>& params) {
  for (Param* p : params) p->zero_grad();
}

bool grads_finite(const std::vector<Param*>& params) {
  for (const Param* p : params) {
    if (!p->grad.allFinite()) return false;
  }
  return true;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double gelu_grad(double x) {
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2)) + x * pdf;
}

Linear::Linear(int in, int out) : w(in, out), b(1, out) {}

void Linear::init(Rng& rng, double stddev) {
  init_normal(w, rng, stddev);
  b.value.setZero();
}

Matrix Linear::forward(const Matrix& x) const {
  if (x.cols() != w.value.rows()) {
    fail(ErrorCode::ShapeMismatch, "linear input has " + std::to_string(x.cols()) +
                                       " columns; expected " + std::to_string(w.value.rows()));
  }
  Matrix y = x * w.value;
  y.rowwise() += b.value.row(0);
  return y;
}

Matrix Linear::backward(const Matrix& x, const Matrix& dy) {
  w.grad.noalias() += x.transpose() * dy;
  b.grad.row(0) += dy.colwise().sum();
  return dy * w.value.transpose();
}

void Linear::collect(std::vector<Param*>& out) {
  out.push_back(&w);
  out.push_back(&b);
}

LayerNorm::LayerNorm(int dim) : gain(1, dim), bias(1, dim) { gain.value.setOnes(); }

Matrix LayerNorm::forward(const Matrix& x, Cache* cache) const {
  const Eigen::Index n = x.cols();
  if (n != gain.value.cols()) fail(ErrorCode::ShapeMismatch, "layer norm width mismatch");
  Matrix xhat(x.rows(), n);
  Vector inv_std(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double mean = x.row(i).mean();
    const double var = (x.row(i).array() - mean).square().mean();
    inv_std(i) = 1.0 / std::sqrt(var + eps);
    xhat.row(i) = (x.row(i).array() - mean) * inv_std(i);
  }
  Matrix y = xhat.array().rowwise() * gain.value.row(0).array();
  y.rowwise() += bias.value.row(0);
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

Matrix LayerNorm::backward(const Cache& cache, const Matrix& dy) {
  gain.grad.row(0) += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
  bias.grad.row(0) += dy.colwise().sum();
  const Matrix dxhat = dy.array().rowwise() * gain.value.row(0).array();
  const double n = static_cast<double>(dy.cols());
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index i = 0; i < dy.rows(); ++i) {
    const double sum = dxhat.row(i).sum();
    const double dot = dxhat.row(i).dot(cache.xhat.row(i));
    dx.row(i) = cache.inv_std(i) / n *
                (n * dxhat.row(i).array() - sum - cache.xhat.row(i).array() * dot);
  }
  return dx;
}

void LayerNorm::collect(std::vector<Param*>& out) {
  out.push_back(&gain);
  out.push_back(&bias);
}

Matrix softmax_rows(const Matrix& s) {
  Matrix p(s.rows(), s.cols());
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double mx = s.row(i).maxCoeff();
    p.row(i) = (s.row(i).array() - mx).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

MultiHeadAttention::MultiHeadAttention(int dim, int heads_)
    : wq(dim, dim), wk(dim, dim), wv(dim, dim), wo(dim, dim), heads(heads_) {
  if (heads_ < 1 || dim % heads_ != 0) {
    fail(ErrorCode::InvalidArgument, "model dim must be divisible by the head count");
  }
}

void MultiHeadAttention::init(Rng& rng, double stddev) {
  wq.init(rng, stddev);
  wk.init(rng, stddev);
  wv.init(rng, stddev);
  wo.init(rng, stddev);
}

Matrix MultiHeadAttention::forward(const Matrix& x, Cache* cache) const {
  const Eigen::Index l = x.rows();
  const Eigen::Index d = wq.w.value.rows();
  if (x.cols() != d) fail(ErrorCode::ShapeMismatch, "attention input width mismatch");
  const Eigen::Index dk = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  Matrix q = wq.forward(x);
  Matrix k = wk.forward(x);
  Matrix v = wv.forward(x);
  Matrix mixed(l, d);
  std::vector<Matrix> probs;
  probs.reserve(static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    const auto qh = q.middleCols(h * dk, dk);
    const auto kh = k.middleCols(h * dk, dk);
    const auto vh = v.middleCols(h * dk, dk);
    Matrix p = softmax_rows((qh * kh.transpose()) * scale);
    mixed.middleCols(h * dk, dk).noalias() = p * vh;
    probs.push_back(std::move(p));
  }
  Matrix y = wo.forward(mixed);
  if (cache) {
    cache->x = x;
    cache->q = std::move(q);
    cache->k = std::move(k);
    cache->v = std::move(v);
    cache->mixed = std::move(mixed);
    cache->probs = std::move(probs);
  }
  return y;
}

Matrix MultiHeadAttention::backward(const Cache& c, const Matrix& dy) {
  const Eigen::Index l = c.x.rows();
  const Eigen::Index d = c.x.cols();
  const Eigen::Index dk = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  const Matrix dmixed = wo.backward(c.mixed, dy);
  Matrix dq(l, d), dk_all(l, d), dv(l, d);
  for (int h = 0; h < heads; ++h) {
    const Matrix& p = c.probs[static_cast<std::size_t>(h)];
    const auto dout = dmixed.middleCols(h * dk, dk);
    const Matrix dp = dout * c.v.middleCols(h * dk, dk).transpose();
    dv.middleCols(h * dk, dk).noalias() = p.transpose() * dout;
    const Vector rowdot = (dp.array() * p.array()).rowwise().sum();
    const Matrix ds = (p.array() * (dp.colwise() - rowdot).array()).matrix() * scale;
    dq.middleCols(h * dk, dk).noalias() = ds * c.k.middleCols(h * dk, dk);
    dk_all.middleCols(h * dk, dk).noalias() = ds.transpose() * c.q.middleCols(h * dk, dk);
  }
  Matrix dx = wq.backward(c.x, dq);
  dx += wk.backward(c.x, dk_all);
  dx += wv.backward(c.x, dv);
  return dx;
}

void MultiHeadAttention::collect(std::vector<Param*>& out) {
  wq.collect(out);
  wk.collect(out);
  wv.collect(out);
  wo.collect(out);
}

TransformerLayer::TransformerLayer(int dim, int heads)
    : attn(dim, heads), ln1(dim), ff1(dim, 4 * dim), ff2(4 * dim, dim), ln2(dim) {}

void TransformerLayer::init(Rng& rng, double stddev) {
  attn.init(rng, stddev);
  ff1.init(rng, stddev);
  ff2.init(rng, stddev);
}

Matrix TransformerLayer::forward(const Matrix& x, Cache* cache) const {
  Matrix a = attn.forward(x, cache ? &cache->attn : nullptr);
  Matrix h1 = ln1.forward(x + a, cache ? &cache->ln1 : nullptr);
  Matrix pre = ff1.forward(h1);
  Matrix act = pre.unaryExpr([](double z) { return gelu(z); });
  Matrix f = ff2.forward(act);
  Matrix out = ln2.forward(h1 + f, cache ? &cache->ln2 : nullptr);
  if (cache) {
    cache->h1 = std::move(h1);
    cache->pre_act = std::move(pre);
  }
  return out;
}

Matrix TransformerLayer::backward(const Cache& c, const Matrix& dy) {
  const Matrix dsum2 = ln2.backward(c.ln2, dy);
  const Matrix act = c.pre_act.unaryExpr([](double z) { return gelu(z); });
  const Matrix dact = ff2.backward(act, dsum2);
  const Matrix dpre = dact.cwiseProduct(c.pre_act.unaryExpr([](double z) { return gelu_grad(z); }));
  const Matrix dh1 = dsum2 + ff1.backward(c.h1, dpre);
  const Matrix dsum1 = ln1.backward(c.ln1, dh1);
  return dsum1 + attn.backward(c.attn, dsum1);
}

void TransformerLayer::collect(std::vector<Param*>& out) {
  attn.collect(out);
  ln1.collect(out);
  ff1.collect(out);
  ff2.collect(out);
  ln2.collect(out);
}

void save_params(std::ostream& out, const std::vector<Param*>& params) {
  for (const Param* p : params) io::write_matrix(out, p->value);
}

void load_params(std::istream& in, const std::vector<Param*>& params) {
  for (Param* p : params) {
    io::read_matrix_into(in, p->value);
    if (!p->value.allFinite()) fail(ErrorCode::CorruptFile, "checkpoint holds non-finite weights");
    p->grad.setZero();
    p->m.setZero();
    p->v.setZero();
  }
}

}  // namespace numcomp::nn
