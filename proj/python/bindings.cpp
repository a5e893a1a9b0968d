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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>

#include "numcomp/corpus.hpp"
#include "numcomp/error.hpp"
#include "numcomp/pipeline.hpp"
#include "numcomp/serialize.hpp"

namespace py = pybind11;
using namespace numcomp;

namespace {

py::dict cell_dict(const ParsedCell& cell) {
  py::dict d;
  d["attr"] = cell.attribute;
  d["kind"] = std::string(to_string(cell.tag()));
  py::list payload;
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Scalar>) {
          payload.append(k.x);
        } else if constexpr (std::is_same_v<K, Range>) {
          payload.append(k.lo);
          payload.append(k.hi);
        } else if constexpr (std::is_same_v<K, Gaussian>) {
          payload.append(k.mean);
          payload.append(k.sd);
        } else {
          payload.append(k.raw);
        }
      },
      cell.kind);
  d["payload"] = payload;
  d["unit"] = cell.unit ? py::object(py::str(*cell.unit)) : py::object(py::none());
  return d;
}

RankedResult ranked(const std::vector<std::string>& ids) {
  RankedResult out;
  for (const auto& id : ids) out.push_back({id, 0.0});
  return out;
}

PipelineConfig config_from(const std::map<std::string, std::string>& values, std::uint64_t seed) {
  PipelineConfig c;
  c.seed = seed;
  apply_config(c, values);
  c.finalize();
  return c;
}

// Owns the whole embedding stack so the embedder's references stay valid.
class Model {
 public:
  static std::unique_ptr<Model> train(const std::string& tables,
                                      const std::map<std::string, std::string>& config,
                                      std::uint64_t seed) {
    auto m = std::unique_ptr<Model>(new Model(config_from(config, seed)));
    const auto raw = read_tables(tables, m->config_.delimiter);
    TrainedEncoder enc = train_encoder(raw, m->config_);
    m->encoder_trace_ = std::move(enc.trace);
    m->model_.emplace(std::move(enc.model));
    m->components_ = std::make_unique<ComponentEncoder>(*m->model_);
    TrainedAutoencoder ae = fit_autoencoder(
        collect_blocks(*m->components_, ingest(raw, m->units_)), m->config_, m->model_->dim());
    m->autoencoder_trace_ = std::move(ae.trace);
    m->ae_.emplace(std::move(ae.ae));
    m->embedder_ = std::make_unique<CompositeEmbedder>(*m->components_, *m->ae_);
    return m;
  }

  static std::unique_ptr<Model> load(const std::string& encoder, const std::string& autoencoder,
                                     const std::map<std::string, std::string>& config) {
    auto m = std::unique_ptr<Model>(new Model(config_from(config, 0)));
    m->model_.emplace(NumeralModel::load(encoder));
    m->components_ = std::make_unique<ComponentEncoder>(*m->model_);
    m->ae_.emplace(Autoencoder::load(autoencoder));
    m->embedder_ = std::make_unique<CompositeEmbedder>(*m->components_, *m->ae_);
    return m;
  }

  void save(const std::string& encoder, const std::string& autoencoder) {
    model_->save(encoder);
    ae_->save(autoencoder);
  }

  RowVector embed_cell(const std::string& raw, const std::string& header) const {
    return embedder_->embed(parse_cell(raw, header, units_));
  }

  RowVector value(double x) const { return components_->value(x); }

  py::tuple embed_tables(const std::string& tables, const std::string& kind) const {
    if (kind != "columns" && kind != "tuples") {
      fail(ErrorCode::InvalidArgument, "kind must be columns or tuples");
    }
    const auto items =
        embed_items(*embedder_, ingest(read_tables(tables, config_.delimiter), units_),
                    kind == "columns" ? AggregateKind::Column : AggregateKind::Tuple);
    std::vector<std::string> ids;
    Matrix vectors(static_cast<Eigen::Index>(items.size()), embedder_->autoencoder().code_dim());
    for (std::size_t i = 0; i < items.size(); ++i) {
      ids.push_back(items[i].id);
      vectors.row(static_cast<Eigen::Index>(i)) = items[i].vector;
    }
    return py::make_tuple(ids, vectors);
  }

  std::vector<py::dict> rotate(const std::string& attribute, double value, const std::string& unit,
                               const std::string& to_attribute, double to_value,
                               const std::string& to_unit) const {
    std::vector<py::dict> out;
    for (const auto& r : rotation_ablation(*embedder_, ParsedCell{attribute, Scalar{value}, unit},
                                           {{RotatedPart::Value, "", to_value},
                                            {RotatedPart::Attribute, to_attribute, 0},
                                            {RotatedPart::Unit, to_unit, 0}})) {
      py::dict d;
      d["label"] = r.label;
      d["similarity"] = r.similarity;
      d["drop"] = r.drop;
      out.push_back(d);
    }
    return out;
  }

  const std::vector<TraceRow>& encoder_trace() const { return encoder_trace_; }
  const std::vector<double>& autoencoder_trace() const { return autoencoder_trace_; }

 private:
  explicit Model(PipelineConfig config) : config_(std::move(config)), units_(load_units(config_)) {}

  PipelineConfig config_;
  UnitTable units_;
  std::optional<NumeralModel> model_;
  std::unique_ptr<ComponentEncoder> components_;
  std::optional<Autoencoder> ae_;
  std::unique_ptr<CompositeEmbedder> embedder_;
  std::vector<TraceRow> encoder_trace_;
  std::vector<double> autoencoder_trace_;
};

}  // namespace

PYBIND11_MODULE(_numcomp, m) {
  m.doc() = "Composite numeric embeddings for table data";

  static PyObject* error_type = PyErr_NewException("numcomp.Error", PyExc_RuntimeError, nullptr);
  m.attr("Error") = py::handle(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("category") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  m.def(
      "parse_cell",
      [](const std::string& raw, const std::string& header) {
        return cell_dict(parse_cell(raw, header, UnitTable::seed()));
      },
      py::arg("raw"), py::arg("header") = "");
  m.def(
      "serialize_column",
      [](const std::string& header, const std::vector<std::string>& cells) {
        return serialize_column(header, cells).text();
      },
      py::arg("header"), py::arg("cells"));
  m.def(
      "serialize_row",
      [](const std::vector<std::string>& headers, const std::vector<std::string>& cells) {
        return serialize_row(headers, cells).text();
      },
      py::arg("headers"), py::arg("cells"));

  py::class_<MagnitudeEmbedder>(m, "MagnitudeEmbedder")
      .def(py::init([](int dim, double lo, double hi, std::uint64_t seed, bool log_map) {
             MagnitudeConfig c;
             c.dim = dim;
             c.min = lo;
             c.max = hi;
             c.seed = seed;
             c.log_map = log_map;
             return MagnitudeEmbedder(c);
           }),
           py::arg("dim") = 64, py::arg("min") = -1e6, py::arg("max") = 1e6, py::arg("seed") = 0,
           py::arg("log_map") = false)
      .def_property_readonly("dim", &MagnitudeEmbedder::dim)
      .def("angle", &MagnitudeEmbedder::angle)
      .def("embed", &MagnitudeEmbedder::embed);

  m.def("d_num", &d_num);
  m.def("d_cl", [](std::pair<double, double> a, std::pair<double, double> b) {
    return d_cl({a.first, a.second}, {b.first, b.second});
  });
  m.def("d_iou", [](std::pair<double, double> a, std::pair<double, double> b) {
    return d_iou({a.first, a.second}, {b.first, b.second});
  });
  m.def("d_w2", [](std::pair<double, double> a, std::pair<double, double> b) {
    return d_w2({a.first, a.second}, {b.first, b.second});
  });

  m.def(
      "recall_at_k",
      [](const std::vector<std::string>& ranking, const std::set<std::string>& relevant, int k) {
        return recall_at_k(ranked(ranking), relevant, k);
      },
      py::arg("ranking"), py::arg("relevant"), py::arg("k") = 10);
  m.def(
      "average_precision_at_k",
      [](const std::vector<std::string>& ranking, const std::set<std::string>& relevant, int k) {
        return average_precision_at_k(ranked(ranking), relevant, k);
      },
      py::arg("ranking"), py::arg("relevant"), py::arg("k") = 10);
  m.def(
      "reciprocal_rank_at_k",
      [](const std::vector<std::string>& ranking, const std::set<std::string>& relevant, int k) {
        return reciprocal_rank_at_k(ranked(ranking), relevant, k);
      },
      py::arg("ranking"), py::arg("relevant"), py::arg("k") = 10);

  py::class_<FlatIndex>(m, "FlatIndex")
      .def(py::init<int>(), py::arg("dim"))
      .def_property_readonly("dim", &FlatIndex::dim)
      .def("__len__", &FlatIndex::size)
      .def("ids", &FlatIndex::ids)
      .def("add", &FlatIndex::add, py::arg("id"), py::arg("vector"))
      .def(
          "query",
          [](const FlatIndex& index, const RowVector& v, int k, const std::string& exclude) {
            std::vector<std::pair<std::string, double>> out;
            for (const Hit& h : index.query(v, k, exclude)) out.emplace_back(h.id, h.score);
            return out;
          },
          py::arg("vector"), py::arg("k") = 10, py::arg("exclude") = "")
      .def("save", &FlatIndex::save)
      .def_static("load", &FlatIndex::load);

  m.def(
      "generate_corpus",
      [](const std::string& dir, std::uint64_t seed, int tables) {
        CorpusSpec spec = default_corpus_spec();
        if (tables > 0) spec.tables = tables;
        write_corpus(generate_corpus(spec, seed), dir);
      },
      py::arg("dir"), py::arg("seed") = 0, py::arg("tables") = 0);

  py::class_<Model>(m, "Model")
      .def_static("train", &Model::train, py::arg("tables"),
                  py::arg("config") = std::map<std::string, std::string>{}, py::arg("seed") = 0)
      .def_static("load", &Model::load, py::arg("encoder"), py::arg("autoencoder"),
                  py::arg("config") = std::map<std::string, std::string>{})
      .def("save", &Model::save, py::arg("encoder"), py::arg("autoencoder"))
      .def("embed_cell", &Model::embed_cell, py::arg("raw"), py::arg("header"))
      .def("value", &Model::value, py::arg("x"))
      .def("embed_tables", &Model::embed_tables, py::arg("tables"), py::arg("kind") = "columns")
      .def("rotate", &Model::rotate, py::arg("attribute") = "Tumor size", py::arg("value") = 20.0,
           py::arg("unit") = "cm", py::arg("to_attribute") = "Sample size",
           py::arg("to_value") = 200.0, py::arg("to_unit") = "mm")
      .def_property_readonly("encoder_trace",
                             [](const Model& m) {
                               std::vector<double> out;
                               for (const auto& r : m.encoder_trace()) out.push_back(r.loss);
                               return out;
                             })
      .def_property_readonly("autoencoder_trace", &Model::autoencoder_trace);
}
