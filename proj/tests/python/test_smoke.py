# Copyright 2026 The numcomp Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math
import os
from pathlib import Path

import numpy as np
import pytest

import numcomp

FIXTURES = Path(os.environ.get("NUMCOMP_FIXTURES", Path(__file__).resolve().parents[2] / "data" / "fixtures"))


def test_parse_cell_kinds():
    assert numcomp.parse_cell("3,000 mL", "Blood loss") == {
        "attr": "Blood loss", "kind": "scalar", "payload": [3000.0], "unit": "mL"}
    assert numcomp.parse_cell("76-118", "BP (mmHg)")["kind"] == "range"
    g = numcomp.parse_cell("23.4 ± 4.1", "BMI (kg/m2)")
    assert g["kind"] == "gaussian" and g["payload"] == [23.4, 4.1]
    assert numcomp.parse_cell("T2", "Tumor Stage")["kind"] == "text"


def test_serialization():
    assert numcomp.serialize_column("Age", ["28", "34"]) == "[CLS] Age [SEP] 28 [SEP] 34 [SEP]"
    assert numcomp.serialize_row(["Age", "Sex"], ["28", "M"]) == "[CLS] Age 28 [SEP] Sex M [SEP]"
    with pytest.raises(numcomp.Error) as info:
        numcomp.serialize_row(["Age"], ["28", "M"])
    assert info.value.category == "LengthMismatch"


def test_magnitude_embedder_is_monotone():
    e = numcomp.MagnitudeEmbedder(dim=16, seed=3)
    zero = e.embed(0.0)
    assert zero.shape == (16,)
    dists = [np.linalg.norm(e.embed(float(n)) - zero) for n in range(101)]
    assert all(b >= a for a, b in zip(dists, dists[1:]))
    assert np.isclose(np.linalg.norm(e.embed(42.0)), 1.0)


def test_distances():
    assert numcomp.d_num(3.0, 7.5) == 4.5
    assert math.isclose(numcomp.d_cl((1, 10), (1, 11)), math.sqrt(1.25))
    assert math.isclose(numcomp.d_iou((0, 10), (5, 15)), 2 / 3)
    assert math.isclose(numcomp.d_w2((0, 1), (3, 5)), 5.0)


def test_ranking_metrics():
    ranking = ["a", "x", "b", "y"]
    assert numcomp.recall_at_k(ranking, {"a", "b"}, 10) == 1.0
    assert numcomp.average_precision_at_k(ranking, {"a", "b"}, 10) == 5 / 6
    assert numcomp.reciprocal_rank_at_k(["x", "a"], {"a"}, 10) == 0.5


def test_flat_index_matches_numpy(tmp_path):
    rng = np.random.default_rng(0)
    vecs = rng.normal(size=(200, 8))
    index = numcomp.FlatIndex(8)
    for i, v in enumerate(vecs):
        index.add(f"v{i:03d}", v)
    q = rng.normal(size=8)
    unit = vecs / np.linalg.norm(vecs, axis=1, keepdims=True)
    expected = [f"v{i:03d}" for i in np.argsort(-(unit @ (q / np.linalg.norm(q))), kind="stable")[:5]]
    assert [h[0] for h in index.query(q, 5)] == expected
    path = tmp_path / "v.idx"
    index.save(str(path))
    again = numcomp.FlatIndex.load(str(path))
    assert len(again) == 200 and again.query(q, 5) == index.query(q, 5)
    with pytest.raises(numcomp.Error) as info:
        numcomp.FlatIndex(8).query(q, 5)
    assert info.value.category == "EmptyIndex"


def test_train_embed_and_reload(tmp_path):
    tables = str(FIXTURES / "corpus20" / "tables")
    cfg = {"train.steps": "20", "autoencoder.steps": "10"}
    model = numcomp.Model.train(tables, cfg, seed=5)
    assert len(model.encoder_trace) == 20 and len(model.autoencoder_trace) == 10
    ids, vectors = model.embed_tables(tables, "columns")
    assert vectors.shape == (len(ids), 64) and len(ids) == 100
    cell = model.embed_cell("20 cm", "Tumor size")
    assert np.isclose(cell.mean(), 0.0, atol=1e-9)

    enc, ae = str(tmp_path / "enc.bin"), str(tmp_path / "ae.bin")
    model.save(enc, ae)
    again = numcomp.Model.load(enc, ae)
    reloaded = again.embed_cell("20 cm", "Tumor size")
    # Checkpoints hold float32 weights.
    np.testing.assert_allclose(reloaded, cell, atol=1e-5)
    np.testing.assert_array_equal(numcomp.Model.load(enc, ae).embed_cell("20 cm", "Tumor size"), reloaded)
    rows = again.rotate()
    assert [r["label"].split(":")[0] for r in rows] == ["reference", "value", "attribute", "unit"]
