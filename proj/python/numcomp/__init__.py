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

"""Composite numeric embeddings for table data."""

from ._numcomp import (
    Error,
    FlatIndex,
    MagnitudeEmbedder,
    Model,
    average_precision_at_k,
    d_cl,
    d_iou,
    d_num,
    d_w2,
    generate_corpus,
    parse_cell,
    recall_at_k,
    reciprocal_rank_at_k,
    serialize_column,
    serialize_row,
)

__all__ = [
    "Error",
    "FlatIndex",
    "MagnitudeEmbedder",
    "Model",
    "average_precision_at_k",
    "d_cl",
    "d_iou",
    "d_num",
    "d_w2",
    "generate_corpus",
    "parse_cell",
    "recall_at_k",
    "reciprocal_rank_at_k",
    "serialize_column",
    "serialize_row",
]
