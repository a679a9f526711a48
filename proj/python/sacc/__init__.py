# Copyright 2026 The SACC Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""2-D t-SNE of a CSV feature matrix: tsne_embed.py IN OUT SEED."""
"""Contrastive clustering with one strong and two weak augmented views."""

from sacc._core import (
    ConfigError,
    DataError,
    NumericalError,
    accuracy,
    ari,
    cluster_pair_loss,
    evaluate,
    evaluate_labels,
    instance_pair_loss,
    make_synthetic,
    nmi,
    resolved_config,
    sample_views,
    strong_ops,
    total_loss,
    train,
)

__all__ = [
    "ConfigError",
    "DataError",
    "NumericalError",
    "accuracy",
    "ari",
    "cluster_pair_loss",
    "evaluate",
    "evaluate_labels",
    "instance_pair_loss",
    "make_synthetic",
    "nmi",
    "resolved_config",
    "sample_views",
    "strong_ops",
    "total_loss",
    "train",
]
