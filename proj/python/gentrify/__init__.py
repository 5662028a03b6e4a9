# Copyright 2026 The gentrify authors
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

"""Street-level gentrification detection: C++ core bindings.

The heavy lifting (Siamese change detection, gated-attention MIL, the
synthetic oracle city and the pipeline stages) lives in the compiled
``gentrify._core`` module; this package re-exports its surface.
"""

from gentrify._core import (  # noqa: F401
    GentrifyValidationError,
    __version__,
    aggregate,
    alpha_grad_check,
    attention_grad_check,
    attention_weights,
    bag_bce_loss,
    change_score,
    classify_pair,
    compute_metrics,
    default_config,
    haversine_distance,
    init_attention,
    neighborhood_score,
    pair_bce_loss,
    pair_embedding,
    point_in_tract,
    render_scene_pair,
    run_stage,
    sample_road_points,
    stratified_split,
)

__all__ = [
    "GentrifyValidationError",
    "aggregate",
    "alpha_grad_check",
    "attention_grad_check",
    "attention_weights",
    "bag_bce_loss",
    "change_score",
    "classify_pair",
    "compute_metrics",
    "default_config",
    "haversine_distance",
    "init_attention",
    "neighborhood_score",
    "pair_bce_loss",
    "pair_embedding",
    "point_in_tract",
    "render_scene_pair",
    "run_stage",
    "sample_road_points",
    "stratified_split",
]
