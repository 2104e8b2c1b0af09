# Copyright 2026 The lpbfseg Authors
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
"""Streaming segmentation of LPBF thermal frames.

Frames are float32 arrays of shape (height, width); sequences are
(frames, height, width). Label arrays use 0 background, 1 foreground and
2 excluded.
"""

import json

from . import _core
from ._core import (
    ConfigError,
    CorruptRecordError,
    ShapeError,
    compute_cutoff,
    confusion,
    decode,
    encode,
    f1,
    global_auto_threshold,
    known_algorithms,
    read_sequence,
    spatter_outside_fraction,
    threshold_fixed,
    write_sequence,
)

__all__ = [
    "ConfigError", "CorruptRecordError", "ShapeError", "Segmenter", "batch_config", "bench",
    "compute_cutoff", "confusion", "decode", "encode", "evaluate", "f1", "global_auto_threshold",
    "known_algorithms", "presets", "read_sequence", "simulate", "spatter_outside_fraction",
    "threshold_fixed", "tune", "write_sequence",
]


def _dump(obj):
    return "" if obj is None else json.dumps(obj)


def Segmenter(name, params=None, preset="default"):
    """Streaming segmenter; call .step(frame) once per frame, in order."""
    return _core.Segmenter(name, _dump(params), preset)


def presets():
    return json.loads(_core.presets_json())


def batch_config(name="standard", seed=42):
    return json.loads(_core.batch_config_json(name, seed))


def simulate(config=None):
    """Returns (frames, labels, laser, info); laser holds (x, y) or None per frame."""
    frames, labels, laser, info = _core.simulate(_dump(config))
    info = dict(info)
    info["config"] = json.loads(info.pop("config_json"))
    return frames, labels, laser, info


def evaluate(name, frames, labels, params=None, preset="default"):
    return _core.evaluate(name, frames, labels, _dump(params), preset)


def tune(name, frames, labels, trials, seed=0, space=None):
    return json.loads(_core.tune(name, frames, labels, trials, seed, _dump(space)))


def bench(name, frames, params=None):
    return json.loads(_core.bench(name, frames, _dump(params)))
