"""Session and customer embedding pipeline.

Thin python surface over the compiled core: metric primitives plus the
file-based generate/train/evaluate commands. Reports are returned as plain
dicts parsed from the machine-readable JSON the core writes.
"""

import json as _json

from dce._core import auroc, cosine_distance, macro_auroc, recall_at_rate
from dce import _core as _core

__all__ = [
    "auroc",
    "cosine_distance",
    "macro_auroc",
    "recall_at_rate",
    "generate",
    "train",
    "evaluate",
]


def generate(out, config="", seed=None):
    """Generate a synthetic population dataset at `out`; returns a summary dict."""
    return _json.loads(_core.generate(out, config, seed))


def train(stage, data, out, sae="", config=""):
    """Train one pipeline stage ("sae", "dce", "fused" or "ema") to `out`."""
    _core.train(stage, data, out, sae, config)


def evaluate(task, data, sae, dce, out, fused="", ema="", rate=-1.0, config=""):
    """Evaluate "next", "intent", "call" or "fraud"; returns the report dict."""
    return _json.loads(_core.evaluate(task, data, sae, dce, out, fused, ema, rate, config))
