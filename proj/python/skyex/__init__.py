"""Skyline exploration: skylines, decisive subspaces, comparisons and projections."""

import json

from ._core import (
    Dataset,
    SkyexError,
    Snapshot,
    apply_query_config,
    compute_skyline,
    decisive_subspaces,
    dominates,
    load_csv,
    load_csv_text,
    partition,
    standardize,
    tsne,
)

__all__ = [
    "Dataset",
    "SkyexError",
    "Snapshot",
    "apply_query_config",
    "body",
    "compute_skyline",
    "decisive_subspaces",
    "dominates",
    "load_csv",
    "load_csv_text",
    "partition",
    "standardize",
    "tsne",
]


def body(text):
    """Parse a body returned by one of the Snapshot builders."""
    return json.loads(text)
