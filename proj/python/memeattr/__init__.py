"""Retrieval-augmented harmful meme attribution.

Thin wrappers over the native core. Everything here runs offline; remote
models are reached through ``run_cli`` with endpoint flags or a config file.
"""

import json

from ._core import (
    Error,
    bleu4,
    build_index,
    parse_decision,
    prf1,
    query_set,
    relevance_posterior,
    rouge_l,
    run_cli,
    tokenize,
    version,
)

__all__ = [
    "Error",
    "bleu4",
    "build_index",
    "evaluate",
    "parse_decision",
    "prf1",
    "query_index",
    "query_set",
    "relevance_posterior",
    "rouge_l",
    "run_cli",
    "tokenize",
    "version",
]


def query_index(index_path, text, k=5, w_bm25=0.5):
    """Hybrid top-k hits for one query as a list of dicts."""
    from ._core import query_index_json

    return json.loads(query_index_json(str(index_path), text, k, w_bm25))


def evaluate(pred_path, gold_path):
    """Evaluation report for a decisions file against a dataset file."""
    from ._core import evaluate_json

    return json.loads(evaluate_json(str(pred_path), str(gold_path)))
