"""Discrete Bayes nets for model-based recognition.

Thin wrapper over the C++ library: BNET parsing and serialization, exact
inference by enumeration, polytree propagation, and the eigenvector solution
of a two-hypothesis net with shared evidence leaves.
"""

from ._recognet import (
    BayesNet,
    Document,
    RecognetError,
    __version__,
    compare,
    infer,
    load_bnet,
    parse_bnet,
    posterior,
    reverse_arc,
    serialize_bnet,
    solve_shared_leaf_pair,
)

__all__ = [
    "BayesNet",
    "Document",
    "RecognetError",
    "__version__",
    "compare",
    "infer",
    "load_bnet",
    "parse_bnet",
    "posterior",
    "reverse_arc",
    "serialize_bnet",
    "solve_shared_leaf_pair",
]
