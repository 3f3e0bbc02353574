"""
Graph Serialization
-------------------
Plain-text edge lists (first line ``n``, then ``src dst`` per line) and dense
matrix CSVs for debugging mixing matrices.
"""

import logging
import os

import numpy as np
import pandas as pd

from graph.digraph import Digraph

logger = logging.getLogger(__name__)


def write_edge_list(graph: Digraph, path: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as f:
        f.write(f"{graph.n}\n")
        for src, dst in graph.sorted_edges():
            f.write(f"{src} {dst}\n")
    logger.info(f"Edge list saved: {path} ({len(graph.edges)} edges)")


def read_edge_list(path: str, strict: bool = True) -> Digraph:
    if not os.path.exists(path):
        raise FileNotFoundError(f"Edge list not found: {path}")
    with open(path, "r") as f:
        lines = [line.strip() for line in f if line.strip() and not line.startswith("#")]
    if not lines:
        raise ValueError(f"Edge list is empty: {path}")
    try:
        n = int(lines[0])
        edges = [tuple(int(tok) for tok in line.split()) for line in lines[1:]]
    except ValueError as e:
        raise ValueError(f"Malformed edge list {path}: {e}") from e
    bad = [e for e in edges if len(e) != 2]
    if bad:
        raise ValueError(f"Malformed edge list {path}: expected 'src dst', got {bad[0]}")
    return Digraph.from_edges(n, edges, strict=strict)


def write_matrix_csv(matrix: np.ndarray, path: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    pd.DataFrame(np.asarray(matrix)).to_csv(path, index=False, header=False, float_format="%.17g")
    logger.info(f"Matrix saved: {path}")


def read_matrix_csv(path: str) -> np.ndarray:
    if not os.path.exists(path):
        raise FileNotFoundError(f"Matrix CSV not found: {path}")
    return pd.read_csv(path, header=None).to_numpy(dtype=float)
